from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src import __version__
from src.api.v1.endpoints import certificates, embeddings, health
from src.core.config import settings

app = FastAPI(
    title=settings.PROJECT_NAME,
    version=__version__,
    openapi_url=f"{settings.API_V1_STR}/openapi.json"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)


# Health check endpoint
app.include_router(health.router, prefix=settings.API_V1_STR, tags=["health"])

app.include_router(embeddings.router, prefix=f"{settings.API_V1_STR}/embeddings", tags=["embeddings"])
app.include_router(certificates.router, prefix=f"{settings.API_V1_STR}/certificates", tags=["certificates"])

@app.get("/")
async def root():
    return {"message": settings.PROJECT_NAME}
