from typing import Annotated

from fastapi import APIRouter, Depends

from src.api import deps
from src.repositories.certificate import CertificateRepository
from src.schemas.certificate import CertificateSchema
from src.schemas.graph import GraphIn
from src.services.line import LineEmbeddingService
from src.services.plane import PlaneEmbeddingService
from src.services.verification import VerificationService

router = APIRouter()


@router.post("/line", response_model=CertificateSchema)
def embed_line(
    graph_in: GraphIn,
    options: Annotated[deps.RunOptions, Depends(deps.get_run_options)],
) -> dict:
    """
    Path embedding of a connected graph, or a corank >= 2 certificate.
    """
    with deps.library_errors():
        certificate = LineEmbeddingService.embed_line(graph_in.to_graph(), factor=options.tol, seed=options.seed)
        VerificationService.attach(certificate)
    return CertificateRepository.to_document(certificate)


@router.post("/plane", response_model=CertificateSchema)
def embed_plane(
    graph_in: GraphIn,
    options: Annotated[deps.RunOptions, Depends(deps.get_run_options)],
) -> dict:
    """
    Outerplanar embedding of a 2-connected graph, or a corank >= 3 certificate.
    """
    with deps.library_errors():
        certificate = PlaneEmbeddingService.embed_plane(graph_in.to_graph(), factor=options.tol, seed=options.seed)
        VerificationService.attach(certificate)
    return CertificateRepository.to_document(certificate)
