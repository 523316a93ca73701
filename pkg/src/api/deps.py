from contextlib import contextmanager
from typing import Iterator, Optional

from fastapi import HTTPException, Query, status
from pydantic import BaseModel

from src.core.config import settings
from src.core.errors import (
    CertificateFormatError,
    DegeneracyError,
    GraphParseError,
    NullspaceEmbedError,
    OracleSizeError,
    PreconditionError,
)
from src.core.logger import get_logger

logger = get_logger(__name__)


class RunOptions(BaseModel):
    tol: float
    seed: int


def get_run_options(
    tol: Optional[float] = Query(None, gt=0, description="Relative tolerance factor"),
    seed: Optional[int] = Query(None, ge=0, description="0 is deterministic"),
) -> RunOptions:
    return RunOptions(
        tol=settings.EIGEN_TOLERANCE if tol is None else tol,
        seed=settings.DEFAULT_SEED if seed is None else seed,
    )


@contextmanager
def library_errors() -> Iterator[None]:
    """
    Translate library exceptions into HTTP errors.

    Input and precondition failures become 422, numerical degeneracies 409.
    """
    try:
        yield
    except (GraphParseError, PreconditionError, OracleSizeError, CertificateFormatError) as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    except DegeneracyError as e:
        logger.warning(f"Degenerate run: {e}")
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))
    except NullspaceEmbedError as e:
        logger.error(f"Library failure: {e}", exc_info=True)
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
