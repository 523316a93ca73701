"""
Health check endpoint.

Provides API health status and the numerical stack in use.
"""

from datetime import datetime, timezone

import numpy as np
import scipy
from fastapi import APIRouter

from src import __version__
from src.core.config import settings

router = APIRouter()


@router.get("/health")
async def health_check():
    """
    Health check endpoint.

    Returns:
        - status: API health status
        - timestamp: Current server time (UTC)
        - version: API version
        - numpy / scipy: library versions doing the linear algebra
        - eigen_tolerance: default relative tolerance factor
    """
    return {
        "status": "healthy",
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "eigen_tolerance": settings.EIGEN_TOLERANCE,
    }
