"""
Tests for health check endpoint.
"""

from datetime import datetime

import pytest
from httpx import AsyncClient

from src import __version__
from src.core.config import settings


class TestHealthCheck:
    """Test health check endpoint."""

    @pytest.mark.asyncio
    async def test_health_check_returns_healthy_status(self, client: AsyncClient):
        """Test that health check reports status, version and the numerical stack."""
        response = await client.get(f"{settings.API_V1_STR}/health")

        assert response.status_code == 200
        data = response.json()

        assert data["status"] == "healthy"
        assert data["version"] == __version__
        assert data["eigen_tolerance"] == settings.EIGEN_TOLERANCE
        assert "numpy" in data and "scipy" in data

    @pytest.mark.asyncio
    async def test_health_check_timestamp_is_valid_iso_format(self, client: AsyncClient):
        """Test that health check returns valid ISO timestamp."""
        response = await client.get(f"{settings.API_V1_STR}/health")

        assert response.status_code == 200
        timestamp = datetime.fromisoformat(response.json()["timestamp"])
        assert timestamp.tzinfo is not None

    @pytest.mark.asyncio
    async def test_root(self, client: AsyncClient):
        response = await client.get("/")

        assert response.json() == {"message": settings.PROJECT_NAME}
