from pathlib import Path
from typing import Optional

import numpy as np

from src.core.constants import SVG_LABEL_OFFSET, SVG_NODE_RADIUS, SVG_RADIUS, SVG_SIZE
from src.core.errors import ShapeError
from src.core.logger import get_logger
from src.models.certificate import Certificate
from src.models.graph import Graph

logger = get_logger(__name__)


def _screen(points: np.ndarray) -> np.ndarray:
    """Unit-disk coordinates to viewport coordinates, y pointing up."""
    center = SVG_SIZE / 2
    return np.column_stack([center + SVG_RADIUS * points[:, 0], center - SVG_RADIUS * points[:, 1]])


def _layout(g: Graph, embedding: Optional[np.ndarray]) -> np.ndarray:
    if embedding is None:
        angles = np.pi / 2 - 2 * np.pi * np.arange(g.n) / g.n
        return np.column_stack([np.cos(angles), np.sin(angles)])
    embedding = np.asarray(embedding, dtype=float).reshape(g.n, -1)
    if embedding.shape[1] == 1:
        values = embedding[:, 0]
        spread = values.max() - values.min()
        x = np.zeros(g.n) if spread == 0 else 2 * (values - values.min()) / spread - 1
        return np.column_stack([x, np.zeros(g.n)])
    if embedding.shape[1] != 2:
        raise ShapeError(f"cannot draw a {embedding.shape[1]}-dimensional embedding")
    return embedding


class DrawingRepository:

    @staticmethod
    def render(g: Graph, embedding: Optional[np.ndarray] = None) -> str:
        """
        SVG drawing of g.

        Plane embeddings are drawn on the unit circle scaled to the viewport,
        line embeddings along the horizontal diameter. Without an embedding
        the nodes sit evenly on the circle in index order. Every node is one
        circle element with a text label and every edge one line element.
        """
        xy = _screen(_layout(g, embedding))
        center = SVG_SIZE / 2
        rows: list[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
            'xmlns="http://www.w3.org/2000/svg">',
            f'<ellipse cx="{center:.3f}" cy="{center:.3f}" rx="{SVG_RADIUS}" ry="{SVG_RADIUS}" '
            'fill="none" stroke="#cccccc" stroke-dasharray="4 4"/>',
        ]
        for i, j in g.edges:
            rows.append(
                f'<line x1="{xy[i, 0]:.3f}" y1="{xy[i, 1]:.3f}" x2="{xy[j, 0]:.3f}" y2="{xy[j, 1]:.3f}" '
                'stroke="black" stroke-width="1.5"/>'
            )
        for i in range(g.n):
            rows.append(f'<circle cx="{xy[i, 0]:.3f}" cy="{xy[i, 1]:.3f}" r="{SVG_NODE_RADIUS}" fill="#1f77b4"/>')
            # labels sit outside the circle, radially from the center
            offset = xy[i] - center
            norm = float(np.hypot(*offset))
            direction = offset / norm if norm > 0 else np.array([0.0, -1.0])
            lx, ly = xy[i] + SVG_LABEL_OFFSET * direction
            rows.append(
                f'<text x="{lx:.3f}" y="{ly:.3f}" font-size="12" text-anchor="middle" '
                f'dominant-baseline="middle">{i + 1}</text>'
            )
        rows.append("</svg>")
        return "\n".join(rows) + "\n"

    @staticmethod
    def render_certificate(certificate: Certificate) -> str:
        return DrawingRepository.render(certificate.graph, certificate.embedding)

    @staticmethod
    def save(certificate: Certificate, path: str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(DrawingRepository.render_certificate(certificate), encoding="utf-8")
        logger.info(f"Drawing written to {path}")
