import json
import sys
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from src.core.constants import FLOAT_SIGNIFICANT_DIGITS
from src.core.errors import CertificateFormatError
from src.core.logger import get_logger
from src.models.certificate import Certificate
from src.schemas.certificate import CertificateSchema

logger = get_logger(__name__)

_INDENT = "  "


def _number(value: float) -> str:
    if not np.isfinite(value):
        raise CertificateFormatError(f"non-finite number {value!r}")
    return np.format_float_scientific(value, precision=FLOAT_SIGNIFICANT_DIGITS - 1, unique=False)


def _encode(value: Any, depth: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = _INDENT * (depth + 1)
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, depth + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + _INDENT * depth + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_encode(v, depth + 1) for v in value) + "]"
        pad = _INDENT * (depth + 1)
        return "[\n" + ",\n".join(pad + _encode(v, depth + 1) for v in value) + "\n" + _INDENT * depth + "]"
    if isinstance(value, (bool, np.bool_)) or value is None or isinstance(value, str):
        return json.dumps(bool(value) if isinstance(value, np.bool_) else value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _number(float(value))
    raise CertificateFormatError(f"cannot encode {type(value).__name__}")


class CertificateRepository:

    @staticmethod
    def to_document(certificate: Certificate) -> dict[str, Any]:
        """Plain document of a certificate: 1-based edges, dense matrix, embedding rows."""
        return {
            "kind": certificate.kind.value,
            "dimension": certificate.dimension,
            "claimed_corank": certificate.claimed_corank,
            "n": certificate.graph.n,
            "edges": certificate.graph.one_based_edges(),
            "matrix": certificate.matrix.dense.tolist(),
            "eigenvalues": [float(x) for x in certificate.eigen.eigenvalues],
            "tolerance": float(certificate.tolerance),
            "embedding": None if certificate.embedding is None else np.asarray(certificate.embedding).tolist(),
            "report": certificate.report,
        }

    @staticmethod
    def dumps(certificate: Certificate) -> str:
        return _encode(CertificateRepository.to_document(certificate)) + "\n"

    @staticmethod
    def loads(text: str) -> CertificateSchema:
        """
        Parse and validate a certificate document.

        Raises:
            CertificateFormatError: If the text is not JSON or does not match
                the certificate schema
        """
        try:
            return CertificateSchema.model_validate(json.loads(text))
        except json.JSONDecodeError as e:
            raise CertificateFormatError(f"line {e.lineno}: {e.msg}")
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"]) or "document"
            raise CertificateFormatError(f"{location}: {first['msg']}")

    @staticmethod
    def save(certificate: Certificate, path: str) -> None:
        Path(path).write_text(CertificateRepository.dumps(certificate), encoding="utf-8")
        logger.info(f"Certificate written to {path}")

    @staticmethod
    def load(source: str) -> CertificateSchema:
        """Read a certificate from a path, or from standard input when source is "-"."""
        if source == "-":
            return CertificateRepository.loads(sys.stdin.read())
        return CertificateRepository.loads(Path(source).read_text(encoding="utf-8"))
