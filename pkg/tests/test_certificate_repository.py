"""
Tests for certificate documents on disk and on the wire.
"""
import io
import json

import pytest

from src.core.errors import CertificateFormatError
from src.models.certificate import CertificateKind
from src.repositories.certificate import CertificateRepository
from tests.factories import CertificateFactory, MatrixFactory


class TestDumps:
    """JSON text with full-precision floats."""

    def test_floats_have_seventeen_digits(self):
        text = CertificateFactory.negative_all_ones_text(4)

        assert "-1.0000000000000000e+00" in text
        assert text.endswith("\n")

    def test_document_fields(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))

        assert data["kind"] == "HighCorankMatrix"
        assert data["edges"] == [[1, 2], [1, 3], [2, 3]]
        assert data["embedding"] is None
        assert len(data["matrix"]) == 3 and len(data["eigenvalues"]) == 3

    def test_non_finite_value(self):
        certificate = CertificateFactory.high_corank(MatrixFactory.negative_all_ones(3))
        certificate.report["bad"] = float("nan")

        with pytest.raises(CertificateFormatError):
            CertificateRepository.dumps(certificate)


class TestLoads:
    """Validation of incoming documents."""

    def test_loads_written_text(self):
        document = CertificateRepository.loads(CertificateFactory.negative_all_ones_text(4))

        assert document.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert document.claimed_corank == 3
        assert document.edges[0] == (1, 2)

    def test_not_json(self):
        with pytest.raises(CertificateFormatError, match="line 1"):
            CertificateRepository.loads("{kind: ")

    def test_missing_field(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))
        del data["matrix"]

        with pytest.raises(CertificateFormatError, match="matrix"):
            CertificateRepository.loads(json.dumps(data))

    def test_high_corank_with_embedding(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))
        data["embedding"] = [[0.0, 1.0], [1.0, 0.0], [-1.0, 0.0]]

        with pytest.raises(CertificateFormatError, match="no embedding"):
            CertificateRepository.loads(json.dumps(data))

    def test_embedding_kind_needs_embedding(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))
        data["kind"] = "OuterplanarEmbedding"

        with pytest.raises(CertificateFormatError):
            CertificateRepository.loads(json.dumps(data))

    def test_matrix_shape(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))
        data["matrix"] = data["matrix"][:2]

        with pytest.raises(CertificateFormatError):
            CertificateRepository.loads(json.dumps(data))

    def test_edge_out_of_range(self):
        data = json.loads(CertificateFactory.negative_all_ones_text(3))
        data["edges"][0] = [1, 7]

        with pytest.raises(CertificateFormatError):
            CertificateRepository.loads(json.dumps(data))


class TestFiles:
    """Reading and writing certificate files."""

    def test_save_and_load(self, tmp_path):
        certificate = CertificateFactory.high_corank(MatrixFactory.negative_all_ones(4))
        target = tmp_path / "k4.json"

        CertificateRepository.save(certificate, str(target))
        document = CertificateRepository.load(str(target))

        assert document.n == 4
        assert document.tolerance == pytest.approx(certificate.tolerance)

    def test_load_from_stdin(self, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(CertificateFactory.negative_all_ones_text(3)))

        assert CertificateRepository.load("-").n == 3
