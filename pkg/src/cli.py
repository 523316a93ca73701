"""
Command-line surface.

    nullspace-embed embed1d GRAPH [--tol T] [--seed S] [--out PATH]
    nullspace-embed embed2d GRAPH [--tol T] [--seed S] [--format json|svg|both] [--out PATH]
    nullspace-embed verify CERTIFICATE [--tol T]
    nullspace-embed crosscheck [--dim 1|2] [--cap N] [--workers W]

GRAPH and CERTIFICATE are paths, or "-" for standard input. Exit codes:
0 embedding (or every check passed), 2 high-corank certificate,
1 error, 3 verification failed.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from src.core.config import settings
from src.core.constants import EXIT_EMBEDDING, EXIT_ERROR, EXIT_HIGH_CORANK, EXIT_VERIFY_FAILED
from src.core.errors import NullspaceEmbedError
from src.core.logger import get_logger
from src.models.certificate import Certificate
from src.repositories.certificate import CertificateRepository
from src.repositories.drawing import DrawingRepository
from src.repositories.graph import GraphRepository
from src.schemas.run_config import Command, OutputFormat, RunConfig
from src.services.crosscheck import CrosscheckService
from src.services.line import LineEmbeddingService
from src.services.plane import PlaneEmbeddingService
from src.services.spectra import SpectraService
from src.services.verification import VerificationService

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nullspace-embed",
        description="Path and outerplanar embeddings from G-matrix nullspaces, or a high-corank certificate.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        (Command.EMBED1D, "embed a connected graph in the line"),
        (Command.EMBED2D, "embed a 2-connected graph on the unit circle"),
    ):
        sub = commands.add_parser(name.value, help=help_text)
        sub.add_argument("input", help='edge-list file, or "-" for standard input')
        sub.add_argument("--tol", type=float, help="relative tolerance factor")
        sub.add_argument("--seed", type=int, help="0 is deterministic; others draw random edge entries")
        sub.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
        sub.add_argument("--out", help="output path; the certificate goes to standard output when absent")

    verify = commands.add_parser(Command.VERIFY.value, help="re-check a certificate")
    verify.add_argument("input", help='certificate JSON, or "-" for standard input')
    verify.add_argument("--tol", type=float, help="relative tolerance factor; the stored tolerance when absent")
    verify.add_argument("--out", help="write the report here instead of standard output")

    crosscheck = commands.add_parser(Command.CROSSCHECK.value, help="compare a driver with its oracle on all small graphs")
    crosscheck.add_argument("--dim", type=int, default=1)
    crosscheck.add_argument("--cap", type=int, default=6, help=f"largest n, at most {settings.CROSSCHECK_SIZE_CAP}")
    crosscheck.add_argument("--tol", type=float)
    crosscheck.add_argument("--seed", type=int)
    crosscheck.add_argument("--workers", type=int, default=1)
    return parser


def to_config(args: argparse.Namespace) -> RunConfig:
    """Validated RunConfig from parsed arguments; unset flags keep the schema defaults."""
    fields = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**fields)


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def _emit(certificate: Certificate, cfg: RunConfig) -> int:
    VerificationService.attach(certificate)
    if cfg.format is OutputFormat.SVG:
        DrawingRepository.save(certificate, cfg.out)
    else:
        _write(CertificateRepository.dumps(certificate), cfg.out)
        if cfg.format is OutputFormat.BOTH:
            DrawingRepository.save(certificate, str(Path(cfg.out).with_suffix(".svg")))
    return EXIT_EMBEDDING if certificate.kind.is_embedding else EXIT_HIGH_CORANK


def cmd_embed1d(cfg: RunConfig) -> int:
    g = GraphRepository.load(cfg.input)
    certificate = LineEmbeddingService.embed_line(g, factor=cfg.tol, seed=cfg.seed)
    return _emit(certificate, cfg)


def cmd_embed2d(cfg: RunConfig) -> int:
    g = GraphRepository.load(cfg.input)
    certificate = PlaneEmbeddingService.embed_plane(g, factor=cfg.tol, seed=cfg.seed)
    return _emit(certificate, cfg)


def cmd_verify(cfg: RunConfig) -> int:
    document = CertificateRepository.load(cfg.input)
    tol = None
    if "tol" in cfg.model_fields_set:
        tol = SpectraService.default_tolerance(np.array(document.matrix, dtype=float), cfg.tol)
    report = VerificationService.verify_document(document, tol=tol)
    _write(report.model_dump_json(indent=2) + "\n", cfg.out)
    for check in report.failed():
        print(f"check failed: {check.name}" + (f" ({check.detail})" if check.detail else ""), file=sys.stderr)
    return EXIT_EMBEDDING if report.passed else EXIT_VERIFY_FAILED


def cmd_crosscheck(cfg: RunConfig) -> int:
    summary = CrosscheckService.crosscheck(cfg.dim, cfg.cap, factor=cfg.tol, seed=cfg.seed, workers=cfg.workers)
    _write(summary.as_table() + "\n", None)
    for row in summary.disagreements:
        edges = " ".join(f"{i + 1}-{j + 1}" for i, j in row.edges)
        print(f"disagreement n={row.n} [{edges}]: {row.kind or row.error}", file=sys.stderr)
    return EXIT_EMBEDDING if not summary.disagreements else EXIT_ERROR


COMMANDS = {
    Command.EMBED1D: cmd_embed1d,
    Command.EMBED2D: cmd_embed2d,
    Command.VERIFY: cmd_verify,
    Command.CROSSCHECK: cmd_crosscheck,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = to_config(args)
    except ValidationError as e:
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"])
            print(f"error: {location + ': ' if location else ''}{error['msg']}", file=sys.stderr)
        return EXIT_ERROR

    try:
        return COMMANDS[cfg.command](cfg)
    except NullspaceEmbedError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception:
        logger.error(f"Unexpected failure in {cfg.command.value}", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
