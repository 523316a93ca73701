from typing import Callable, Optional, Union

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.errors import EvaluatorError, NonFiniteMatrixError, ParameterRangeError
from src.core.logger import get_logger
from src.models.matrices import CorankJump, EigenSummary, GMatrix

logger = get_logger(__name__)

MatrixLike = Union[GMatrix, np.ndarray]
MatrixFamily = Callable[[float], GMatrix]


def _dense(m: MatrixLike) -> np.ndarray:
    if isinstance(m, GMatrix):
        return m.dense
    dense = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(dense)):
        raise NonFiniteMatrixError()
    return dense


def _classify(eigenvalues: np.ndarray, tol: float) -> tuple[int, int, int]:
    negative = int(np.count_nonzero(eigenvalues < -tol))
    corank = int(np.count_nonzero(np.abs(eigenvalues) <= tol))
    return negative, corank, len(eigenvalues) - negative - corank


class SpectraService:

    @staticmethod
    def default_tolerance(m: MatrixLike, factor: Optional[float] = None) -> float:
        """Corank threshold factor * max(1, ||m||_inf) * n."""
        dense = _dense(m)
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        n = dense.shape[0]
        norm = float(np.abs(dense).sum(axis=1).max()) if n else 0.0
        return factor * max(1.0, norm) * n

    @staticmethod
    def eigen_summary(
        m: MatrixLike, tol: Optional[float] = None, factor: Optional[float] = None
    ) -> EigenSummary:
        """
        Eigenvalues of a symmetric matrix with their tolerance-classified signature.

        Args:
            m: a GMatrix or a dense symmetric array
            tol: absolute threshold; the default tolerance of m when None
            factor: relative factor of the default tolerance

        Returns:
            EigenSummary: ascending eigenvalues, counts of eigenvalues below
                -tol, within tol of zero and above tol, and the unit
                eigenvector of the smallest eigenvalue normalized to a
                positive sum

        Raises:
            NonFiniteMatrixError: If m has non-finite entries
            ParameterRangeError: If tol is negative
        """
        dense = _dense(m)
        if tol is None:
            tol = SpectraService.default_tolerance(dense, factor)
        if tol < 0:
            raise ParameterRangeError(f"tol = {tol}")

        eigenvalues, eigenvectors = linalg.eigh(dense)
        perron = None
        if eigenvectors.size:
            perron = eigenvectors[:, 0].copy()
            total = perron.sum()
            if total < 0 or (total == 0 and perron[np.flatnonzero(perron)[0]] < 0):
                perron = -perron
        negative, corank, positive = _classify(eigenvalues, tol)
        return EigenSummary(
            eigenvalues=eigenvalues,
            tol=float(tol),
            n_negative=negative,
            corank=corank,
            n_positive=positive,
            perron=perron,
        )

    @staticmethod
    def nullspace_basis(m: MatrixLike, tol: Optional[float] = None) -> np.ndarray:
        """
        Orthonormal basis of the eigenspace of eigenvalues within tol of zero.

        Returns:
            np.ndarray: d x n array whose rows are the basis vectors; d may be 0
        """
        dense = _dense(m)
        if tol is None:
            tol = SpectraService.default_tolerance(dense)
        eigenvalues, eigenvectors = linalg.eigh(dense)
        mask = np.abs(eigenvalues) <= tol
        return eigenvectors[:, mask].T.copy()

    @staticmethod
    def corank_jump(
        family: MatrixFamily,
        base_corank: int,
        tol: Optional[float] = None,
        samples: Optional[int] = None,
        width: Optional[float] = None,
        factor: Optional[float] = None,
    ) -> Optional[CorankJump]:
        """
        Locate the first parameter t in (0, 1] where the corank of the family
        exceeds its base corank.

        The family is sampled uniformly; a change in the number of negative
        eigenvalues between two samples, or a sample with corank above the
        base, brackets a root of the (d+1)-th eigenvalue. The bracket is
        bisected to `width`, and the smaller endpoint with corank at least
        d + 1 is returned.

        Args:
            family: side-effect free evaluator t -> M^t on [0, 1]
            base_corank: d, the corank of M^0
            tol: absolute threshold; None uses each matrix's default tolerance
            samples: number of sampling intervals (settings.JUMP_SAMPLES)
            width: bisection width (settings.BISECTION_WIDTH)
            factor: relative factor of the per-matrix default tolerance

        Returns:
            Optional[CorankJump]: t*, M^{t*}, its eigen summary and the final
                bracket width; None when no jump is found

        Raises:
            EvaluatorError: If the evaluator raises or returns non-finite entries
        """
        samples = settings.JUMP_SAMPLES if samples is None else samples
        width = settings.BISECTION_WIDTH if width is None else width
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        target = base_corank + 1

        def evaluate(t: float) -> GMatrix:
            try:
                return family(float(t))
            except EvaluatorError:
                raise
            except Exception as e:
                raise EvaluatorError(f"t = {t!r}: {e}") from e

        def classify(matrix: GMatrix) -> tuple[int, int]:
            dense = matrix.dense
            threshold = SpectraService.default_tolerance(dense, factor) if tol is None else tol
            negative, corank, _ = _classify(np.linalg.eigvalsh(dense), threshold)
            return negative, corank

        grid = np.linspace(0.0, 1.0, samples + 1)
        stack = np.array([evaluate(t).dense for t in grid])
        if not np.all(np.isfinite(stack)):
            raise EvaluatorError("non-finite matrix on the sampling grid")
        eigenvalues = np.linalg.eigvalsh(stack)
        if tol is None:
            norms = np.abs(stack).sum(axis=2).max(axis=1)
            thresholds = factor * np.maximum(1.0, norms) * stack.shape[1]
        else:
            thresholds = np.full(len(grid), tol)
        negatives = np.count_nonzero(eigenvalues < -thresholds[:, None], axis=1)
        coranks = np.count_nonzero(np.abs(eigenvalues) <= thresholds[:, None], axis=1)

        if coranks[0] >= target:
            logger.warning(f"Family starts with corank {coranks[0]} above the base corank {base_corank}")

        for k in range(1, len(grid)):
            if negatives[k] == negatives[k - 1] and coranks[k] < target:
                continue

            lo, hi = float(grid[k - 1]), float(grid[k])
            negative_lo = int(negatives[k - 1])
            while hi - lo > width:
                mid = 0.5 * (lo + hi)
                negative_mid, corank_mid = classify(evaluate(mid))
                if corank_mid < target and negative_mid == negative_lo:
                    lo = mid
                else:
                    hi = mid

            for t in (lo, hi):
                if t <= 0.0:
                    continue
                matrix = evaluate(t)
                summary = SpectraService.eigen_summary(matrix, tol, factor)
                if summary.corank >= target:
                    logger.debug(
                        f"Corank jump at t={t:.15g} (corank {summary.corank}, "
                        f"negative {summary.n_negative}, bracket {hi - lo:.3g})"
                    )
                    return CorankJump(t=t, matrix=matrix, eigen=summary, bracket_width=hi - lo)
            logger.debug(f"Bracket [{lo:.15g}, {hi:.15g}] holds no corank jump; scanning on")

        return None
