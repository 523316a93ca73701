from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog

from src.core.config import settings
from src.core.errors import ZeroCorankError
from src.core.logger import get_logger
from src.core.preconditions import (
    require_connected,
    require_min_nodes,
    require_nonzero_scale,
    require_nonzero_vectors,
)
from src.models.graph import Graph
from src.models.matrices import GMatrix
from src.models.representation import NullspaceRep
from src.services.spectra import SpectraService

logger = get_logger(__name__)

EdgeValues = Union[np.ndarray, dict[tuple[int, int], float]]


def _vectors(u: Union[NullspaceRep, np.ndarray]) -> np.ndarray:
    """d x n array of node vectors."""
    if isinstance(u, NullspaceRep):
        return np.asarray(u.u)
    array = np.asarray(u, dtype=float)
    return array.reshape(1, -1) if array.ndim == 1 else array


class GMatrixService:

    @staticmethod
    def is_well_signed(gm: GMatrix) -> bool:
        """True iff every edge entry is strictly negative; the diagonal is free."""
        return bool(np.all(gm.offdiag < 0))

    @staticmethod
    def initial_good_matrix(g: Graph, rng: Optional[np.random.Generator] = None) -> GMatrix:
        """
        Well-signed singular G-matrix with exactly one negative eigenvalue.

        Edge entries are -1, or uniform in [RANDOM_OFFDIAG_LOW,
        RANDOM_OFFDIAG_HIGH] when a generator is given; the diagonal is
        then shifted by -lambda_2 so that lambda_2 becomes 0.

        Raises:
            DisconnectedGraphError: If g is not connected
            PreconditionError: If g has fewer than 2 nodes
        """
        require_min_nodes(g, 2)
        require_connected(g)
        if rng is None:
            offdiag = -np.ones(g.m)
        else:
            offdiag = rng.uniform(settings.RANDOM_OFFDIAG_LOW, settings.RANDOM_OFFDIAG_HIGH, g.m)
        start = GMatrix(graph=g, diag=np.zeros(g.n), offdiag=offdiag)
        second = SpectraService.eigen_summary(start).eigenvalue(2)
        return start.shifted(-second)

    @staticmethod
    def complete_diagonal(g: Graph, offdiag: EdgeValues, u: Union[NullspaceRep, np.ndarray]) -> GMatrix:
        """
        The unique diagonal making U M = 0 for the given edge entries:
        M_ii = -sum_j M_ij (u_j . u_i) / (u_i . u_i).

        Raises:
            ZeroVectorError: If some u_i is zero
        """
        vectors = _vectors(u)
        require_nonzero_vectors(vectors.T)
        if isinstance(offdiag, dict):
            values = np.array([offdiag[e] for e in g.edges], dtype=float)
        else:
            values = np.asarray(offdiag, dtype=float)

        gram = vectors.T @ vectors
        diag = np.zeros(g.n)
        for (i, j), value in zip(g.edges, values):
            diag[i] -= value * gram[i, j] / gram[i, i]
            diag[j] -= value * gram[i, j] / gram[j, j]
        return GMatrix(graph=g, diag=diag, offdiag=values)

    @staticmethod
    def node_scale(gm: GMatrix, d_vec: np.ndarray) -> GMatrix:
        """Return D^-1 M D^-1 for D = diag(d_vec)."""
        d_vec = np.asarray(d_vec, dtype=float)
        require_nonzero_scale(d_vec)
        rows = np.array([i for i, _ in gm.graph.edges], dtype=int)
        cols = np.array([j for _, j in gm.graph.edges], dtype=int)
        offdiag = gm.offdiag / (d_vec[rows] * d_vec[cols]) if gm.graph.m else gm.offdiag
        return GMatrix(graph=gm.graph, diag=gm.diag / d_vec ** 2, offdiag=offdiag)

    @staticmethod
    def rep_scale(u: NullspaceRep, d_vec: np.ndarray) -> NullspaceRep:
        """Return U D together with the co-scaled source D^-1 M D^-1."""
        d_vec = np.asarray(d_vec, dtype=float)
        source = GMatrixService.node_scale(u.source, d_vec)
        return NullspaceRep(u=u.u * d_vec[None, :], source=source, tol=u.tol)

    @staticmethod
    def normalize_rep(u: NullspaceRep) -> NullspaceRep:
        """
        Scale every node vector to unit length.

        Raises:
            ZeroVectorError: If some u_i is zero (at tolerance u.tol)
        """
        require_nonzero_vectors(u.points, u.tol)
        return GMatrixService.rep_scale(u, 1.0 / u.norms())

    @staticmethod
    def nullspace_rep(gm: GMatrix, tol: Optional[float] = None) -> NullspaceRep:
        """
        Nullspace representation of a singular G-matrix.

        Args:
            gm: G-matrix with corank d >= 1 at tolerance tol
            tol: absolute threshold; the default tolerance of gm when None

        Returns:
            NullspaceRep: orthonormal kernel rows, one column per node

        Raises:
            ZeroCorankError: If gm is nonsingular at tol
        """
        if tol is None:
            tol = SpectraService.default_tolerance(gm)
        basis = SpectraService.nullspace_basis(gm, tol)
        if basis.shape[0] == 0:
            raise ZeroCorankError(f"n = {gm.n}, tol = {tol:.3g}")
        return NullspaceRep(u=basis, source=gm, tol=tol)

    @staticmethod
    def residual(gm: GMatrix, u: Union[NullspaceRep, np.ndarray]) -> float:
        """max |(U M)_kj|."""
        product = _vectors(u) @ gm.dense
        return float(np.abs(product).max()) if product.size else 0.0

    @staticmethod
    def origin_interior_margin(u: Union[NullspaceRep, np.ndarray]) -> float:
        """
        Largest delta such that sum_i lambda_i u_i = 0 with sum_i lambda_i = 1
        and every lambda_i >= delta.

        A positive margin means the origin lies in the interior of the convex
        hull of the node vectors (given they span the space). Returns -inf
        when no affine combination reaches the origin.
        """
        vectors = _vectors(u)
        d, n = vectors.shape
        # variables: lambda_1..lambda_n, delta
        cost = np.zeros(n + 1)
        cost[-1] = -1.0
        a_eq = np.zeros((d + 1, n + 1))
        a_eq[:d, :n] = vectors
        a_eq[d, :n] = 1.0
        b_eq = np.zeros(d + 1)
        b_eq[d] = 1.0
        a_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
        b_ub = np.zeros(n)
        bounds = [(None, None)] * n + [(None, 1.0)]

        result = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if result.status != 0:
            logger.debug(f"Origin margin LP ended with status {result.status}: {result.message}")
            return float("-inf")
        return float(-result.fun)
