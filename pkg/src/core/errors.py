"""
Centralized error messages and the exception hierarchy.

This module provides consistent error messages across the library, the
command-line surface and the HTTP layer. Every exception carries one of
the message constants below, optionally followed by details.
"""

from typing import Optional

# ============================================================================
# GRAPH INPUT ERRORS
# ============================================================================

ERROR_MALFORMED_HEADER = "Malformed header: expected 'n m' with n >= 1 and m >= 0"
ERROR_MALFORMED_EDGE_LIST = "Malformed edge list"
ERROR_NODE_INDEX = "Node index out of range"
ERROR_LOOP = "Loops are not allowed"
ERROR_DUPLICATE_EDGE = "Duplicate edge"

# ============================================================================
# PRECONDITION ERRORS
# ============================================================================

ERROR_DISCONNECTED = "Graph is not connected"
ERROR_NOT_BICONNECTED = "Graph is not 2-connected"
ERROR_TOO_SMALL = "Graph has too few nodes"
ERROR_ZERO_VECTOR = "Representation contains a zero vector"
ERROR_ZERO_SCALE = "Scaling vector contains a zero entry"
ERROR_PARAMETER_RANGE = "Parameter outside its admissible range"
ERROR_RESIDUAL = "Matrix does not annihilate the representation"
ERROR_FLOW_CONSERVATION = "Function violates flow conservation"
ERROR_NOT_IN_CLOSURE = "Point is not in the closure of the cell"
ERROR_COINCIDENT_POINTS = "Adjacent nodes are represented by the same point"
ERROR_ZERO_CORANK = "Matrix is nonsingular at the given tolerance"
ERROR_SHAPE = "Array shape does not match the graph"

# ============================================================================
# NUMERICAL ERRORS
# ============================================================================

ERROR_NO_JUMP = "No corank jump found within bracket resolution"
ERROR_DEGENERACY = "Numerical degeneracy persisted after the retry budget"
ERROR_ESCALATION_BUDGET = "Escalation budget exhausted"
ERROR_EVALUATOR = "Matrix family evaluator failed"
ERROR_NON_FINITE = "Matrix has non-finite entries"

# ============================================================================
# ORACLE & CERTIFICATE ERRORS
# ============================================================================

ERROR_ORACLE_SIZE = "Graph exceeds the oracle size cap"
ERROR_CERTIFICATE_FORMAT = "Malformed certificate document"


# ============================================================================
# EXCEPTIONS
# ============================================================================

class NullspaceEmbedError(Exception):
    """Base class of every error raised by the library."""

    message: str = "Nullspace embedding error"

    def __init__(self, detail: Optional[str] = None):
        self.detail = detail
        text = self.message if not detail else f"{self.message}: {detail}"
        super().__init__(text)


class GraphParseError(NullspaceEmbedError):
    message = ERROR_MALFORMED_EDGE_LIST


class MalformedHeaderError(GraphParseError):
    message = ERROR_MALFORMED_HEADER


class MalformedEdgeListError(GraphParseError):
    message = ERROR_MALFORMED_EDGE_LIST


class NodeIndexError(GraphParseError):
    message = ERROR_NODE_INDEX


class LoopError(GraphParseError):
    message = ERROR_LOOP


class DuplicateEdgeError(GraphParseError):
    message = ERROR_DUPLICATE_EDGE


class PreconditionError(NullspaceEmbedError):
    message = ERROR_PARAMETER_RANGE


class DisconnectedGraphError(PreconditionError):
    message = ERROR_DISCONNECTED


class NotBiconnectedError(PreconditionError):
    message = ERROR_NOT_BICONNECTED

    def __init__(self, detail: Optional[str] = None, cut_node: Optional[int] = None):
        self.cut_node = cut_node
        super().__init__(detail)


class ZeroVectorError(PreconditionError):
    message = ERROR_ZERO_VECTOR

    def __init__(self, detail: Optional[str] = None, nodes: tuple[int, ...] = ()):
        self.nodes = nodes
        super().__init__(detail)


class ZeroScaleError(PreconditionError):
    message = ERROR_ZERO_SCALE


class ParameterRangeError(PreconditionError):
    message = ERROR_PARAMETER_RANGE


class ResidualError(PreconditionError):
    message = ERROR_RESIDUAL


class FlowConservationError(PreconditionError):
    message = ERROR_FLOW_CONSERVATION


class ClosureError(PreconditionError):
    message = ERROR_NOT_IN_CLOSURE


class CoincidentPointsError(PreconditionError):
    message = ERROR_COINCIDENT_POINTS


class ZeroCorankError(PreconditionError):
    message = ERROR_ZERO_CORANK


class ShapeError(PreconditionError):
    message = ERROR_SHAPE


class NonFiniteMatrixError(PreconditionError):
    message = ERROR_NON_FINITE


class OracleSizeError(NullspaceEmbedError):
    message = ERROR_ORACLE_SIZE


class DegeneracyError(NullspaceEmbedError):
    message = ERROR_DEGENERACY


class NoJumpError(DegeneracyError):
    message = ERROR_NO_JUMP


class EscalationBudgetError(DegeneracyError):
    message = ERROR_ESCALATION_BUDGET


class EvaluatorError(NullspaceEmbedError):
    message = ERROR_EVALUATOR


class CertificateFormatError(NullspaceEmbedError):
    message = ERROR_CERTIFICATE_FORMAT
