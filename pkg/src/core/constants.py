"""
Library-wide constants.

This module centralizes magic numbers that are not meant to be tuned per
run. Tunable budgets and tolerances live in src.core.config.Settings.
"""

# ============================================================================
# NUMERICAL THRESHOLDS
# ============================================================================

FLOW_CONSERVATION_TOLERANCE = 1e-10
"""Relative tolerance (times the max flow value) for circulation checks."""

SIGN_GRID = 10 ** 12
"""Coordinates are snapped to a 1/SIGN_GRID grid before exact sign tests."""

ORIGIN_MARGIN_THRESHOLD = 1e-10
"""Minimum LP margin for the origin to count as interior to a hull."""

LIMIT_SAMPLE_OFFSET = 1e-6
"""Parameter offset used when sampling a family next to its limit."""

MAX_DOUBLINGS = 60
"""Cap on step doublings when searching for a second negative eigenvalue."""

MAX_HALVINGS = 60
"""Cap on step halvings when moving the origin towards a boundary point."""


# ============================================================================
# CERTIFICATE CLAIMS
# ============================================================================

LINE_DIMENSION = 1
PLANE_DIMENSION = 2

PATH_CLAIMED_CORANK = 1
OUTERPLANAR_CLAIMED_CORANK = 2
LINE_CERTIFICATE_CORANK = 2
"""Minimum corank of a high-corank certificate produced in the line."""

PLANE_CERTIFICATE_CORANK = 3
"""Minimum corank of a high-corank certificate produced in the plane."""

FLOAT_SIGNIFICANT_DIGITS = 17


# ============================================================================
# SVG DRAWING
# ============================================================================

SVG_SIZE = 512
SVG_RADIUS = 230
SVG_NODE_RADIUS = 6
SVG_LABEL_OFFSET = 14


# ============================================================================
# EXIT CODES
# ============================================================================

EXIT_EMBEDDING = 0
EXIT_ERROR = 1
EXIT_HIGH_CORANK = 2
EXIT_VERIFY_FAILED = 3
