from .graph import Graph
from .matrices import GMatrix, EigenSummary
from .representation import NullspaceRep, LineRep, PlaneRep
from .plane import AreaMatrix, EdgeSplit, Circulation, Cell, CellComplex, CellDimension, ArrangementLine, OuterplanarCheck
from .certificate import Certificate, CertificateKind
