"""Higher-order local mobility analysis of multiloop spatial linkages."""

from .cones import ConeBranch, ConeResult, compare_spans, first_order_cone, lk_cone, refine, tangent_cone
from .continuation import PathTrace, numeric_rank, shakiness_witness, trace_path
from .exact import Jet, RatMatrix, SeriesMatrix, series_det
from .jets import MotionJet, constraint_derivatives, minor_derivatives, rank_along_jet, series_oracle
from .mobility import MobilityReport, analyze, ckg_dof, classify, format_report
from .model import Joint, LinkageModel, jacobian
from .modelfile import ModelFileError, load_fixture, parse_model, serialize_model
from .polysolve import solve_poly_cone
from .taylor import differentials, vk_solve

__all__ = [
    "ConeBranch",
    "ConeResult",
    "Jet",
    "Joint",
    "LinkageModel",
    "MobilityReport",
    "ModelFileError",
    "MotionJet",
    "PathTrace",
    "RatMatrix",
    "SeriesMatrix",
    "analyze",
    "ckg_dof",
    "classify",
    "compare_spans",
    "constraint_derivatives",
    "differentials",
    "first_order_cone",
    "format_report",
    "jacobian",
    "lk_cone",
    "load_fixture",
    "minor_derivatives",
    "numeric_rank",
    "parse_model",
    "rank_along_jet",
    "refine",
    "serialize_model",
    "series_det",
    "series_oracle",
    "shakiness_witness",
    "solve_poly_cone",
    "tangent_cone",
    "trace_path",
    "vk_solve",
]
