"""Exact-arithmetic engine for conformally invariant operators on
differential forms, realised over the flat metric cone.

The package builds the gauge-companion/Q-operator families from one
ambient composition, descends them to honest differential operators on
the slice by exact interpolation, and verifies every operator identity,
transformation law, symbol classification and spectral value in its
check suites with tolerance zero.
"""

from .ambient import AmbientContext, AmbientForm, OpAtom, OpExpr
from .cone import GClass, Scale, lift, make_Y, register_scale, restrict
from .errors import EngineError
from .factory import (OperatorSpec, build_G, build_K, build_L, build_M,
                      build_Q, build_order_n, build_star_conjugate,
                      get_context)
from .poly import MultiPoly
from .ratfunc import RationalFunction
from .report import CONVENTION_VERSION, ENGINE_VERSION, ReportDocument
from .sliceops import SliceForm, SliceOperator
from .suites import SUITES, SuiteConfig, run_suites

__version__ = ENGINE_VERSION

__all__ = [
    "AmbientContext", "AmbientForm", "OpAtom", "OpExpr", "GClass", "Scale",
    "lift", "make_Y", "register_scale", "restrict", "EngineError",
    "OperatorSpec", "build_G", "build_K", "build_L", "build_M", "build_Q",
    "build_order_n", "build_star_conjugate", "get_context", "MultiPoly",
    "RationalFunction", "CONVENTION_VERSION", "ENGINE_VERSION",
    "ReportDocument", "SliceForm", "SliceOperator", "SUITES", "SuiteConfig",
    "run_suites", "__version__",
]
