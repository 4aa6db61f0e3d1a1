"""Iterated function systems on the circle, torus, and sphere, their
induced hyperspace dynamics, and numerical verifiers for overlap,
hyper-minimality, minimality, and ergodicity-proxy conditions."""

from ._core import BACKEND
from .geom import CIRCLE, SPHERE, TORUS, GeomError, Point, point
from .hyper import Arc, Net, closure_ball, hausdorff, induced_apply
from .ifs import (BudgetError, CapabilityError, Generator, IfsSystem, Word,
                  apply_word, fiberwise_orbit)
from .criteria import (OverlapParams, WitnessResult, check_hyper_minimal,
                       check_local_hyper_minimal, check_minimality_density,
                       check_overlap_number, density_ratio, find_witness,
                       invariant_hull_coverage)
from .report import VerifierReport

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CIRCLE", "TORUS", "SPHERE", "GeomError", "Point", "point",
    "Arc", "Net", "closure_ball", "hausdorff", "induced_apply",
    "BudgetError", "CapabilityError", "Generator", "IfsSystem", "Word",
    "apply_word", "fiberwise_orbit",
    "OverlapParams", "WitnessResult", "check_hyper_minimal",
    "check_local_hyper_minimal", "check_minimality_density",
    "check_overlap_number", "density_ratio", "find_witness",
    "invariant_hull_coverage", "VerifierReport",
]
