"""Exact computations for C2 homotopy fixed point and Picard spectral sequences."""
from .abgroup import FgAbGroup, IntMatrix, smith_normal_form, subquotient
from .c2cohomology import C2Module, cohomology_bar, cohomology_periodic
from .gradedring import RingGenerator, RingPresentation, rule
from .picard import PicInput, resolve, run_picard, upper_bound_stem0
from .runner import report, run_scenario
from .scenarios import builtin, builtin_names, load, serialize, validate
from .specseq import CoefficientFamily, Window, run_endomorphism, stem_assoc_graded

__all__ = [
    "FgAbGroup", "IntMatrix", "smith_normal_form", "subquotient",
    "C2Module", "cohomology_bar", "cohomology_periodic",
    "RingGenerator", "RingPresentation", "rule",
    "PicInput", "resolve", "run_picard", "upper_bound_stem0",
    "report", "run_scenario",
    "builtin", "builtin_names", "load", "serialize", "validate",
    "CoefficientFamily", "Window", "run_endomorphism", "stem_assoc_graded",
]
