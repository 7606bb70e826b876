"""teichforge: every finite-index subgroup of Gamma(2) as a Veech group,
computed exactly through subgroups of surface groups."""
from .words import Basis, FreeWord, ReflectionWord, parse_reflection
from .subgroups import CosetAction, conjugacy_equal, is_self_normalizing
from .surface_atlas import build_atlas
from .mcg import Mat2, aut_lift, push_lift
from .pipeline import DeltaSpec, LayeredSubgroup, construct, verify_certificate
from .veech import Origami, stabilizer, veech_of_origami, verify_theorem

__version__ = "0.1.0"

__all__ = [
    "Basis", "FreeWord", "ReflectionWord", "parse_reflection",
    "CosetAction", "conjugacy_equal", "is_self_normalizing",
    "build_atlas", "Mat2", "aut_lift", "push_lift",
    "DeltaSpec", "LayeredSubgroup", "construct", "verify_certificate",
    "Origami", "stabilizer", "veech_of_origami", "verify_theorem",
]
