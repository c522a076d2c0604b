"""panelweb: invariants of panelled-web 4-manifolds and the Kleinian groups behind them.

Two halves share this package: exact integer topology (words,
presentations, Smith normal form, doubled handle decompositions and the
families built from them) and floating-point Kleinian-group geometry
(Moebius transforms, combination theorems, limit-set sampling and a
box-counting dimension estimate).
"""
__version__ = "0.1.0"

from .families import FAMILIES, build_family, family_table, m1, m1_g, m1_gn, m2, m3, m3_gn, m4_n
from .handlebody import (
    HandleDecomposition,
    IntersectionForm,
    InvariantReport,
    Presentation,
    TwoHandle,
    chain_ranks,
    double,
    euler_characteristic,
    invariants,
    presentation_of,
)
from .intlinalg import AbelianInvariants, abelian_invariants, smith_normal_form
from .kleinian import (
    GroupSpec,
    PreciseInvarianceFailed,
    check_precisely_invariant,
    complex_twist,
    cyclic,
    first_combination,
    fuchsian_schottky,
    second_combination,
)
from .limitset import (
    DimensionEstimate,
    ScalarSign,
    box_counting_dimension,
    dimension_threshold_check,
    limit_set_sample,
    scalar_sign,
)
from .moebius import INF, MoebiusTransform, classify, fixed_points, multiplier, rotation, scaling
from .panelled import panelled_sigma12
from .words import Word, parse_word

__all__ = [name for name in dir() if not name.startswith("_")]
