"""Exact arithmetic for unimodular fans: lattice-point functionals,
their polynomials, complete-fan counting, Bergman fans of matroids, and
piecewise-exponential classes."""

from .errors import EhrfanError
from .fan import (
    Fan,
    StarFan,
    StellarSubdivision,
    build_fan,
    is_balanced,
    is_complete,
    product_fan,
    projective_fan,
    star_fan,
    stellar_subdivision,
)
from .lattice import (
    IntMatrix,
    complete_to_unimodular_basis,
    hermite_normal_form,
    is_unimodular_set,
    primitive_vector,
    quotient_projection,
    smith_normal_form,
)
from .plfun import (
    INFINITE,
    ConvexityType,
    PLClass,
    PLFunction,
    canonical_class_rep,
    class_order,
    convexity_type,
    courant,
    decompose_on_subdivision,
    is_linear,
    linear_values,
    pointwise_max_min,
    restrict_to_star,
    transfer_to_subdivision,
)
from .ehrhart import (
    EhrhartCertificate,
    EhrhartFailure,
    IVPoly,
    binomial_expand,
    chi_closed_form_dim1,
    chi_closed_form_dim2,
    dim2_is_ehrhart,
    ehrhart_polynomial,
    eval_chi,
    is_ehrhart,
    volume_eval,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
