"""Higher-order gauge-invariant functionals on discretized flat tori."""

from .connection import (
    CovariantTensor,
    GaugeField,
    alternating_codiff,
    alternating_d,
    conjugate_form,
    covariant_codiff,
    covariant_d,
    curvature,
    full_covariant_derivative,
    gauge_transform_connection,
    iterated_full_derivative,
)
from .forms import (
    FormField,
    GridSpec,
    codifferential,
    discrete_inner,
    ext_d,
    graded_bracket,
    hodge_star,
    lp_norm,
    wedge,
)
from .functionals import (
    FunctionalSpec,
    el_residual,
    evaluate,
    first_variation_chain,
    gradient,
    sobolev_profile,
)

__version__ = "0.1.0"
