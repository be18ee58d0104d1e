"""fchlab: a numerical laboratory for the fractional Camassa-Holm equation.

Modules
-------
spectral
    Periodic grids, spectral fields, Fourier multipliers, dealiased products.
littlewood_paley
    Dyadic blocks, low-frequency cut-offs, Besov norms, truncated E_s norms.
bony
    Paraproducts, remainders, the fractional commutator and its audits.
model
    Right-hand sides of the equation in its direct and nonlocal forms.
evolution
    RK4 time integration with norm monitoring and blow-up detection.
picard
    The frozen-coefficient transport iteration and its diagnostics.
analyticity
    Fourier decay fits and analytic-scale norms along trajectories.
io, cli
    Snapshot files, profiles, manifests and the ``fchlab`` command line.
"""
__version__ = "0.1.0"

from .spectral import (  # noqa: E402
    GridSpec, SpectralField, MultiplierOp, make_grid, fractional_laplacian,
    smoothing_inverse, p_operator, derivative, dealias, pointwise_product, random_field,
)
from .littlewood_paley import (  # noqa: E402
    BesovSpec, CriticalIndex, DyadicSystem, critical_index, dyadic_block, low_cutoff,
    besov_norm, es_norm_truncated,
)
from .bony import (  # noqa: E402
    BonyParts, CommutatorSplit, paraproduct, remainder, bony_parts, commutator,
    commutator_split, commutator_bound_audit,
)
from .model import (  # noqa: E402
    FchParams, Form, TwoComponentState, f1, rhs_nonlocal, rhs_direct, rhs_two_component,
    ch_reduction_check,
)
from .evolution import (  # noqa: E402
    SolverConfig, TrajectoryRecord, BlowUpError, step_rk4, integrate,
    continuous_dependence_probe,
)
from .picard import (  # noqa: E402
    IterationTrace, LifespanEstimate, lifespan, transport_solve, picard_run, bound_check,
)
from .analyticity import DecayFit, fourier_decay_fit, es_trajectory, algebra_probe  # noqa: E402
