"""Gowers uniformity norms of measures on the torus, computed in frequency space."""
from .spectral import (
    BudgetExceeded,
    FreqBox,
    IndexLayout,
    SpectralTensor,
    cross_correlate,
    make_freq_box,
    plancherel_mass,
)
from .measures import (
    Atomic,
    CoeffOracle,
    GridDensity,
    Scaled,
    SelfSimilar,
    SpecError,
    Sum,
    cantor,
    dirac,
    lebesgue,
    spec_from_json,
    spec_to_json,
    total_variation_oracle,
    total_variation_spec,
    trig_density,
)
from .delta import (
    DeltaTower,
    NormReport,
    build_tower,
    delta_step,
    inner_product,
    tail_report,
    uk_norm,
    uk_power,
)
from .discrete import (
    discrete_delta,
    discrete_inner_product,
    discrete_uk_fourier,
    discrete_uk_norm,
)
from .mollifiers import (
    Mollifier,
    PhiBracket,
    dirichlet_kernel,
    fejer_kernel,
    mollified_pairing,
    phi_bracket_transform,
)
from .checks import CheckResult, run_suite

__version__ = "0.1.0"
