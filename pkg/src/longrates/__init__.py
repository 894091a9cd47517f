"""Term-structure analytics on zero-coupon curves.

Spot/simple/short/OIS par rates on evaluable discount curves; infinite
annuity sums with rigorous truncation; long-term swap/yield/simple/bond
estimators with five-way limit classification; Flesaker-Hughston and
linear-rational models validated by a state-price-density Monte Carlo
pricer; an empirical lab for uniform-on-compacts convergence in probability;
and machine-encoded regime tables tying the long-horizon limits together.

Path simulation runs on a compiled kernel core when available and an
equivalent numpy fallback otherwise; see `backend_name()`.
"""

from ._backend import HAVE_COMPILED, backend_name
from .curves import (
    Curve,
    ExplodingCurve,
    FlatCurve,
    PowerCurve,
    ShortRatePath,
    SyntheticCurve,
    TenorGrid,
    annuity,
    compounded_overnight,
    ois_par_rate,
    short_rate_fd,
    spot_simple,
    spot_yield,
)
from .errors import ConfigError, DomainError, ModelError, QuadratureError
from .longterm import (
    ClassifiedValue,
    HorizonConfig,
    LongTermClass,
    LongTermReport,
    TruncatedSum,
    bond_sum_ratio_k,
    fh_exponential_closed_forms,
    long_bond,
    long_term_simple,
    long_term_swap_rate,
    long_term_yield,
    lr_closed_forms,
    sum_to_tolerance,
)
from .models import (
    BoxedFactorDriver,
    BrownianDriver,
    ExponentialDecay,
    FHIntegralModel,
    FHRationalModel,
    GbmMartingale,
    LinearRationalModel,
    McResult,
    PathEnsemble,
    PhiExponential,
    SigmaConstant,
    SigmaTwoLevel,
    TabulatedDecay,
    adaptive_simpson,
    fh_integral_price,
    fh_rational_price,
    lr_alpha,
    lr_price,
    mc_floating_leg,
    mc_price,
    simulate_paths,
    state_price_density,
)
from .regimes import (
    RegimeRow,
    SIMPLE_TABLE,
    SWAP_TABLE,
    SwapPortfolio,
    TableVerdict,
    YIELD_TABLE,
    arbitrage_payoffs,
    classify_curve,
    draw_corpus,
    reference_corpus,
    table_check,
)
from .ucp import (
    PathMatrix,
    UcpEstimate,
    continuity_harness,
    fh_annuity_ensembles,
    fh_annuity_n_star,
    ucp_convergence_prob,
    ucp_divergence_prob,
)

__version__ = "0.1.0"
