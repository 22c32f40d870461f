"""Rate/risk analysis and risk-averse parameter design for noisy momentum methods."""

from .objectives import (
    LogisticObjective,
    QuadraticObjective,
    make_figure1_quadratic,
    make_paper_quadratic,
    make_synthetic_logreg,
    objective_from_descriptor,
)
from .quad import (
    GmmParams,
    QuadDesignSpec,
    agd_standard,
    design_ra_gmm_quad,
    entropic_risk_exact,
    evar_bound,
    evar_exact,
    gd_standard,
    in_feasible_set,
    in_stable_set,
    mean_distance_bound,
    mode_analysis,
    spectral_radius,
)
from .simulate import (
    Ensemble,
    NoiseModel,
    RunConfig,
    dominance_report,
    ecdf_final,
    empirical_entropic_risk,
    lyapunov_fixpoint_oracle,
    mc_evar_oracle,
    run_gmm,
)
from .smooth import (
    SmoothDesignSpec,
    SmoothParams,
    ThetaPsi,
    classify_theta_psi,
    design_ra_gmm_smooth,
    evar_bound_gaussian,
    evar_bound_subgaussian,
    expected_subopt_bound,
    gd_evar_bound,
    gd_risk_bound,
    lyapunov_value,
    mi_certify,
    risk_bound_gaussian,
    risk_bound_subgaussian,
    smooth_params,
)

__version__ = "0.1.0"
