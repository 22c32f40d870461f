"""Closed-form rate and entropic-risk analysis for quadratics.

Everything here works per eigenmode of the Hessian: the two-step momentum
recursion decouples into 2x2 companion blocks [[c, d], [1, 0]] with
c = (1+beta) - alpha (1+gamma) lambda and d = -(beta - alpha gamma lambda).
The per-mode spectral radius, the stationary variance sigma^2/(2 u), the
exact infinite-horizon entropic risk and the EV@R bound are all explicit
functions of (c, d, lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objectives import QuadraticObjective

# Strict inequalities that define set membership are evaluated with this
# margin when building design grids, so near-boundary parameters (rho ~= 1)
# never enter a design.
BOUNDARY_MARGIN = 1e-12
# Guard for log(1 - theta/(2u)) at the floating-point edge of feasibility.
LOG_ARG_GUARD = 1e-14


@dataclass(frozen=True)
class GmmParams:
    """Stepsize and the two momentum coefficients of the iteration."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.beta < 0 or self.gamma < 0:
            raise ValueError("beta and gamma must be nonnegative")

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)


def agd_standard(obj) -> GmmParams:
    """Deterministic-optimization AGD default: alpha=1/L, beta=gamma classic."""
    sl, sm = math.sqrt(obj.lsmooth), math.sqrt(obj.mu)
    b = (sl - sm) / (sl + sm)
    return GmmParams(alpha=1.0 / obj.lsmooth, beta=b, gamma=b)


def gd_standard(obj) -> GmmParams:
    return GmmParams(alpha=1.0 / obj.lsmooth, beta=0.0, gamma=0.0)


@dataclass(frozen=True)
class ModeAnalysis:
    lam: float
    c: float
    d: float
    rho: float
    u: float


def mode_cd(params: GmmParams, lam):
    lam = np.asarray(lam, dtype=float)
    c = (1.0 + params.beta) - params.alpha * (1.0 + params.gamma) * lam
    d = -(params.beta - params.alpha * params.gamma * lam)
    return c, d


def _rho_from_cd(c, d):
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    disc = c * c + 4.0 * d
    with np.errstate(invalid="ignore"):
        real = 0.5 * np.abs(c) + 0.5 * np.sqrt(np.maximum(disc, 0.0))
        cplx = np.sqrt(np.abs(d))
    return np.where(disc >= 0.0, real, cplx)


def _u_from_cd(c, d, lam, alpha):
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    lam = np.asarray(lam, dtype=float)
    num = (1.0 + d) * ((1.0 - d) ** 2 - c * c)
    den = lam * (1.0 - d) * alpha**2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = num / den
    return u


def mode_analysis(params: GmmParams, lam: float) -> ModeAnalysis:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    c, d = mode_cd(params, lam)
    rho = float(_rho_from_cd(c, d))
    u = float(_u_from_cd(c, d, lam, params.alpha))
    return ModeAnalysis(lam=float(lam), c=float(c), d=float(d), rho=rho, u=u)


def modes(params: GmmParams, obj: QuadraticObjective):
    """Vectorized (c, d, rho, u) over the Hessian spectrum."""
    lam = obj.eigenvalues
    c, d = mode_cd(params, lam)
    return c, d, _rho_from_cd(c, d), _u_from_cd(c, d, lam, params.alpha)


def spectral_radius(params: GmmParams, obj: QuadraticObjective) -> float:
    c, d = mode_cd(params, obj.eigenvalues)
    return float(np.max(_rho_from_cd(c, d)))


def transition_matrix(params: GmmParams, obj: QuadraticObjective) -> np.ndarray:
    """Dense 2d x 2d transition matrix of the stacked recursion (oracle use)."""
    Q = obj.hessian()
    d = obj.dim
    I = np.eye(d)
    top_left = (1.0 + params.beta) * I - params.alpha * (1.0 + params.gamma) * Q
    top_right = -(params.beta * I - params.alpha * params.gamma * Q)
    return np.block([[top_left, top_right], [I, np.zeros((d, d))]])


def mean_distance_bound(params: GmmParams, obj: QuadraticObjective, k: int) -> float:
    """C_k * rho^{k-1}; multiplied by ||z0 - z*|| it bounds ||E z_k - z*||.

    Returns +inf when some mode has a size-2 Jordan block at eigenvalue zero
    (c = d = 0): the constant's derivation degenerates there and the bound is
    vacuous.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    c, d, rho, _ = modes(params, obj)
    disc = c * c + 4.0 * d
    rho_max = float(np.max(rho))
    consts = np.empty_like(rho)
    for i in range(rho.size):
        if disc[i] != 0.0:
            consts[i] = abs(c[i] ** 2 + 2.0 * d[i] + 2.0) * rho[i] / math.sqrt(abs(disc[i]))
        else:
            if rho[i] == 0.0:
                return float("inf")
            consts[i] = (c[i] ** 2 / 4.0 + 2.0) * math.sqrt(2.0 * rho[i] ** 2 + k**2)
    return float(np.max(consts) * rho_max ** (k - 1))


def in_stable_set(params: GmmParams, obj: QuadraticObjective) -> bool:
    """True iff every mode satisfies |c| < |1-d| and u > 0."""
    c, d, _, u = modes(params, obj)
    ok = np.abs(c) < np.abs(1.0 - d)
    return bool(np.all(ok) and np.all(np.nan_to_num(u, nan=-1.0) > 0.0))


def in_feasible_set(params: GmmParams, obj: QuadraticObjective, theta: float) -> bool:
    """True iff the entropic risk at level theta is finite for these params."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    c, d, _, u = modes(params, obj)
    ok = np.abs(c) < np.abs(1.0 - d)
    return bool(np.all(ok) and np.all(np.nan_to_num(u, nan=-1.0) > theta / 2.0))


@dataclass(frozen=True)
class QuadRiskReport:
    entropic_risk: float
    theta: float
    feasible: bool
    per_mode_variance: np.ndarray = field(repr=False)


def stationary_mean_suboptimality(params: GmmParams, obj: QuadraticObjective, sigma2: float) -> float:
    """E[f(x_inf) - f*] = sigma^2 sum_i 1/(2 u_i); the theta -> 0 risk limit."""
    _, _, _, u = modes(params, obj)
    if not in_stable_set(params, obj):
        return float("inf")
    return float(sigma2 * np.sum(0.5 / u))


def entropic_risk_exact(
    params: GmmParams, obj: QuadraticObjective, sigma2: float, theta: float
) -> QuadRiskReport:
    if theta <= 0 or sigma2 <= 0:
        raise ValueError("theta and sigma2 must be positive")
    c, d, _, u = modes(params, obj)
    per_mode = sigma2 * 0.5 / u
    stable = np.all(np.abs(c) < np.abs(1.0 - d)) and np.all(
        np.nan_to_num(u, nan=-1.0) > 0.0
    )
    ratio = theta / (2.0 * u)
    feasible = bool(stable and np.all(ratio <= 1.0 - LOG_ARG_GUARD))
    if not feasible:
        return QuadRiskReport(float("inf"), theta, False, per_mode)
    risk = float(-(sigma2 / theta) * np.sum(np.log1p(-ratio)))
    return QuadRiskReport(risk, theta, True, per_mode)


@dataclass(frozen=True)
class EvarResult:
    value: float
    theta_star: float
    kind: str  # "exact" | "bound"
    zeta: float


def _golden_min(fn, lo: float, hi: float, xtol: float):
    """Golden-section minimization of a unimodal fn on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while (b - a) > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    xm = 0.5 * (a + b)
    return xm, fn(xm)


def evar_exact(params: GmmParams, obj: QuadraticObjective, sigma2: float, zeta: float) -> EvarResult:
    """Exact EV@R at stationarity: minimize risk(theta) + (2 sigma^2/theta) log(1/zeta)."""
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    if not in_stable_set(params, obj):
        raise ValueError("unstable parameters")
    _, _, _, u = modes(params, obj)
    theta_max = 2.0 * float(np.min(u))
    log_term = 2.0 * sigma2 * math.log(1.0 / zeta)

    def h(theta):
        rep = entropic_risk_exact(params, obj, sigma2, theta)
        return rep.entropic_risk + log_term / theta

    lo = theta_max * 1e-12
    hi = theta_max * (1.0 - 1e-12)
    theta_star, val = _golden_min(h, lo, hi, xtol=1e-10 * theta_max)
    if not math.isfinite(val):
        grid = np.linspace(lo, hi, 100001)
        vals = np.array([h(t) for t in grid])
        j = int(np.argmin(vals))
        theta_star, val = float(grid[j]), float(vals[j])
    return EvarResult(value=float(val), theta_star=float(theta_star), kind="exact", zeta=zeta)


def evar_bound_theta0(d: int, zeta: float) -> float:
    log_term = math.log(1.0 / zeta)
    return (log_term / d) * (math.sqrt(1.0 + 2.0 * d / log_term) - 1.0)


def evar_bound(params: GmmParams, obj: QuadraticObjective, sigma2: float, zeta: float) -> EvarResult:
    """Closed-form EV@R upper bound driven by u_bar = min_i u_i."""
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    if not in_stable_set(params, obj):
        raise ValueError("unstable parameters")
    _, _, _, u = modes(params, obj)
    u_bar = float(np.min(u))
    d = obj.dim
    theta0 = evar_bound_theta0(d, zeta)
    val = (sigma2 / (2.0 * theta0 * u_bar)) * (
        -d * math.log1p(-theta0) + 2.0 * math.log(1.0 / zeta)
    )
    return EvarResult(value=float(val), theta_star=float(theta0 * 2.0 * u_bar), kind="bound", zeta=zeta)


def evar_exact_grid(u_rows: np.ndarray, sigma2: float, zeta: float, iters: int = 60):
    """Vectorized golden-section exact EV@R for many stable parameter points.

    u_rows is (G, m): per-mode u values, every row fully stable (all u > 0).
    Returns (values, theta_stars).
    """
    u_rows = np.asarray(u_rows, dtype=float)
    theta_max = 2.0 * np.min(u_rows, axis=1)
    log_term = 2.0 * sigma2 * math.log(1.0 / zeta)

    def h(t):
        ratio = t[:, None] / (2.0 * u_rows)
        return -(sigma2 / t) * np.sum(np.log1p(-ratio), axis=1) + log_term / t

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a = theta_max * 1e-12
    b = theta_max * (1.0 - 1e-12)
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = h(x1), h(x2)
    for _ in range(iters):
        take = f1 <= f2
        b = np.where(take, x2, b)
        a = np.where(take, a, x1)
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        f1, f2 = h(x1), h(x2)
    xm = 0.5 * (a + b)
    return h(xm), xm


def agd_optimal_rate2(kappa: float) -> float:
    """Squared benchmark rate: best AGD spectral radius on a quadratic."""
    return (1.0 - 2.0 / math.sqrt(3.0 * kappa + 1.0)) ** 2


@dataclass
class QuadDesignSpec:
    zeta: float
    epsilon: float
    sigma2: float
    alpha_grid: np.ndarray | None = None
    beta_grid: np.ndarray | None = None
    gamma_grid: np.ndarray | None = None
    agd_constraint: bool = False
    n_alpha: int = 60
    n_beta: int = 60
    n_gamma: int = 60

    def __post_init__(self):
        if not (0.0 < self.zeta < 1.0):
            raise ValueError("zeta must lie in (0, 1)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")

    def grids(self, obj: QuadraticObjective):
        L = obj.lsmooth
        a = (
            self.alpha_grid
            if self.alpha_grid is not None
            else np.geomspace(2.0 / L * 1.2 * 1e-3, 2.0 / L * 1.2, self.n_alpha)
        )
        b = self.beta_grid if self.beta_grid is not None else np.linspace(0.0, 1.2, self.n_beta)
        g = self.gamma_grid if self.gamma_grid is not None else np.linspace(0.0, 1.2, self.n_gamma)
        return np.asarray(a, float), np.asarray(b, float), np.asarray(g, float)


def _grid_mode_quantities(alpha, beta, gamma, lam):
    """Broadcast (G,) parameter arrays against (m,) eigenvalues -> (G, m)."""
    a = alpha[:, None]
    b = beta[:, None]
    g = gamma[:, None]
    lam = lam[None, :]
    c = (1.0 + b) - a * (1.0 + g) * lam
    d = -(b - a * g * lam)
    disc = c * c + 4.0 * d
    with np.errstate(invalid="ignore"):
        rho = np.where(disc >= 0.0, 0.5 * np.abs(c) + 0.5 * np.sqrt(np.maximum(disc, 0.0)),
                       np.sqrt(np.abs(d)))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (1.0 + d) * ((1.0 - d) ** 2 - c * c) / (lam * (1.0 - d) * a**2)
    stable = np.all(np.abs(c) < np.abs(1.0 - d) - BOUNDARY_MARGIN, axis=1) & np.all(
        np.nan_to_num(u, nan=-1.0) > BOUNDARY_MARGIN, axis=1
    )
    return rho.max(axis=1), np.nan_to_num(u, nan=-1.0).min(axis=1), stable


def quad_grid_sweep(
    obj: QuadraticObjective, spec: QuadDesignSpec, chunk: int = 20000, threads: int = 1
):
    """Evaluate rho, u_bar, stability and the EV@R bound over the full grid.

    Returns a dict of flat arrays (one entry per grid point) so that both the
    design argmin and the CSV export share one evaluation. Chunks may be
    evaluated on a thread pool; each writes a disjoint slice, so the result is
    independent of scheduling order.
    """
    a_grid, b_grid, g_grid = spec.grids(obj)
    if spec.agd_constraint:
        A, B = np.meshgrid(a_grid, b_grid, indexing="ij")
        alpha, beta, gamma = A.ravel(), B.ravel(), B.ravel().copy()
    else:
        A, B, G = np.meshgrid(a_grid, b_grid, g_grid, indexing="ij")
        alpha, beta, gamma = A.ravel(), B.ravel(), G.ravel()
    n = alpha.size
    rho = np.empty(n)
    u_bar = np.empty(n)
    stable = np.empty(n, dtype=bool)
    lam = obj.eigenvalues

    def work(lo):
        hi = min(lo + chunk, n)
        rho[lo:hi], u_bar[lo:hi], stable[lo:hi] = _grid_mode_quantities(
            alpha[lo:hi], beta[lo:hi], gamma[lo:hi], lam
        )

    starts = range(0, n, chunk)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)
    d = obj.dim
    theta0 = evar_bound_theta0(d, spec.zeta)
    coeff = spec.sigma2 / (2.0 * theta0) * (
        -d * math.log1p(-theta0) + 2.0 * math.log(1.0 / spec.zeta)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ebound = np.where(stable & (u_bar > 0), coeff / u_bar, np.inf)
    return {
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "rho": rho,
        "u_bar": u_bar,
        "stable": stable,
        "evar_bound": ebound,
    }


def design_ra_gmm_quad(obj: QuadraticObjective, spec: QuadDesignSpec):
    """Grid search for the risk-averse parameters under a rate constraint.

    Minimizes the EV@R bound over the stable grid subject to
    rho^2 <= (1 + epsilon) * rho_benchmark^2. Ties within 1e-12 of the best
    bound break toward the smallest rho^2, then the smallest alpha (then beta,
    gamma) so the output is independent of evaluation order.
    """
    sweep = quad_grid_sweep(obj, spec)
    bench = agd_optimal_rate2(obj.kappa)
    rate_ok = sweep["rho"] ** 2 <= (1.0 + spec.epsilon) * bench
    feasible = sweep["stable"] & rate_ok & np.isfinite(sweep["evar_bound"])
    if not np.any(feasible):
        raise ValueError("no parameters satisfy rate constraint at this grid resolution")
    vals = np.where(feasible, sweep["evar_bound"], np.inf)
    best = float(np.min(vals))
    cand = np.flatnonzero(vals <= best + 1e-12)
    order = np.lexsort(
        (sweep["gamma"][cand], sweep["beta"][cand], sweep["alpha"][cand], sweep["rho"][cand] ** 2)
    )
    j = cand[order[0]]
    params = GmmParams(float(sweep["alpha"][j]), float(sweep["beta"][j]), float(sweep["gamma"][j]))
    result = EvarResult(
        value=float(sweep["evar_bound"][j]),
        theta_star=float(evar_bound_theta0(obj.dim, spec.zeta) * 2.0 * sweep["u_bar"][j]),
        kind="bound",
        zeta=spec.zeta,
    )
    return params, result, float(sweep["rho"][j])
