"""Certified rates and risk/EV@R bounds for general strongly convex objectives.

The momentum parameters are generated from two free variables (vartheta, psi):
alpha is pinned by alpha L (1 - psi) = 1 - vartheta away from the AGD slice
(vartheta = psi = 1, alpha free in (0, 1/L]), beta follows a closed form and
gamma = psi * beta. On the admissible set the rate rho^2 = 1 - sqrt(vartheta
alpha mu) is certified by a rank-one Lyapunov weight; a 3x3 matrix inequality
certifies arbitrary (params, rate, weight) triples numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import GmmParams

MI_TOL = 1e-9


# ---------------------------------------------------------------------------
# (vartheta, psi) admissible sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaPsi:
    vartheta: float
    psi: float


@dataclass(frozen=True)
class SetMembership:
    in_s0: bool
    in_splus: bool
    in_sminus: bool
    in_s1: bool
    in_sc: bool


def classify_theta_psi(tp: ThetaPsi, mu: float, L: float) -> SetMembership:
    if not (0 < mu < L):
        raise ValueError("require 0 < mu < L")
    kappa = L / mu
    t, p = tp.vartheta, tp.psi

    in_s0 = t == 1.0 and p == 1.0

    in_splus = p > 1.0 and 1.0 < t <= 2.0 - 1.0 / p

    if 0.0 <= p < 1.0:
        # psi = 0 convention: the 2 - 1/psi branch of the max drops out.
        lower = 1.0 / (1.0 + kappa * (1.0 - p)) if p == 0.0 else max(
            2.0 - 1.0 / p, 1.0 / (1.0 + kappa * (1.0 - p))
        )
        in_sminus = lower <= t < 1.0
    else:
        in_sminus = False

    in_s1 = False
    if p != 1.0 and t > 0.0:
        sq_arg = (1.0 - t) * t / (kappa * (1.0 - p))
        if sq_arg >= 0.0:
            lhs = (1.0 - math.sqrt(sq_arg)) * (
                1.0 - (1.0 - t) * (mu * p**2 - L * (1.0 - p) ** 2) / (L * (1.0 - p) * t)
            )
            rhs = (1.0 - (1.0 - t) * p / (kappa * (1.0 - p))) ** 2
            in_s1 = lhs <= rhs

    in_sc = (in_splus or in_sminus) and in_s1
    return SetMembership(in_s0, in_splus, in_sminus, in_s1, in_sc)


@dataclass(frozen=True)
class SmoothParams:
    base: GmmParams
    vartheta: float
    psi: float
    alpha: float
    rate2: float
    lyap_lambda: float
    mu: float
    lsmooth: float

    @property
    def rho2(self) -> float:
        return self.rate2


def smooth_params(tp: ThetaPsi, mu: float, L: float, alpha_s0: float | None = None) -> SmoothParams:
    member = classify_theta_psi(tp, mu, L)
    if member.in_s0:
        if alpha_s0 is None or not (0.0 < alpha_s0 <= 1.0 / L):
            raise ValueError("vartheta = psi = 1 requires alpha_s0 in (0, 1/L]")
        alpha = float(alpha_s0)
    elif member.in_sc:
        alpha = (1.0 - tp.vartheta) / (L * (1.0 - tp.psi))
    else:
        raise ValueError("parameters not certified by the admissible-set theorem")
    t, p = tp.vartheta, tp.psi
    root = math.sqrt(t * alpha * mu)
    beta = (1.0 - root) / (1.0 - alpha * p * mu) * (1.0 - math.sqrt(alpha * mu / t))
    gamma = p * beta
    rate2 = 1.0 - root
    return SmoothParams(
        base=GmmParams(alpha, beta, gamma),
        vartheta=t,
        psi=p,
        alpha=alpha,
        rate2=rate2,
        lyap_lambda=t / (2.0 * alpha),
        mu=mu,
        lsmooth=L,
    )


# ---------------------------------------------------------------------------
# Lyapunov function
# ---------------------------------------------------------------------------


def p_tilde_vector(sp: SmoothParams) -> np.ndarray:
    a = math.sqrt(sp.vartheta / (2.0 * sp.alpha))
    return np.array([a, -a + math.sqrt(sp.mu / 2.0)])


def p_tilde_matrix(sp: SmoothParams) -> np.ndarray:
    v = p_tilde_vector(sp)
    return np.outer(v, v)


def lyapunov_value(sp: SmoothParams, obj, x_curr, x_prev) -> np.ndarray | float:
    """V_P(z) = (z - z*)^T (P_tilde x I)(z - z*) + f(x) - f*; batched over rows."""
    x_curr = np.asarray(x_curr, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    p = p_tilde_vector(sp)
    u = x_curr - obj.x_star
    v = x_prev - obj.x_star
    w = p[0] * u + p[1] * v
    quad = np.sum(w * w, axis=-1)
    out = quad + (obj.eval(x_curr) - obj.fstar)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Gaussian-noise bounds
# ---------------------------------------------------------------------------


def v_value(sp: SmoothParams) -> float:
    """Noise-amplification constant entering all risk rates.

    Same expression serves the Gaussian and sub-Gaussian analyses: the last
    term lambda_P rho^2 equals (vartheta / 2 alpha)(1 - sqrt(vartheta alpha mu)).
    """
    a, b, g = sp.base.as_tuple()
    L, mu = sp.lsmooth, sp.mu
    return (2.0 * L**2 / mu) * (
        2.0 * (b - g) ** 2 + (1.0 - a * L) ** 2 * (1.0 + 2.0 * g + 2.0 * g**2)
    ) + sp.lyap_lambda * sp.rate2


def theta_upper_gaussian(sp: SmoothParams) -> float:
    a = sp.alpha
    v = v_value(sp)
    root = math.sqrt(sp.vartheta * sp.mu)
    return 2.0 * root / (a * (8.0 * v * math.sqrt(a) + root * (sp.vartheta + a * sp.lsmooth)))


def rho_bar2_gaussian(sp: SmoothParams, theta: float) -> float:
    """Risk decay rate: rho^2 inflated by the theta-dependent noise terms."""
    a = sp.alpha
    v = v_value(sp)
    c1 = a * (sp.vartheta + a * sp.lsmooth)  # == alpha^2 (L + 2 lambda_P)
    l_theta = 4.0 * theta * a**2 * v / (2.0 - theta * c1)
    base = sp.rate2 + l_theta
    return 0.5 * base + 0.5 * math.sqrt(base**2 + 4.0 * l_theta)


@dataclass(frozen=True)
class RiskBoundReport:
    theta: float
    theta_upper: float
    v: float
    rho_bar2: float
    stationary_bound: float
    z0_lyapunov: float
    finite: bool
    noise_model: str

    def bias_at(self, k: int) -> float:
        return self.rho_bar2**k * 2.0 * self.z0_lyapunov

    def total_at(self, k: int) -> float:
        return self.stationary_bound + self.bias_at(k)


def risk_bound_gaussian(
    sp: SmoothParams, d: int, sigma2: float, theta: float, z0_lyap: float, k: int | None = None
) -> RiskBoundReport:
    theta_u = theta_upper_gaussian(sp)
    v = v_value(sp)
    if theta >= theta_u:
        return RiskBoundReport(theta, theta_u, v, float("inf"), float("inf"), z0_lyap, False, "gaussian")
    rb2 = rho_bar2_gaussian(sp, theta)
    c1 = sp.alpha * (sp.vartheta + sp.alpha * sp.lsmooth)
    stationary = sigma2 * d * c1 / ((1.0 - rb2) * (2.0 - theta * c1))
    return RiskBoundReport(theta, theta_u, v, rb2, stationary, z0_lyap, True, "gaussian")


@dataclass(frozen=True)
class EvarBoundReport:
    phi: float
    zeta: float
    theta_phi: float
    rho_barbar: float
    condition_holds: bool
    branch1_value: float
    branch2_value: float
    asymptotic_bound: float
    z0_lyapunov: float
    noise_model: str

    def finite_k_bound(self, k: int) -> float:
        return self.asymptotic_bound + self.rho_barbar**k * 2.0 * self.z0_lyapunov


def evar_bound_gaussian(
    sp: SmoothParams, d: int, sigma2: float, zeta: float, phi: float, z0_lyap: float = 0.0
) -> EvarBoundReport:
    if not (0.0 < phi < 1.0) or not (0.0 < zeta < 1.0):
        raise ValueError("phi and zeta must lie in (0, 1)")
    theta_phi = phi * theta_upper_gaussian(sp)
    rbb = rho_bar2_gaussian(sp, theta_phi)
    c1 = sp.alpha * (sp.vartheta + sp.alpha * sp.lsmooth)
    c0 = d * c1 / (1.0 - rbb)
    log_z = math.log(1.0 / zeta)
    cond = log_z <= (d / (2.0 * (1.0 - rbb))) * (theta_phi * c1 / (2.0 - theta_phi * c1)) ** 2
    branch1 = 0.5 * sigma2 * (math.sqrt(2.0 * c1 * log_z) + math.sqrt(c0)) ** 2
    branch2 = sigma2 * c0 / (2.0 - theta_phi * c1) + 2.0 * sigma2 * log_z / theta_phi
    return EvarBoundReport(
        phi=phi,
        zeta=zeta,
        theta_phi=theta_phi,
        rho_barbar=rbb,
        condition_holds=bool(cond),
        branch1_value=branch1,
        branch2_value=branch2,
        asymptotic_bound=branch1 if cond else branch2,
        z0_lyapunov=z0_lyap,
        noise_model="gaussian",
    )


def expected_subopt_bound(
    sp: SmoothParams, d: int, sigma2: float, z0_lyap: float, k: int, noise: str = "gaussian"
) -> float:
    if k < 0 or z0_lyap < 0:
        raise ValueError("k and z0_lyap must be nonnegative")
    bias = sp.rate2**k * z0_lyap
    a = sp.alpha
    if noise == "gaussian":
        var = math.sqrt(a) * (sp.lsmooth * a + sp.vartheta) / (2.0 * math.sqrt(sp.vartheta * sp.mu)) * d * sigma2
    elif noise == "subgaussian":
        var = sigma2 * a**2 * (sp.lsmooth / 2.0 + sp.lyap_lambda) / (1.0 - sp.rate2)
    else:
        raise ValueError("noise must be 'gaussian' or 'subgaussian'")
    return bias + var


# ---------------------------------------------------------------------------
# Gradient-descent specialization
# ---------------------------------------------------------------------------


def gd_rate(alpha: float, mu: float, L: float) -> float:
    return max(abs(1.0 - alpha * mu), abs(1.0 - alpha * L))


def gd_theta_upper(alpha: float, mu: float, L: float) -> float:
    rho = gd_rate(alpha, mu, L)
    return 2.0 * (1.0 - rho**2) / (L * alpha**2)


@dataclass(frozen=True)
class GdRiskBound:
    theta: float
    theta_upper: float
    rho2: float
    rho_bar2: float
    stationary_bound: float
    x0_dist2: float
    lsmooth: float
    finite: bool

    def bias_at(self, k: int) -> float:
        return self.rho_bar2**k * self.lsmooth * self.x0_dist2 / 2.0

    def total_at(self, k: int) -> float:
        return self.stationary_bound + self.bias_at(k)


def gd_risk_bound(
    alpha: float, mu: float, L: float, d: int, sigma2: float, theta: float, x0_dist: float
) -> GdRiskBound:
    if not (0.0 < alpha <= 2.0 / (mu + L)):
        raise ValueError("alpha must lie in (0, 2/(mu+L)]")
    rho2 = gd_rate(alpha, mu, L) ** 2
    theta_u = 2.0 * (1.0 - rho2) / (L * alpha**2)
    if theta >= theta_u:
        return GdRiskBound(theta, theta_u, rho2, float("inf"), float("inf"), x0_dist**2, L, False)
    rho_bar2 = rho2 / (1.0 - theta * alpha**2 * L / 2.0)
    stationary = sigma2 * d * alpha**2 * L / (2.0 * (1.0 - rho2) - theta * alpha**2 * L)
    return GdRiskBound(theta, theta_u, rho2, rho_bar2, stationary, x0_dist**2, L, True)


@dataclass(frozen=True)
class GdEvarBound:
    zeta: float
    phi_gd: float
    rho2: float
    bias_rate: float
    asymptotic_bound: float
    x0_dist2: float
    lsmooth: float

    def finite_k_bound(self, k: int) -> float:
        return self.asymptotic_bound + self.bias_rate**k * self.lsmooth * self.x0_dist2 / 2.0


def gd_evar_bound(
    alpha: float, mu: float, L: float, d: int, sigma2: float, zeta: float, x0_dist: float
) -> GdEvarBound:
    if not (0.0 < alpha <= 2.0 / (mu + L)):
        raise ValueError("alpha must lie in (0, 2/(mu+L)]")
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    rho2 = gd_rate(alpha, mu, L) ** 2
    s = math.sqrt(2.0 * math.log(1.0 / zeta))
    phi_gd = s / (s + math.sqrt(d))
    asym = sigma2 * alpha**2 * L / (2.0 * (1.0 - rho2)) * (s + math.sqrt(d)) ** 2
    bias_rate = rho2 / (1.0 - phi_gd * (1.0 - rho2))
    return GdEvarBound(zeta, phi_gd, rho2, bias_rate, asym, x0_dist**2, L)


# ---------------------------------------------------------------------------
# Sub-Gaussian noise bounds
# ---------------------------------------------------------------------------


def theta_upper_subgaussian(sp: SmoothParams) -> float:
    a = sp.alpha
    v = v_value(sp)
    c = sp.lsmooth + 2.0 * sp.lyap_lambda
    return min((1.0 - sp.rate2) / (64.0 * a**2 * v), 1.0 / (4.0 * a**2 * c))


def rho_hat2_subgaussian(sp: SmoothParams, theta: float) -> float:
    a2v = sp.alpha**2 * v_value(sp)
    base = sp.rate2 + 32.0 * a2v * theta
    return 0.5 * base + 0.5 * math.sqrt(base**2 + 128.0 * a2v * theta)


def risk_bound_subgaussian(
    sp: SmoothParams, sigma2: float, theta: float, z0_lyap: float, k: int | None = None
) -> RiskBoundReport:
    theta_u = theta_upper_subgaussian(sp)
    v = v_value(sp)
    if theta >= theta_u:
        return RiskBoundReport(theta, theta_u, v, float("inf"), float("inf"), z0_lyap, False, "subgaussian")
    rh2 = rho_hat2_subgaussian(sp, theta)
    c = sp.lsmooth + 2.0 * sp.lyap_lambda
    stationary = 4.0 * sigma2 * sp.alpha**2 * c / (1.0 - rh2)
    return RiskBoundReport(theta, theta_u, v, rh2, stationary, z0_lyap, True, "subgaussian")


def evar_bound_subgaussian(
    sp: SmoothParams, sigma2: float, zeta: float, phi: float, z0_lyap: float = 0.0
) -> EvarBoundReport:
    if not (0.0 < phi < 1.0) or not (0.0 < zeta < 1.0):
        raise ValueError("phi and zeta must lie in (0, 1)")
    theta_phi = phi * theta_upper_subgaussian(sp)
    a2v = sp.alpha**2 * v_value(sp)
    base = sp.rate2 + 32.0 * a2v * theta_phi
    t_hat = math.sqrt(base**2 + 128.0 * a2v * theta_phi)
    rhh = 0.5 * base + 0.5 * t_hat
    c = sp.lsmooth + 2.0 * sp.lyap_lambda
    # c1 - theta c2 with c0 = 8 alpha^2 c, c1 = 2 - rho^2 - t_hat, c2 = 32 alpha^2 v
    c0 = 8.0 * sp.alpha**2 * c
    c1 = 2.0 - sp.rate2 - t_hat
    c2 = 32.0 * a2v
    log_z = math.log(1.0 / zeta)
    cond = log_z <= (c0 * c2 / 2.0) * (theta_phi / (c1 - theta_phi * c2)) ** 2
    branch1 = (sigma2 / c1) * (math.sqrt(2.0 * c2 * log_z) + math.sqrt(c0)) ** 2
    branch2 = sigma2 * c0 / (c1 - theta_phi * c2) + 2.0 * sigma2 * log_z / theta_phi
    return EvarBoundReport(
        phi=phi,
        zeta=zeta,
        theta_phi=theta_phi,
        rho_barbar=rhh,
        condition_holds=bool(cond),
        branch1_value=branch1,
        branch2_value=branch2,
        asymptotic_bound=branch1 if cond else branch2,
        z0_lyapunov=z0_lyap,
        noise_model="subgaussian",
    )


# ---------------------------------------------------------------------------
# Matrix-inequality certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MiCertificate:
    params: GmmParams
    rho2: float
    p_tilde: np.ndarray
    max_eig_lhs: float
    certified: bool


def _det3(A):
    return (
        A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
        - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
        + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
    )


def _sym3_max_eig(A: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric 3x3 via the trigonometric closed form.

    Evaluated in extended precision: the assembled inequality matrix can carry
    entries of size vartheta/(2 alpha) with heavy cancellation, and the
    certificate tolerance is absolute.
    """
    A = A.astype(np.longdouble)
    p1 = A[0, 1] ** 2 + A[0, 2] ** 2 + A[1, 2] ** 2
    if p1 == 0.0:
        return float(np.max(np.diag(A)))
    q = (A[0, 0] + A[1, 1] + A[2, 2]) / 3.0
    p2 = (A[0, 0] - q) ** 2 + (A[1, 1] - q) ** 2 + (A[2, 2] - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    B = (A - q * np.eye(3, dtype=np.longdouble)) / p
    r = _det3(B) / 2.0
    r = np.clip(r, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    return float(q + 2.0 * p * np.cos(phi))


def mi_lhs(params: GmmParams, rho2: float, p_tilde: np.ndarray, mu: float, L: float) -> np.ndarray:
    a, b, g = (np.longdouble(v) for v in params.as_tuple())
    rho2 = np.longdouble(rho2)
    mu = np.longdouble(mu)
    L = np.longdouble(L)
    delta = b - g
    A_t = np.array([[1.0 + b, -b], [1.0, 0.0]], dtype=np.longdouble)
    B_t = np.array([[-a], [np.longdouble(0.0)]], dtype=np.longdouble)
    P = np.asarray(p_tilde, dtype=np.longdouble)
    top_left = A_t.T @ P @ A_t - rho2 * P
    top_right = A_t.T @ P @ B_t
    bottom_right = B_t.T @ P @ B_t
    lhs = np.block([[top_left, top_right], [top_right.T, bottom_right]])
    x1 = 0.5 * np.array(
        [
            [-L * delta**2, L * delta**2, -(1.0 - a * L) * delta],
            [L * delta**2, -L * delta**2, (1.0 - a * L) * delta],
            [-(1.0 - a * L) * delta, (1.0 - a * L) * delta, a * (2.0 - a * L)],
        ]
    )
    x2 = 0.5 * np.array(
        [
            [g**2 * mu, -(g**2) * mu, -g],
            [-(g**2) * mu, g**2 * mu, g],
            [-g, g, 0.0],
        ]
    )
    x3 = 0.5 * np.array(
        [
            [(1.0 + g) ** 2 * mu, -g * (1.0 + g) * mu, -(1.0 + g)],
            [-g * (1.0 + g) * mu, g**2 * mu, g],
            [-(1.0 + g), g, 0.0],
        ]
    )
    x = x1 + rho2 * x2 + (1.0 - rho2) * x3
    return np.asarray(lhs - x, dtype=np.longdouble)


def mi_certify(params: GmmParams, rho2: float, p_tilde: np.ndarray, mu: float, L: float) -> MiCertificate:
    if not (0.0 < rho2 < 1.0):
        raise ValueError("rho2 must lie in (0, 1)")
    P = np.asarray(p_tilde, dtype=float)
    scale = max(1.0, float(np.max(np.abs(P))))
    if P.shape != (2, 2) or abs(P[0, 1] - P[1, 0]) > 1e-12 * scale:
        raise ValueError("p_tilde must be symmetric 2x2")
    eigs = np.linalg.eigvalsh(P)
    if eigs[0] < -1e-12 * scale:
        raise ValueError("p_tilde must be positive semi-definite")
    lhs = mi_lhs(params, rho2, P, mu, L)
    max_eig = _sym3_max_eig(0.5 * (lhs + lhs.T))
    return MiCertificate(params, rho2, P, float(max_eig), bool(max_eig <= MI_TOL))


def certify_smooth_params(sp: SmoothParams) -> MiCertificate:
    return mi_certify(sp.base, sp.rate2, p_tilde_matrix(sp), sp.mu, sp.lsmooth)


# ---------------------------------------------------------------------------
# Risk-averse parameter design
# ---------------------------------------------------------------------------


@dataclass
class SmoothDesignSpec:
    zeta: float
    epsilon: float
    phi: float
    sigma2: float
    d: int
    n_vartheta: int = 200
    n_psi: int = 200
    n_alpha: int = 60
    vartheta_range: tuple = (0.0, 2.0)
    psi_range: tuple = (0.0, 2.5)
    alpha_decades: float = 3.0
    agd_only: bool = False
    global_benchmark: bool = False
    z0_lyap: float = 0.0


def _design_candidates(mu: float, L: float, spec: SmoothDesignSpec):
    out = []
    alpha_grid = np.geomspace(10.0**-spec.alpha_decades / L, 1.0 / L, spec.n_alpha)
    for a in alpha_grid:
        out.append(smooth_params(ThetaPsi(1.0, 1.0), mu, L, alpha_s0=float(a)))
    if not spec.agd_only:
        tgrid = np.linspace(*spec.vartheta_range, spec.n_vartheta)
        pgrid = np.linspace(*spec.psi_range, spec.n_psi)
        for t in tgrid:
            for p in pgrid:
                tp = ThetaPsi(float(t), float(p))
                if classify_theta_psi(tp, mu, L).in_sc:
                    out.append(smooth_params(tp, mu, L))
    return out


def design_ra_gmm_smooth(mu: float, L: float, spec: SmoothDesignSpec):
    """Minimize the EV@R bound over certified parameters under a rate cap.

    The benchmark rate is 1 - sqrt(alpha mu) at each candidate's own alpha by
    default; with global_benchmark (always on for agd_only, matching the
    one-dimensional stepsize search) it is 1 - sqrt(mu/L).
    """
    use_global = spec.global_benchmark or spec.agd_only
    rho_star2_global = 1.0 - math.sqrt(mu / L)
    best = None
    for sp in _design_candidates(mu, L, spec):
        bench = rho_star2_global if use_global else 1.0 - math.sqrt(sp.alpha * mu)
        if sp.rate2 > (1.0 + spec.epsilon) * bench:
            continue
        rep = evar_bound_gaussian(sp, spec.d, spec.sigma2, spec.zeta, spec.phi, spec.z0_lyap)
        key = (rep.asymptotic_bound, sp.rate2, sp.alpha, sp.vartheta, sp.psi)
        if best is None or key < best[0]:
            best = (key, sp, rep)
    if best is None:
        raise ValueError("no parameters satisfy rate constraint at this grid resolution")
    return best[1], best[2]


def smooth_sweep_rows(mu: float, L: float, spec: SmoothDesignSpec):
    """Flat per-candidate rows for the admissible-set heatmap CSV."""
    use_global = spec.global_benchmark or spec.agd_only
    rho_star2_global = 1.0 - math.sqrt(mu / L)
    rows = []
    for sp in _design_candidates(mu, L, spec):
        bench = rho_star2_global if use_global else 1.0 - math.sqrt(sp.alpha * mu)
        rep = evar_bound_gaussian(sp, spec.d, spec.sigma2, spec.zeta, spec.phi, spec.z0_lyap)
        rows.append(
            {
                "vartheta": sp.vartheta,
                "psi": sp.psi,
                "alpha": sp.alpha,
                "beta": sp.base.beta,
                "gamma": sp.base.gamma,
                "rate2": sp.rate2,
                "rate_rel": sp.rate2 / bench,
                "evar_bound": rep.asymptotic_bound,
                "condition_branch": 1 if rep.condition_holds else 2,
            }
        )
    return rows
