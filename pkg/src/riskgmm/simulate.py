"""Stochastic execution of noisy momentum iterations plus verification oracles.

Reproducibility scheme: the gradient noise for iteration step s is drawn from
a Philox stream keyed by (seed, step, substream). Every path reads a fixed
slice of that per-step block, so trajectories do not depend on how many other
paths run alongside them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import GmmParams

RNG_SCHEME = "philox4x64:key=(seed, 4*step + substream), path = block row"
DIVERGE_NORM = 1e100


@dataclass(frozen=True)
class NoiseModel:
    kind: str  # "gaussian_isotropic" | "uniform_ball" | "none"
    sigma2: float = 0.0
    radius: float = 0.0

    @staticmethod
    def gaussian(sigma2: float) -> "NoiseModel":
        if sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        return NoiseModel("gaussian_isotropic", sigma2=float(sigma2))

    @staticmethod
    def ball(radius: float) -> "NoiseModel":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return NoiseModel("uniform_ball", radius=float(radius))

    @staticmethod
    def none() -> "NoiseModel":
        return NoiseModel("none")

    @property
    def variance_proxy(self) -> float:
        """Sub-Gaussian variance proxy valid for this noise.

        For the ball we use radius^2: with sigma^2 = r^2 the tail condition
        2 exp(-t^2 / 2 sigma^2) >= P(||w|| >= t) holds for every t, and the
        proxy dominates E||w||^2 = r^2 d/(d+2) in every dimension.
        """
        if self.kind == "gaussian_isotropic":
            return self.sigma2
        if self.kind == "uniform_ball":
            return self.radius**2
        return 0.0

    def sample(self, seed: int, step: int, n: int, d: int) -> np.ndarray | None:
        if self.kind == "none":
            return None
        key0 = np.uint64(seed)
        g_norm = np.random.Generator(np.random.Philox(key=np.array([key0, np.uint64(4 * step)], dtype=np.uint64)))
        if self.kind == "gaussian_isotropic":
            return g_norm.standard_normal((n, d)) * math.sqrt(self.sigma2)
        # uniform on the ball: direction from normals, radius from a second
        # substream so the draw count per substream stays path-aligned
        direction = g_norm.standard_normal((n, d))
        g_rad = np.random.Generator(np.random.Philox(key=np.array([key0, np.uint64(4 * step + 1)], dtype=np.uint64)))
        u = g_rad.random(n)
        norms = np.linalg.norm(direction, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return self.radius * (u ** (1.0 / d))[:, None] * direction / norms


@dataclass(frozen=True)
class RunConfig:
    params: GmmParams
    k_max: int
    n_paths: int
    x0: np.ndarray
    seed: int
    record_every: int = 1

    def __post_init__(self):
        if self.k_max < 1 or self.n_paths < 1 or self.record_every < 1:
            raise ValueError("k_max, n_paths, record_every must be >= 1")

    def recorded_steps(self) -> np.ndarray:
        ks = list(range(0, self.k_max + 1, self.record_every))
        if ks[-1] != self.k_max:
            ks.append(self.k_max)
        return np.asarray(ks, dtype=int)


@dataclass
class Ensemble:
    steps: np.ndarray
    subopt: np.ndarray  # (n_paths, len(steps)); NaN after divergence
    seed: int
    rng_scheme: str = RNG_SCHEME
    n_diverged: int = 0
    states: list | None = None  # optional (x_curr, x_prev) snapshots

    @property
    def n_paths(self) -> int:
        return self.subopt.shape[0]

    def column(self, k: int) -> np.ndarray:
        idx = np.flatnonzero(self.steps == k)
        if idx.size == 0:
            raise KeyError(f"step {k} was not recorded")
        col = self.subopt[:, idx[0]]
        return col[np.isfinite(col)]

    @property
    def mean(self) -> np.ndarray:
        return np.nanmean(self.subopt, axis=0)

    @property
    def std(self) -> np.ndarray:
        return np.nanstd(self.subopt, axis=0)

    @property
    def rms(self) -> np.ndarray:
        """Root mean square of suboptimality (the shaded-band statistic)."""
        return np.sqrt(np.nanmean(self.subopt**2, axis=0))

    @property
    def n_alive(self) -> np.ndarray:
        return np.sum(np.isfinite(self.subopt), axis=0)

    @property
    def final_samples(self) -> np.ndarray:
        return self.column(int(self.steps[-1]))


def run_gmm(obj, cfg: RunConfig, noise: NoiseModel, record_states: bool = False) -> Ensemble:
    """Iterate x_{k+1} = (1+b) x_k - b x_{k-1} - a (grad f(y_k) + w_{k+1}).

    x_{-1} is initialized to x0, so z_0 = (x0, x0). Non-finite or astronomically
    large iterates flag the path diverged; it is frozen at NaN afterwards.
    """
    a, b, g = cfg.params.as_tuple()
    d = cfg.x0.size
    n = cfg.n_paths
    rec = cfg.recorded_steps()
    rec_set = {int(k): j for j, k in enumerate(rec)}
    x = np.tile(np.asarray(cfg.x0, dtype=float), (n, 1))
    x_prev = x.copy()
    alive = np.ones(n, dtype=bool)
    subopt = np.full((n, rec.size), np.nan)
    states = [] if record_states else None

    def record(k, col):
        s = obj.eval(x[alive]) - obj.fstar
        subopt[alive, col] = s
        if record_states:
            states.append((int(k), x.copy(), x_prev.copy()))

    if 0 in rec_set:
        record(0, rec_set[0])
    for k in range(cfg.k_max):
        y = (1.0 + g) * x - g * x_prev
        grad = obj.grad(y)
        w = noise.sample(cfg.seed, k + 1, n, d)
        step = grad if w is None else grad + w
        x_next = (1.0 + b) * x - b * x_prev - a * step
        x_prev, x = x, x_next
        bad = alive & (~np.all(np.isfinite(x), axis=1) | (np.linalg.norm(x, axis=1) > DIVERGE_NORM))
        if np.any(bad):
            alive = alive & ~bad
            x[~alive] = np.nan
            x_prev[~alive] = np.nan
        if (k + 1) in rec_set:
            record(k + 1, rec_set[k + 1])
    return Ensemble(
        steps=rec,
        subopt=subopt,
        seed=cfg.seed,
        n_diverged=int(n - alive.sum()),
        states=states,
    )


def empirical_entropic_risk(ensemble: Ensemble, sigma2: float, theta: float, k: int) -> float:
    """(2 sigma^2/theta) log mean exp((theta/2 sigma^2) S_k), log-sum-exp stabilized."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    s = ensemble.column(k)
    t = theta / (2.0 * sigma2)
    m = float(np.max(t * s))
    val = m + math.log(float(np.mean(np.exp(t * s - m))))
    return (2.0 * sigma2 / theta) * val


def empirical_entropic_risk_se(ensemble: Ensemble, sigma2: float, theta: float, k: int) -> float:
    """Delta-method standard error of the empirical risk estimator."""
    s = ensemble.column(k)
    t = theta / (2.0 * sigma2)
    m = float(np.max(t * s))
    e = np.exp(t * s - m)
    mean_e = float(np.mean(e))
    se_mean = float(np.std(e, ddof=1)) / math.sqrt(s.size)
    return (2.0 * sigma2 / theta) * se_mean / mean_e


@dataclass(frozen=True)
class Ecdf:
    values: np.ndarray
    fractions: np.ndarray

    def __call__(self, t) -> np.ndarray | float:
        idx = np.searchsorted(self.values, t, side="right")
        out = idx / self.values.size
        return float(out) if np.ndim(out) == 0 else out

    def tail(self, t) -> np.ndarray | float:
        """Empirical P{S >= t}."""
        idx = np.searchsorted(self.values, t, side="left")
        out = 1.0 - idx / self.values.size
        return float(out) if np.ndim(out) == 0 else out


def ecdf_final(ensemble: Ensemble) -> Ecdf:
    v = np.sort(ensemble.final_samples)
    return Ecdf(values=v, fractions=np.arange(1, v.size + 1) / v.size)


def dominance_report(a: Ensemble, b: Ensemble, thresholds) -> float:
    """Fraction of thresholds t where tail_a(t) <= tail_b(t)."""
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.size == 0:
        raise ValueError("thresholds must be nonempty")
    ea, eb = ecdf_final(a), ecdf_final(b)
    good = ea.tail(thresholds) <= eb.tail(thresholds)
    return float(np.mean(good))


def lyapunov_fixpoint_oracle(params: GmmParams, obj, sigma2: float, tol: float = 1e-12) -> np.ndarray:
    """Per-mode stationary variances by brute-force 2x2 Lyapunov iteration.

    Iterates Xi <- M Xi M^T + sigma^2 B B^T per eigenmode (written out in the
    three distinct entries of the symmetric 2x2 Xi, all modes at once) and
    returns lambda_i * Xi_11 / 2, the eigenvalues of the stationary
    suboptimality covariance. Independent of the closed-form u_i route.
    """
    from .quad import in_stable_set, mode_cd

    if not in_stable_set(params, obj):
        raise ValueError("unstable parameters")
    lam = obj.eigenvalues.astype(np.longdouble)
    c, d = mode_cd(params, lam)
    # Xi_{2^t} of the recursion, advanced by step doubling: squaring the
    # per-mode transition keeps the pass count logarithmic even when the
    # spectral radius sits next to 1, where the one-step recursion would
    # need millions of sweeps.
    m11, m12, m21, m22 = c, d, np.ones_like(c), np.zeros_like(c)
    s11 = np.full_like(lam, np.longdouble(sigma2) * np.longdouble(params.alpha) ** 2)
    s12 = np.zeros_like(lam)
    s22 = np.zeros_like(lam)
    for _ in range(200):
        t11 = m11 * s11 + m12 * s12
        t12 = m11 * s12 + m12 * s22
        t21 = m21 * s11 + m22 * s12
        t22 = m21 * s12 + m22 * s22
        d11 = t11 * m11 + t12 * m12
        d12 = t11 * m21 + t12 * m22
        d22 = t21 * m21 + t22 * m22
        s11, s12, s22 = s11 + d11, s12 + d12, s22 + d22
        n11 = m11 * m11 + m12 * m21
        n12 = m11 * m12 + m12 * m22
        n21 = m21 * m11 + m22 * m21
        n22 = m21 * m12 + m22 * m22
        m11, m12, m21, m22 = n11, n12, n21, n22
        delta = max(
            float(np.max(np.abs(d11))), float(np.max(np.abs(d12))), float(np.max(np.abs(d22)))
        )
        if delta <= tol:
            break
    else:
        raise RuntimeError("Lyapunov fixpoint did not converge")
    return np.asarray(0.5 * lam * s11, dtype=float)


def mc_evar_oracle(ensemble: Ensemble, sigma2: float, zeta: float, theta_grid, k: int | None = None) -> float:
    """Empirical EV@R: minimize empirical risk + (2 sigma^2/theta) log(1/zeta)."""
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    kk = int(ensemble.steps[-1]) if k is None else k
    log_term = 2.0 * sigma2 * math.log(1.0 / zeta)
    best = math.inf
    for theta in np.asarray(theta_grid, dtype=float):
        r = empirical_entropic_risk(ensemble, sigma2, theta, kk)
        best = min(best, r + log_term / theta)
    return best
