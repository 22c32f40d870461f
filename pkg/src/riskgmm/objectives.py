"""Strongly convex test objectives: quadratics and regularized logistic regression.

Both objective kinds expose the same surface (eval / grad / mu / lsmooth /
fstar / dim) and accept batched inputs of shape (..., d) so the simulator can
run many sample paths at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class Objective(Protocol):
    """Minimal surface shared by all objectives."""

    mu: float
    lsmooth: float

    @property
    def dim(self) -> int: ...

    @property
    def fstar(self) -> float: ...

    def eval(self, x: np.ndarray) -> np.ndarray | float: ...

    def grad(self, x: np.ndarray) -> np.ndarray: ...


class QuadraticObjective:
    """f(x) = 0.5 x^T Q x + p^T x + r with Q stored by its spectrum.

    The eigen-decomposition Q = U diag(lambda) U^T is kept explicit (identity
    rotation when Q is diagonal) so that per-mode analysis can read the
    eigenvalues directly; dense Q is only materialized on demand.
    """

    def __init__(self, eigenvalues, linear_term=None, constant=0.0, rotation=None):
        lam = np.asarray(eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("eigenvalues must be a nonempty 1-D sequence")
        if np.any(lam <= 0):
            raise ValueError("all eigenvalues must be strictly positive")
        if not np.all(np.diff(lam) >= 0):
            raise ValueError("eigenvalues must be sorted ascending")
        if lam[0] == lam[-1]:
            raise ValueError("mu == L makes the problem class trivial; require mu < L")
        d = lam.size
        self.eigenvalues = lam
        self.linear_term = (
            np.zeros(d) if linear_term is None else np.asarray(linear_term, dtype=float)
        )
        if self.linear_term.shape != (d,):
            raise ValueError("linear_term has wrong shape")
        self.constant = float(constant)
        if rotation is not None:
            rotation = np.asarray(rotation, dtype=float)
            if rotation.shape != (d, d):
                raise ValueError("rotation has wrong shape")
            if not np.allclose(rotation @ rotation.T, np.eye(d), atol=1e-10):
                raise ValueError("rotation must be orthogonal")
        self.rotation = rotation
        self.mu = float(lam[0])
        self.lsmooth = float(lam[-1])
        # x* solves Q x + p = 0; in the eigenbasis each coordinate decouples.
        p_eig = self.linear_term if rotation is None else rotation.T @ self.linear_term
        xstar_eig = -p_eig / lam
        self.x_star = xstar_eig if rotation is None else rotation @ xstar_eig
        self._fstar = float(
            0.5 * np.dot(xstar_eig * lam, xstar_eig)
            + np.dot(p_eig, xstar_eig)
            + self.constant
        )

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def fstar(self) -> float:
        return self._fstar

    @property
    def kappa(self) -> float:
        return self.lsmooth / self.mu

    def hessian(self) -> np.ndarray:
        if self.rotation is None:
            return np.diag(self.eigenvalues)
        return self.rotation @ np.diag(self.eigenvalues) @ self.rotation.T

    def _to_eigen(self, v: np.ndarray) -> np.ndarray:
        return v if self.rotation is None else v @ self.rotation

    def _from_eigen(self, v: np.ndarray) -> np.ndarray:
        return v if self.rotation is None else v @ self.rotation.T

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        z = self._to_eigen(x - self.x_star)
        out = 0.5 * np.sum(self.eigenvalues * z * z, axis=-1) + self._fstar
        return float(out) if out.ndim == 0 else out

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        z = self._to_eigen(x - self.x_star)
        return self._from_eigen(self.eigenvalues * z)

    def suboptimality(self, x):
        x = np.asarray(x, dtype=float)
        z = self._to_eigen(x - self.x_star)
        out = 0.5 * np.sum(self.eigenvalues * z * z, axis=-1)
        return float(out) if out.ndim == 0 else out

    def descriptor(self) -> dict:
        return {
            "kind": "quadratic",
            "eigenvalues": self.eigenvalues.tolist(),
            "linear_term": self.linear_term.tolist(),
            "constant": self.constant,
            "rotation": None if self.rotation is None else self.rotation.tolist(),
        }


def make_paper_quadratic() -> QuadraticObjective:
    """d=10 quadratic with Hessian spectrum {i^2 + 5} and unit-norm linear term.

    The base Hessian has diagonal i^2 and a ridge term with weight 5 is folded
    in, so mu = 6 and L = 105.
    """
    d = 10
    lam = np.array([i**2 + 5.0 for i in range(1, d + 1)])
    b = np.ones(d) / np.sqrt(d)
    return QuadraticObjective(lam, linear_term=b)


def make_figure1_quadratic() -> QuadraticObjective:
    """2-D quadratic f(x1, x2) = x1^2 + 0.1 x2^2 (spectrum {0.2, 2.0})."""
    return QuadraticObjective(np.array([0.2, 2.0]))


@dataclass
class LogisticObjective:
    """Regularized binary logistic regression on {-1,+1} labels.

    f(x) = (1/N) sum_i log(1 + exp(-y_i X_i^T x)) + reg/2 ||x||^2.
    Strong convexity constant is exactly the ridge weight; smoothness uses the
    standard bound L = reg + lambda_max(X^T X) / (4N).
    """

    features: np.ndarray
    labels: np.ndarray
    reg: float
    mu: float = field(init=False)
    lsmooth: float = field(init=False)
    fstar_estimate: float = field(init=False)
    minimizer: np.ndarray = field(init=False)
    meta: dict = field(init=False, default_factory=dict)
    _descriptor: dict | None = None
    gd_tol: float = 1e-10
    gd_max_iter: int = 10**6

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("features must be (N, d) with matching labels")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be in {-1, +1}")
        if self.reg <= 0:
            raise ValueError("reg must be positive")
        self.features = X
        self.labels = y
        n = X.shape[0]
        self.mu = float(self.reg)
        gram_top = float(np.linalg.eigvalsh(X.T @ X)[-1])
        self.lsmooth = float(self.reg + gram_top / (4.0 * n))
        self._fit_fstar()

    def _fit_fstar(self):
        # Deterministic GD with alpha = 1/L until the gradient is tiny; the
        # achieved gradient norm is recorded so downstream reports can carry
        # the estimation quality.
        x = np.zeros(self.dim)
        alpha = 1.0 / self.lsmooth
        gnorm = np.inf
        it = 0
        while it < self.gd_max_iter:
            g = self.grad(x)
            gnorm = float(np.linalg.norm(g))
            if gnorm <= self.gd_tol:
                break
            x = x - alpha * g
            it += 1
        self.minimizer = x
        self.fstar_estimate = float(self.eval(x))
        self.meta = {"gd_iterations": it, "achieved_grad_norm": gnorm, "gd_tol": self.gd_tol}

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def fstar(self) -> float:
        return self.fstar_estimate

    @property
    def x_star(self) -> np.ndarray:
        return self.minimizer

    @property
    def kappa(self) -> float:
        return self.lsmooth / self.mu

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        scores = x @ self.features.T  # (..., N)
        margins = -self.labels * scores
        loss = np.mean(np.logaddexp(0.0, margins), axis=-1)
        out = loss + 0.5 * self.reg * np.sum(x * x, axis=-1)
        return float(out) if out.ndim == 0 else out

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        scores = x @ self.features.T
        margins = -self.labels * scores
        # sigmoid(margins) computed stably for both signs
        w = np.where(margins >= 0, 1.0 / (1.0 + np.exp(-margins)),
                     np.exp(margins) / (1.0 + np.exp(margins)))
        coeff = -(w * self.labels) / self.n_samples
        return coeff @ self.features + self.reg * x

    def suboptimality(self, x):
        out = self.eval(x) - self.fstar_estimate
        return out

    def descriptor(self) -> dict:
        if self._descriptor is not None:
            return dict(self._descriptor)
        return {
            "kind": "logreg_data",
            "features": self.features.tolist(),
            "labels": self.labels.tolist(),
            "reg": self.reg,
        }


def make_synthetic_logreg(d: int, n: int, reg: float, feature_std: float, seed: int) -> LogisticObjective:
    """Synthetic separable-by-construction logistic instance.

    Features and a hidden direction are i.i.d. normal with the given std;
    labels are the signs of the hidden-direction scores.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be at least 1")
    if reg <= 0 or feature_std <= 0:
        raise ValueError("reg and feature_std must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    X = rng.normal(0.0, feature_std, size=(n, d))
    w = rng.normal(0.0, feature_std, size=d)
    y = np.where(X @ w >= 0, 1.0, -1.0)
    obj = LogisticObjective(features=X, labels=y, reg=float(reg))
    obj._descriptor = {
        "kind": "logreg",
        "d": d,
        "n": n,
        "reg": reg,
        "feature_std": feature_std,
        "seed": seed,
    }
    return obj


def objective_from_descriptor(desc: dict) -> Objective:
    """Rebuild an objective from its JSON descriptor (seeded, reproducible)."""
    kind = desc.get("kind")
    if kind == "quadratic":
        return QuadraticObjective(
            np.asarray(desc["eigenvalues"], dtype=float),
            linear_term=np.asarray(desc["linear_term"], dtype=float),
            constant=desc.get("constant", 0.0),
            rotation=None if desc.get("rotation") is None else np.asarray(desc["rotation"]),
        )
    if kind == "paper_quad":
        return make_paper_quadratic()
    if kind == "figure1_quad":
        return make_figure1_quadratic()
    if kind == "logreg":
        return make_synthetic_logreg(
            desc["d"], desc["n"], desc["reg"], desc["feature_std"], desc["seed"]
        )
    if kind == "logreg_data":
        return LogisticObjective(
            features=np.asarray(desc["features"], dtype=float),
            labels=np.asarray(desc["labels"], dtype=float),
            reg=desc["reg"],
        )
    raise ValueError(f"unknown objective kind: {kind!r}")


def objective_to_json(obj) -> str:
    return json.dumps(obj.descriptor(), sort_keys=True)


def objective_from_json(text: str) -> Objective:
    return objective_from_descriptor(json.loads(text))
