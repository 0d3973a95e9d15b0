"""Differentiable benchmark objectives with analytic gradients.

Each objective exposes ``value``, ``gradient``, a fused
``value_and_gradient`` for sampler loops, a vectorized ``value_many``
for quadrature grids, and ``lipschitz_bounds`` giving conservative
closed-form constants over a bounded domain. Bounds favor validity over
tightness: they are upper bounds on the true suprema, never estimates.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from rgld.geometry import FeasibleDomain

__all__ = [
    "Objective",
    "Quadratic",
    "GaussianMixture",
    "Rosenbrock",
    "Rastrigin",
    "make_grid_gaussian_mixture",
    "MIXTURE_GRID",
    "DOMINANT_MODE",
    "DOMINANT_WEIGHT",
]

TWO_PI = 2.0 * math.pi

# The 5x5 lattice of mixture means and the mode forced to dominate.
MIXTURE_GRID = (-2.0, -1.0, 0.0, 1.0, 2.0)
DOMINANT_MODE = (0.0, -2.0)
# Forced weight of the dominant mode. Uniform [0.5, 1.0) weights alone do
# not pin the global minimizer to the dominant mode: neighboring modes on
# the lattice deepen interior points more than edge points, so the forced
# weight must dominate their combined pull. 12.0 keeps the minimizer
# within 0.2 of the dominant mean even when every other weight is at the
# top of its range.
DOMINANT_WEIGHT = 12.0


class Objective:
    """A differentiable scalar function with an analytic gradient."""

    dim: int

    def _as_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError(
                f"expected a point of dimension {self.dim}, got shape {x.shape}"
            )
        return x

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def value_and_gradient(self, x) -> tuple[float, np.ndarray]:
        """Value and gradient in one evaluation (overridden where fusing
        saves work in the per-step sampler loop)."""
        return self.value(x), self.gradient(x)

    def value_many(self, X) -> np.ndarray:
        """Vectorized value over rows of ``X`` with shape ``(n, dim)``."""
        X = np.asarray(X, dtype=np.float64)
        return np.array([self.value(row) for row in X])

    def lipschitz_bounds(self, domain: FeasibleDomain) -> tuple[float, float, float]:
        """Conservative constants ``(L, M, G)`` over the domain.

        ``L`` and ``G`` bound ``sup ||grad f||`` (``G`` is kept as a
        separate return for the step-size admissibility check), ``M``
        bounds the Hessian operator norm. All are valid over the convex
        hull of the domain, so they also certify Lipschitz continuity
        along straight segments between any two feasible points.
        """
        raise NotImplementedError

    def _coordinate_bound(self, domain: FeasibleDomain) -> float:
        # Bound on ||x|| over the domain's convex hull, valid for any center.
        if domain.dim != self.dim:
            raise ValueError(
                f"objective dimension {self.dim} does not match domain "
                f"dimension {domain.dim}"
            )
        return float(np.linalg.norm(domain.center)) + domain.bounding_radius


class Quadratic(Objective):
    """``f(x) = scale * ||x||^2 / 2``."""

    def __init__(self, scale: float = 1.0, dim: int = 1):
        if not scale > 0:
            raise ValueError("scale must be positive")
        if dim < 1:
            raise ValueError("dim must be at least 1")
        self.scale = float(scale)
        self.dim = int(dim)

    def value(self, x) -> float:
        x = self._as_point(x)
        return 0.5 * self.scale * float(x @ x)

    def gradient(self, x) -> np.ndarray:
        x = self._as_point(x)
        return self.scale * x

    def value_and_gradient(self, x):
        x = self._as_point(x)
        return 0.5 * self.scale * float(x @ x), self.scale * x

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return 0.5 * self.scale * np.sum(X * X, axis=1)

    def lipschitz_bounds(self, domain):
        B = self._coordinate_bound(domain)
        L = self.scale * B
        return L, self.scale, L


class GaussianMixture(Objective):
    """Negated sum of isotropic unit-variance Gaussian bumps.

    ``f(x) = -sum_i w_i exp(-||x - m_i||^2 / 2)`` with positive weights
    ``w_i`` and means ``m_i``. When built by
    :func:`make_grid_gaussian_mixture`, ``global_minimizer`` and
    ``global_min_value`` hold the located minimum.
    """

    def __init__(self, weights, means):
        weights = np.asarray(weights, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
        if means.ndim != 2:
            raise ValueError("means must have shape (n_modes, dim)")
        if weights.shape != (means.shape[0],):
            raise ValueError("weights and means disagree on the number of modes")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")
        weights.setflags(write=False)
        means.setflags(write=False)
        self.weights = weights
        self.means = means
        self.dim = means.shape[1]
        self.global_minimizer: np.ndarray | None = None
        self.global_min_value: float | None = None

    @property
    def n_modes(self) -> int:
        return self.means.shape[0]

    def _bumps(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = x - self.means
        q = np.exp(-0.5 * np.sum(z * z, axis=1))
        return z, q

    def value(self, x) -> float:
        x = self._as_point(x)
        _, q = self._bumps(x)
        return -float(self.weights @ q)

    def gradient(self, x) -> np.ndarray:
        x = self._as_point(x)
        z, q = self._bumps(x)
        return (self.weights * q) @ z

    def value_and_gradient(self, x):
        x = self._as_point(x)
        z, q = self._bumps(x)
        return -float(self.weights @ q), (self.weights * q) @ z

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        Z = X[:, None, :] - self.means[None, :, :]
        Q = np.exp(-0.5 * np.sum(Z * Z, axis=2))
        return -(Q @ self.weights)

    def refine_minimum(self, start) -> tuple[np.ndarray, float]:
        """Local descent from ``start`` using the analytic gradient."""
        res = optimize.minimize(
            self.value, np.asarray(start, dtype=np.float64),
            jac=self.gradient, method="BFGS", options={"gtol": 1e-12},
        )
        return res.x, float(res.fun)

    def lipschitz_bounds(self, domain):
        B = self._coordinate_bound(domain)
        total = float(np.sum(self.weights))
        # Per mode, t * exp(-t^2/2) <= exp(-1/2) for all t >= 0, and the
        # cruder t <= B + max ||m_i|| bound is kept as an alternative.
        max_mean = float(np.max(np.linalg.norm(self.means, axis=1)))
        L = total * min(math.exp(-0.5), B + max_mean)
        # Per-mode Hessian w * exp(-t^2/2) * (I - z z^T) has operator norm
        # at most w (attained at t = 0).
        M = total
        return L, M, L


class Rosenbrock(Objective):
    """The classic banana-valley function.

    ``f(x) = sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2`` with the
    global minimum 0 at the all-ones point. For ``d >= 4`` there is a
    second local minimum with value 4 near ``(-1, 1, ..., 1)``.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("Rosenbrock requires dim >= 2")
        self.dim = int(dim)

    def value(self, x) -> float:
        x = self._as_point(x)
        t = x[1:] - x[:-1] ** 2
        return float(np.sum(100.0 * t * t + (1.0 - x[:-1]) ** 2))

    def gradient(self, x) -> np.ndarray:
        x = self._as_point(x)
        t = x[1:] - x[:-1] ** 2
        g = np.zeros_like(x)
        g[:-1] = -400.0 * x[:-1] * t - 2.0 * (1.0 - x[:-1])
        g[1:] += 200.0 * t
        return g

    def value_and_gradient(self, x):
        x = self._as_point(x)
        t = x[1:] - x[:-1] ** 2
        head = 1.0 - x[:-1]
        val = float(np.sum(100.0 * t * t + head * head))
        g = np.zeros_like(x)
        g[:-1] = -400.0 * x[:-1] * t - 2.0 * head
        g[1:] += 200.0 * t
        return val, g

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        T = X[:, 1:] - X[:, :-1] ** 2
        return np.sum(100.0 * T * T + (1.0 - X[:, :-1]) ** 2, axis=1)

    def lipschitz_bounds(self, domain):
        B = self._coordinate_bound(domain)
        # Per-coordinate gradient bound from |x_j| <= B.
        per_coord = 400.0 * B * (B + B * B) + 2.0 * (1.0 + B) + 200.0 * (B + B * B)
        L = math.sqrt(self.dim) * per_coord
        # Row-sum bound on the (tridiagonal) Hessian.
        M = 1200.0 * B * B + 1200.0 * B + 202.0
        return L, M, L


class Rastrigin(Objective):
    """Separable multimodal benchmark with a lattice of local minima.

    ``f(x) = 10 d + sum_i (x_i^2 - 10 cos(2 pi x_i))``, global minimum 0
    at the origin.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("Rastrigin requires dim >= 1")
        self.dim = int(dim)

    def value(self, x) -> float:
        x = self._as_point(x)
        return 10.0 * self.dim + float(np.sum(x * x - 10.0 * np.cos(TWO_PI * x)))

    def gradient(self, x) -> np.ndarray:
        x = self._as_point(x)
        return 2.0 * x + 20.0 * math.pi * np.sin(TWO_PI * x)

    def value_and_gradient(self, x):
        x = self._as_point(x)
        val = 10.0 * self.dim + float(np.sum(x * x - 10.0 * np.cos(TWO_PI * x)))
        return val, 2.0 * x + 20.0 * math.pi * np.sin(TWO_PI * x)

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return 10.0 * self.dim + np.sum(X * X - 10.0 * np.cos(TWO_PI * X), axis=1)

    def lipschitz_bounds(self, domain):
        B = self._coordinate_bound(domain)
        L = math.sqrt(self.dim) * (2.0 * B + 20.0 * math.pi)
        # |f_i''| = |2 + 40 pi^2 cos(2 pi x_i)| <= 2 + 40 pi^2, Hessian is diagonal.
        M = 2.0 + 40.0 * math.pi**2
        return L, M, L


def make_grid_gaussian_mixture(seed: int) -> GaussianMixture:
    """Build the 25-mode two-dimensional benchmark mixture.

    Means sit on the lattice ``MIXTURE_GRID x MIXTURE_GRID``. Weights are
    drawn uniformly from [0.5, 1.0) with the given seed, then the mode at
    ``DOMINANT_MODE`` is forced to ``DOMINANT_WEIGHT`` so that the global
    minimizer sits next to that mean for every seed. The located minimum
    (local descent from the dominant mean) is stored on the returned
    objective as ``global_minimizer`` / ``global_min_value``.
    """
    means = np.array(
        [(a, b) for a in MIXTURE_GRID for b in MIXTURE_GRID], dtype=np.float64
    )
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.5, 1.0, size=means.shape[0])
    dominant = np.flatnonzero((means == np.asarray(DOMINANT_MODE)).all(axis=1))
    weights[dominant[0]] = DOMINANT_WEIGHT
    gm = GaussianMixture(weights, means)
    xmin, fmin = gm.refine_minimum(np.asarray(DOMINANT_MODE))
    gm.global_minimizer = xmin
    gm.global_min_value = fmin
    return gm
