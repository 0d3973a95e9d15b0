"""Quadrature oracle for the Gibbs target density and comparison tools.

The stationary law of the constrained Langevin diffusion has density
proportional to ``exp(-beta * f)`` restricted to the feasible region.
On one- and two-dimensional domains that density is representable by
midpoint-rule quadrature on a tensor grid, giving a deterministic
reference against which empirical chain histograms can be scored with
total variation distance. The midpoint rule (rather than Monte Carlo)
makes convergence under grid refinement directly testable.

Cells are classified in/out of the region by their midpoint, so boundary
cells are approximated; at 128+ cells per axis that error is far below
the total variation tolerances used in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rgld.geometry import FeasibleDomain
from rgld.objectives import Objective

__all__ = [
    "GibbsOracle",
    "Histogram",
    "build_oracle",
    "bin_samples",
    "gibbs_mean_f",
    "tv_distance",
    "total_variation",
    "near_optimality_bound",
    "export_cells_csv",
]

MIN_CELLS_PER_AXIS = 32


class GibbsOracle:
    """Midpoint-rule representation of ``exp(-beta f) / Z`` on a domain.

    The grid spans the domain's bounding box with ``n_per_axis`` cells
    per axis; cells whose midpoint falls outside the region carry zero
    probability. Restricted to dimension 1 or 2 because the cell count
    grows as ``n_per_axis ** dim``.

    Attributes
    ----------
    edges : tuple of ndarray
        Cell edges per axis (each of length ``n_per_axis + 1``).
    midpoints : ndarray
        Flattened cell midpoints, shape ``(n_cells, dim)``.
    in_domain : ndarray of bool
        Midpoint membership per cell.
    f_values : ndarray
        Objective at each midpoint.
    probabilities : ndarray
        Normalized cell probabilities (sum to 1).
    normalizing_constant : float
        Quadrature estimate of ``integral exp(-beta f)`` over the region.
    """

    def __init__(
        self,
        objective: Objective,
        domain: FeasibleDomain,
        beta: float,
        n_per_axis: int,
    ):
        if domain.dim > 2:
            raise ValueError("quadrature oracle supports dimension 1 or 2 only")
        if objective.dim != domain.dim:
            raise ValueError("objective and domain dimensions disagree")
        if n_per_axis < MIN_CELLS_PER_AXIS:
            raise ValueError(
                f"n_per_axis must be at least {MIN_CELLS_PER_AXIS}, got {n_per_axis}"
            )
        if beta < 0:
            raise ValueError("beta must be non-negative")
        self.objective = objective
        self.domain = domain
        self.beta = float(beta)
        self.n_per_axis = int(n_per_axis)

        lo = domain.center - domain.bounding_radius
        hi = domain.center + domain.bounding_radius
        self.edges = tuple(
            np.linspace(lo[i], hi[i], n_per_axis + 1) for i in range(domain.dim)
        )
        mids = [0.5 * (e[:-1] + e[1:]) for e in self.edges]
        if domain.dim == 1:
            self.midpoints = mids[0][:, None]
            self.shape = (n_per_axis,)
        else:
            A, B = np.meshgrid(mids[0], mids[1], indexing="ij")
            self.midpoints = np.column_stack([A.ravel(), B.ravel()])
            self.shape = (n_per_axis, n_per_axis)
        self.cell_volume = float(np.prod((hi - lo) / n_per_axis))

        self.in_domain = np.array(
            [domain.contains(m) for m in self.midpoints], dtype=bool
        )
        if not self.in_domain.any():
            raise ValueError("degenerate grid: no cell midpoint lies in the region")
        self.f_values = objective.value_many(self.midpoints)

        # Shifted exponent keeps the weights finite for large beta * f.
        f_min = float(np.min(self.f_values[self.in_domain]))
        w = np.where(
            self.in_domain, np.exp(-self.beta * (self.f_values - f_min)), 0.0
        )
        w_sum = float(np.sum(w))
        self.probabilities = w / w_sum
        self.normalizing_constant = math.exp(-self.beta * f_min) * w_sum * self.cell_volume

    @property
    def n_cells(self) -> int:
        return self.midpoints.shape[0]

    def same_partition(self, edges: tuple[np.ndarray, ...]) -> bool:
        return len(edges) == len(self.edges) and all(
            e.shape == f.shape and np.array_equal(e, f)
            for e, f in zip(edges, self.edges)
        )


def build_oracle(
    objective: Objective, domain: FeasibleDomain, beta: float, n_per_axis: int
) -> GibbsOracle:
    """Construct a :class:`GibbsOracle` (thin functional wrapper)."""
    return GibbsOracle(objective, domain, beta, n_per_axis)


@dataclass
class Histogram:
    """Sample counts on the same cell partition as an oracle."""

    edges: tuple[np.ndarray, ...]
    counts: np.ndarray
    total: int

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / self.total


def bin_samples(oracle: GibbsOracle, samples) -> Histogram:
    """Bin points into the oracle's cell partition.

    ``samples`` has shape ``(n,)`` for one-dimensional domains or
    ``(n, dim)`` otherwise. Points on or beyond the outermost edges are
    clipped into the outermost cells (feasible samples are always inside
    the bounding box, so clipping only absorbs boundary rounding).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2 or samples.shape[1] != len(oracle.edges):
        raise ValueError(
            f"samples must have shape (n, {len(oracle.edges)}), got {samples.shape}"
        )
    n = oracle.n_per_axis
    idx = []
    for axis, e in enumerate(oracle.edges):
        width = (e[-1] - e[0]) / n
        i = np.floor((samples[:, axis] - e[0]) / width).astype(np.int64)
        idx.append(np.clip(i, 0, n - 1))
    flat = np.ravel_multi_index(tuple(idx), oracle.shape)
    counts = np.bincount(flat, minlength=oracle.n_cells)
    return Histogram(edges=oracle.edges, counts=counts, total=samples.shape[0])


def total_variation(p, q) -> float:
    """``0.5 * sum |p - q|`` for two probability vectors of equal shape."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("probability vectors must share a shape")
    return 0.5 * float(np.sum(np.abs(p - q)))


def tv_distance(hist: Histogram, oracle: GibbsOracle) -> float:
    """Total variation between a histogram and the oracle on shared cells."""
    if not oracle.same_partition(hist.edges):
        raise ValueError("histogram and oracle use different cell partitions")
    return total_variation(hist.frequencies(), oracle.probabilities)


def gibbs_mean_f(oracle: GibbsOracle) -> float:
    """Expectation of the objective under the oracle's cell probabilities."""
    return float(oracle.probabilities @ oracle.f_values)


def near_optimality_bound(d: int, beta: float, r: float, R: float, L: float) -> float:
    """Upper bound on the gap between the Gibbs mean of f and its minimum.

    ``(d / beta) * log(2 R max(2 / r, L beta (r + sqrt(r^2 + R^2)) / (r log 2)))``
    for a region containing a ball of radius ``r`` and contained in one of
    radius ``R``, with ``L`` a Lipschitz constant of the objective. Since
    ``r <= R`` for any feasible geometry the argument of the log is at
    least 4, so the bound is positive whenever the inputs are valid.
    """
    for name, v in (("d", d), ("beta", beta), ("r", r), ("R", R), ("L", L)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    arg = 2.0 * R * max(2.0 / r, L * beta * (r + math.sqrt(r * r + R * R)) / (r * math.log(2.0)))
    return (d / beta) * math.log(arg)


def export_cells_csv(path, oracle: GibbsOracle, histogram: Histogram | None = None) -> None:
    """Write one row per cell: index, midpoint coordinates, probability,
    and (when a histogram is given) the sample count."""
    if histogram is not None and not oracle.same_partition(histogram.edges):
        raise ValueError("histogram and oracle use different cell partitions")
    dim = len(oracle.edges)
    coord_cols = ",".join(f"mid_{i}" for i in range(dim))
    header = f"cell,{coord_cols},probability"
    if histogram is not None:
        header += ",count"
    lines = [header]
    for c in range(oracle.n_cells):
        coords = ",".join(f"{v:.17g}" for v in oracle.midpoints[c])
        row = f"{c},{coords},{oracle.probabilities[c]:.17g}"
        if histogram is not None:
            row += f",{int(histogram.counts[c])}"
        lines.append(row)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
