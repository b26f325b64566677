"""Gauss-Hermite rules and the Smolyak combination technique.

All rules integrate against the standard Gaussian density, i.e. weights of
a rule sum to one and nodes are symmetric about the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import GridTooLargeError, QuadratureError
from .chaos import hermite

_MAX_LEVEL = 6
_MAX_DIMENSION = 32

# Coordinates closer than this are treated as the same sparse-grid point.
_DEDUP_DECIMALS = 12


@dataclass(frozen=True)
class GaussHermiteRule:
    """One-dimensional rule: nodes are roots of the Hermite polynomial."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f) -> float:
        return float(np.dot([f(x) for x in self.nodes], self.weights))


@lru_cache(maxsize=None)
def gauss_hermite_rule(n: int) -> GaussHermiteRule:
    """n-node Gauss-Hermite rule, exact on polynomials of degree 2n-1.

    Nodes come from the Golub-Welsch tridiagonal eigenproblem (offdiagonals
    sqrt(k) for the probabilists' recurrence); weights from
    n! / (n^2 * H_{n-1}(node)^2).
    """
    if n < 1:
        raise ValueError("node count must be positive")
    if n == 1:
        return GaussHermiteRule(np.zeros(1), np.ones(1))
    try:
        nodes = eigh_tridiagonal(
            np.zeros(n), np.sqrt(np.arange(1.0, n)), eigvals_only=True
        )
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise QuadratureError(f"quadrature construction failed for n={n}") from exc
    nodes = np.sort(nodes)
    # Enforce exact +/- symmetry; the middle node of an odd rule is 0.
    nodes = 0.5 * (nodes - nodes[::-1])
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    weights = math.factorial(n) / (n**2 * hermite(n - 1, nodes) ** 2)
    if not np.all(np.isfinite(weights)):
        raise QuadratureError(f"quadrature construction failed for n={n}")
    return GaussHermiteRule(nodes, weights)


@dataclass(frozen=True)
class SparseGridRule:
    """Deduplicated Smolyak rule: points with signed, accumulated weights."""

    dimension: int
    level: int
    points: np.ndarray  # (count, dimension)
    weights: np.ndarray  # (count,)

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, f) -> float:
        """Sum of f over the points, in stored order, with signed weights."""
        values = np.array([f(x) for x in self.points], dtype=float)
        return float(values @ self.weights)

    def to_csv(self, path) -> None:
        """Dump `index, x_1..x_d, weight` rows for external verification."""
        with open(path, "w", encoding="utf-8") as fh:
            coords = ",".join(f"x{j + 1}" for j in range(self.dimension))
            fh.write(f"kappa,{coords},weight\n")
            for i, (pt, w) in enumerate(zip(self.points, self.weights)):
                xs = ",".join(repr(float(x)) for x in pt)
                fh.write(f"{i + 1},{xs},{float(w)!r}\n")


def _level_vectors(level: int, dim: int):
    """All 1-based integer vectors i with level <= |i| <= level + dim - 1."""
    for total in range(max(level, dim), level + dim):
        # compositions of `total` into dim parts, each >= 1
        for cuts in itertools.combinations(range(1, total), dim - 1):
            parts = []
            prev = 0
            for c in (*cuts, total):
                parts.append(c - prev)
                prev = c
            yield tuple(parts)


def _projected_point_count(level: int, dim: int) -> int:
    return sum(
        math.prod(vec) for vec in _level_vectors(level, dim)
    )


def smolyak_rule(level: int, dim: int) -> SparseGridRule:
    """Smolyak Gauss-Hermite rule with `n` nodes at 1-D level `n`.

    Combination coefficients are (-1)^(level+dim-1-|i|) * C(dim-1, |i|-level);
    tensor points falling on the same location are merged and their signed
    weights accumulated with compensated summation.
    """
    if level < 1 or dim < 1:
        raise ValueError("need level >= 1 and dimension >= 1")
    if level > _MAX_LEVEL or dim > _MAX_DIMENSION:
        raise GridTooLargeError(
            f"grid too large: level={level}, dim={dim} projects to "
            f"{_projected_point_count(level, dim)} tensor points"
        )
    buckets: dict[tuple, tuple[np.ndarray, list[float]]] = {}
    for vec in _level_vectors(level, dim):
        total = sum(vec)
        coeff = (-1) ** (level + dim - 1 - total) * math.comb(
            dim - 1, total - level
        )
        rules = [gauss_hermite_rule(m) for m in vec]
        for combo in itertools.product(*(range(m) for m in vec)):
            point = np.array([rules[j].nodes[combo[j]] for j in range(dim)])
            weight = coeff * math.prod(
                rules[j].weights[combo[j]] for j in range(dim)
            )
            key = tuple(np.round(point, _DEDUP_DECIMALS))
            if key in buckets:
                buckets[key][1].append(weight)
            else:
                buckets[key] = (point, [weight])
    ordered = sorted(buckets.items(), key=lambda item: item[0])
    points = np.array([entry[0] for _, entry in ordered])
    weights = np.array([math.fsum(entry[1]) for _, entry in ordered])
    return SparseGridRule(dim, level, points, weights)


def tensor_rule(nodes_per_dim: int, dim: int) -> SparseGridRule:
    """Full tensor Gauss-Hermite rule; reference for dedup/consistency checks."""
    rule = gauss_hermite_rule(nodes_per_dim)
    points = np.array(list(itertools.product(rule.nodes, repeat=dim)))
    weights = np.array(
        [math.prod(pair) for pair in itertools.product(rule.weights, repeat=dim)]
    )
    return SparseGridRule(dim, nodes_per_dim, points, weights)


def smolyak_point_count(level: int, dim: int) -> int:
    """Closed-form unique-point counts for levels 2-4 and dim >= 2.

    In one dimension the rule collapses to the single `level`-node
    Gauss-Hermite rule, so the polynomial formulas do not apply there.
    """
    if dim == 1:
        return level
    if level == 2:
        return 2 * dim + 1
    if level == 3:
        return 2 * dim**2 + 2 * dim + 1
    if level == 4:
        return round(4 / 3 * dim**3 + 2 * dim**2 + 14 / 3 * dim + 1)
    return len(smolyak_rule(level, dim))
