"""Hermite chaos machinery: polynomials, multi-indices, temporal modes.

Everything here is a pure function of its inputs; the classes are frozen
value types that can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import TruncationTooLargeError

# Beyond this order the factorials switch to log-gamma arithmetic.
_EXACT_FACTORIAL_ORDER = 20

# Hard cap on the number of enumerated multi-indices.
_MAX_INDEX_COUNT = 2**31


def hermite(degree, x):
    """Probabilists' Hermite polynomial H_degree evaluated at x.

    Uses the three-term recurrence H_{k+1} = x*H_k - k*H_{k-1}; accepts
    scalars or arrays.
    """
    if degree < 0:
        raise ValueError("Hermite degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if degree == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for k in range(1, degree):
        h, h_prev = x * h - k * h_prev, h
    return h if h.ndim else float(h)


@dataclass(frozen=True)
class MultiIndex:
    """Matrix of nonnegative mode counts, one row per noise."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def noises(self) -> int:
        return len(self.entries)

    @property
    def modes(self) -> int:
        return len(self.entries[0])

    @property
    def order(self) -> int:
        return sum(sum(row) for row in self.entries)

    def flat(self) -> tuple[int, ...]:
        """Row-major flattening: slot (k, l) maps to (k-1)*modes + l."""
        return tuple(e for row in self.entries for e in row)

    def decrement(self, noise: int, mode: int) -> "MultiIndex":
        """Lower entry (noise, mode) by one, floored at zero; 1-based."""
        rows = [list(row) for row in self.entries]
        rows[noise - 1][mode - 1] = max(0, rows[noise - 1][mode - 1] - 1)
        return MultiIndex(tuple(tuple(row) for row in rows))

    def factorial(self) -> float:
        """Product of entrywise factorials."""
        return _entries_factorial(self.flat())

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if self.noises != other.noises or self.modes != other.modes:
            raise ValueError("multi-index shapes do not match")
        return MultiIndex(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )


def _entries_factorial(flat_entries) -> float:
    total = sum(flat_entries)
    if total > _EXACT_FACTORIAL_ORDER:
        return math.exp(sum(math.lgamma(e + 1) for e in flat_entries))
    return float(math.prod(math.factorial(e) for e in flat_entries))


def wick_coefficient(a: MultiIndex, b: MultiIndex) -> float:
    """Coefficient sqrt((a+b)!/(a! b!)) of the Wick product of basis terms."""
    if a.noises != b.noises or a.modes != b.modes:
        raise ValueError("multi-index shapes do not match")
    if a.order + b.order > _EXACT_FACTORIAL_ORDER:
        log_num = sum(math.lgamma(x + y + 1) for x, y in zip(a.flat(), b.flat()))
        log_den = sum(math.lgamma(x + 1) for x in a.flat())
        log_den += sum(math.lgamma(y + 1) for y in b.flat())
        return math.exp(0.5 * (log_num - log_den))
    num = (a + b).factorial()
    return math.sqrt(num / (a.factorial() * b.factorial()))


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


class MultiIndexSet:
    """All multi-indices with q noises, n modes and total order <= max_order.

    Enumeration is graded: indices are sorted by total order first, then
    lexicographically on the row-major flattened entries.  This makes the
    chaos coefficient system lower triangular: every index of order j
    appears before any index of order j+1.
    """

    def __init__(self, max_order: int, modes: int, noises: int):
        if max_order < 0 or modes < 1 or noises < 1:
            raise ValueError("need max_order >= 0, modes >= 1, noises >= 1")
        count = math.comb(max_order + modes * noises, max_order)
        if count > _MAX_INDEX_COUNT:
            raise TruncationTooLargeError(
                f"truncation too large: {count} multi-indices requested"
            )
        self.max_order = max_order
        self.modes = modes
        self.noises = noises
        self.indices: list[MultiIndex] = []
        for total in range(max_order + 1):
            for flat in _compositions(total, modes * noises):
                rows = tuple(
                    flat[k * modes : (k + 1) * modes] for k in range(noises)
                )
                self.indices.append(MultiIndex(rows))
        assert len(self.indices) == count
        self._position = {ix.flat(): i for i, ix in enumerate(self.indices)}
        self.orders = np.array([ix.order for ix in self.indices])
        self.factorials = np.array([ix.factorial() for ix in self.indices])

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.indices[i]

    def position(self, index: MultiIndex) -> int:
        return self._position[index.flat()]


@lru_cache(maxsize=None)
def multi_index_set(max_order: int, modes: int, noises: int) -> MultiIndexSet:
    return MultiIndexSet(max_order, modes, noises)


@dataclass(frozen=True)
class TemporalBasis:
    """Cosine CONS on one time element [0, element_length].

    Mode 1 is the constant 1/sqrt(L); mode l >= 2 is
    sqrt(2/L) * cos(pi*(l-1)*s/L).
    """

    element_length: float
    count: int

    def __post_init__(self):
        if self.element_length <= 0:
            raise ValueError("element length must be positive")
        if self.count < 1:
            raise ValueError("need at least one temporal mode")

    def evaluate(self, mode: int, t):
        """Mode value m_mode(t); vectorized over t."""
        self._check_mode(mode)
        length = self.element_length
        t = np.asarray(t, dtype=float)
        if mode == 1:
            out = np.full_like(t, 1.0 / math.sqrt(length))
        else:
            out = math.sqrt(2.0 / length) * np.cos(
                math.pi * (mode - 1) * t / length
            )
        return out if out.ndim else float(out)

    def antiderivative(self, mode: int, t):
        """Running integral of the mode from 0 to t; vectorized over t."""
        self._check_mode(mode)
        length = self.element_length
        t = np.asarray(t, dtype=float)
        if mode == 1:
            out = t / math.sqrt(length)
        else:
            freq = math.pi * (mode - 1) / length
            out = math.sqrt(2.0 * length) / (math.pi * (mode - 1)) * np.sin(freq * t)
        return out if out.ndim else float(out)

    def values_at(self, times) -> np.ndarray:
        """Matrix of mode values, shape (count, len(times))."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return np.stack([self.evaluate(l, times) for l in range(1, self.count + 1)])

    def _check_mode(self, mode: int):
        if not 1 <= mode <= self.count:
            raise ValueError(f"mode {mode} outside 1..{self.count}")


@dataclass(frozen=True)
class BrownianTruncation:
    """Spectrally truncated Brownian paths on a uniform element mesh.

    coefficients[i, l, k] is the standard Gaussian draw for element i,
    temporal mode l+1 and noise k.
    """

    basis: TemporalBasis
    elements: int
    coefficients: np.ndarray

    def __post_init__(self):
        expected = (self.elements, self.basis.count)
        if self.coefficients.shape[:2] != expected:
            raise ValueError(
                f"coefficient array must be (elements, modes, noises), got "
                f"{self.coefficients.shape}"
            )

    @property
    def noises(self) -> int:
        return self.coefficients.shape[2]

    @property
    def horizon(self) -> float:
        return self.elements * self.basis.element_length

    @classmethod
    def sample(cls, basis: TemporalBasis, elements: int, noises: int, rng):
        draws = rng.standard_normal((elements, basis.count, noises))
        return cls(basis, elements, draws)

    def evaluate(self, t: float) -> np.ndarray:
        """Path values of all noises at time t in [0, horizon]."""
        if not 0.0 <= t <= self.horizon + 1e-12:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        length = self.basis.element_length
        elem = min(int(t / length), self.elements - 1)
        local = t - elem * length
        full = np.array(
            [self.basis.antiderivative(l, length) for l in range(1, self.basis.count + 1)]
        )
        partial = np.array(
            [self.basis.antiderivative(l, local) for l in range(1, self.basis.count + 1)]
        )
        value = np.zeros(self.noises)
        for j in range(elem):
            value += full @ self.coefficients[j]
        value += partial @ self.coefficients[elem]
        return value

    def variance_profile(self, t: float) -> float:
        """Analytic Var[w(t)] of one truncated noise, t within element 1."""
        length = self.basis.element_length
        if not 0.0 <= t <= length:
            raise ValueError("variance profile is defined on the first element")
        squares = [
            self.basis.antiderivative(l, t) ** 2
            for l in range(1, self.basis.count + 1)
        ]
        return float(sum(squares))
