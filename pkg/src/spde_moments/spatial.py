"""Periodic Fourier collocation grid, trig CONS and SPDE coefficient operators.

Coefficient functions are sampled once onto the grid; operators act by
dense differentiation matrices plus pointwise multiplication (collocation).
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

LENGTH = 2.0 * math.pi


def _as_samples(coefficient, points: np.ndarray) -> np.ndarray:
    """Sample a scalar/callable/array coefficient onto the grid."""
    if callable(coefficient):
        values = np.asarray(coefficient(points), dtype=float)
        if values.ndim == 0:
            values = np.full(points.shape, float(values))
        shifted = np.asarray(coefficient(points + LENGTH), dtype=float)
        if not np.allclose(values, shifted, atol=1e-10):
            raise ValueError("coefficient is not 2*pi periodic")
        return values
    values = np.asarray(coefficient, dtype=float)
    if values.ndim == 0:
        return np.full(points.shape, float(values))
    if values.shape != points.shape:
        raise ValueError("sampled coefficient length does not match grid")
    return values


class FourierGrid:
    """Evenly spaced collocation points x_m = 2*pi*m/M on [0, 2*pi)."""

    def __init__(self, size: int):
        if size < 4 or size % 2:
            raise ValueError("grid size must be even and at least 4")
        self.size = size
        self.points = LENGTH * np.arange(size) / size

    def derivative_matrix(self, order: int) -> np.ndarray:
        if order == 1:
            return self._first_derivative
        if order == 2:
            return self._second_derivative
        raise ValueError("only first and second derivatives are supported")

    @cached_property
    def _first_derivative(self) -> np.ndarray:
        mult = 1j * self._wavenumbers
        mult[self.size // 2] = 0.0  # Nyquist convention for odd derivatives
        return self._from_symbol(mult)

    @cached_property
    def _second_derivative(self) -> np.ndarray:
        return self._from_symbol(-self._wavenumbers**2)

    @cached_property
    def _wavenumbers(self) -> np.ndarray:
        return np.fft.fftfreq(self.size, d=1.0 / self.size)

    def _from_symbol(self, mult: np.ndarray) -> np.ndarray:
        spectrum = np.fft.fft(np.eye(self.size), axis=0)
        return np.fft.ifft(mult[:, None] * spectrum, axis=0).real

    def derivative(self, values: np.ndarray, order: int) -> np.ndarray:
        """Derivative of the trigonometric interpolant at the grid points."""
        return self.derivative_matrix(order) @ values

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """Discrete L2 inner product (2*pi/M) * sum(u*v)."""
        return float(LENGTH / self.size * np.dot(u, v))

    def norm_l2(self, v: np.ndarray) -> float:
        return math.sqrt(LENGTH / self.size * float(np.dot(v, v)))

    def norm_linf(self, v: np.ndarray) -> float:
        return float(np.max(np.abs(v)))

    @cached_property
    def cons_matrix(self) -> np.ndarray:
        """Columns: real trig basis orthonormal in the discrete inner product.

        Column 0 is the constant; columns 2j-1/2j are cos(jx)/sin(jx) pairs
        for j < M/2; the last column is the Nyquist cosine.
        """
        m = self.size
        x = self.points
        basis = np.empty((m, m))
        basis[:, 0] = 1.0 / math.sqrt(LENGTH)
        for j in range(1, m // 2):
            basis[:, 2 * j - 1] = np.cos(j * x) / math.sqrt(math.pi)
            basis[:, 2 * j] = np.sin(j * x) / math.sqrt(math.pi)
        basis[:, m - 1] = np.cos(m // 2 * x) / math.sqrt(LENGTH)
        return basis

    def project(self, values: np.ndarray) -> np.ndarray:
        """Coefficients of a grid field in the trig CONS."""
        return LENGTH / self.size * (self.cons_matrix.T @ values)


class SpdeProblem:
    """Sampled coefficients of the Ito SPDE on a periodic 1-D grid.

    Drift: a*u'' + b*u' + c*u.  Noise k: sigma_k*u' + nu_k*u.
    """

    def __init__(self, grid: FourierGrid, a, b, c, sigma, nu, u0, label: str = ""):
        self.grid = grid
        pts = grid.points
        self.a = _as_samples(a, pts)
        self.b = _as_samples(b, pts)
        self.c = _as_samples(c, pts)
        sigma = sigma if isinstance(sigma, (list, tuple)) else [sigma]
        nu = nu if isinstance(nu, (list, tuple)) else [nu]
        if len(sigma) != len(nu):
            raise ValueError("need one sigma and one nu per noise")
        self.sigma = np.stack([_as_samples(s, pts) for s in sigma])
        self.nu = np.stack([_as_samples(v, pts) for v in nu])
        self.u0 = _as_samples(u0, pts)
        self.label = label

    @property
    def noises(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def drift_matrix(self) -> np.ndarray:
        grid = self.grid
        return (
            self.a[:, None] * grid.derivative_matrix(2)
            + self.b[:, None] * grid.derivative_matrix(1)
            + np.diag(self.c)
        )

    def noise_matrix(self, k: int) -> np.ndarray:
        """Operator of noise k (1-based)."""
        if not 1 <= k <= self.noises:
            raise ValueError(f"noise index {k} outside 1..{self.noises}")
        return self.sigma[k - 1][:, None] * self.grid.derivative_matrix(1) + np.diag(
            self.nu[k - 1]
        )

    @cached_property
    def noise_matrices(self) -> list[np.ndarray]:
        return [self.noise_matrix(k) for k in range(1, self.noises + 1)]

    @cached_property
    def stratonovich_drift_matrix(self) -> np.ndarray:
        """Drift minus half the sum of squared noise operators."""
        correction = sum(m @ m for m in self.noise_matrices)
        return self.drift_matrix - 0.5 * correction

    def apply_drift(self, values: np.ndarray) -> np.ndarray:
        return self.drift_matrix @ values

    def apply_noise(self, k: int, values: np.ndarray) -> np.ndarray:
        return self.noise_matrix(k) @ values

    def apply_stratonovich_drift(self, values: np.ndarray) -> np.ndarray:
        return self.stratonovich_drift_matrix @ values

    def commutativity_defect(self, threshold: float = 1e-8):
        """(is_commutative, max defect) of the noise operators on probe fields.

        Probes are 1 and cos(jx), sin(jx) up to j = M/4.
        """
        grid = self.grid
        probes = [np.ones(grid.size)]
        for j in range(1, grid.size // 4 + 1):
            probes.append(np.cos(j * grid.points))
            probes.append(np.sin(j * grid.points))
        probe_mat = np.column_stack(probes)
        defect = 0.0
        mats = self.noise_matrices
        for k in range(self.noises):
            for j in range(k + 1, self.noises):
                commutator = mats[k] @ mats[j] - mats[j] @ mats[k]
                defect = max(defect, float(np.max(np.abs(commutator @ probe_mat))))
        return defect <= threshold, defect

    def coercivity_margin(self) -> float:
        """min over the grid of 2a - sum_k sigma_k^2 (parabolicity margin)."""
        return float(np.min(2.0 * self.a - np.sum(self.sigma**2, axis=0)))
