"""Covariance containers and the element-to-element moment recursion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spatial import FourierGrid


@dataclass
class CovarianceMatrix:
    """Second-moment coefficients in the spatial CONS at one time instant."""

    entries: np.ndarray
    time: float

    def symmetry_defect(self) -> float:
        scale = max(float(np.max(np.abs(self.entries))), 1e-300)
        return float(np.max(np.abs(self.entries - self.entries.T))) / scale

    def psd_defect(self) -> float:
        """Relative size of the most negative eigenvalue (0 when PSD)."""
        eigenvalues = np.linalg.eigvalsh(0.5 * (self.entries + self.entries.T))
        top = max(float(eigenvalues[-1]), 1e-300)
        return max(0.0, -float(eigenvalues[0])) / top


@dataclass
class SecondMomentResult:
    """Second-moment fields at the element boundaries t_i = i*Delta."""

    method: str
    times: np.ndarray            # (K+1,)
    moments: np.ndarray          # (K+1, M) field values at the grid points
    covariance: CovarianceMatrix  # at the final time
    covariance_trace: np.ndarray  # (K+1,)
    symmetry_defect: float        # max over all t_i
    psd_defect: float             # max over all t_i
    psd_tolerance: float

    @property
    def psd_ok(self) -> bool:
        return self.psd_defect <= self.psd_tolerance

    @property
    def final_moments(self) -> np.ndarray:
        return self.moments[-1]


def moment_field(grid: FourierGrid, covariance: np.ndarray) -> np.ndarray:
    """Evaluate sum_{l,m} Q_lm e_l(x) e_m(x) at the grid points."""
    basis = grid.cons_matrix
    return ((basis @ covariance) * basis).sum(axis=1)


def propagate_covariance(
    method: str,
    grid: FourierGrid,
    transfer: np.ndarray,
    u0: np.ndarray,
    delta: float,
    elements: int,
    psd_tolerance: float,
) -> SecondMomentResult:
    """Iterate Q(t_i) = sum_jk Q_jk(t_{i-1}) * transfer[(j,k),(l,m)].

    transfer has shape (M^2, M^2) with row-major (j,k) rows and (l,m)
    columns; it is fixed across elements because the one-element solves do
    not depend on the element's start time.
    """
    size = grid.size
    coeffs = grid.project(u0)
    covariance = np.outer(coeffs, coeffs)
    times = delta * np.arange(elements + 1)
    moments = np.empty((elements + 1, size))
    trace = np.empty(elements + 1)
    moments[0] = moment_field(grid, covariance)
    trace[0] = np.trace(covariance)
    symmetry = CovarianceMatrix(covariance, 0.0).symmetry_defect()
    psd = CovarianceMatrix(covariance, 0.0).psd_defect()
    vec = covariance.reshape(-1)
    for i in range(1, elements + 1):
        vec = vec @ transfer
        covariance = vec.reshape(size, size)
        snapshot = CovarianceMatrix(covariance, times[i])
        symmetry = max(symmetry, snapshot.symmetry_defect())
        psd = max(psd, snapshot.psd_defect())
        moments[i] = moment_field(grid, covariance)
        trace[i] = np.trace(covariance)
    return SecondMomentResult(
        method=method,
        times=times,
        moments=moments,
        covariance=CovarianceMatrix(covariance, times[-1]),
        covariance_trace=trace,
        symmetry_defect=symmetry,
        psd_defect=psd,
        psd_tolerance=psd_tolerance,
    )
