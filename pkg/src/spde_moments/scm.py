"""Recursive multi-stage sparse-grid collocation solver for second moments.

The Ito problem is rewritten in Stratonovich form; for every sparse-grid
node the noise is a fixed smooth path, giving a deterministic PDE whose
one-element solution operator feeds the covariance recursion.
"""

from __future__ import annotations

import numpy as np

from .chaos import TemporalBasis
from .exceptions import SolverError
from .moments import SecondMomentResult, propagate_covariance
from .sparse_grid import SparseGridRule, smolyak_rule
from .spatial import LENGTH, SpdeProblem
from .time_integration import LinearEvolution, crank_nicolson

PSD_TOLERANCE = 1e-6


def _anchored_evolution(
    problem: SpdeProblem, node: np.ndarray, basis: TemporalBasis
) -> LinearEvolution:
    """Linear system of the noise-anchored Stratonovich-form PDE."""
    modes = basis.count
    if node.size != modes * problem.noises:
        raise ValueError(
            f"node has {node.size} coordinates, expected {modes * problem.noises}"
        )
    weights = node.reshape(problem.noises, modes)
    drift0 = problem.stratonovich_drift_matrix
    noise_mats = problem.noise_matrices

    def drift(t: float) -> np.ndarray:
        matrix = drift0.copy()
        for k in range(problem.noises):
            gain = sum(
                weights[k, l - 1] * basis.evaluate(l, t) for l in range(1, modes + 1)
            )
            matrix += gain * noise_mats[k]
        return matrix

    # With a single temporal mode the anchored drift is time independent.
    return LinearEvolution(
        problem.grid.size, drift, constant_drift=(modes == 1)
    )


def collocation_solution(
    problem: SpdeProblem,
    init: np.ndarray,
    node: np.ndarray,
    modes: int,
    delta: float,
    dt: float,
) -> np.ndarray:
    """Field at time delta of the PDE anchored at one sparse-grid node."""
    basis = TemporalBasis(delta, modes)
    evolution = _anchored_evolution(problem, np.asarray(node, dtype=float), basis)
    try:
        return crank_nicolson(evolution, np.asarray(init, dtype=float), delta, dt)[-1]
    except SolverError as exc:
        raise SolverError(f"anchored solve failed at node {node}") from exc


def element_projection_tensor(
    problem: SpdeProblem, rule: SparseGridRule, modes: int, delta: float, dt: float
) -> np.ndarray:
    """Tensor h[kappa, l, m] of one-element anchored basis projections."""
    basis = TemporalBasis(delta, modes)
    cons = problem.grid.cons_matrix
    size = problem.grid.size
    scale = LENGTH / size
    tensor = np.empty((len(rule), size, size))
    for pos, node in enumerate(rule.points):
        evolution = _anchored_evolution(problem, node, basis)
        try:
            ends = crank_nicolson(evolution, cons, delta, dt)[-1]
        except SolverError as exc:
            raise SolverError(f"anchored solve failed at node {node}") from exc
        tensor[pos] = scale * ends.T @ cons
    return tensor


def second_moments(
    problem: SpdeProblem,
    level: int,
    modes: int,
    delta: float,
    dt: float,
    elements: int,
    psd_tolerance: float = PSD_TOLERANCE,
) -> SecondMomentResult:
    """Second-moment fields at t_i = i*delta for i = 0..elements."""
    rule = smolyak_rule(level, modes * problem.noises)
    tensor = element_projection_tensor(problem, rule, modes, delta, dt)
    size = problem.grid.size
    # transfer[(j,k),(l,m)] = sum_kappa W_kappa h[kappa,j,l] h[kappa,k,m]
    weighted = tensor * rule.weights[:, None, None]
    pairwise = np.tensordot(weighted, tensor, axes=([0], [0]))
    transfer = pairwise.transpose(0, 2, 1, 3).reshape(size * size, size * size)
    return propagate_covariance(
        "scm", problem.grid, transfer, problem.u0, delta, elements, psd_tolerance
    )


def direct_second_moment(
    problem: SpdeProblem, level: int, modes: int, delta: float, dt: float
) -> np.ndarray:
    """One-element second moment by direct quadrature of the squared solves."""
    rule = smolyak_rule(level, modes * problem.noises)
    fields = np.array(
        [
            collocation_solution(problem, problem.u0, node, modes, delta, dt)
            for node in rule.points
        ]
    )
    return (rule.weights[:, None] * fields**2).sum(axis=0)
