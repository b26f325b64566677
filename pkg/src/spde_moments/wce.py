"""Recursive multi-stage Wiener chaos solver for second moments.

One element [0, Delta] is solved once for every spatial basis function;
the resulting projection tensor drives the covariance recursion over all
elements, since the coefficient equations do not depend on the element's
start time.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .chaos import MultiIndexSet, TemporalBasis, multi_index_set
from .exceptions import SolverError
from .moments import SecondMomentResult, propagate_covariance
from .spatial import LENGTH, SpdeProblem
from .time_integration import step_count

PSD_TOLERANCE = 1e-8


def element_coefficients(
    problem: SpdeProblem,
    index_set: MultiIndexSet,
    basis: TemporalBasis,
    dt: float,
    init: np.ndarray,
) -> np.ndarray:
    """Chaos coefficient trajectories over one element.

    Returns an array of shape (len(index_set), steps + 1, M) for vector
    init, or (..., M, C) when init has C columns.  The system is solved in
    graded order: the coupling term of an order-j index only reads stored
    trajectories of order j-1, scaled by the temporal mode values.
    """
    delta = basis.element_length
    steps = step_count(delta, dt)
    size = problem.grid.size
    init = np.asarray(init, dtype=float)
    single = init.ndim == 1
    columns = init[:, None] if single else init
    drift = problem.drift_matrix
    eye = np.eye(size)
    explicit = eye + 0.5 * dt * drift
    try:
        implicit = lu_factor(eye - 0.5 * dt * drift)
    except Exception as exc:
        raise SolverError("CN solve failed: implicit drift matrix singular") from exc
    mode_values = basis.values_at(dt * np.arange(steps + 1))  # (n, steps+1)
    noise_mats = problem.noise_matrices
    trajectories = np.zeros((len(index_set), steps + 1, *columns.shape))
    for pos, alpha in enumerate(index_set):
        if alpha.order == 0:
            trajectories[pos, 0] = columns
        forcing = None
        for k in range(1, index_set.noises + 1):
            for l in range(1, index_set.modes + 1):
                count = alpha.entries[k - 1][l - 1]
                if count == 0:
                    continue
                parent = index_set.position(alpha.decrement(k, l))
                coupled = noise_mats[k - 1] @ trajectories[parent]
                term = (count * mode_values[l - 1])[:, None, None] * coupled
                forcing = term if forcing is None else forcing + term
        for j in range(steps):
            rhs = explicit @ trajectories[pos, j]
            if forcing is not None:
                rhs = rhs + 0.5 * dt * (forcing[j] + forcing[j + 1])
            try:
                trajectories[pos, j + 1] = lu_solve(implicit, rhs)
            except np.linalg.LinAlgError as exc:
                raise SolverError(
                    f"CN solve failed for chaos index {alpha.entries}"
                ) from exc
    return trajectories[..., 0] if single else trajectories


def element_projection_tensor(
    problem: SpdeProblem, chaos_order: int, modes: int, delta: float, dt: float
):
    """(index set, tensor q[a, l, m]) of one-element basis projections."""
    index_set = multi_index_set(chaos_order, modes, problem.noises)
    basis = TemporalBasis(delta, modes)
    cons = problem.grid.cons_matrix
    trajectories = element_coefficients(problem, index_set, basis, dt, cons)
    ends = trajectories[:, -1]  # (n_alpha, M, M), columns are initial modes
    scale = LENGTH / problem.grid.size
    tensor = scale * np.einsum("axl,xm->alm", ends, cons, optimize=True)
    return index_set, tensor


def second_moments(
    problem: SpdeProblem,
    chaos_order: int,
    modes: int,
    delta: float,
    dt: float,
    elements: int,
    psd_tolerance: float = PSD_TOLERANCE,
) -> SecondMomentResult:
    """Second-moment fields at t_i = i*delta for i = 0..elements."""
    margin = problem.coercivity_margin()
    if margin <= 0:
        warnings.warn(
            f"strong-parabolicity margin {margin:.3e} is not positive; "
            "continuing anyway",
            stacklevel=2,
        )
    index_set, tensor = element_projection_tensor(
        problem, chaos_order, modes, delta, dt
    )
    normalized = tensor / np.sqrt(index_set.factorials)[:, None, None]
    size = problem.grid.size
    # transfer[(j,k),(l,m)] = sum_a q[a,j,l] q[a,k,m] / a!
    pairwise = np.tensordot(normalized, normalized, axes=([0], [0]))
    transfer = pairwise.transpose(0, 2, 1, 3).reshape(size * size, size * size)
    return propagate_covariance(
        "wce", problem.grid, transfer, problem.u0, delta, elements, psd_tolerance
    )


def direct_second_moment(
    problem: SpdeProblem, chaos_order: int, modes: int, delta: float, dt: float
) -> np.ndarray:
    """One-element second moment sum_a phi_a(Delta, x; u0)^2 / a!.

    Bypasses the basis projection entirely; used to validate the
    covariance recursion against the plain chaos sum.
    """
    index_set = multi_index_set(chaos_order, modes, problem.noises)
    basis = TemporalBasis(delta, modes)
    trajectories = element_coefficients(problem, index_set, basis, dt, problem.u0)
    ends = trajectories[:, -1]  # (n_alpha, M)
    return (ends**2 / index_set.factorials[:, None]).sum(axis=0)
