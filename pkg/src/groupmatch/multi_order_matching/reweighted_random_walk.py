"""Reweighted random walk over the layers of a transition tensor, with inflation and bistochastic reweighting."""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from groupmatch.groupmatch_config.GroupMatch_Config import Matcher_Config
from groupmatch.groupmatch_exceptions import Degenerate_Reweight_Matrix_Exception
from groupmatch.groupmatch_warnings import Bistochastic_Non_Convergence_Warning, Random_Walk_Non_Convergence_Warning
from groupmatch.multi_order_matching.Assignment_State import Assignment_State
from groupmatch.multi_order_matching.Candidate_Index import Candidate_Index
from groupmatch.multi_order_matching.Transition_Tensor import Transition_Tensor

logger = logging.getLogger(__name__)

_MAX_BACKTRACKS = 40
_ARMIJO = 1e-4


@dataclass(frozen=True)
class Bistochastic_Balance:
    """Log-domain row and column potentials of a padded square matrix, and how closely they balance it."""
    row_potential: np.ndarray
    column_potential: np.ndarray
    deviation: float
    iterations: int

    def balances(self, tol: float) -> bool:
        """
        :param tol: Largest allowed deviation of a row or column sum from 1.
        :return: True if every row and column sum is within tol of 1.
        """
        return self.deviation < tol


def _scaled(log_square: np.ndarray, row_potential: np.ndarray, column_potential: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.exp(log_square + row_potential[:, None] + column_potential[None, :])


def _deviation(scaled: np.ndarray) -> float:
    deviation = max(np.abs(scaled.sum(axis=1) - 1.0).max(), np.abs(scaled.sum(axis=0) - 1.0).max())
    return float(deviation) if np.isfinite(deviation) else float("inf")


def _sinkhorn_sweep(log_square: np.ndarray, column_potential: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    row_potential = -logsumexp(log_square + column_potential[None, :], axis=1)
    return row_potential, -logsumexp(log_square + row_potential[:, None], axis=0)


def _newton_step(log_square: np.ndarray, row_potential: np.ndarray, column_potential: np.ndarray,
                 scaled: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """
    Damped Newton step on the convex dual sum(scaled) - sum(row potentials) - sum(column potentials).
    :return: The updated potentials, or None if no step along the Newton direction improves the balance.
    """
    size = len(row_potential)
    row_sums, column_sums = scaled.sum(axis=1), scaled.sum(axis=0)
    gradient = np.concatenate([row_sums - 1.0, column_sums - 1.0])
    hessian = np.block([[np.diag(row_sums), scaled], [scaled.T, np.diag(column_sums)]])
    # singular along the shift that raises every row potential and lowers every column potential
    direction = np.linalg.lstsq(hessian, -gradient, rcond=None)[0]
    slope = float(gradient @ direction)
    if not slope < 0.0:
        return None
    objective = float(scaled.sum() - row_potential.sum() - column_potential.sum())
    deviation = _deviation(scaled)
    step = 1.0
    for _ in range(_MAX_BACKTRACKS):
        trial_rows = row_potential + step * direction[:size]
        trial_columns = column_potential + step * direction[size:]
        trial = _scaled(log_square, trial_rows, trial_columns)
        trial_objective = float(trial.sum() - trial_rows.sum() - trial_columns.sum())
        if np.isfinite(trial_objective) and (trial_objective <= objective + _ARMIJO * step * slope or _deviation(trial) < deviation):
            return trial_rows, trial_columns
        step *= 0.5
    return None


def balance_log_matrix(log_matrix: np.ndarray, tol: float = 1e-9, max_iter: int = 1000, slack: float = 1.0,
                       start: Bistochastic_Balance | None = None) -> tuple[np.ndarray, Bistochastic_Balance]:
    """
    Scale exp(log_matrix) so that every row and column sums to one, working on log entries so that inflated matrices
    do not overflow. A log-domain Sinkhorn sweep is refined with damped Newton steps on the row and column potentials.
    A rectangular matrix is padded to square with `slack` entries, scaled, then cropped back.
    :param log_matrix: Logarithms of the matrix entries; -inf marks a zero entry.
    :param tol: Largest allowed deviation of a row or column sum from 1.
    :param max_iter: Maximum number of refinement steps.
    :param slack: Value of the padding entries.
    :param start: Potentials of an earlier balance of a matrix of the same shape to start from.
    :return: The scaled matrix and the potentials that produced it.
    :raises Degenerate_Reweight_Matrix_Exception: If a row or column of the padded matrix is all zero.
    """
    log_matrix = np.asarray(log_matrix, dtype=np.float64)
    rows, columns = log_matrix.shape
    size = max(rows, columns)
    log_square = np.full((size, size), np.log(slack) if slack > 0 else -np.inf, dtype=np.float64)
    log_square[:rows, :columns] = log_matrix
    empty = np.isneginf(log_square)
    zero_rows = [int(r) for r in np.nonzero(empty.all(axis=1))[0]]
    zero_columns = [int(c) for c in np.nonzero(empty.all(axis=0))[0]]
    if len(zero_rows) > 0 or len(zero_columns) > 0:
        raise Degenerate_Reweight_Matrix_Exception(zero_rows, zero_columns)
    if start is not None and start.row_potential.shape == (size,):
        row_potential, column_potential = start.row_potential, start.column_potential
    else:
        row_potential, column_potential = _sinkhorn_sweep(log_square, np.zeros(size))
    scaled = _scaled(log_square, row_potential, column_potential)
    deviation = _deviation(scaled)
    iterations = 0
    while deviation >= tol and iterations < max_iter:
        iterations += 1
        stepped = _newton_step(log_square, row_potential, column_potential, scaled) if np.isfinite(deviation) else None
        if stepped is None:
            stepped = _sinkhorn_sweep(log_square, column_potential)
        row_potential, column_potential = stepped
        scaled = _scaled(log_square, row_potential, column_potential)
        deviation = _deviation(scaled)
    return scaled[:rows, :columns], Bistochastic_Balance(row_potential, column_potential, deviation, iterations)


def bistochastic_normalize(matrix: np.ndarray, tol: float = 1e-9, max_iter: int = 1000, slack: float = 1.0) -> np.ndarray:
    """
    Scale rows and columns until both sum to one.
    A rectangular matrix is padded to square with `slack` entries, scaled, then cropped back.
    Warns with a Bistochastic_Non_Convergence_Warning if the sums are not within tol after max_iter steps.
    :param matrix: Non-negative matrix.
    :param tol: Largest allowed deviation of a row or column sum from 1.
    :param max_iter: Maximum number of refinement steps.
    :param slack: Value of the padding entries.
    :return: The scaled matrix.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    assert matrix.ndim == 2 and np.all(matrix >= 0), "Bistochastic normalization needs a non-negative matrix"
    with np.errstate(divide="ignore"):
        log_matrix = np.log(matrix)
    balanced, balance = balance_log_matrix(log_matrix, tol, max_iter, slack)
    if not balance.balances(tol):
        warnings.warn(Bistochastic_Non_Convergence_Warning(balance.iterations, balance.deviation))
    return balanced


def _l1_normalize(x: np.ndarray, fallback: np.ndarray | None = None) -> np.ndarray:
    total = float(x.sum())
    if total <= 0.0 or not np.isfinite(total):
        return fallback if fallback is not None else np.full(len(x), 1.0 / len(x))
    return x / total


def log_inflate(x: np.ndarray, rho: float) -> np.ndarray:
    """
    :param x: Non-negative vector.
    :param rho: Inflation factor.
    :return: rho * x / max(x), the logarithm of the inflated vector. An all-zero vector maps to zeros.
    """
    peak = float(x.max()) if len(x) > 0 else 0.0
    if peak <= 0.0:
        return np.zeros(len(x))
    return rho * x / peak


def inflate(x: np.ndarray, rho: float) -> np.ndarray:
    """
    :param x: Non-negative vector.
    :param rho: Inflation factor.
    :return: exp(rho * x / max(x)); the largest entry maps to e^rho. An all-zero vector maps to ones.
    """
    return np.exp(log_inflate(x, rho))


def reweighted_jump(x: np.ndarray, candidates: Candidate_Index, config: Matcher_Config,
                    start: Bistochastic_Balance | None = None) -> tuple[np.ndarray, Bistochastic_Balance]:
    """
    :param x: Walker distribution on one layer.
    :param candidates: The candidate enumeration.
    :param config: Matcher configuration holding the inflation factor and bistochastic limits.
    :param start: Potentials of the previous jump on the same layer.
    :return: The inflated, bistochastically normalized and L1 normalized jump distribution, and its potentials.
    """
    log_inflated = candidates.as_matrix(log_inflate(x, config.rho))
    balanced, balance = balance_log_matrix(log_inflated, config.bistochastic_tol, config.bistochastic_max_iter, start=start)
    return _l1_normalize(balanced.ravel()), balance


def order_confidence(jumps: dict[int, np.ndarray], walks: dict[int, np.ndarray]) -> dict[int, float]:
    """
    :param jumps: Reweighted jump of every layer.
    :param walks: Walker distribution of every layer.
    :return: sum(min(jump, walk)) of every layer, normalized to sum to 1 over the layers.
    """
    overlap = {o: float(np.minimum(jumps[o], walks[o]).sum()) for o in jumps}
    total = sum(overlap.values())
    if total <= 0.0:
        return {o: 1.0 / len(overlap) for o in overlap}
    return {o: v / total for o, v in overlap.items()}


def rrw_iterate(transition: Transition_Tensor, config: Matcher_Config | None = None) -> Assignment_State:
    """
    Run the reweighted random walk from a uniform assignment until the L1 change of all layers drops below tol or
    max_iter steps are taken. Each layer's bistochastic balance starts from the potentials of its previous jump.
    :param transition: The transition tensor.
    :param config: Matcher configuration.
    :return: The soft assignment state. converged is False if the iteration limit was reached.
    """
    if config is None:
        config = Matcher_Config()
    candidates = transition.affinity.candidates
    size = candidates.size
    uniform = np.full(size, 1.0 / size)
    layers = transition.layers
    if len(layers) == 0:
        logger.debug(f"No order has positive affinity over {candidates.n_p}x{candidates.n_q} candidates; keeping a uniform assignment")
        return Assignment_State(candidates, {1: uniform.copy()}, np.array([1.0, 0.0, 0.0]), converged=True)
    walks = {o: uniform.copy() for o in layers}
    confidence = {o: 1.0 / len(layers) for o in layers}
    balances: dict[int, Bistochastic_Balance | None] = {o: None for o in layers}
    unbalanced: list[Bistochastic_Balance] = []
    change = float("inf")
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        moved = transition.step(walks)
        stepped = {o: _l1_normalize(moved[o], walks[o]) for o in layers}
        jumps = {}
        for o in layers:
            jumps[o], balances[o] = reweighted_jump(stepped[o], candidates, config, balances[o])
            if not balances[o].balances(config.bistochastic_tol):
                unbalanced.append(balances[o])
        confidence = order_confidence(jumps, stepped)
        if transition.mix_orders:
            gathered = sum(confidence[o] * jumps[o] for o in layers)
            updated = {o: _l1_normalize(config.theta * stepped[o] + (1.0 - config.theta) * gathered) for o in layers}
        else:
            updated = {o: _l1_normalize(config.theta * stepped[o] + (1.0 - config.theta) * jumps[o]) for o in layers}
        change = sum(float(np.abs(updated[o] - walks[o]).sum()) for o in layers)
        walks = updated
        if change < config.tol:
            converged = True
            break
    if len(unbalanced) > 0:
        worst = max(unbalanced, key=lambda b: b.deviation)
        warnings.warn(Bistochastic_Non_Convergence_Warning(worst.iterations, worst.deviation, len(unbalanced)))
    if not converged:
        warnings.warn(Random_Walk_Non_Convergence_Warning(iterations, change))
    confidence_vector = np.zeros(3)
    for o in layers:
        confidence_vector[o - 1] = confidence[o]
    return Assignment_State(candidates, walks, confidence_vector, converged=converged, iterations=iterations)
