"""Conversion of soft assignment scores into a one-to-one mapping."""
import numpy as np
from scipy.optimize import linear_sum_assignment

from groupmatch.groupmatch_config.GroupMatch_Config import Discretizer_Type
from groupmatch.multi_order_matching.Assignment_State import Assignment_State


def hungarian_mapping(scores: np.ndarray) -> np.ndarray:
    """
    :param scores: (n_p, n_q) soft scores.
    :return: Binary matrix of the one-to-one mapping of min(n_p, n_q) pairs with the largest total score.
    """
    rows, columns = linear_sum_assignment(scores, maximize=True)
    mapping = np.zeros(scores.shape, dtype=np.int8)
    mapping[rows, columns] = 1
    return mapping


def greedy_mapping(scores: np.ndarray) -> np.ndarray:
    """
    Repeatedly take the highest remaining score whose row and column are both free.
    Equal scores are taken in lexicographic (i, a) order.
    :param scores: (n_p, n_q) soft scores.
    :return: Binary matrix of the mapping.
    """
    n_p, n_q = scores.shape
    rows, columns = np.indices(scores.shape)
    order = np.lexsort((columns.ravel(), rows.ravel(), -scores.ravel()))
    mapping = np.zeros(scores.shape, dtype=np.int8)
    used_rows, used_columns = set(), set()
    for flat in order:
        i, a = divmod(int(flat), n_q)
        if i in used_rows or a in used_columns:
            continue
        mapping[i, a] = 1
        used_rows.add(i)
        used_columns.add(a)
        if len(used_rows) == min(n_p, n_q):
            break
    return mapping


def discretize(state: Assignment_State, discretizer: Discretizer_Type = Discretizer_Type.Hungarian) -> np.ndarray:
    """
    :param state: Soft assignment state; its discrete field is set to the result.
    :param discretizer: Hungarian or greedy mapping.
    :return: The binary assignment matrix X.
    """
    scores = state.integrated
    if discretizer is Discretizer_Type.Greedy:
        mapping = greedy_mapping(scores)
    else:
        mapping = hungarian_mapping(scores)
    state.discrete = mapping
    return mapping
