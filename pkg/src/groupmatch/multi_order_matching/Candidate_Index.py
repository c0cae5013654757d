"""Module containing the Candidate_Index class."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Candidate_Index:
    """
    Flat enumeration of every correspondence (i, a) between a probe node i and a gallery node a.
    Candidate c = i * n_q + a.
    """
    n_p: int
    n_q: int

    @property
    def size(self) -> int:
        """
        :return: Number of candidates, n_p * n_q.
        """
        return self.n_p * self.n_q

    def index(self, i: int, a: int) -> int:
        """
        :param i: Probe node.
        :param a: Gallery node.
        :return: Flat index of the correspondence.
        """
        assert 0 <= i < self.n_p and 0 <= a < self.n_q, f"Correspondence ({i}, {a}) is outside {self.n_p}x{self.n_q}"
        return i * self.n_q + a

    def pair(self, c: int) -> tuple[int, int]:
        """
        :param c: Flat index.
        :return: The (probe node, gallery node) correspondence.
        """
        assert 0 <= c < self.size, f"Candidate {c} is outside [0, {self.size})"
        i, a = divmod(int(c), self.n_q)
        return i, a

    def as_matrix(self, x: np.ndarray) -> np.ndarray:
        """
        :param x: Vector over candidates.
        :return: The vector reshaped to (n_p, n_q).
        """
        return np.asarray(x).reshape(self.n_p, self.n_q)

    def __len__(self) -> int:
        return self.size
