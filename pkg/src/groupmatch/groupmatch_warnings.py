"""Warnings raised for recoverable conditions during re-identification."""


class GroupMatch_Warning(RuntimeWarning):
    """Superclass of groupmatch warnings."""

    def __init__(self, message: str):
        self.message: str = message
        super().__init__(message)


class Random_Walk_Non_Convergence_Warning(GroupMatch_Warning):
    """The reweighted random walk stopped at its iteration limit before converging."""

    def __init__(self, iterations: int, last_change: float):
        self.iterations: int = iterations
        self.last_change: float = last_change
        super().__init__(f"Reweighted random walk did not converge in {iterations} iterations (last L1 change {last_change:.3e})")


class Bistochastic_Non_Convergence_Warning(GroupMatch_Warning):
    """Bistochastic normalization stopped at its step limit with a row or column sum still away from 1."""

    def __init__(self, iterations: int, deviation: float, count: int = 1):
        self.iterations: int = iterations
        self.deviation: float = deviation
        self.count: int = count
        super().__init__(f"Bistochastic normalization left a row or column sum {deviation:.3e} from 1 after {iterations} steps"
                         + (f" ({count} matrices)" if count > 1 else ""))


class Weak_Group_Pair_Warning(GroupMatch_Warning):
    """A labelled group pair shares too few people to count as the same group."""

    def __init__(self, probe_group_id: str, gallery_group_id: str, shared: int, total: int):
        self.probe_group_id: str = probe_group_id
        self.gallery_group_id: str = gallery_group_id
        self.shared: int = shared
        self.total: int = total
        super().__init__(f"Pair {probe_group_id}->{gallery_group_id} shares {shared} people of {total}; not more than a quarter")
