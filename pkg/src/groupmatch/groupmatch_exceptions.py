"""Exceptions raised by groupmatch when an input cannot be processed."""


class GroupMatch_Exception(Exception):
    """Superclass of all groupmatch failures."""

    def __init__(self, message: str):
        self.message: str = message
        super().__init__(message)


class GroupMatch_Validation_Exception(GroupMatch_Exception):
    """Superclass of failures caused by invalid user input (exit code 2 in the command line)."""


class Empty_Crop_Exception(GroupMatch_Validation_Exception):
    """Raised when a person crop has no pixels."""

    def __init__(self, shape: tuple[int, ...]):
        self.shape: tuple[int, ...] = shape
        super().__init__(f"empty crop: pixel array of shape {shape}")


class Empty_Matching_Set_Exception(GroupMatch_Exception):
    """Raised when a distance between matching sets is requested for an empty set."""

    def __init__(self, owner=None):
        self.owner = owner
        super().__init__(f"empty matching set{'' if owner is None else f' of {owner}'}")


class Degenerate_Reweight_Matrix_Exception(GroupMatch_Exception):
    """Raised when bistochastic normalization meets a row or column with no positive entry."""

    def __init__(self, zero_rows: list[int], zero_columns: list[int]):
        self.zero_rows: list[int] = zero_rows
        self.zero_columns: list[int] = zero_columns
        super().__init__(f"degenerate reweight matrix: zero rows {zero_rows}, zero columns {zero_columns}")


class Unlabeled_Probe_Exception(GroupMatch_Validation_Exception):
    """Raised when an evaluation needs the true gallery of a probe that has none."""

    def __init__(self, probe_id: str):
        self.probe_id: str = probe_id
        super().__init__(f"unlabeled probe: {probe_id}")


class Manifest_Validation_Exception(GroupMatch_Validation_Exception):
    """Raised when a manifest document violates its schema. The pointer locates the offending value."""

    def __init__(self, pointer: str, problem: str):
        self.pointer: str = pointer if pointer != "" else "/"
        self.problem: str = problem
        super().__init__(f"{problem} at {self.pointer}")


class Missing_Image_Exception(GroupMatch_Validation_Exception):
    """Raised when a manifest references an image file that does not exist."""

    def __init__(self, path: str):
        self.path: str = path
        super().__init__(f"missing image: {path}")


class Unknown_Variant_Exception(GroupMatch_Validation_Exception):
    """Raised when an ablation variant name is not recognized."""

    def __init__(self, name: str, valid_names: list[str]):
        self.name: str = name
        self.valid_names: list[str] = valid_names
        super().__init__(f"unknown variant '{name}'; valid variants are: {', '.join(valid_names)}")


class Config_Exception(GroupMatch_Validation_Exception):
    """Raised when a configuration file holds unknown keys or invalid values."""

    def __init__(self, key: str, problem: str):
        self.key: str = key
        super().__init__(f"invalid configuration '{key}': {problem}")


class Descriptor_Cache_Exception(GroupMatch_Validation_Exception):
    """Raised when a descriptor cache file has the wrong magic or an unsupported version."""

    def __init__(self, path: str, problem: str):
        self.path: str = path
        super().__init__(f"cannot read descriptor cache {path}: {problem}")
