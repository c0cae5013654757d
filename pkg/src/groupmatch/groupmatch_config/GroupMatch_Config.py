"""Module containing the configuration blocks of groupmatch and the loader that merges user files over the packaged defaults."""
import dataclasses
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import importlib_resources

import groupmatch.groupmatch_config
from groupmatch.groupmatch_exceptions import Config_Exception


class Discretizer_Type(Enum):
    """Enumeration of the methods that turn a soft assignment into a one-to-one mapping."""
    Hungarian = "hungarian"
    Greedy = "greedy"

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)


@dataclass(frozen=True)
class Feature_Config:
    """Parameters of person descriptors and edge attributes."""
    stripes: int = 18
    bins: int = 16
    n_l: int = 9
    n_p: int = 9
    sigma_l: float = 5.0
    sigma_p: float = 5.0
    gabor_frequencies: tuple[float, ...] = (0.1, 0.18, 0.26, 0.34)
    gabor_orientations: int = 4
    ransac_trials: int = 500
    ransac_threshold: float = 0.025
    head_width_ratio: float = 3.0
    head_height_ratio: float = 7.0
    rho_floor: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.rho_floor < 1.0:
            raise Config_Exception("features.rho_floor", f"must lie in (0, 1), got {self.rho_floor}")
        if self.n_l < 1 or self.n_p < 1 or self.bins < 1 or self.stripes < 1:
            raise Config_Exception("features", "bin and stripe counts must be positive")


@dataclass(frozen=True)
class Importance_Config:
    """Parameters of saliency, purity, stability and subgroup importance."""
    alpha_pur: float = 1.0
    alpha_stb: float = 1.0
    lambda_: float = 0.5
    sigma_r: float = 0.5
    sigma_s: float = 0.5
    lof_epsilon: float = 1e-9


@dataclass(frozen=True)
class Matcher_Config:
    """Parameters of the multi-order matching process and the group score."""
    theta: float = 0.2
    rho: float = 30.0
    tau: float = 0.3
    alpha_w: float = 0.1
    top_k_edge: int = 20
    top_k_hyper: int = 10
    discretizer: Discretizer_Type = Discretizer_Type.Hungarian
    dense: bool = False
    tol: float = 1e-8
    max_iter: int = 300
    orders: tuple[int, ...] = (1, 2, 3)
    penalize_unmatched: bool = True
    bistochastic_tol: float = 1e-9
    bistochastic_max_iter: int = 1000
    mix_orders: bool = True
    fold_orders: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise Config_Exception("matcher.theta", f"must lie in (0, 1], got {self.theta}")
        if self.rho <= 0:
            raise Config_Exception("matcher.rho", f"must be positive, got {self.rho}")
        if not 0.0 <= self.tau < 1.0:
            raise Config_Exception("matcher.tau", f"must lie in [0, 1), got {self.tau}")
        if self.alpha_w <= 0:
            raise Config_Exception("matcher.alpha_w", f"must be positive, got {self.alpha_w}")
        if len(self.orders) == 0 or any(o not in (1, 2, 3) for o in self.orders):
            raise Config_Exception("matcher.orders", f"must be a non-empty subset of (1, 2, 3), got {self.orders}")


@dataclass(frozen=True)
class Pipeline_Config:
    """Parameters of the iterative importance and matching loop and of the evaluation protocol."""
    max_iter: int = 5
    assign_importance: bool = True
    jobs: int = 1
    seed: int = 0
    trials: int = 5
    test_fraction: float = 0.5
    bandwidth_samples: int = 64
    global_features: bool = False


@dataclass(frozen=True)
class GroupMatch_Config:
    """All configuration blocks of one run."""
    features: Feature_Config = field(default_factory=Feature_Config)
    importance: Importance_Config = field(default_factory=Importance_Config)
    matcher: Matcher_Config = field(default_factory=Matcher_Config)
    pipeline: Pipeline_Config = field(default_factory=Pipeline_Config)

    def with_seed(self, seed: int):
        """
        :param seed: The seed to use in the pipeline.
        :return: A copy of this configuration with the pipeline seed replaced.
        """
        return dataclasses.replace(self, pipeline=dataclasses.replace(self.pipeline, seed=seed))

    def with_jobs(self, jobs: int):
        """
        :param jobs: Number of worker processes for pair scoring.
        :return: A copy of this configuration with the job count replaced.
        """
        return dataclasses.replace(self, pipeline=dataclasses.replace(self.pipeline, jobs=jobs))


_Blocks: dict[str, type] = {"features": Feature_Config, "importance": Importance_Config,
                            "matcher": Matcher_Config, "pipeline": Pipeline_Config}


def _coerce(block_name: str, key: str, value: Any, default: Any) -> Any:
    if isinstance(default, Enum):
        try:
            return type(default)(value)
        except ValueError:
            valid = [str(v) for v in type(default)]
            raise Config_Exception(f"{block_name}.{key}", f"expected one of {valid}, got {value!r}")
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)):
            raise Config_Exception(f"{block_name}.{key}", f"expected a list, got {value!r}")
        return tuple(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise Config_Exception(f"{block_name}.{key}", f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(value, int):
        raise Config_Exception(f"{block_name}.{key}", f"expected an integer, got {value!r}")
    if isinstance(default, float):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise Config_Exception(f"{block_name}.{key}", f"expected a number, got {value!r}")
        return float(value)
    return value


def config_from_dict(document: dict[str, Any], base: GroupMatch_Config | None = None) -> GroupMatch_Config:
    """
    Overlay a nested dictionary of configuration values on a base configuration.
    :param document: Mapping of block name to a mapping of keys to values.
    :param base: The configuration to override. Defaults to the built-in dataclass defaults.
    :return: The merged configuration.
    """
    if base is None:
        base = GroupMatch_Config()
    if not isinstance(document, dict):
        raise Config_Exception("/", "expected a table of configuration blocks")
    blocks = {}
    for block_name, block_values in document.items():
        if block_name not in _Blocks:
            raise Config_Exception(block_name, f"unknown block; expected one of {sorted(_Blocks)}")
        if not isinstance(block_values, dict):
            raise Config_Exception(block_name, "expected a table of values")
        current = getattr(base, block_name)
        field_names = {f.name for f in dataclasses.fields(current)}
        updates = {}
        for key, value in block_values.items():
            if key not in field_names:
                raise Config_Exception(f"{block_name}.{key}", "unknown key")
            updates[key] = _coerce(block_name, key, value, getattr(current, key))
        blocks[block_name] = dataclasses.replace(current, **updates)
    return dataclasses.replace(base, **blocks)


def default_config() -> GroupMatch_Config:
    """
    :return: The configuration described by the packaged default_config.toml.
    """
    resource = importlib_resources.files(groupmatch.groupmatch_config).joinpath('default_config.toml')
    document = tomllib.loads(resource.read_text(encoding="utf-8"))
    return config_from_dict(document)


def load_config(config_path: str | None = None) -> GroupMatch_Config:
    """
    :param config_path: Optional TOML or JSON file whose values override the packaged defaults.
    :return: The merged configuration.
    """
    config = default_config()
    if config_path is None:
        return config
    with open(config_path, "rb") as config_file:
        raw = config_file.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise Config_Exception(config_path, f"not UTF-8 text: {e}")
    if config_path.endswith(".json"):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise Config_Exception(config_path, f"not valid JSON: {e}")
    else:
        try:
            document = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise Config_Exception(config_path, f"not valid TOML: {e}")
    return config_from_dict(document, config)


def config_to_dict(config: GroupMatch_Config) -> dict[str, dict[str, Any]]:
    """
    :param config: Configuration to export.
    :return: JSON-serializable nested dictionary of the configuration.
    """
    document: dict[str, dict[str, Any]] = {}
    for block_name in _Blocks:
        block = getattr(config, block_name)
        values = {}
        for f in dataclasses.fields(block):
            value = getattr(block, f.name)
            if isinstance(value, Enum):
                value = value.value
            elif isinstance(value, tuple):
                value = list(value)
            values[f.name] = value
        document[block_name] = values
    return document
