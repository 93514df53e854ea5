# File: infowalk/config.py
import logging
import os
from dataclasses import dataclass, fields, asdict
from typing import Any, Dict, Optional

import toml

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


STRATEGIES = ("huge", "deepwalk", "node2vec")
ORDERS = ("random", "bfs", "dfs", "bfs-degree", "dfs-degree")
PARTITIONERS = ("mpgp", "mpgp-parallel", "hash")
SCORE_VECTORS = ("in", "mean")


class AppConfig:
    """
    A centralized class to load and provide the default run parameters from
    'config.toml'.
    """
    _defaults: Optional[Dict[str, Any]] = None

    @staticmethod
    def config_path() -> str:
        # INFOWALK_CONFIG wins over the file shipped at the repository root
        env_path = os.getenv("INFOWALK_CONFIG")
        if env_path:
            return env_path
        return os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config.toml")

    @staticmethod
    def get_defaults() -> Dict[str, Any]:
        """
        Loads the defaults from 'config.toml'.

        It caches the result after the first read to avoid redundant file I/O.
        """
        if AppConfig._defaults is None:
            config_path = AppConfig.config_path()
            try:
                with open(config_path, "r") as f:
                    AppConfig._defaults = toml.load(f)
                logger.info(f"--- Loaded {len(AppConfig._defaults)} default parameters from '{config_path}' ---")
            except FileNotFoundError:
                logger.warning(f"'config.toml' not found at '{config_path}'. Falling back to built-in defaults.")
                AppConfig._defaults = {}
            except toml.TomlDecodeError as e:
                raise ConfigError(f"Failed to parse '{config_path}': {e}") from e
        return AppConfig._defaults

    @staticmethod
    def reset():
        AppConfig._defaults = None

    @staticmethod
    def load_user_file(path: str) -> Dict[str, Any]:
        """Reads a flat key = value file; nested tables are rejected."""
        try:
            with open(path, "r") as f:
                data = toml.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"Config file not found: '{path}'") from e
        except toml.TomlDecodeError as e:
            raise ConfigError(f"Failed to parse '{path}': {e}") from e

        for key, value in data.items():
            if isinstance(value, dict):
                raise ConfigError(f"Config file '{path}' must be flat; '{key}' is a table.")
        return data


@dataclass
class RunConfig:
    graph: str = ""
    directed: bool = False
    weighted: bool = False
    holdout_fraction: float = 0.5

    machines: int = 4
    gamma: float = 2.0
    order: str = "dfs-degree"
    partitioner: str = "mpgp"
    segments: int = 0

    strategy: str = "huge"
    p: float = 1.0
    q: float = 1.0
    fixed_length: int = 0
    walks_per_node: int = 10
    mu: float = 0.995
    delta: float = 0.001
    l_min: int = 5
    l_max: int = 80
    max_rounds: int = 50

    dim: int = 128
    window: int = 10
    negatives: int = 5
    multi_windows: int = 2
    epochs: int = 1
    lr: float = 0.025
    workers: int = 1
    sync_interval: float = 0.1
    sync_every: int = 0
    score_vectors: str = "in"

    trials: int = 1

    seed: int = 42
    threads: int = 0
    out: str = "out"

    @classmethod
    def build(cls, config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Layers the parameters: config.toml defaults, then the user's config
        file, then CLI flags. Unknown keys are rejected.
        """
        known = {f.name for f in fields(cls)}
        merged: Dict[str, Any] = {}

        layers = [AppConfig.get_defaults()]
        if config_file:
            layers.append(AppConfig.load_user_file(config_file))
        layers.append({k: v for k, v in (overrides or {}).items() if v is not None})

        for layer in layers:
            for key, value in layer.items():
                key = key.replace("-", "_")
                if key not in known:
                    raise ConfigError(f"Unknown config key '{key}'.")
                merged[key] = value

        env_threads = os.getenv("INFOWALK_THREADS")
        if env_threads and not (overrides or {}).get("threads"):
            merged["threads"] = int(env_threads)

        if isinstance(merged.get("order"), str):
            merged["order"] = merged["order"].replace("_", "-")

        config = cls(**merged)
        config.validate()
        return config

    @property
    def information_centric(self) -> bool:
        return self.fixed_length == 0

    @property
    def thread_count(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    @property
    def segment_count(self) -> int:
        return self.segments if self.segments > 0 else self.thread_count

    def validate(self):
        def require(condition: bool, key: str, message: str):
            if not condition:
                raise ConfigError(f"Invalid '{key}': {message} (got {getattr(self, key)!r}).")

        require(0 < self.mu <= 1, "mu", "must be in (0, 1]")
        require(self.delta > 0, "delta", "must be positive")
        require(self.machines >= 1, "machines", "must be at least 1")
        require(self.gamma >= 1, "gamma", "must be at least 1")
        require(self.order in ORDERS, "order", f"must be one of {ORDERS}")
        require(self.partitioner in PARTITIONERS, "partitioner", f"must be one of {PARTITIONERS}")
        require(self.strategy in STRATEGIES, "strategy", f"must be one of {STRATEGIES}")
        require(self.p > 0, "p", "must be positive")
        require(self.q > 0, "q", "must be positive")
        require(self.fixed_length >= 0, "fixed_length", "must be 0 (information-centric) or positive")
        require(self.walks_per_node >= 1, "walks_per_node", "must be at least 1")
        require(self.l_min >= 2, "l_min", "must be at least 2")
        require(self.l_max >= self.l_min, "l_max", "must not be below l_min")
        require(self.max_rounds >= 2, "max_rounds", "must be at least 2")
        require(self.dim >= 1, "dim", "must be at least 1")
        require(self.window >= 1, "window", "must be at least 1")
        require(self.negatives >= 1, "negatives", "must be at least 1")
        require(self.multi_windows >= 1, "multi_windows", "must be at least 1")
        require(self.epochs >= 1, "epochs", "must be at least 1")
        require(self.lr > 0, "lr", "must be positive")
        require(self.workers >= 1, "workers", "must be at least 1")
        require(self.sync_interval > 0, "sync_interval", "must be positive")
        require(self.sync_every >= 0, "sync_every", "must not be negative")
        require(self.score_vectors in SCORE_VECTORS, "score_vectors", f"must be one of {SCORE_VECTORS}")
        require(0 <= self.holdout_fraction < 1, "holdout_fraction", "must be in [0, 1)")
        require(self.trials >= 1, "trials", "must be at least 1")
        require(self.threads >= 0, "threads", "must not be negative")
        require(self.segments >= 0, "segments", "must not be negative")

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)
