"""Pipeline configuration: defaults, a flat dotted-key text format and
environment-variable overrides.

File format: one ``dotted.key = json-value`` per line, ``#`` comments
allowed.  Values are JSON (so strings, numbers, booleans, null and
lists round-trip losslessly).  Environment overrides use the prefix
``EXPERTFIND_`` with ``__`` standing for a dot, e.g.
``EXPERTFIND_CV__K=5``.  Precedence: CLI flags > environment > config
file > defaults.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

ENV_PREFIX = "EXPERTFIND_"

_DEFAULT_LEARNERS: dict[str, dict] = {
    "logistic": {"l2_penalty": 1e-4, "max_iter": 1000, "tol": 1e-6},
    "tree": {"max_depth": 12, "min_leaf": 2},
    "forest": {"n_trees": 100, "max_depth": 14, "min_leaf": 1},
    "rulefit": {"n_trees": 30, "max_depth": 3, "l1_penalty": 0.005},
}

_DEFAULT_GRID: dict[str, dict] = {
    "forest": {"n_trees": [50, 100], "max_depth": [8, 14]},
    "tree": {"max_depth": [4, 8, 12]},
    "logistic": {"l2_penalty": [1e-4, 1e-2]},
    "rulefit": {"l1_penalty": [0.002, 0.01]},
}


@dataclass
class PipelineConfig:
    store: Optional[str] = None
    run_dir: str = "run"
    seed: int = 0
    cv_k: int = 10
    idf_mode: str = "smoothed"
    kappa_gate: float = 0.70
    typing_threshold: float = 0.50
    min_activity: int = 5
    selection_method: str = "kbest"
    selection_params: dict = field(default_factory=lambda: {"k": 20})
    margin: dict = field(default_factory=lambda: {"l2_penalty": 0.01, "epochs": 300})
    learners: dict = field(default_factory=lambda: json.loads(json.dumps(_DEFAULT_LEARNERS)))
    grid: dict = field(default_factory=lambda: json.loads(json.dumps(_DEFAULT_GRID)))

    def __post_init__(self) -> None:
        if not 0.0 <= self.kappa_gate <= 1.0:
            raise ValueError("kappa_gate must lie in [0, 1]")
        if not 0.0 < self.typing_threshold <= 1.0:
            raise ValueError("typing_threshold must lie in (0, 1]")
        if self.min_activity < 0:
            raise ValueError("min_activity must be >= 0")
        if self.cv_k < 2:
            raise ValueError("cv_k must be >= 2")
        if self.idf_mode not in ("classic", "smoothed"):
            raise ValueError("idf_mode must be classic or smoothed")

    # -- flat key mapping --------------------------------------------------

    def to_flat(self) -> dict[str, Any]:
        flat: dict[str, Any] = {
            "store": self.store,
            "run_dir": self.run_dir,
            "seed": self.seed,
            "cv.k": self.cv_k,
            "idf_mode": self.idf_mode,
            "kappa_gate": self.kappa_gate,
            "typing_threshold": self.typing_threshold,
            "min_activity": self.min_activity,
            "selection.method": self.selection_method,
        }
        for key, value in sorted(self.selection_params.items()):
            flat[f"selection.{key}"] = value
        for key, value in sorted(self.margin.items()):
            flat[f"margin.{key}"] = value
        for kind, cfg in sorted(self.learners.items()):
            for key, value in sorted(cfg.items()):
                flat[f"learner.{kind}.{key}"] = value
        for kind, cfg in sorted(self.grid.items()):
            for key, value in sorted(cfg.items()):
                flat[f"grid.{kind}.{key}"] = value
        return flat

    @classmethod
    def from_flat(cls, flat: dict[str, Any]) -> "PipelineConfig":
        config = cls()
        for key, value in flat.items():
            config._set_flat(key, value)
        config.__post_init__()
        return config

    def _set_flat(self, key: str, value: Any) -> None:
        if key == "store":
            self.store = value
        elif key == "run_dir":
            self.run_dir = value
        elif key == "seed":
            self.seed = int(value)
        elif key == "cv.k":
            self.cv_k = int(value)
        elif key == "idf_mode":
            self.idf_mode = value
        elif key == "kappa_gate":
            self.kappa_gate = float(value)
        elif key == "typing_threshold":
            self.typing_threshold = float(value)
        elif key == "min_activity":
            self.min_activity = int(value)
        elif key == "selection.method":
            self.selection_method = value
        elif key.startswith("selection."):
            self.selection_params[key.split(".", 1)[1]] = value
        elif key.startswith("margin."):
            self.margin[key.split(".", 1)[1]] = value
        elif key.startswith("learner."):
            _, kind, param = key.split(".", 2)
            self.learners.setdefault(kind, {})[param] = value
        elif key.startswith("grid."):
            _, kind, param = key.split(".", 2)
            self.grid.setdefault(kind, {})[param] = value
        else:
            raise ValueError(f"unknown config key: {key!r}")

    # -- text format --------------------------------------------------------

    def to_text(self) -> str:
        lines = ["# expertfind pipeline configuration"]
        for key, value in sorted(self.to_flat().items()):
            lines.append(f"{key} = {json.dumps(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        flat: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, _, rhs = line.partition("=")
            try:
                value = json.loads(rhs.strip())
            except json.JSONDecodeError:
                value = rhs.strip()  # bare strings allowed
            flat[key.strip()] = value
        return cls.from_flat(flat)

    @classmethod
    def load(cls, path: Optional[str | Path] = None, env: Optional[dict] = None) -> "PipelineConfig":
        """File (if given) then environment overrides."""
        if path is not None:
            config = cls.from_text(Path(path).read_text(encoding="utf-8"))
        else:
            config = cls()
        env = os.environ if env is None else env
        for name, raw in sorted(env.items()):
            if not name.startswith(ENV_PREFIX):
                continue
            key = name[len(ENV_PREFIX):].lower().replace("__", ".")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            config._set_flat(key, value)
        config.__post_init__()
        return config

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]
