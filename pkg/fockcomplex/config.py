"""
Configuration management for fockcomplex.
Handles loading, saving, and validation of configuration settings, plus the
per-invocation RunConfig built from the command line.
"""

import copy
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "tolerances": {
        "identity": 1e-8,
        "moment": 1e-9,
        "reproduce": 1e-10,
        "spectrum": 1e-9,
        "torsion": 1e-9,
        "torsion_gaussian": 1e-10
    },
    "verify": {
        "seed": 0,
        "cases": 20,
        "degree": 4
    },
    "solver": {
        "window": 6,
        "convergence_factor": 2.0
    },
    "output": {
        "format": "json"
    },
    "system": {
        "log_level": "INFO",
        "log_file": ""
    }
}

OUTPUT_FORMATS = ("json", "csv")
COMMANDS = ("spectrum", "verify", "solve", "moments")
VERIFY_SUITES = ("basic-estimate", "kohn-morrey", "energy-identity", "commutation")


class Config:
    """Configuration manager for fockcomplex"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = Path(config_file) if config_file else None
        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file, falling back to the defaults"""
        if self.config_file is None:
            return copy.deepcopy(DEFAULT_CONFIG)
        if not self.config_file.exists():
            raise ConfigError("config", f"configuration file not found: {self.config_file}")
        try:
            with open(self.config_file, 'r') as f:
                config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError("config", f"cannot read {self.config_file}: {e}") from e
        if not isinstance(config, dict):
            raise ConfigError("config", "configuration file must hold a JSON object")
        logger.debug(f"Loaded configuration from {self.config_file}")
        return self._merge_with_defaults(config)

    def _merge_with_defaults(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Merge user config with defaults to ensure all keys exist"""
        merged = copy.deepcopy(DEFAULT_CONFIG)

        for section, values in config.items():
            if section in merged and isinstance(values, dict):
                merged[section].update(values)
            else:
                merged[section] = values

        return merged

    def save(self, path: Optional[str] = None) -> None:
        """Save configuration to file"""
        target = Path(path) if path else self.config_file
        if target is None:
            raise ConfigError("config", "no configuration file to save to")
        with open(target, 'w') as f:
            json.dump(self._config, f, indent=2)
        logger.info(f"Configuration saved to {target}")

    def get(self, section: str, key: Optional[str] = None, default: Any = None) -> Any:
        """Get configuration value"""
        if key is None:
            return self._config.get(section, default)
        return self._config.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any) -> None:
        self._config.setdefault(section, {})[key] = value

    def update(self, updates: Dict[str, Any]) -> None:
        """Update configuration with dictionary of changes"""
        for section, values in updates.items():
            if section in self._config and isinstance(values, dict):
                self._config[section].update(values)
            else:
                self._config[section] = values

    @property
    def tolerances(self) -> Dict[str, Any]:
        return self._config.get("tolerances", {})

    @property
    def verify(self) -> Dict[str, Any]:
        return self._config.get("verify", {})

    @property
    def solver(self) -> Dict[str, Any]:
        return self._config.get("solver", {})

    @property
    def output(self) -> Dict[str, Any]:
        return self._config.get("output", {})

    @property
    def system(self) -> Dict[str, Any]:
        return self._config.get("system", {})

    def to_dict(self) -> Dict[str, Any]:
        """Return configuration as dictionary"""
        return copy.deepcopy(self._config)

    def validate(self) -> bool:
        """Validate configuration"""
        for section in DEFAULT_CONFIG:
            if section not in self._config:
                logger.error(f"Missing required config section: {section}")
                return False

        for key, value in self.tolerances.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                logger.error(f"Invalid tolerance {key}: {value!r}")
                return False

        for key in ("seed", "cases", "degree"):
            value = self.verify.get(key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                logger.error(f"Invalid verify.{key}: {value!r}")
                return False

        window = self.solver.get("window")
        if not isinstance(window, int) or window < 0:
            logger.error(f"Invalid solver.window: {window!r}")
            return False

        factor = self.solver.get("convergence_factor")
        if not isinstance(factor, (int, float)) or factor <= 1:
            logger.error(f"Invalid solver.convergence_factor: {factor!r}")
            return False

        if self.output.get("format") not in OUTPUT_FORMATS:
            logger.error(f"Invalid output format: {self.output.get('format')!r}")
            return False

        return True


@dataclass
class RunConfig:
    """Settings of one command-line invocation"""

    command: str
    n: Optional[int] = None
    p: Optional[int] = None
    truncation: Optional[int] = None
    m_max: Optional[int] = None
    suite: Optional[str] = None
    target: Optional[str] = None
    weight: Optional[str] = None
    ops: List[str] = field(default_factory=list)
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    solution_path: Optional[str] = None
    output_format: str = "json"
    tolerance: Optional[float] = None
    seed: int = 0
    cases: int = 20
    degree: int = 4
    window: int = 6
    convergence_factor: float = 2.0
    check: bool = False
    method: str = "closed"
    k_max: int = 8

    @classmethod
    def from_config(cls, command: str, config: Config, **overrides: Any) -> 'RunConfig':
        """Defaults from the configuration file, then the command-line values that were given"""
        settings: Dict[str, Any] = {
            "output_format": config.output.get("format", "json"),
            "seed": config.verify.get("seed", 0),
            "cases": config.verify.get("cases", 20),
            "degree": config.verify.get("degree", 4),
            "window": config.solver.get("window", 6),
            "convergence_factor": config.solver.get("convergence_factor", 2.0),
        }
        settings.update({key: value for key, value in overrides.items() if value is not None})
        return cls(command=command, **settings)

    def validate(self) -> None:
        """Raise ConfigError naming the first offending field"""
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError("format", f"expected one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        if self.n is not None and self.n < 1:
            raise ConfigError("n", f"dimension must be >= 1, got {self.n}")
        if self.p is not None:
            if self.p < 0:
                raise ConfigError("p", f"form degree must be >= 0, got {self.p}")
            if self.n is not None and self.p > self.n:
                raise ConfigError("p", f"form degree {self.p} exceeds dimension {self.n}")
        for name in ("truncation", "m_max", "degree", "window", "cases", "k_max"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(name, f"must be >= 0, got {value}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("tolerance", f"must be positive, got {self.tolerance}")
        if self.convergence_factor <= 1:
            raise ConfigError("convergence_factor", f"must exceed 1, got {self.convergence_factor}")
        if self.method not in ("closed", "quadrature"):
            raise ConfigError("method", f"expected 'closed' or 'quadrature', got {self.method!r}")
        if self.command == "spectrum" and (self.n is None or self.p is None):
            raise ConfigError("n" if self.n is None else "p", "spectrum needs --n and --p")
        if self.command == "solve":
            if self.target not in ("dbar", "d", "dstar"):
                raise ConfigError("target", f"expected dbar, d or dstar, got {self.target!r}")
            if not self.input_path:
                raise ConfigError("input", "solve needs --input")
            if not Path(self.input_path).exists():
                raise ConfigError("input", f"file not found: {self.input_path}")
            if self.target in ("d", "dstar") and not self.ops:
                raise ConfigError("ops", f"solve {self.target} needs --ops")
        if self.command == "verify" and self.suite not in VERIFY_SUITES:
            raise ConfigError("suite", f"unknown suite {self.suite!r}, expected one of {', '.join(VERIFY_SUITES)}")
        if self.command == "moments" and not self.weight:
            raise ConfigError("weight", "moments needs --weight")
        if self.command == "verify" and self.suite == "energy-identity" and not self.ops:
            raise ConfigError("ops", "energy-identity needs --ops")
