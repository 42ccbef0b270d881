"""Scenario configuration: a line-based ``section.key = value`` format.

Example::

    # source
    squeezer.a_per_w = 20.1
    squeezer.loss = 0.487
    squeezer.pump_w = 0.1
    gain.db = 23
    dispersion.d_ps_per_nm = 0.033
    dispersion.f0_thz = 194
    grid.start_nm = 1500
    grid.stop_nm = 1590
    grid.step_nm = 0.1

Blank lines and ``#`` comments are skipped.  Unknown sections or keys,
duplicate keys, and unparsable values are rejected with their line numbers.
Each CLI subcommand then asks for the sections it needs; a missing key there
names the field.
"""

from dataclasses import dataclass, field

from .dispersion import DispersionModel, make_grid
from .errors import ConfigError
from .lockloop import LockLoopConfig
from .measurement import OpaGain
from .sideband import SqueezerParams, true_levels

__all__ = ["ScenarioConfig", "parse_config", "read_config"]

_SCHEMA = {
    "squeezer": {"a_per_w": float, "loss": float, "pump_w": float},
    "gain": {"g": float, "db": float},
    "dispersion": {"d_ps_per_nm": float, "f0_thz": float, "phi0_rad": float},
    "grid": {"start_nm": float, "stop_nm": float, "step_nm": float},
    "lockloop": {
        "ki": float, "dt_s": float, "target": float, "lock_nm": float,
        "noise_rms": float, "drift_rate": float, "max_steps": int,
        "tolerance": float, "initial_phase": float,
    },
    "fit": {"max_iter": int, "step_tol": float},
    "run": {"seed": int},
    "output": {"dir": str},
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed, schema-checked config entries: {(section, key): value}."""

    entries: dict = field(default_factory=dict)

    def get(self, section, key, default=None):
        return self.entries.get((section, key), default)

    def has(self, section, key):
        return (section, key) in self.entries

    def _require(self, section, keys):
        missing = [k for k in keys if not self.has(section, k)]
        if missing:
            raise ConfigError(
                f"section [{section}] is incomplete: missing "
                + ", ".join(f"{section}.{k}" for k in missing)
            )

    def squeezer(self):
        self._require("squeezer", ("a_per_w", "loss", "pump_w"))
        return SqueezerParams(
            a_per_w=self.get("squeezer", "a_per_w"),
            loss=self.get("squeezer", "loss"),
            pump_w=self.get("squeezer", "pump_w"),
        )

    def levels(self):
        return true_levels(self.squeezer())

    def gain(self):
        has_g, has_db = self.has("gain", "g"), self.has("gain", "db")
        if has_g and has_db:
            raise ConfigError("give gain.g or gain.db, not both")
        if has_g:
            return OpaGain(self.get("gain", "g"))
        if has_db:
            return OpaGain.from_db(self.get("gain", "db"))
        raise ConfigError("section [gain] is incomplete: missing gain.g or gain.db")

    def dispersion(self):
        self._require("dispersion", ("d_ps_per_nm", "f0_thz"))
        return DispersionModel(
            d_ps_per_nm=self.get("dispersion", "d_ps_per_nm"),
            f0_thz=self.get("dispersion", "f0_thz"),
            phi0_rad=self.get("dispersion", "phi0_rad", 0.0),
        )

    def grid(self):
        self._require("grid", ("start_nm", "stop_nm", "step_nm"))
        return make_grid(self.get("grid", "start_nm"),
                         self.get("grid", "stop_nm"),
                         self.get("grid", "step_nm"))

    def lockloop(self):
        self._require("lockloop", ("ki", "dt_s", "target", "lock_nm"))
        return LockLoopConfig(
            ki=self.get("lockloop", "ki"),
            dt_s=self.get("lockloop", "dt_s"),
            target=self.get("lockloop", "target"),
            lock_nm=self.get("lockloop", "lock_nm"),
            noise_rms=self.get("lockloop", "noise_rms", 0.0),
            drift_rate=self.get("lockloop", "drift_rate", 0.0),
            max_steps=self.get("lockloop", "max_steps", 2000),
            tolerance=self.get("lockloop", "tolerance", None),
        )

    def seed(self, default=0):
        return self.get("run", "seed", default)


def parse_config(text):
    """Parse config text into a :class:`ScenarioConfig`.

    Raises :class:`ConfigError` with a line number on the first syntax,
    unknown-key, duplicate-key, or value-type problem.
    """
    entries = {}
    first_line = {}
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}",
                              line=line_no)
        name, _, value_text = line.partition("=")
        name = name.strip()
        value_text = value_text.strip()
        if name.count(".") != 1:
            raise ConfigError(f"key must be 'section.key', got {name!r}", line=line_no)
        section, key = (part.strip() for part in name.split("."))
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section {section!r}", line=line_no)
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]",
                              line=line_no)
        if (section, key) in entries:
            raise ConfigError(
                f"duplicate key {section}.{key} (first set on line "
                f"{first_line[(section, key)]})", line=line_no)
        caster = _SCHEMA[section][key]
        try:
            if caster is int:
                value = int(value_text)
            elif caster is float:
                value = float(value_text)
            else:
                value = value_text
        except ValueError:
            raise ConfigError(
                f"cannot parse {value_text!r} as {caster.__name__} for "
                f"{section}.{key}", line=line_no) from None
        if caster is float and not (value == value and abs(value) != float("inf")):
            raise ConfigError(f"{section}.{key} must be a finite number", line=line_no)
        entries[(section, key)] = value
        first_line[(section, key)] = line_no
    return ScenarioConfig(entries)


def read_config(path):
    """Parse a config file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
