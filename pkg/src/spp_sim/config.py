"""Scenario configuration: flat ``section.key = value`` text or JSON.

Unknown keys and malformed values raise ``ConfigParseError``; physical
validation is left to the owning classes (``ValidationError``).
"""

import hashlib
import json
import math

from .errors import ConfigParseError
from .graphene import Emitter, GrapheneModel
from .kernels import EnsembleGeometry

__all__ = ["SCHEMA", "ScenarioConfig", "parse_config", "load_config"]

# key -> (type, default); None default means "derived at run time"
SCHEMA = {
    "material.fermi_energy_ev": (float, 0.5),
    "material.drude_time_ps": (float, 0.5),
    "emitter.omega_sg_ev": (float, 0.5),
    "emitter.gamma_0_s": (float, 1e8),
    "emitter.z_at_nm": (float, 10.0),
    "ensemble.n_emitters": (int, 10000),
    "ensemble.width_l_nm": (float, 1000.0),
    "solver.step": (float, None),
    "solver.horizon": (float, 10.0),
    "solver.dimensionless": (bool, True),
    "dynamics.varpi_gamma": (float, None),
    "dynamics.v_over_l_gamma": (float, None),
    "dynamics.detuning_gamma": (float, 0.0),
    "grid.resolution": (int, 257),
    "grid.kx_min": (float, -0.2),
    "grid.kx_max": (float, 0.2),
    "grid.ky_min": (float, 0.8),
    "grid.ky_max": (float, 1.2),
    "grid.gamma_fit_s": (float, None),
    "plan.lambda_es_nm": (float, 500.0),
    "plan.dwell_s": (float, 1e-9),
    "plan.varpi_gamma": (float, 0.1),
    "lambshift.omega_max_factor": (float, 20.0),
    "lambshift.k_max_nm": (float, None),
    "outputs.directory": (str, "spp-sim-out"),
    "outputs.figures": (bool, True),
}


def _coerce(key, raw):
    typ = SCHEMA[key][0]
    try:
        if typ is bool:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in ("true", "yes", "1", "on"):
                return True
            if text in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            if isinstance(raw, bool):
                raise ValueError(raw)
            val = float(raw)
            if val != int(val):
                raise ValueError(raw)
            return int(val)
        if typ is float:
            if isinstance(raw, bool):
                raise ValueError(raw)
            val = float(raw)
            if math.isnan(val):
                raise ValueError(raw)
            return val
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigParseError(f"{key}: cannot read {raw!r} as {typ.__name__}") from None


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _parse_text(text):
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigParseError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if not key or not value:
            raise ConfigParseError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip('"').strip("'")
    return out


class ScenarioConfig:
    """Typed configuration values with defaults filled in."""

    def __init__(self, values, source_text=""):
        self.values = values
        self.source_text = source_text

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    @property
    def input_hash(self):
        canon = json.dumps(self.values, sort_keys=True, default=str)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def model(self):
        return GrapheneModel(self["material.fermi_energy_ev"], self["material.drude_time_ps"])

    def emitter(self):
        return Emitter(self["emitter.omega_sg_ev"], self["emitter.gamma_0_s"],
                       self["emitter.z_at_nm"])

    def geometry(self):
        return EnsembleGeometry(self["ensemble.n_emitters"], self["ensemble.width_l_nm"])

    def validate(self):
        """Build every physical object once so bad values fail before any run."""
        self.model()
        self.emitter()
        self.geometry()


def parse_config(text):
    """Parse config text (flat or JSON). An empty document is an error."""
    if not text.strip():
        raise ConfigParseError("empty configuration")
    if text.lstrip().startswith("{"):
        try:
            raw = _flatten(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"invalid JSON: {exc}") from None
    else:
        raw = _parse_text(text)
    if not raw:
        raise ConfigParseError("configuration holds no keys")
    unknown = sorted(k for k in raw if k not in SCHEMA)
    if unknown:
        raise ConfigParseError(f"unknown keys: {', '.join(unknown)}")
    values = {k: d for k, (_, d) in SCHEMA.items()}
    for k, v in raw.items():
        values[k] = None if v is None else _coerce(k, v)
    return ScenarioConfig(values, text)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
