"""Run configuration: a line-oriented ``key = value`` file with ``[section]`` headers.

Example::

    # standard rotor spectrum
    task = spectrum

    [model]
    kind = standard
    k_kick = 2.0
    tau_free = 1.0

    [basis]
    cutoff = 40

Keys outside any section may come from any section. Unknown keys and
sections are rejected, with the line number, to catch typos.
"""

import math
from dataclasses import dataclass, field

TASKS = ("spectrum", "echo", "wigner", "otoc", "autocorr", "sff", "localization", "classical", "oracle-check")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid run configuration; ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")
        self.key = key
        self.line = line


def _float(text):
    return float(text)


def _int(text):
    val = float(text)
    if not val.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(val)


def _bool(text):
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _floats(text):
    body = text.strip().strip("[]")
    return [float(x) for x in body.replace(",", " ").split()] if body.strip() else []


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"{text!r} not one of {', '.join(options)}")
        return text

    return parse


def _text(text):
    return text


SCHEMA = {
    "model": {
        "kind": _choice("standard", "linear", "generic"),
        "k_kick": _float,
        "tau_free": _float,
        "phi_free": _float,
        "kick_cos": _floats,  # V = k_kick * sum_q (cos_q cos(q theta) + sin_q sin(q theta)), q >= 1
        "kick_sin": _floats,
        "phase_sign": _choice("derived", "paper"),
    },
    "basis": {
        "cutoff": _int,
        "hbar_eff": _float,
    },
    "task": {
        "task": _choice(*TASKS),
        "j_max": _int,
        "delta_k": _float,
        "initial_n": _int,
        "seed": _int,
        "n_points": _int,
        "n_theta": _int,
        "wigner_j": _int,
        "classical": _bool,
        "method": _choice("direct", "eigensystem", "both"),
    },
    "output": {
        "output": _text,
        "format": _choice(*FORMATS),
    },
}
_SECTION_OF = {key: sec for sec, keys in SCHEMA.items() for key in keys}

DEFAULTS = {
    "phase_sign": "derived",
    "hbar_eff": 1.0,
    "initial_n": 0,
    "seed": 0,
    "n_points": 10_000,
    "wigner_j": 0,
    "classical": True,
    "method": "direct",
    "output": "floquet_out",
    "format": "csv",
    "delta_k_oracle": 0.1,
}
J_MAX_DEFAULT = {"localization": 1000, "classical": 1000, "oracle-check": 20}
REQUIRED_BY_TASK = {"echo": ("delta_k",)}


@dataclass
class RunConfig:
    """Validated settings; ``values`` holds every resolved key, defaults included."""

    values: dict
    lines: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def task(self):
        return self.values["task"]

    def resolved(self):
        """Sectioned copy of all values, as echoed into output metadata."""
        out = {sec: {} for sec in SCHEMA}
        for key, val in sorted(self.values.items()):
            out[_SECTION_OF[key]][key] = val
        return out


def parse_config(text):
    """Parse and validate a configuration document into a :class:`RunConfig`."""
    raw = {}
    lines = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError(f"malformed section header {body!r}", line=lineno)
            section = body[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        value = value.strip('"').strip("'")
        allowed = SCHEMA[section] if section else _SECTION_OF
        if key not in allowed:
            where = f"section [{section}]" if section else "configuration"
            raise ConfigError(f"unknown key {key!r} in {where}", key=key, line=lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", key=key, line=lineno)
        parser = SCHEMA[_SECTION_OF[key]][key]
        try:
            raw[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {key!r}: {exc}", key=key, line=lineno) from None
        lines[key] = lineno
    return RunConfig(_resolve(raw, lines), lines)


def _require(values, key, why, lines=None):
    if key not in values:
        raise ConfigError(f"missing required key {key!r} ({why})", key=key)


def _resolve(raw, lines):
    values = dict(raw)
    _require(values, "task", "what to compute", lines)
    _require(values, "kind", "rotor model", lines)
    task = values["task"]
    kind = values["kind"]
    _require(values, "k_kick", "kick strength K/hbar", lines)
    if kind in ("standard", "generic"):
        _require(values, "tau_free", f"{kind} rotor", lines)
    if kind == "linear":
        _require(values, "phi_free", "linear rotor", lines)
    if kind == "generic" and not (values.get("kick_cos") or values.get("kick_sin")):
        raise ConfigError("generic rotor needs kick_cos and/or kick_sin coefficients", key="kick_cos")
    if task == "oracle-check" and kind != "linear":
        raise ConfigError("oracle-check runs on the linear rotor (kind = linear)",
                          key="kind", line=lines.get("kind"))
    if task == "localization" and kind == "linear":
        raise ConfigError("localization needs a standard or generic rotor", key="kind", line=lines.get("kind"))
    for key in REQUIRED_BY_TASK.get(task, ()):
        _require(values, key, f"task {task}", lines)

    for key, val in DEFAULTS.items():
        if key in _SECTION_OF:
            values.setdefault(key, val)
    if task == "oracle-check":
        values.setdefault("delta_k", DEFAULTS["delta_k_oracle"])
    values.setdefault("j_max", J_MAX_DEFAULT.get(task, 50))
    if values["j_max"] < 0:
        raise ConfigError("j_max must be non-negative", key="j_max", line=lines.get("j_max"))
    if "cutoff" not in values:
        values["cutoff"] = _default_cutoff(values)
    if values["cutoff"] < 0 or values["hbar_eff"] <= 0:
        raise ConfigError("cutoff must be >= 0 and hbar_eff > 0", key="cutoff")
    if task in ("wigner", "oracle-check"):
        values.setdefault("n_theta", 2 * (2 * values["cutoff"] + 1) + 2)
    if abs(values["initial_n"]) > values["cutoff"]:
        raise ConfigError(f"initial_n {values['initial_n']} outside cutoff {values['cutoff']}",
                          key="initial_n", line=lines.get("initial_n"))
    return values


def _default_cutoff(values):
    from .floquet import bessel_band_margin
    from .hilbert import default_cutoff

    k = values.get("k_kick", 0.0)
    if values["kind"] == "linear":
        s = abs(math.sin(values["phi_free"] / 2.0))
        k_eff = k / s if s > 1e-12 else k * values.get("j_max", 50)
        return default_cutoff(k_eff) + 2 * bessel_band_margin(k_eff)
    if values["kind"] == "generic":
        k *= sum(abs(c) for c in values.get("kick_cos", []) + values.get("kick_sin", []))
    if values["task"] == "localization":
        # room for the localised tail to stay below the edge tolerance
        return max(512, default_cutoff(k) + int(20 * k * k))
    return default_cutoff(k)
