"""Experiment configuration: strict TOML parsing and unit normalization.

All power-like quantities are normalized to milliwatts internally (only
ratios enter the success probabilities).  The noise spectral density carries
its own unit field because published parameter sets are ambiguous about it:
a strict W/Hz reading of the reference setup yields near-zero per-bit SNR and
an empty stable region, while the mW/Hz reading reproduces the reported
critical splitting ratios.  The convention is therefore explicit, never
guessed.

Parsing is strict: unknown keys are rejected and all validation errors are
reported at once.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channels import BpskParams, SwiptLink, db_to_linear
from .model import PlantModel, validate_plant

MODES = ("critical", "sweep", "montecarlo", "optimize")
GAIN_UNITS = ("dB", "linear")
POWER_UNITS = ("mW", "W")
N0_UNITS = ("mW_per_Hz", "W_per_Hz")
GAIN_MODES = ("stationary", "schedule")
FORMATS = ("csv",)


class ConfigError(ValueError):
    """Carries the full list of validation problems."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    alpha_min: float
    alpha_max: float
    alpha_step: float | None
    alpha_points: int | None
    delta: float
    horizon: int
    runs: int
    seed: int
    tol: float
    n_jobs: int
    gain_mode: str

    def alpha_grid(self) -> list[float]:
        if self.alpha_points is not None:
            if self.alpha_points == 1:
                return [self.alpha_min]
            span = self.alpha_max - self.alpha_min
            return [
                self.alpha_min + span * i / (self.alpha_points - 1)
                for i in range(self.alpha_points)
            ]
        grid = []
        k = 0
        while True:
            a = self.alpha_min + k * self.alpha_step
            if a > self.alpha_max + 1e-12:
                break
            grid.append(min(a, self.alpha_max))
            k += 1
        return grid


@dataclass(frozen=True)
class OutputConfig:
    dir: str
    format: str


@dataclass(frozen=True)
class ExperimentConfig:
    plant: PlantModel
    link: SwiptLink
    bpsk: BpskParams
    run: RunConfig
    output: OutputConfig
    effective: dict  # fully-resolved values, used for the config hash

    def sha256(self) -> str:
        blob = json.dumps(self.effective, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_SECTION_KEYS = {
    "plant": {"A", "B", "C", "Q", "R", "W", "U", "x0_mean", "P0"},
    "channel": {"h_a", "h_s", "h_e", "gain_unit", "p_tx", "p_tx_unit", "xi", "sigma_e2"},
    "bpsk": {"bits_per_packet", "T_s", "N_0", "n0_unit"},
    "run": {
        "mode", "alpha_min", "alpha_max", "alpha_step", "alpha_points",
        "delta", "horizon", "runs", "seed", "tol", "n_jobs", "gain_mode",
    },
    "output": {"dir", "format"},
}


def _matrix(raw, name, errors):
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return [[float(raw)]]
    if isinstance(raw, list) and raw and all(isinstance(r, list) for r in raw):
        try:
            return [[float(x) for x in row] for row in raw]
        except (TypeError, ValueError):
            errors.append(f"plant.{name}: entries must be numbers")
            return None
    errors.append(f"plant.{name}: expected a number or a list of rows")
    return None


def _vector(raw, name, errors):
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return [float(raw)]
    if isinstance(raw, list):
        try:
            return [float(x) for x in raw]
        except (TypeError, ValueError):
            errors.append(f"plant.{name}: entries must be numbers")
            return None
    errors.append(f"plant.{name}: expected a number or a list")
    return None


def _number(section, raw, name, errors, require=None):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        errors.append(f"{section}.{name}: expected a number")
        return None
    val = float(raw)
    if not math.isfinite(val):
        errors.append(f"{section}.{name}: must be finite")
        return None
    if require == "positive" and not val > 0:
        errors.append(f"{section}.{name}: must be > 0")
        return None
    if require == "nonnegative" and val < 0:
        errors.append(f"{section}.{name}: must be >= 0")
        return None
    return val


def _integer(section, raw, name, errors, minimum=None):
    if isinstance(raw, bool) or not isinstance(raw, int):
        errors.append(f"{section}.{name}: expected an integer")
        return None
    if minimum is not None and raw < minimum:
        errors.append(f"{section}.{name}: must be >= {minimum}")
        return None
    return raw


def _choice(section, raw, name, allowed, errors):
    if raw not in allowed:
        errors.append(f"{section}.{name}: must be one of {allowed}, got {raw!r}")
        return None
    return raw


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a TOML experiment config.

    ``overrides`` (flat ``{"run.seed": 7, ...}`` style) take precedence over
    file values; the effective, fully-resolved config is kept for hashing.
    Raises ConfigError listing every problem found, not just the first.
    """
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError([f"TOML parse error: {exc}"]) from exc

    errors: list[str] = []
    for section in raw:
        if section not in _SECTION_KEYS:
            errors.append(f"unknown section [{section}]")
    for section, allowed in _SECTION_KEYS.items():
        body = raw.get(section, {})
        if not isinstance(body, dict):
            errors.append(f"[{section}] must be a table")
            continue
        for key in body:
            if key not in allowed:
                errors.append(f"unknown key {section}.{key}")
    for section in ("plant", "channel", "bpsk"):
        if section not in raw:
            errors.append(f"missing section [{section}]")
    if errors:
        raise ConfigError(errors)

    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".", 1)
        if section not in _SECTION_KEYS or key not in _SECTION_KEYS[section]:
            raise ConfigError([f"unknown override {dotted}"])
        if value is None:   # a None override clears the file-level value
            raw.get(section, {}).pop(key, None)
        else:
            raw.setdefault(section, {})[key] = value

    plant_raw = raw["plant"]
    chan = raw["channel"]
    bpsk_raw = raw["bpsk"]
    run_raw = raw.get("run", {})
    out_raw = raw.get("output", {})

    matrices = {}
    for name in ("A", "B", "C", "Q", "R", "W", "U"):
        if name not in plant_raw:
            errors.append(f"plant.{name}: missing")
        else:
            matrices[name] = _matrix(plant_raw[name], name, errors)
    x0_mean = _vector(plant_raw["x0_mean"], "x0_mean", errors) if "x0_mean" in plant_raw else None
    P0 = _matrix(plant_raw["P0"], "P0", errors) if "P0" in plant_raw else None

    gain_unit = _choice("channel", chan.get("gain_unit", "dB"), "gain_unit", GAIN_UNITS, errors)
    p_tx_unit = _choice("channel", chan.get("p_tx_unit", "mW"), "p_tx_unit", POWER_UNITS, errors)
    gains = {}
    for name in ("h_a", "h_s", "h_e"):
        if name not in chan:
            errors.append(f"channel.{name}: missing")
        else:
            gains[name] = _number("channel", chan[name], name, errors)
    p_tx = _number("channel", chan.get("p_tx"), "p_tx", errors, require="positive") \
        if "p_tx" in chan else errors.append("channel.p_tx: missing")
    xi = _number("channel", chan.get("xi", 1.0), "xi", errors, require="nonnegative")
    sigma_e2 = _number("channel", chan.get("sigma_e2", 0.0), "sigma_e2", errors, require="nonnegative")

    bits = _integer("bpsk", bpsk_raw.get("bits_per_packet"), "bits_per_packet", errors, minimum=1) \
        if "bits_per_packet" in bpsk_raw else errors.append("bpsk.bits_per_packet: missing")
    T_s = _number("bpsk", bpsk_raw.get("T_s"), "T_s", errors, require="positive") \
        if "T_s" in bpsk_raw else errors.append("bpsk.T_s: missing")
    N_0 = _number("bpsk", bpsk_raw.get("N_0"), "N_0", errors, require="positive") \
        if "N_0" in bpsk_raw else errors.append("bpsk.N_0: missing")
    n0_unit = _choice("bpsk", bpsk_raw.get("n0_unit", "mW_per_Hz"), "n0_unit", N0_UNITS, errors)

    mode = _choice("run", run_raw.get("mode", "critical"), "mode", MODES, errors)
    alpha_min = _number("run", run_raw.get("alpha_min", 0.0), "alpha_min", errors)
    alpha_max = _number("run", run_raw.get("alpha_max", 1.0), "alpha_max", errors)
    alpha_step = (
        _number("run", run_raw["alpha_step"], "alpha_step", errors, require="positive")
        if "alpha_step" in run_raw else None
    )
    alpha_points = (
        _integer("run", run_raw["alpha_points"], "alpha_points", errors, minimum=1)
        if "alpha_points" in run_raw else None
    )
    if alpha_step is not None and alpha_points is not None:
        errors.append("run: give either alpha_step or alpha_points, not both")
    if alpha_step is None and alpha_points is None:
        alpha_points = 50
    delta = _number("run", run_raw.get("delta", 0.02), "delta", errors, require="positive")
    horizon = _integer("run", run_raw.get("horizon", 500), "horizon", errors, minimum=1)
    runs = _integer("run", run_raw.get("runs", 1000), "runs", errors, minimum=1)
    seed = _integer("run", run_raw.get("seed", 0), "seed", errors, minimum=0)
    tol = _number("run", run_raw.get("tol", 1e-6), "tol", errors, require="positive")
    n_jobs = _integer("run", run_raw.get("n_jobs", 1), "n_jobs", errors, minimum=1)
    gain_mode = _choice("run", run_raw.get("gain_mode", "stationary"), "gain_mode", GAIN_MODES, errors)

    out_dir = out_raw.get("dir", "out")
    if not isinstance(out_dir, str):
        errors.append("output.dir: expected a string")
    out_format = _choice("output", out_raw.get("format", "csv"), "format", FORMATS, errors)

    if alpha_min is not None and alpha_max is not None and not (
        0.0 <= alpha_min <= alpha_max <= 1.0
    ):
        errors.append(f"run: need 0 <= alpha_min <= alpha_max <= 1, got [{alpha_min}, {alpha_max}]")

    if errors:
        raise ConfigError(errors)

    # normalize to a consistent power unit (mW)
    power_scale = 1.0 if p_tx_unit == "mW" else 1e3
    n0_scale = 1.0 if n0_unit == "mW_per_Hz" else 1e3
    to_linear = db_to_linear if gain_unit == "dB" else float
    try:
        plant = validate_plant(
            matrices["A"], matrices["B"], matrices["C"], matrices["Q"],
            matrices["R"], matrices["W"], matrices["U"], x0_mean, P0,
        )
        link = SwiptLink(
            h_a=to_linear(gains["h_a"]),
            h_s=to_linear(gains["h_s"]),
            h_e=to_linear(gains["h_e"]),
            p_tx=p_tx * power_scale,
            xi=xi,
            sigma_e2=sigma_e2 * power_scale,
        )
        bpsk = BpskParams(bits_per_packet=bits, T_s=T_s, N_0=N_0 * n0_scale)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc

    run = RunConfig(
        mode=mode, alpha_min=alpha_min, alpha_max=alpha_max,
        alpha_step=alpha_step, alpha_points=alpha_points, delta=delta,
        horizon=horizon, runs=runs, seed=seed, tol=tol, n_jobs=n_jobs,
        gain_mode=gain_mode,
    )
    output = OutputConfig(dir=out_dir, format=out_format)
    effective = {
        "plant": {
            "A": matrices["A"], "B": matrices["B"], "C": matrices["C"],
            "Q": matrices["Q"], "R": matrices["R"], "W": matrices["W"],
            "U": matrices["U"],
            "x0_mean": plant.x0_mean.tolist(), "P0": plant.P0.tolist(),
        },
        "channel": {
            "h_a": link.h_a, "h_s": link.h_s, "h_e": link.h_e,
            "p_tx_mw": link.p_tx, "xi": link.xi, "sigma_e2_mw": link.sigma_e2,
        },
        "bpsk": {
            "bits_per_packet": bpsk.bits_per_packet, "T_s": bpsk.T_s,
            "N_0_mw_per_hz": bpsk.N_0,
        },
        "run": {
            "mode": run.mode, "alpha_min": run.alpha_min, "alpha_max": run.alpha_max,
            "alpha_step": run.alpha_step, "alpha_points": run.alpha_points,
            # n_jobs is deliberately excluded: parallelism never changes
            # results, so it must not perturb the config hash either
            "delta": run.delta, "horizon": run.horizon, "runs": run.runs,
            "seed": run.seed, "tol": run.tol,
            "gain_mode": run.gain_mode,
        },
        "output": {"dir": output.dir, "format": output.format},
    }
    return ExperimentConfig(
        plant=plant, link=link, bpsk=bpsk, run=run, output=output, effective=effective
    )
