"""Scenario, sweep, and ion-chain configuration files.

The format is INI-style key/value text with one section per concern.  All
frequencies are entered as frequency/2pi in kHz, exactly as experimental
parameters are usually quoted, and converted to angular rad/ms on load;
phases are entered in units of pi.

Example scenario::

    [schedule]
    variant = case2
    j0_khz = 2.0
    omega1_khz = 50.0
    delta1_khz = 30.0
    delta2_khz = 10.0
    ramp_khz = 0.2
    phi_over_pi = 0.25

    [initial]
    kind = computational
    state = dndn

    [integrator]
    tolerance = 1e-8
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import from_khz, normalize, to_khz
from .dynamics import RampSchedule
from .errors import ConfigError

_COMPUTATIONAL = ("dndn", "dnup", "updn", "upup")


def _parser():
    return configparser.ConfigParser(inline_comment_prefixes=("#", ";"))


def _get(section, key, caster, default=None, required=False):
    name = f"{section.name}.{key}"
    if key not in section:
        if required:
            raise ConfigError(f"{name}: missing required key")
        return default
    raw = section[key].strip()
    try:
        return caster(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} ({exc})") from exc


@dataclass
class InitialState:
    kind: str                    # computational | rotating | custom
    label: str = ""
    amplitudes: Optional[np.ndarray] = None

    def vector(self, phi):
        from .dynamics import rotating_basis_state

        if self.kind == "computational":
            vec = np.zeros(4, dtype=complex)
            vec[_COMPUTATIONAL.index(self.label)] = 1.0
            return vec
        if self.kind == "rotating":
            signs = {"+": +1, "-": -1}
            return rotating_basis_state(signs[self.label[0]], signs[self.label[1]], phi)
        return normalize(self.amplitudes)


@dataclass
class ScenarioConfig:
    schedule: RampSchedule
    initial: InitialState
    tolerance: float = 1e-8
    dt_initial: Optional[float] = None
    step_ceiling: int = 2**22
    output_dir: str = "out"
    samples: int = 401
    echo: dict = field(default_factory=dict)


def _schedule_from_section(section):
    variant = _get(section, "variant", str, required=True)
    if variant not in ("case1", "case2", "rabi_controlled", "exp_detuning"):
        raise ConfigError(f"schedule.variant: unknown variant {variant!r}")
    j0 = from_khz(_get(section, "j0_khz", float, required=True))
    phi = math.pi * _get(section, "phi_over_pi", float, default=0.25)
    omega1 = from_khz(_get(section, "omega1_khz", float, default=0.0))
    v0 = from_khz(_get(section, "v0_khz", float, default=0.0))
    delta1 = from_khz(_get(section, "delta1_khz", float, default=0.0))
    delta2 = from_khz(_get(section, "delta2_khz", float, default=0.0))
    try:
        if variant == "exp_detuning":
            gamma = _get(section, "gamma_per_ms", float, required=True)
            return RampSchedule.exp_detuning(j0, omega1, delta1, delta2, gamma, phi)
        ramp = from_khz(_get(section, "ramp_khz", float, required=True))
        if variant == "case1":
            return RampSchedule.case1(j0, delta1, delta2, ramp, phi)
        if variant == "case2":
            return RampSchedule.case2(j0, omega1, delta1, delta2, ramp, phi)
        return RampSchedule.rabi_controlled(j0, v0, omega1, ramp, phi)
    except ValueError as exc:
        raise ConfigError(f"schedule: {exc}") from exc


def _initial_from_section(section):
    if section is None:
        return InitialState("computational", "dndn")
    kind = _get(section, "kind", str, default="computational")
    if kind == "computational":
        label = _get(section, "state", str, default="dndn")
        if label not in _COMPUTATIONAL:
            raise ConfigError(f"initial.state: expected one of {_COMPUTATIONAL}, got {label!r}")
        return InitialState(kind, label)
    if kind == "rotating":
        label = _get(section, "state", str, required=True)
        if len(label) != 2 or any(ch not in "+-" for ch in label):
            raise ConfigError(f"initial.state: rotating labels look like '+-', got {label!r}")
        return InitialState(kind, label)
    if kind == "custom":
        raw = _get(section, "amplitudes", str, required=True)
        parts = raw.split()
        if len(parts) != 4:
            raise ConfigError("initial.amplitudes: need four complex entries 're,im'")
        try:
            amps = np.array([complex(float(p.split(",")[0]), float(p.split(",")[1]))
                             for p in parts])
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"initial.amplitudes: cannot parse ({exc})") from exc
        if np.linalg.norm(amps) == 0:
            raise ConfigError("initial.amplitudes: zero vector")
        return InitialState(kind, "", amps)
    raise ConfigError(f"initial.kind: unknown kind {kind!r}")


def load_scenario(path_or_text, from_text=False):
    parser = _parser()
    if from_text:
        parser.read_string(path_or_text)
    else:
        if not parser.read(path_or_text):
            raise ConfigError(f"cannot read config file {path_or_text!r}")
    if "schedule" not in parser:
        raise ConfigError("schedule: missing section")
    schedule = _schedule_from_section(parser["schedule"])
    initial = _initial_from_section(parser["initial"] if "initial" in parser else None)

    tolerance, dt_initial, ceiling = 1e-8, None, 2**22
    if "integrator" in parser:
        section = parser["integrator"]
        tolerance = _get(section, "tolerance", float, default=1e-8)
        dt_initial = _get(section, "dt_initial_ms", float, default=None)
        ceiling = _get(section, "step_ceiling", int, default=2**22)
        if tolerance <= 0:
            raise ConfigError("integrator.tolerance: must be positive")

    output_dir, samples = "out", 401
    if "output" in parser:
        output_dir = _get(parser["output"], "directory", str, default="out")
        samples = _get(parser["output"], "samples", int, default=401)
        if samples < 2:
            raise ConfigError("output.samples: need at least 2")

    echo = {s: dict(parser[s]) for s in parser.sections()}
    return ScenarioConfig(schedule, initial, tolerance, dt_initial, ceiling,
                          output_dir, samples, echo)


def dump_scenario(config: ScenarioConfig):
    """Serialize a loaded scenario back to config text (round-trippable)."""
    parser = _parser()
    s = config.schedule
    parser["schedule"] = {"variant": s.variant,
                          "j0_khz": repr(to_khz(s.j0)),
                          "phi_over_pi": repr(s.phi / math.pi)}
    if s.variant == "exp_detuning":
        parser["schedule"]["gamma_per_ms"] = repr(s.gamma)
    else:
        parser["schedule"]["ramp_khz"] = repr(to_khz(s.ramp))
    if s.omega1:
        parser["schedule"]["omega1_khz"] = repr(to_khz(s.omega1))
    if s.v0:
        parser["schedule"]["v0_khz"] = repr(to_khz(s.v0))
    if s.delta1 or s.delta2:
        parser["schedule"]["delta1_khz"] = repr(to_khz(s.delta1))
        parser["schedule"]["delta2_khz"] = repr(to_khz(s.delta2))
    init = {"kind": config.initial.kind}
    if config.initial.kind == "custom":
        init["amplitudes"] = " ".join(
            f"{a.real!r},{a.imag!r}" for a in config.initial.amplitudes)
    else:
        init["state"] = config.initial.label
    parser["initial"] = init
    parser["integrator"] = {"tolerance": repr(config.tolerance),
                            "step_ceiling": str(config.step_ceiling)}
    if config.dt_initial is not None:
        parser["integrator"]["dt_initial_ms"] = repr(config.dt_initial)
    parser["output"] = {"directory": config.output_dir, "samples": str(config.samples)}
    buffer = io.StringIO()
    parser.write(buffer)
    return buffer.getvalue()


@dataclass
class SweepSpec:
    parameter: str
    values: np.ndarray
    observable: str
    scenario: ScenarioConfig


_SWEEPABLE = ("j0_khz", "omega1_khz", "v0_khz", "delta1_khz", "delta2_khz", "ramp_khz")
_OBSERVABLES = ("gate_fidelity", "state_fidelity", "phases", "spectrum")


def load_sweep(path_or_text, from_text=False):
    parser = _parser()
    if from_text:
        parser.read_string(path_or_text)
    else:
        if not parser.read(path_or_text):
            raise ConfigError(f"cannot read config file {path_or_text!r}")
    if "sweep" not in parser:
        raise ConfigError("sweep: missing section")
    section = parser["sweep"]
    parameter = _get(section, "parameter", str, required=True)
    if parameter not in _SWEEPABLE:
        raise ConfigError(f"sweep.parameter: expected one of {_SWEEPABLE}, got {parameter!r}")
    observable = _get(section, "observable", str, required=True)
    if observable not in _OBSERVABLES:
        raise ConfigError(f"sweep.observable: expected one of {_OBSERVABLES}, got {observable!r}")
    raw = _get(section, "values", str, required=True)
    try:
        values = np.array([float(tok) for tok in raw.split()])
    except ValueError as exc:
        raise ConfigError(f"sweep.values: cannot parse ({exc})") from exc
    if values.size < 1:
        raise ConfigError("sweep.values: need at least one value")
    diffs = np.diff(values)
    if values.size > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("sweep.values: grid must be strictly monotone")

    remainder = "\n".join(
        f"[{name}]\n" + "\n".join(f"{k} = {v}" for k, v in parser[name].items())
        for name in parser.sections() if name != "sweep"
    )
    scenario = load_scenario(remainder, from_text=True)
    return SweepSpec(parameter, values, observable, scenario)


@dataclass
class ChainConfig:
    n: int
    omega_x: float
    omega_z: float
    mass_kg: float
    k_laser: float
    rabi_x: float
    beatnote: float
    ion_k: int
    ion_m: int
    output_dir: str
    echo: dict


def load_chain(path_or_text, from_text=False):
    from .iontrap import ATOMIC_MASS_KG

    parser = _parser()
    if from_text:
        parser.read_string(path_or_text)
    else:
        if not parser.read(path_or_text):
            raise ConfigError(f"cannot read config file {path_or_text!r}")
    if "chain" not in parser:
        raise ConfigError("chain: missing section")
    section = parser["chain"]
    n = _get(section, "n", int, required=True)
    omega_x = from_khz(_get(section, "omega_x_khz", float, required=True))
    omega_z = from_khz(_get(section, "omega_z_khz", float, required=True))
    mass_amu = _get(section, "mass_amu", float, required=True)
    if mass_amu <= 0:
        raise ConfigError("chain.mass_amu: must be positive")
    if "k_laser_per_m" in section:
        k_laser = _get(section, "k_laser_per_m", float)
    else:
        wavelength_nm = _get(section, "wavelength_nm", float, required=True)
        k_scale = _get(section, "k_scale", float, default=1.0)
        if wavelength_nm <= 0:
            raise ConfigError("chain.wavelength_nm: must be positive")
        k_laser = k_scale * 2.0 * math.pi / (wavelength_nm * 1e-9)

    rabi_x = beatnote = 0.0
    ion_k, ion_m = 0, 1
    if "drive" in parser:
        drive = parser["drive"]
        rabi_x = from_khz(_get(drive, "rabi_x_khz", float, default=0.0))
        beatnote = from_khz(_get(drive, "beatnote_khz", float, required=True))
        ion_k = _get(drive, "ion_k", int, default=0)
        ion_m = _get(drive, "ion_m", int, default=1)
        if ion_k == ion_m:
            raise ConfigError("drive.ion_k/ion_m: target ions must differ")

    output_dir = "out"
    if "output" in parser:
        output_dir = _get(parser["output"], "directory", str, default="out")

    echo = {s: dict(parser[s]) for s in parser.sections()}
    return ChainConfig(n, omega_x, omega_z, mass_amu * ATOMIC_MASS_KG, k_laser,
                       rabi_x, beatnote, ion_k, ion_m, output_dir, echo)
