"""Benchmark figure computations with embedded parameter sets.

Each entry reproduces one published-style benchmark curve at desk scale
and returns plain column data; the CLI writes it as CSV and renders a
matching plot.  Parameters are quoted as frequency/2pi in kHz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from . import dynamics, gatecheck, spectral, sta
from .core import from_khz, to_khz
from .dynamics import RampSchedule
from .hamiltonian import fourier_state
from .tuner import TuneTarget, tune


@dataclass
class FigureResult:
    figure_id: str
    columns: Dict[str, np.ndarray]
    header: list
    plot: dict = field(default_factory=dict)


def _schedule_echo(s: RampSchedule):
    parts = [f"variant={s.variant}", f"j0_khz={to_khz(s.j0):g}"]
    if s.omega1:
        parts.append(f"omega1_khz={to_khz(s.omega1):g}")
    if s.v0:
        parts.append(f"v0_khz={to_khz(s.v0):g}")
    if s.delta1 or s.delta2:
        parts.append(f"delta1_khz={to_khz(s.delta1):g}")
        parts.append(f"delta2_khz={to_khz(s.delta2):g}")
    if s.variant == "exp_detuning":
        parts.append(f"gamma_per_ms={s.gamma:g}")
    else:
        parts.append(f"ramp_khz={to_khz(s.ramp):g}")
    parts.append(f"phi_over_pi={s.phi / np.pi:g}")
    parts.append(f"t_max_ms={s.t_max:.6g}")
    return " ".join(parts)


def _branch_columns(schedule, points=241):
    times = np.linspace(0.0, schedule.t_max, points)
    path = spectral.track(schedule, times)
    columns = {"t_ms": times}
    for b, label in enumerate(path.labels):
        columns[f"{label}_khz"] = to_khz(path.values[:, b])
    return columns


def figure_1a():
    schedule = RampSchedule.case1(from_khz(2.1), from_khz(120.0), from_khz(30.0),
                                  from_khz(0.25), np.pi / 8)
    columns = _branch_columns(schedule)
    return FigureResult(
        "1a", columns,
        ["branch frequencies of the detuning-ramped circulant schedule",
         _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "frequency/2pi (kHz)"},
    )


def figure_1b():
    schedule = RampSchedule.case2(from_khz(2.1), from_khz(100.0), from_khz(120.0),
                                  from_khz(30.0), from_khz(0.25), np.pi / 4)
    columns = _branch_columns(schedule)
    return FigureResult(
        "1b", columns,
        ["branch frequencies with the additional spin-1 drive",
         _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "frequency/2pi (kHz)"},
    )


def _population_columns(schedule, initial, points, tolerance):
    times = np.linspace(0.0, schedule.t_max, points)
    result = dynamics.propagate(schedule, sample_times=times, tolerance=tolerance)
    states = np.einsum("tij,j->ti", result.sample_propagators, initial)
    columns = {"t_ms": result.sample_times}
    for j, label in enumerate(("dndn", "dnup", "updn", "upup")):
        columns[f"pop_{label}"] = np.abs(states[:, j]) ** 2
    columns["pop_psi3"] = np.abs(states @ np.conj(fourier_state(3))) ** 2
    return columns


def figure_2a(tolerance=1e-8):
    schedule = RampSchedule.case2(from_khz(2.0), from_khz(50.0), from_khz(30.0),
                                  from_khz(10.0), from_khz(0.2), np.pi / 4)
    initial = np.array([1, 0, 0, 0], dtype=complex)
    columns = _population_columns(schedule, initial, 401, tolerance)
    return FigureResult(
        "2a", columns,
        ["spin populations, initial state dndn", _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "population"},
    )


def figure_2b(tolerance=1e-8):
    schedule = RampSchedule.rabi_controlled(from_khz(2.0), from_khz(3.8),
                                            from_khz(30.0), from_khz(0.6), np.pi / 4)
    initial = dynamics.rotating_basis_state(-1, -1, schedule.phi)
    columns = _population_columns(schedule, initial, 401, tolerance)
    return FigureResult(
        "2b", columns,
        ["spin populations, initial rotating state -1,-2", _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "population"},
    )


def figure_3(tolerance=1e-8):
    schedule = RampSchedule.case2(from_khz(2.0), from_khz(50.0), from_khz(30.0),
                                  from_khz(10.0), from_khz(0.2), np.pi / 4)
    alpha2, _ = dynamics.adiabatic_phases(schedule)
    initial = np.exp(-1j * alpha2) * np.array([1, 0, 0, 0], dtype=complex)
    times = np.linspace(0.0, schedule.t_max, 401)
    result = dynamics.propagate(schedule, sample_times=times, tolerance=tolerance)
    states = np.einsum("tij,j->ti", result.sample_propagators, initial)
    columns = {"t_ms": result.sample_times}
    for j, label in enumerate(("dndn", "dnup", "updn", "upup")):
        columns[f"arg_{label}"] = np.angle(states[:, j])
    return FigureResult(
        "3", columns,
        ["amplitude arguments, initial state exp(-i alpha2) dndn",
         f"alpha2_rad={alpha2:.9g}", _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "arg C (rad)"},
    )


def figure_4a(tolerance=1e-8):
    schedule = RampSchedule.case2(from_khz(2.0), from_khz(40.0), from_khz(59.96),
                                  from_khz(27.76), from_khz(0.18), np.pi / 4)
    times = np.linspace(0.0, schedule.t_max, 301)
    result = dynamics.propagate(schedule, sample_times=times, tolerance=tolerance)
    target = gatecheck.target_gate()
    infidelity = np.array([
        1.0 - gatecheck.gate_fidelity(u, target, unitarity_tol=1e-6)
        for u in result.sample_propagators
    ])
    columns = {"t_ms": result.sample_times, "infidelity": infidelity}
    return FigureResult(
        "4a", columns,
        ["gate infidelity versus time at phase-quantizing detunings",
         _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "1 - F", "logy": True},
    )


def figure_4b(tolerance=1e-8):
    schedule = RampSchedule.rabi_controlled(from_khz(2.0), from_khz(2.02),
                                            from_khz(146.3), from_khz(0.55), np.pi / 4)
    times = np.linspace(0.0, schedule.t_max, 301)
    result = dynamics.propagate(schedule, sample_times=times, tolerance=tolerance)
    start = sta.h3_eigenbasis(*_h3_args(schedule, 0.0))
    columns = {"t_ms": result.sample_times}
    for label in sta.STA_LABELS:
        fidelities = np.empty(len(result.sample_times))
        for idx, (t, u) in enumerate(zip(result.sample_times, result.sample_propagators)):
            basis = sta.h3_eigenbasis(*_h3_args(schedule, t))
            fidelities[idx] = np.abs(
                np.vdot(basis.vectors[label], u @ start.vectors[label])) ** 2
        columns[f"fid_{label}"] = fidelities
    return FigureResult(
        "4b", columns,
        ["eigenstate-following fidelity for the drive-controlled transition",
         _schedule_echo(schedule)],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "|<n(t)|U|n(0)>|^2"},
    )


def _h3_args(schedule, t):
    j, o1, o2, _, _ = dynamics.scalar_coefficients(schedule, t)
    return j, o1, o2, schedule.phi


def _entangled_infidelity(schedule, tolerance):
    alpha, beta = gatecheck.entangled_phases(schedule)
    return 1.0 - gatecheck.entangled_fidelity(schedule, alpha, beta, tolerance=tolerance)


def figure_5a(tolerance=1e-8):
    ramps_khz = np.array([0.2, 0.3, 0.4, 0.6, 0.8, 1.2, 1.6])
    j0_values_khz = (2.0, 1.8, 1.5)
    rows_j0, rows_ramp, rows_tmax, rows_infid = [], [], [], []
    for j0_khz in j0_values_khz:
        for ramp_khz in ramps_khz:
            schedule = RampSchedule.rabi_controlled(
                from_khz(j0_khz), from_khz(2.0), from_khz(30.0),
                from_khz(ramp_khz), np.pi / 4)
            rows_j0.append(j0_khz)
            rows_ramp.append(ramp_khz)
            rows_tmax.append(schedule.t_max)
            rows_infid.append(_entangled_infidelity(schedule, tolerance))
    columns = {"j0_khz": np.array(rows_j0), "ramp_khz": np.array(rows_ramp),
               "t_max_ms": np.array(rows_tmax), "infidelity": np.array(rows_infid)}
    return FigureResult(
        "5a", columns,
        ["entangled-state infidelity versus ramp rate",
         "omega1_khz=30 v0_khz=2 phi_over_pi=0.25"],
        {"x": "ramp_khz", "xlabel": "ramp/2pi (kHz)", "ylabel": "1 - F",
         "y": ["infidelity"], "logy": True, "group": "j0_khz"},
    )


def figure_5b(tolerance=1e-8):
    j0_values_khz = np.linspace(1.0, 3.0, 9)
    infidelity = []
    for j0_khz in j0_values_khz:
        schedule = RampSchedule.rabi_controlled(
            from_khz(j0_khz), from_khz(2.0), from_khz(30.0),
            from_khz(0.8), np.pi / 4)
        infidelity.append(_entangled_infidelity(schedule, tolerance))
    columns = {"j0_khz": j0_values_khz, "infidelity": np.array(infidelity)}
    return FigureResult(
        "5b", columns,
        ["entangled-state infidelity versus coupling strength",
         "omega1_khz=30 v0_khz=2 ramp_khz=0.8 phi_over_pi=0.25"],
        {"x": "j0_khz", "xlabel": "J0/2pi (kHz)", "ylabel": "1 - F", "logy": True},
    )


def figure_6():
    parameter_sets = ((2.5, 2.0), (1.8, 1.5), (1.2, 1.0))
    v0 = from_khz(0.5)
    rows = {"set_index": [], "ramp_khz": [], "j0_khz": [], "t_ms": [], "cd_rate_khz": []}
    for index, (ramp_khz, j0_khz) in enumerate(parameter_sets):
        ramp = from_khz(ramp_khz)
        j0 = from_khz(j0_khz)
        t_max = np.pi / (2.0 * ramp)
        times = np.linspace(0.0, t_max, 101)
        rates = sta.cd_rate(times, j0, v0, ramp)
        rows["set_index"].extend([index] * len(times))
        rows["ramp_khz"].extend([ramp_khz] * len(times))
        rows["j0_khz"].extend([j0_khz] * len(times))
        rows["t_ms"].extend(times)
        rows["cd_rate_khz"].extend(to_khz(rates))
    columns = {name: np.array(values) for name, values in rows.items()}
    return FigureResult(
        "6", columns,
        ["counterdiabatic drive amplitude for three ramp settings",
         "v0_khz=0.5 phi_over_pi=0.25"],
        {"x": "t_ms", "xlabel": "t (ms)", "ylabel": "rate/2pi (kHz)",
         "y": ["cd_rate_khz"], "group": "set_index"},
    )


FIGURES: Dict[str, Callable[[], FigureResult]] = {
    "1a": figure_1a,
    "1b": figure_1b,
    "2a": figure_2a,
    "2b": figure_2b,
    "3": figure_3,
    "4a": figure_4a,
    "4b": figure_4b,
    "5a": figure_5a,
    "5b": figure_5b,
    "6": figure_6,
}
