"""Command-line front end.

Subcommands
-----------
figure <id>|all     reproduce a benchmark figure (CSV + PNG)
scenario <path>     propagate a configured schedule and report the outcome
tune <k> <p> <path> solve for phase-quantizing detunings, then verify
sweep <path>        scan one parameter and record an observable
ion-chain <path>    chain statics, modes, Lamb-Dicke factors, effective J

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 degeneracy/instability/resonance detected.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as config_mod
from . import dynamics, figures, gatecheck, iontrap, plotting, report, spectral, tuner
from .core import BASIS_LABELS, from_khz, to_khz
from .errors import (
    ChainInstabilityError,
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    ResonanceError,
)
from .hamiltonian import DetuningPair, fourier_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_DEGENERATE = 4


def _out_path(directory, name):
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def _cmd_figure(args):
    ids = list(figures.FIGURES) if args.id == "all" else [args.id]
    for figure_id in ids:
        builder = figures.FIGURES[figure_id]
        if args.tolerance is not None and _accepts_tolerance(builder):
            result = builder(tolerance=args.tolerance)
        else:
            result = builder()
        csv_path = _out_path(args.out, f"figure_{figure_id}.csv")
        report.write_csv(csv_path, result.columns,
                         [f"figure {figure_id}"] + result.header)
        png_path = _out_path(args.out, f"figure_{figure_id}.png")
        plotting.render(result.columns, result.plot, png_path, title=f"figure {figure_id}")
        print(f"figure {figure_id}: wrote {csv_path} and {png_path}")
    return EXIT_OK


def _accepts_tolerance(builder):
    import inspect

    return "tolerance" in inspect.signature(builder).parameters


def _cmd_scenario(args):
    scenario = config_mod.load_scenario(args.path)
    out_dir = args.out or scenario.output_dir
    tolerance = args.tolerance or scenario.tolerance
    schedule = scenario.schedule
    initial = scenario.initial.vector(schedule.phi)
    times = np.linspace(0.0, schedule.t_max, scenario.samples)
    result = dynamics.propagate(schedule, initial_state=initial,
                                sample_times=times, tolerance=tolerance,
                                dt_initial=scenario.dt_initial,
                                step_ceiling=scenario.step_ceiling)
    states = np.einsum("tij,j->ti", result.sample_propagators, initial)

    columns = {"t_ms": result.sample_times}
    for j, label in enumerate(BASIS_LABELS):
        columns[f"pop_{label}"] = np.abs(states[:, j]) ** 2
    for j, label in enumerate(BASIS_LABELS):
        columns[f"arg_{label}"] = np.angle(states[:, j])
    for p in range(4):
        columns[f"pop_psi{p}"] = np.abs(states @ np.conj(fourier_state(p))) ** 2

    echo = [f"{section}.{key}={value}"
            for section, pairs in scenario.echo.items()
            for key, value in pairs.items()]
    csv_path = _out_path(out_dir, "scenario_timeseries.csv")
    report.write_csv(csv_path, columns, ["scenario time series"] + echo)
    png_path = _out_path(out_dir, "scenario_timeseries.png")
    plot_columns = {k: v for k, v in columns.items()
                    if k == "t_ms" or k.startswith("pop_")}
    plotting.render(plot_columns, {"x": "t_ms", "xlabel": "t (ms)",
                                   "ylabel": "population"}, png_path,
                    title="scenario populations")

    final = states[-1]
    print(f"steps={result.steps} unitarity_defect={result.unitarity_defect:.3e}")
    print("final populations: " + " ".join(
        f"{label}={abs(final[j])**2:.6f}" for j, label in enumerate(BASIS_LABELS)))
    print("final arguments (rad): " + " ".join(
        f"{label}={np.angle(final[j]):+.4f}" for j, label in enumerate(BASIS_LABELS)))
    print("fourier populations: " + " ".join(
        f"psi{p}={abs(np.vdot(fourier_state(p), final))**2:.6f}" for p in range(4)))
    if result.alpha2 is not None:
        print(f"alpha2={result.alpha2:.6f} rad  beta2={result.beta2:.6f} rad")
        fidelity = gatecheck.gate_fidelity(result.propagator, gatecheck.target_gate(),
                                           unitarity_tol=1e-6)
        print(f"gate_fidelity={fidelity:.8f}")
    print(f"wrote {csv_path} and {png_path}")
    return EXIT_OK


def _cmd_tune(args):
    if args.k <= args.p or args.p <= 0:
        raise ConfigError(f"tune: requires k > p > 0, got k={args.k} p={args.p}")
    scenario = config_mod.load_scenario(args.path)
    out_dir = args.out or scenario.output_dir
    schedule = scenario.schedule
    if schedule.variant != "case2":
        raise ConfigError("tune: schedule.variant must be case2")
    target = tuner.TuneTarget(args.k, args.p, schedule,
                              tolerance=args.tolerance or 1e-6)
    guess = None
    if schedule.delta1 > schedule.delta2 > 0:
        guess = DetuningPair(schedule.delta1, schedule.delta2)
    result = tuner.tune(target, guess)

    tuned = schedule.replace(delta1=result.detunings.delta1,
                             delta2=result.detunings.delta2)
    evolution = dynamics.propagate(tuned, tolerance=scenario.tolerance)
    fidelity = gatecheck.gate_fidelity(evolution.propagator, gatecheck.target_gate(),
                                       unitarity_tol=1e-6)

    d1_khz = to_khz(result.detunings.delta1)
    d2_khz = to_khz(result.detunings.delta2)
    print(f"tuned detunings: delta1/2pi={d1_khz:.6f} kHz delta2/2pi={d2_khz:.6f} kHz")
    print(f"achieved phases: alpha2={result.alpha2:.9f} rad "
          f"({result.alpha2 / math.pi:.6f} pi), beta2={result.beta2:.9f} rad "
          f"({result.beta2 / math.pi:.6f} pi)")
    print(f"iterations={result.iterations} residual=({result.residual[0]:.2e}, "
          f"{result.residual[1]:.2e})")
    print(f"verification gate fidelity: {fidelity:.8f} (1-F={1 - fidelity:.3e})")

    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        worse = 0
        for trial in range(10):
            factors = 1.0 + 0.2 * (2.0 * rng.random(2) - 1.0)
            perturbed = schedule.replace(delta1=result.detunings.delta1 * factors[0],
                                         delta2=result.detunings.delta2 * factors[1])
            if perturbed.delta1 <= perturbed.delta2:
                continue
            u = dynamics.propagate(perturbed, tolerance=1e-6).propagator
            f_perturbed = gatecheck.gate_fidelity(u, gatecheck.target_gate(),
                                                  unitarity_tol=1e-6)
            worse += f_perturbed < fidelity
            print(f"  perturbed trial {trial}: detunings x ({factors[0]:.3f}, "
                  f"{factors[1]:.3f}) -> 1-F={1 - f_perturbed:.3e}")
        print(f"tuned point beats {worse} of the perturbed trials")

    csv_path = _out_path(out_dir, f"tune_k{args.k}_p{args.p}.csv")
    report.write_csv(csv_path, {
        "k": np.array([args.k]), "p": np.array([args.p]),
        "delta1_khz": np.array([d1_khz]), "delta2_khz": np.array([d2_khz]),
        "alpha2_rad": np.array([result.alpha2]),
        "beta2_rad": np.array([result.beta2]),
        "gate_fidelity": np.array([fidelity]),
    }, ["tuned detunings and verification"])
    print(f"wrote {csv_path}")
    return EXIT_OK


def _sweep_observable(spec, value):
    scenario = spec.scenario
    schedule = scenario.schedule
    field = {"j0_khz": "j0", "omega1_khz": "omega1", "v0_khz": "v0",
             "delta1_khz": "delta1", "delta2_khz": "delta2", "ramp_khz": "ramp"}
    swept = schedule.replace(**{field[spec.parameter]: from_khz(value)})

    if spec.observable == "phases":
        alpha2, beta2 = dynamics.adiabatic_phases(swept)
        return {"alpha2_rad": alpha2, "beta2_rad": beta2}
    if spec.observable == "spectrum":
        times = np.linspace(0.0, swept.t_max, 241)
        path = spectral.track(swept, times)
        out = {"min_gap_khz": to_khz(float(np.min(path.gaps)))}
        for b, label in enumerate(path.labels):
            out[f"final_{label}_khz"] = to_khz(path.values[-1, b])
        return out
    if spec.observable == "gate_fidelity":
        if swept.variant == "case2":
            u = dynamics.propagate(swept, tolerance=scenario.tolerance).propagator
            fidelity = gatecheck.gate_fidelity(u, gatecheck.target_gate(),
                                               unitarity_tol=1e-6)
        elif swept.variant == "rabi_controlled":
            fidelity = gatecheck.rotating_gate_fidelity(swept,
                                                        tolerance=scenario.tolerance)
        else:
            raise ConfigError("sweep.observable: gate_fidelity needs a case2 "
                              "or rabi_controlled schedule")
        return {"gate_fidelity": fidelity, "infidelity": 1.0 - fidelity}
    # state_fidelity: populations of every Fourier mode at t_max
    initial = scenario.initial.vector(swept.phi)
    result = dynamics.propagate(swept, initial_state=initial,
                                tolerance=scenario.tolerance)
    out = {}
    for p in range(4):
        out[f"pop_psi{p}"] = float(np.abs(np.vdot(fourier_state(p),
                                                  result.final_state)) ** 2)
    return out


def _cmd_sweep(args):
    spec = config_mod.load_sweep(args.path)
    out_dir = args.out or spec.scenario.output_dir
    if args.tolerance:
        spec.scenario.tolerance = args.tolerance

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(lambda v: _sweep_observable(spec, v), spec.values))
    else:
        rows = [_sweep_observable(spec, value) for value in spec.values]

    columns = {spec.parameter: spec.values}
    for key in rows[0]:
        columns[key] = np.array([row[key] for row in rows])
    echo = [f"parameter={spec.parameter}", f"observable={spec.observable}"]
    echo += [f"{section}.{key}={value}"
             for section, pairs in spec.scenario.echo.items()
             for key, value in pairs.items()]
    csv_path = _out_path(out_dir, f"sweep_{spec.parameter}_{spec.observable}.csv")
    report.write_csv(csv_path, columns, ["parameter sweep"] + echo)
    png_path = _out_path(out_dir, f"sweep_{spec.parameter}_{spec.observable}.png")
    plotting.render(columns, {"x": spec.parameter, "xlabel": spec.parameter,
                              "ylabel": spec.observable,
                              "logy": spec.observable == "gate_fidelity"},
                    png_path, title=f"sweep {spec.parameter}")
    for value, row in zip(spec.values, rows):
        rendered = " ".join(f"{k}={v:.8g}" for k, v in row.items())
        print(f"{spec.parameter}={value:g}: {rendered}")
    print(f"wrote {csv_path} and {png_path}")
    return EXIT_OK


def _cmd_ion_chain(args):
    cfg = config_mod.load_chain(args.path)
    out_dir = args.out or cfg.output_dir
    chain = iontrap.build_chain(cfg.n, cfg.omega_x, cfg.omega_z, cfg.mass_kg,
                                cfg.k_laser)
    eta = iontrap.lamb_dicke_matrix(chain)

    print(f"chain of {chain.n} ions, length scale {chain.length_scale_m * 1e6:.3f} um")
    print("equilibrium positions (dimensionless): "
          + " ".join(f"{u:+.6f}" for u in chain.positions))
    print("transverse modes (kHz): "
          + " ".join(f"{to_khz(w):.4f}" for w in chain.mode_freqs))

    columns = {"position": chain.positions,
               "position_um": chain.positions * chain.length_scale_m * 1e6}
    for mode in range(chain.n):
        columns[f"mode{mode}_khz"] = np.full(chain.n, to_khz(chain.mode_freqs[mode]))
        columns[f"b_mode{mode}"] = chain.mode_matrix[:, mode]
        columns[f"eta_mode{mode}"] = eta[:, mode]
    echo = [f"{section}.{key}={value}"
            for section, pairs in cfg.echo.items() for key, value in pairs.items()]
    csv_path = _out_path(out_dir, "ion_chain.csv")
    report.write_csv(csv_path, columns, ["ion chain summary"] + echo)
    print(f"wrote {csv_path}")

    if cfg.beatnote:
        drive = iontrap.DriveParams(cfg.rabi_x, cfg.beatnote, cfg.ion_k, cfg.ion_m)
        coupling, per_mode = iontrap.effective_J(chain, drive)
        margin = iontrap.dispersive_margin(chain, drive)
        print(f"effective J = {coupling:.6g} rad/ms (J/2pi = {to_khz(coupling):.6g} kHz)")
        print("per-mode contributions (rad/ms): "
              + " ".join(f"{c:+.4g}" for c in per_mode))
        print(f"dispersive margin min|w_n - mu|/g = {margin:.3f}")
        if margin < 3.0:
            raise ResonanceError(
                f"dispersive margin {margin:.3f} below the hard cutoff 3; "
                "the eliminated-phonon model is invalid here")
        if margin < 10.0:
            print("warning: dispersive margin below 10; "
                  "eliminated-phonon model is marginal", file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="circulant-gate",
        description="Simulate and tune the circulant-protected two-qubit Fourier gate.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override integrator/solver tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", parents=[common],
                           help="reproduce a benchmark figure")
    p_fig.add_argument("id", choices=sorted(figures.FIGURES) + ["all"])
    p_fig.set_defaults(func=_cmd_figure)

    p_scn = sub.add_parser("scenario", parents=[common],
                           help="propagate a configured schedule")
    p_scn.add_argument("path")
    p_scn.set_defaults(func=_cmd_scenario)

    p_tune = sub.add_parser("tune", parents=[common],
                            help="solve for phase-quantizing detunings")
    p_tune.add_argument("k", type=int)
    p_tune.add_argument("p", type=int)
    p_tune.add_argument("path")
    p_tune.add_argument("--seed", type=int, default=None,
                        help="also compare against seeded perturbed detunings")
    p_tune.set_defaults(func=_cmd_tune)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="scan one parameter and record an observable")
    p_sweep.add_argument("path")
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_chain = sub.add_parser("ion-chain", parents=[common],
                             help="linear-chain statics and effective coupling")
    p_chain.add_argument("path")
    p_chain.set_defaults(func=_cmd_ion_chain)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    # default tolerance differs per command; None means "use config/default"
    if args.tolerance is not None and args.tolerance <= 0:
        print("error: --tolerance must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        message = f"non-convergence: {exc}"
        if exc.residual is not None:
            message += f" (last residual {exc.residual})"
        print(message, file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (DegeneracyError, ChainInstabilityError, ResonanceError) as exc:
        print(f"degeneracy/instability: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
