"""Command-line harness: ``vlasim {simulate,sweep-error,dispersion,fit,verify-encoding,readout-demo}``.

Exit codes: 0 success, 2 configuration error, 3 invariant breach, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import oracle, plasma, qubitization, readout
from .phases import ScheduleError

log = logging.getLogger("vlasim")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERICAL = 0, 2, 3, 4

CONFIG_KEYS = {
    "k": 0.4,
    "n_points": 32,
    "v_max": 4.5,
    "t": 8 * math.pi,
    "epsilon": 1e-3,
    "sample_dt": 0.05,
    "circuit_dt": 0.5,
    "fit_window": [2 * math.pi, 8 * math.pi],
    "background": None,
    "seed": 0,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    physics: plasma.LandauConfig
    sample_dt: float
    circuit_dt: float
    fit_window: tuple
    seed: int
    raw: dict


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> ExperimentConfig:
    """Parse a JSON config (dimensionless units) and validate the physics."""
    raw = dict(CONFIG_KEYS)
    if path:
        text = Path(path).read_text()
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}:1: top level must be an object")
        lines = text.splitlines()
        for key in user:
            if key not in CONFIG_KEYS:
                lineno = next((i + 1 for i, ln in enumerate(lines) if f'"{key}"' in ln), 1)
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw.update(user)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        grid = plasma.build_grid(int(raw["n_points"]), float(raw["v_max"]))
        if raw["background"] is None:
            bg = plasma.maxwellian_background(grid)
        else:
            bg = plasma.custom_background(grid, raw["background"])
        phys = plasma.LandauConfig(float(raw["k"]), grid, bg, float(raw["t"]), float(raw["epsilon"]))
        if float(raw["sample_dt"]) <= 0 or float(raw["circuit_dt"]) <= 0:
            raise ValueError("sample_dt and circuit_dt must be positive")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path or '<defaults>'}: {exc}") from exc
    return ExperimentConfig(phys, float(raw["sample_dt"]), float(raw["circuit_dt"]),
                            tuple(raw["fit_window"]), int(raw["seed"]), raw)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _times(t_end: float, dt: float) -> np.ndarray:
    return oracle.sample_times(t_end, dt) if t_end > 0 else np.array([0.0])


def _circuit_point(args):
    cfg, t = args
    phys = plasma.LandauConfig(cfg.k, cfg.grid, cfg.background, t, cfg.epsilon)
    rep = qubitization.run_simulation(phys)
    return complex(rep.final_state.data()[-1]), rep.to_dict()


def _map(fn, items, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def oracle_series(phys: plasma.LandauConfig, times) -> oracle.TimeSeries:
    """Exact E(t) in physical units (state amplitude divided by eta)."""
    x0 = plasma.initial_state(phys)
    ts = oracle.evolve_series(plasma.build_hamiltonian(phys), x0, times)
    return oracle.TimeSeries(ts.times, ts.e_field / x0.eta)


def circuit_series(phys: plasma.LandauConfig, times, workers: int = 1):
    results = _map(_circuit_point, [(phys, float(t)) for t in times], workers)
    x0 = plasma.initial_state(phys)
    field = np.array([r[0] for r in results]) / x0.eta
    return oracle.TimeSeries(np.asarray(times, dtype=float), field), [r[1] for r in results]


def cmd_simulate(cfg: ExperimentConfig, out: Path, path: str = "oracle", workers: int = 1) -> int:
    phys = cfg.physics
    report: dict = {"config": {k: cfg.raw[k] for k in ("k", "n_points", "v_max", "t", "epsilon")}}
    series = {}
    if path in ("oracle", "both"):
        series["oracle"] = oracle_series(phys, _times(phys.t, cfg.sample_dt))
        series["oracle"].to_csv(out / "series_oracle.csv")
    if path in ("circuit", "both"):
        times = _times(phys.t, cfg.circuit_dt)
        ts, _ = circuit_series(phys, times, workers)
        series["circuit"] = ts
        ts.to_csv(out / "series_circuit.csv")
        rep = qubitization.run_simulation(phys)
        report["simulation"] = rep.to_dict()
        if rep.epsilon_actual > rep.epsilon_bound or rep.failure_probability > 2 * rep.epsilon_actual + 1e-10:
            report["failure"] = "error bound or failure-rate invariant violated"
            _write_json(out / "report.json", report)
            return EXIT_INVARIANT
    for name, ts in series.items():
        if phys.t >= cfg.fit_window[1] - 1e-9:
            try:
                fit = readout.fit_damped_sinusoid(ts, cfg.fit_window)
                report[f"fit_{name}"] = {"omega": fit.omega, "gamma": fit.gamma,
                                         "amplitude": fit.amplitude, "rho": fit.rho,
                                         "residual": fit.residual}
            except readout.FitError as exc:
                report[f"fit_{name}"] = {"error": str(exc)}
    _write_json(out / "report.json", report)
    return EXIT_OK


def _sweep_point(args):
    phys, eps = args
    run = plasma.LandauConfig(phys.k, phys.grid, phys.background, phys.t, eps)
    rep = qubitization.run_simulation(run)
    return eps, rep.epsilon_bound, rep.query_count, rep.epsilon_actual, rep.failure_probability


def cmd_sweep_error(cfg: ExperimentConfig, out: Path, epsilons, workers: int = 1) -> int:
    rows = _map(_sweep_point, [(cfg.physics, float(e)) for e in epsilons], workers)
    with open(out / "sweep_error.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epsilon", "epsilon_bound", "query_count", "epsilon_actual", "failure_rate"])
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    bad = [r for r in rows if r[3] > r[1] or r[4] > 2 * r[3] + 1e-10]
    if bad:
        _write_json(out / "failure.json", {"violations": [list(map(float, r)) for r in bad]})
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_dispersion(ks, out: Path) -> int:
    status = EXIT_OK
    with open(out / "dispersion.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "omega", "gamma", "residual", "omega_bohm_gross", "gamma_estimate", "converged"])
        for k in ks:
            k = float(k)
            wb, gb = plasma.theory_estimates(k)
            try:
                root = plasma.dispersion_solve(k)
                w.writerow([k] + [repr(float(x)) for x in (root.omega, root.gamma, root.residual, wb, gb)] + [1])
            except plasma.DispersionError as exc:
                last = exc.last_iterate
                w.writerow([k] + [repr(float(x)) for x in (last.real, -last.imag, math.nan, wb, gb)] + [0])
                status = EXIT_NUMERICAL
    return status


def cmd_fit(cfg: ExperimentConfig, out: Path, series_path: Optional[str]) -> int:
    if series_path:
        ts = oracle.TimeSeries.from_csv(series_path)
    else:
        ts = oracle_series(cfg.physics, _times(cfg.physics.t, cfg.sample_dt))
    try:
        fit = readout.fit_damped_sinusoid(ts, cfg.fit_window)
    except readout.FitError as exc:
        _write_json(out / "fit.json", {"error": str(exc)})
        return EXIT_NUMERICAL
    fit.to_json(out / "fit.json")
    return EXIT_OK


def cmd_verify_encoding(cfg: ExperimentConfig, out: Path) -> int:
    phys = cfg.physics
    enc = plasma.compute_encoding(phys)
    layout = qubitization.layout_for(enc)
    ops = qubitization.block_encoding(enc, layout)
    chk = qubitization.encoding_report(ops, plasma.build_hamiltonian(phys), enc.beta, layout)
    payload = {"deviation": chk.deviation, "leakage": chk.leakage, "beta": enc.beta,
               "lambda": enc.lambda_bound, "lambda_prime": enc.lambda_prime,
               "inverse_beta": 1 / enc.beta, "t_prime": phys.t / enc.beta}
    _write_json(out / "encoding.json", payload)
    ok = chk.deviation <= 1e-10 and chk.leakage <= 1e-10
    ok &= 0.8 * enc.lambda_bound <= 1 / enc.beta <= enc.lambda_bound
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_readout_demo(cfg: ExperimentConfig, out: Path) -> int:
    phys = cfg.physics
    x0 = plasma.initial_state(phys)
    layout = qubitization.layout_for(phys.grid.n_points)
    prep = readout.prepare_state(x0, layout)
    final = oracle.exact_evolve(plasma.build_hamiltonian(phys), x0, phys.t)
    nu = complex(final[-1])
    mags = [abs(nu + np.exp(1j * z)) / 2 for z in readout.ZETAS]
    p = abs(nu) ** 2
    m = readout.iterations_for_precision(p, 0.01)
    payload = {
        "prep_success_probability": prep.success_probability,
        "prep_predicted_probability": prep.predicted_probability,
        "prep_velocity_branch_probability": prep.velocity_branch_probability,
        "expected_repetitions": prep.expected_repetitions,
        "eta_abs_E0": x0.eta * abs(x0.e_field),
        "final_field_amplitude": [nu.real, nu.imag],
        "retrieval_magnitudes": mags,
        "reconstructed": [readout.reconstruct_nu(*mags).real, readout.reconstruct_nu(*mags).imag],
        "ae_iterations_for_0.01": m,
        "ae_bound": readout.ae_error_bound(p, m),
        "sampling_shots_for_0.01": readout.shots_for_precision(p, 0.01),
        "sampling_estimate": readout.sampling_comparator(p, readout.shots_for_precision(p, 0.01), cfg.seed),
    }
    _write_json(out / "readout.json", payload)
    if abs(prep.success_probability - prep.predicted_probability) > 1e-10:
        return EXIT_INVARIANT
    return EXIT_OK


def _floats(text: Optional[str]):
    if text is None:
        return None
    return [float(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vlasim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("simulate", "sweep-error", "dispersion", "fit", "verify-encoding", "readout-demo"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--path", choices=("oracle", "circuit", "both"), default="oracle")
        sp.add_argument("--epsilon", help="comma separated tolerances")
        sp.add_argument("--k", help="comma separated wavenumbers")
        sp.add_argument("--workers", type=int, default=1)
        if name == "fit":
            sp.add_argument("--series", help="time-series CSV (t, re_E, im_E, abs_E)")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("VLASIM_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        eps = _floats(args.epsilon)
        ks = _floats(args.k)
        overrides = {"seed": args.seed}
        if args.command != "sweep-error" and eps:
            overrides["epsilon"] = eps[0]
        if args.command != "dispersion" and ks:
            overrides["k"] = ks[0]
        cfg = load_config(args.config, overrides)
        log.info("%s: k=%s n_points=%s t=%s epsilon=%s", args.command, cfg.raw["k"],
                 cfg.raw["n_points"], cfg.raw["t"], cfg.raw["epsilon"])
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            return cmd_simulate(cfg, out, args.path, args.workers)
        if args.command == "sweep-error":
            return cmd_sweep_error(cfg, out, eps or [10.0**-e for e in range(1, 9)], args.workers)
        if args.command == "dispersion":
            return cmd_dispersion(ks or [cfg.physics.k], out)
        if args.command == "fit":
            return cmd_fit(cfg, out, args.series)
        if args.command == "verify-encoding":
            return cmd_verify_encoding(cfg, out)
        return cmd_readout_demo(cfg, out)
    except (plasma.DispersionError, oracle.EigenSolverError, ScheduleError, readout.FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
