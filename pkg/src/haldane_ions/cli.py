"""Command-line front end.

Usage::

    haldane-ions <command> --config run.json --out results/ [--seed N] [--workers N]

Commands: modes, couplings, phase-point, sweep, ramp, validate, unwind,
noise, spectrum.  Frequencies in the config are plain Hz (cycles per
second) and are converted to rad/s internally; model-section energies
(``lam``, ``D``, ``h``, ramp controls) are in units of the nearest-neighbor
coupling.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import logging
import os
from pathlib import Path
import sys

import jsonschema
import numpy as np

from . import adiabatic, drive_model, frames, ion_chain, noise, observables, spin_model
from .integrators import KrylovError, StepUnderflowError
from .io import OutputDir

log = logging.getLogger("haldane_ions")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
TWO_PI = 2 * np.pi

NUMERICAL_ERRORS = (
    ion_chain.ConvergenceError,
    ion_chain.InstabilityError,
    ion_chain.ResonanceError,
    frames.IncommensurateError,
    drive_model.TruncationError,
    KrylovError,
    StepUnderflowError,
    np.linalg.LinAlgError,
    FloatingPointError,
)


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_range3 = {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}
_matrix = {"type": "array", "items": {"type": "array", "items": _num}}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "workers": {"type": "integer", "minimum": 1},
        "trap": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_ions", "omega_axial_hz", "omega_radial_hz", "mass_amu"],
            "properties": {
                "n_ions": {"type": "integer", "minimum": 1},
                "omega_axial_hz": _pos,
                "omega_radial_hz": _pos,
                "mass_amu": _pos,
                "charge_e": _pos,
                "lamb_dicke": _nonneg,
                "wavelength_nm": _pos,
                "k_L": _nonneg,
            },
        },
        "drive": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "scheme": {"enum": [1, 2]},
                "rabi_hz": _nonneg,
                "detuning_hz": _num,
                "omega_prime_hz": _nonneg,
                "theta": _num,
                "D_prime_hz": _num,
                "omega_carrier_hz": _nonneg,
                "rabi_D_hz": _nonneg,
                "detuning_D_hz": _num,
                "fock_cutoff": {"type": "integer", "minimum": 2},
                "eta": _matrix,
                "mode_hz": {"type": "array", "items": _pos, "minItems": 1},
                "resonance_guard_hz": _nonneg,
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["couplings"],
            "properties": {
                "couplings": {
                    "oneOf": [
                        {"type": "object", "additionalProperties": False, "required": ["matrix"],
                         "properties": {"matrix": _matrix}},
                        {"type": "object", "additionalProperties": False, "required": ["nearest_neighbor"],
                         "properties": {"nearest_neighbor": {
                             "type": "object", "additionalProperties": False, "required": ["n_sites"],
                             "properties": {"n_sites": {"type": "integer", "minimum": 1}, "J": _num}}}},
                        {"type": "object", "additionalProperties": False, "required": ["trap"],
                         "properties": {"trap": {"const": True}}},
                    ]
                },
                "lam": _nonneg,
                "D": _num,
                "h": _num,
                "scheme": {"enum": [1, 2]},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lam", "D"],
            "properties": {"lam": _range3, "D": _range3},
        },
        "ramp": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_sites": {"type": "integer", "minimum": 2, "maximum": spin_model.MAX_SITES},
                "lam": _nonneg,
                "D_start": _num,
                "D_end": _num,
                "h_max": _num,
                "schedule": {"enum": list(adiabatic.SCHEDULES)},
                "C": _pos,
                "dt": _pos,
                "record_every": {"type": "integer", "minimum": 1},
                "T": _pos,
            },
        },
        "validate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "defaults": {"type": "boolean"},
                "violate": {"type": "boolean"},
                "form": {"enum": list(spin_model.FORMS)},
                "psi": {"type": "array", "items": {"enum": [-1, 0, 1]}},
                "t_final_us": _pos,
                "samples": {"type": "integer", "minimum": 1},
                "resolution": _pos,
            },
        },
        "unwind": {
            "type": "object",
            "additionalProperties": False,
            "required": ["tau_us"],
            "properties": {
                "tau_us": _nonneg,
                "measurement_rotation": {"type": "boolean"},
                "shortcut": {"type": "boolean"},
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma_hz": _nonneg,
                "T_us": _nonneg,
                "state": {"enum": ["zero", "ground"]},
                "sigma": {"type": "number", "minimum": 0, "maximum": noise.MAX_RABI_SPREAD},
                "draws": {"type": "integer", "minimum": 0},
                "targets": {"type": "array", "items": {"enum": ["rabi", "carrier", "field"]}},
                "scheme": {"enum": [1, 2]},
            },
        },
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"levels": {"type": "integer", "minimum": 1}},
        },
    },
}


def load_config(path) -> dict:
    """Read and schema-validate a run configuration.

    Raises
    ------
    ConfigError
        For unreadable files, malformed JSON (with line and column) or
        schema violations (with the offending path).
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    return cfg


def _section(cfg: dict, name: str) -> dict:
    if name not in cfg:
        raise ConfigError(f"this command needs a '{name}' section")
    return cfg[name]


# ---------------------------------------------------------------------------
# builders


def trap_from_config(cfg: dict) -> ion_chain.TrapConfig:
    return ion_chain.TrapConfig.from_dict(_section(cfg, "trap"))


def chain_couplings(cfg: dict):
    trap = trap_from_config(cfg)
    drive = _section(cfg, "drive")
    for key in ("rabi_hz", "detuning_hz"):
        if key not in drive:
            raise ConfigError(f"drive.{key} is required to compute couplings")
    geom = ion_chain.solve_equilibrium(trap)
    modes = ion_chain.compute_normal_modes(geom, trap, "radial")
    eta = ion_chain.lamb_dicke(modes, trap)
    guard = drive.get("resonance_guard_hz")
    cm = ion_chain.coupling_matrix(eta, TWO_PI * drive["rabi_hz"], TWO_PI * drive["detuning_hz"], modes,
                                   guard=None if guard is None else TWO_PI * guard)
    return trap, geom, modes, eta, cm


def model_couplings(cfg: dict) -> np.ndarray:
    spec = _section(cfg, "model")["couplings"]
    if "matrix" in spec:
        J = np.asarray(spec["matrix"], dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ConfigError("model.couplings.matrix must be square")
        return J
    if "nearest_neighbor" in spec:
        nn = spec["nearest_neighbor"]
        return spin_model.nearest_neighbor_couplings(nn["n_sites"], nn.get("J", 1.0))
    # trap-derived, in units of the largest nearest-neighbor coupling
    *_, cm = chain_couplings(cfg)
    J = cm.J_eff - np.diag(np.diag(cm.J_eff))
    scale = np.abs(np.diag(J, 1)).max() if J.shape[0] > 1 else 1.0
    return J / scale


def check_lambda(lam: float, scheme: int) -> None:
    """Scheme 1 only reaches 0 <= lambda <= 2."""
    if scheme == 1 and lam > 2:
        raise ConfigError(f"lambda = {lam:g} is outside the scheme-1 range [0, 2]; set model.scheme = 2")


def model_params(cfg: dict, lam: float | None = None, D: float | None = None) -> spin_model.ModelParams:
    m = _section(cfg, "model")
    lam = m.get("lam", 1.0) if lam is None else lam
    D = m.get("D", 0.0) if D is None else D
    check_lambda(lam, m.get("scheme", 1))
    return spin_model.ModelParams(model_couplings(cfg), lam, D, m.get("h", 0.0))


def drive_params(cfg: dict) -> drive_model.DriveParams:
    v = cfg.get("validate", {})
    d = cfg.get("drive", {})
    scheme = d.get("scheme", 1)
    if v.get("defaults", "rabi_hz" not in d):
        p = drive_model.default_validation_params(scheme, theta=d.get("theta"), violate=v.get("violate", False))
        return p
    try:
        nu = np.asarray(d["mode_hz"], dtype=float) * TWO_PI
        eta = np.asarray(d["eta"], dtype=float)
        return drive_model.DriveParams(
            scheme=scheme, nu=tuple(nu), delta=TWO_PI * d["detuning_hz"], rabi=TWO_PI * d["rabi_hz"],
            eta=eta, omega_prime=TWO_PI * d.get("omega_prime_hz", 0.0), theta=d.get("theta", 0.0),
            D_prime=TWO_PI * d.get("D_prime_hz", 0.0), omega_carrier=TWO_PI * d.get("omega_carrier_hz", 0.0),
            rabi_D=TWO_PI * d.get("rabi_D_hz", 0.0), detuning_D=TWO_PI * d.get("detuning_D_hz", 0.0),
            fock_cutoff=d.get("fock_cutoff", 6))
    except KeyError as exc:
        raise ConfigError(f"drive.{exc.args[0]} is required for a custom validation") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_modes(cfg, out: OutputDir, args) -> dict:
    trap = trap_from_config(cfg)
    geom = ion_chain.solve_equilibrium(trap)
    out.write_csv("positions.csv", ["ion", "u", "z_m"],
                  [(i, u, z) for i, (u, z) in enumerate(zip(geom.positions_dimensionless, geom.positions))])
    summary = {"residual": geom.residual, "iterations": geom.iterations, "length_scale_m": geom.length_scale}
    for direction in ("axial", "radial"):
        modes = ion_chain.compute_normal_modes(geom, trap, direction)
        n = trap.n_ions
        header = ["mode", "frequency_hz"] + [f"b_{i}" for i in range(n)]
        rows = [[k, modes.frequencies[k] / TWO_PI, *modes.mode_matrix[:, k]] for k in range(n)]
        out.write_csv(f"modes_{direction}.csv", header, rows)
    out.write_json("modes_summary.json", summary)
    return summary


def cmd_couplings(cfg, out: OutputDir, args) -> dict:
    trap, geom, modes, eta, cm = chain_couplings(cfg)
    n = trap.n_ions
    rows = [(i, j, cm.J_eff[i, j] / TWO_PI) for i in range(n) for j in range(n)]
    out.write_csv("couplings.csv", ["i", "j", "J_hz"], rows)
    out.write_csv("residual_fields.csv", ["ion", "c_hz"],
                  [(j, c / TWO_PI) for j, c in enumerate(cm.residual_fields)])
    nn = np.diag(cm.J_eff, 1) / TWO_PI if n > 1 else np.zeros(0)
    summary = {"uniformity_metric": cm.uniformity_metric,
               "nearest_neighbor_hz": nn,
               "lamb_dicke_max": float(np.abs(eta).max())}
    if n >= 4:
        fit = ion_chain.fit_powerlaw(cm.J_eff, geom.positions_dimensionless)
        summary["powerlaw_exponent"] = fit.exponent
        summary["powerlaw_used_magnitudes"] = fit.used_magnitudes
    out.write_json("couplings_summary.json", summary)
    return summary


def _phase_point(params: spin_model.ModelParams, scheme: int) -> dict:
    sig = observables.haldane_signatures(params)
    row = {"lam": params.lam, "D": float(np.mean(params.D_sites)), "h": params.h, "gap": sig.gap,
           "ground_energy": sig.ground_energy, "string_order": sig.string_order,
           "es_paired": sig.paired, "es_state": sig.es_state}
    try:
        row["theta"] = spin_model.theta_from_lambda(scheme, params.lam, form="secular")
    except ValueError:
        row["theta"] = None
    return row


PHASE_HEADER = ["lam", "D", "h", "gap", "string_order", "es_paired"]


def cmd_phase_point(cfg, out: OutputDir, args) -> dict:
    p = model_params(cfg)
    row = _phase_point(p, cfg["model"].get("scheme", 1))
    out.write_csv("phase_point.csv", PHASE_HEADER, [[row[k] for k in PHASE_HEADER]])
    out.write_json("phase_point.json", row)
    return row


def _sweep_job(job):
    name, J, lam, D, h, scheme, root = job
    path = Path(root) / name
    try:
        row = _phase_point(spin_model.ModelParams(np.asarray(J), lam, D, h), scheme)
    except Exception as exc:  # per-point failures are logged, the sweep continues
        return name, None, f"{type(exc).__name__}: {exc}"
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(row, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return name, row, None


def cmd_sweep(cfg, out: OutputDir, args) -> dict:
    sw = _section(cfg, "sweep")
    m = _section(cfg, "model")
    scheme = m.get("scheme", 1)
    lams = np.linspace(*sw["lam"][:2], int(sw["lam"][2]))
    Ds = np.linspace(*sw["D"][:2], int(sw["D"][2]))
    for lam in lams:
        check_lambda(lam, scheme)
    J = model_couplings(cfg)
    h = m.get("h", 0.0)
    jobs, rows, failures = [], {}, {}
    for a, lam in enumerate(lams):
        for b, D in enumerate(Ds):
            name = f"points/point_{a:03d}_{b:03d}.json"
            path = out.path(name)
            if path.exists():
                rows[name] = json.loads(path.read_text(encoding="utf-8"))
                out.adopt(name)
                continue
            jobs.append((name, J.tolist(), float(lam), float(D), h, scheme, str(out.root)))
    workers = args.workers or cfg.get("workers") or os.cpu_count() or 1
    if jobs:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
                results = list(pool.map(_sweep_job, jobs))
        else:
            results = [_sweep_job(j) for j in jobs]
        for name, row, err in results:
            if err is None:
                rows[name] = row
                out.adopt(name)
            else:
                failures[name] = err
                log.warning("sweep point %s failed: %s", name, err)
    ordered = [rows[k] for k in sorted(rows)]
    out.write_csv("sweep.csv", PHASE_HEADER, [[r[k] for k in PHASE_HEADER] for r in ordered])
    summary = {"points": len(lams) * len(Ds), "completed": len(rows), "failures": failures}
    out.write_json("sweep_summary.json", summary)
    return summary


def ramp_path(cfg) -> adiabatic.RampPath:
    r = cfg.get("ramp", {})
    J = spin_model.nearest_neighbor_couplings(r.get("n_sites", 6))
    return adiabatic.RampPath(J, lam=r.get("lam", 1.0), D_start=r.get("D_start", 10.0),
                              D_end=r.get("D_end", 0.0), h_max=r.get("h_max", 0.5),
                              schedule=r.get("schedule", "gap-adaptive"))


def cmd_ramp(cfg, out: OutputDir, args) -> dict:
    r = cfg.get("ramp", {})
    path = ramp_path(cfg)
    C = r.get("C", 10.0)
    profile = adiabatic.gap_along_path(path)
    T = r.get("T") or adiabatic.adiabatic_time(path, profile, C)
    res = adiabatic.run_ramp(path, T=T, C=C, dt=r.get("dt", 0.25), record_every=r.get("record_every", 20),
                             profile=profile)
    out.write_csv("ramp.csv", ["s", "t", "D", "h", "gap", "fidelity", "energy_excess", "magnetization"],
                  zip(res.s, res.times, res.D, res.h, res.gap, res.fidelity, res.energy_excess,
                      res.magnetization))
    out.write_csv("gap_profile.csv", ["s", "gap", "gap_zero_sector", "first_excited_sector"],
                  zip(profile.s, profile.gap, profile.gap_sector, profile.excited_sector))
    summary = {"T": T, "final_fidelity": res.final_fidelity, "min_gap": profile.minimum,
               "max_abs_magnetization": float(np.abs(res.magnetization).max()),
               "norm_drift": res.norm_drift, "sudden_overlap": adiabatic.sudden_overlap(path)}
    out.write_json("ramp_summary.json", summary)
    return summary


def cmd_validate(cfg, out: OutputDir, args) -> dict:
    v = cfg.get("validate", {})
    p = drive_params(cfg)
    t_final = v["t_final_us"] * 1e-6 if "t_final_us" in v else None
    rep = drive_model.validate_effective(p, form=v.get("form", "secular"), psi_local=tuple(v.get("psi", (1, -1))),
                                         t_final=t_final, n_samples=v.get("samples", 5),
                                         resolution=v.get("resolution", 0.2))
    out.write_csv("validate.csv", ["t_s", "fidelity"], zip(rep.times, rep.fidelities))
    summary = {"scheme": rep.scheme, "form": rep.form, "fidelity": rep.fidelity, "t_final_s": rep.t_final,
               "J_hz": rep.J / TWO_PI, "phonon_occupation": rep.phonon_occupation,
               "top_fock_population": rep.top_fock_population, "norm_drift": rep.norm_drift,
               "hierarchy": [{"name": e.name, "condition": e.condition, "ratio": e.ratio, "passed": e.passed}
                             for e in rep.hierarchy.entries],
               "schedule": p.schedule().to_dict()}
    out.write_json("validate_report.json", summary)
    return summary


def cmd_unwind(cfg, out: OutputDir, args) -> dict:
    u = _section(cfg, "unwind")
    d = _section(cfg, "drive")
    scheme = d.get("scheme", 1)
    op = TWO_PI * d.get("omega_prime_hz", 0.0)
    theta = d.get("theta", 0.0)
    tau = u["tau_us"] * 1e-6
    if scheme == 1:
        stack = frames.FrameStack.scheme1(op, theta)
        sched = frames.unwind_schedule(stack, tau, shortcut=u.get("shortcut", False))
        stages = [{"stage": "simulate", "duration_us": tau * 1e6}]
        stages += [{"stage": f"unwind {l}", "duration_us": t * 1e6}
                   for l, t in zip(sched.labels, sched.durations)]
        doc = {"scheme": 1, "stages": stages}
        if sched.shortcut is not None:
            doc["shortcut"] = {"angles_rad": sched.shortcut.angles, "residual": sched.shortcut.residual}
    else:
        if "omega_carrier_hz" not in d:
            raise ConfigError("drive.omega_carrier_hz is required for scheme 2")
        stack = frames.FrameStack.scheme2(op, theta, TWO_PI * d["omega_carrier_hz"])
        stages = frames.scheme2_unwind(stack, tau, measurement_rotation=u.get("measurement_rotation", False))
        doc = {"scheme": 2, "stages": [{"stage": s.label, "active": list(s.active), "duration_us": s.duration * 1e6}
                                       for s in stages]}
    out.write_json("unwind_schedule.json", doc)
    return doc


def cmd_noise(cfg, out: OutputDir, args) -> dict:
    nz = _section(cfg, "noise")
    summary = {}
    gamma = nz.get("gamma_hz", 0.0)
    T = nz.get("T_us", 0.0) * 1e-6
    if nz.get("state", "zero") == "ground":
        p = model_params(cfg)
        _, v = spin_model.solve_ground(spin_model.build_hamiltonian(p), k=1, sector=0, n_sites=p.n_sites)
        psi = v[:, 0]
    else:
        n = cfg.get("model", {}).get("couplings", {}).get("nearest_neighbor", {}).get("n_sites", 4)
        psi = adiabatic.initial_state(n)
    rng = np.random.default_rng(args.seed)
    deph = noise.apply_collective_dephasing(psi, gamma, T, rng=rng)
    dfs = noise.dfs_projection_check(psi)
    summary["dephasing"] = {"gamma_hz": gamma, "T_us": T * 1e6, "fidelity": deph.fidelity, "exact": deph.exact,
                            "dfs_mean": dfs.mean, "dfs_variance": dfs.variance, "dfs_member": dfs.member}
    draws = nz.get("draws", 0)
    if draws:
        p = drive_model.default_validation_params(nz.get("scheme", cfg.get("drive", {}).get("scheme", 1)))
        workers = args.workers or cfg.get("workers") or os.cpu_count() or 1
        rep = noise.rabi_robustness(p, nz.get("sigma", 0.01), draws, seed=args.seed,
                                    targets=tuple(nz.get("targets", ("rabi", "carrier", "field"))),
                                    workers=workers)
        out.write_csv("noise.csv", ["draw", "fidelity"], enumerate(rep.fidelities))
        summary["rabi"] = {"scheme": rep.scheme, "sigma": rep.sigma, "targets": rep.targets,
                           "baseline": rep.baseline, "mean": rep.mean, "min": rep.min}
    out.write_json("noise_summary.json", summary)
    return summary


def cmd_spectrum(cfg, out: OutputDir, args) -> dict:
    p = model_params(cfg)
    k = cfg.get("spectrum", {}).get("levels", 4)
    H = spin_model.build_hamiltonian(p)
    rows = []
    for m in range(-p.n_sites, p.n_sites + 1):
        E, _ = spin_model.solve_ground(H, k=k, sector=m, n_sites=p.n_sites)
        rows += [(m, i, e) for i, e in enumerate(E)]
    rows.sort(key=lambda r: (r[2], r[0], r[1]))
    out.write_csv("spectrum.csv", ["sector", "level", "energy"], rows)
    psi, tag = observables.edge_resolved_state(H, p.n_sites)
    es = observables.entanglement_spectrum(psi, p.n_sites // 2)
    out.write_csv("entanglement.csv", ["index", "probability"], enumerate(es.probabilities))
    summary = {"ground_energy": rows[0][2], "gap": rows[1][2] - rows[0][2], "es_state": tag,
               "es_paired": es.paired, "es_entropy": es.entropy}
    out.write_json("spectrum_summary.json", summary)
    return summary


COMMANDS = {
    "modes": cmd_modes,
    "couplings": cmd_couplings,
    "phase-point": cmd_phase_point,
    "sweep": cmd_sweep,
    "ramp": cmd_ramp,
    "validate": cmd_validate,
    "unwind": cmd_unwind,
    "noise": cmd_noise,
    "spectrum": cmd_spectrum,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haldane-ions", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="run configuration (JSON)")
        sp.add_argument("--out", default="results", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
        sp.add_argument("--workers", type=int, default=None, help="worker pool size")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is None:
            args.seed = cfg.get("seed", 0)
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        out = OutputDir(args.out, args.command, cfg, args.seed)
        result = COMMANDS[args.command](cfg, out, args)
        out.write_manifest()
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        log.error("numerical failure: %s: %s", type(exc).__name__, exc)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, TypeError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except RuntimeError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    log.info("%s finished: %s", args.command, json.dumps(_brief(result), default=str))
    return EXIT_OK


def _brief(result: dict) -> dict:
    return {k: v for k, v in result.items() if isinstance(v, (int, float, str, bool))}


if __name__ == "__main__":
    sys.exit(main())
