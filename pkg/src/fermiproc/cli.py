"""Command-line entry point: ``fermiproc <subcommand> [--config FILE] [--seed N] [--out DIR] [--workers N]``.

The config file is JSON with ``"version": 1`` and one optional block per
subcommand, keyed by the subcommand name.  Missing keys fall back to the
defaults in ``DEFAULTS``.  Exit status is 0 when every check passes, 1 when
a check fails and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

CONFIG_VERSION = 1
CHEMICAL_ACCURACY = 1.59e-3

DEFAULTS: dict[str, dict] = {
    "verify-decomp": {
        "targets": ["dt", "pt"],
        "theta1": [0.2, 0.85, 1.5, 2.15, 2.8],
        "theta2": [-2.5, -1.25, 0.0, 1.25, 2.5],
        "restarts": 64,
        "tolerance": 1e-9,
    },
    "trotter": {
        "hamiltonian": None,  # path; None draws a random 4-mode model from the seed
        "random_terms": 6,
        "particles": None,
        "time": 1.0,
        "dts": [0.2, 0.1, 0.05, 0.025],
    },
    "vqe": {
        "hamiltonian": "bundled:h2",
        "reference": "1100",
        "method": "nelder-mead",
        "max_evaluations": 20000,
        "restarts": 3,
        "sweep": None,  # {"delta_wr": [...], "delta_r": [...], "samples": M, "delta_z": null}
    },
    "lgt": {
        "lattice": None,  # path; None uses the single plaquette
        "lambda_e": 0.7,
        "lambda_b": 0.5,
        "lambda_j": 0.9,
        "lambda_m": 0.3,
        "dt": 0.05,
        "steps": 100,
        "particles": 2,
        "tolerance": 1e-10,
    },
    "qpe": {
        "bits": 8,
        "cases": [
            {"kind": "number", "theta": math.pi / 2},
            {"kind": "tunneling", "theta": [math.pi / 3, 0.0, 0.0]},
        ],
    },
    "echo": {
        "L": 100,
        "N": 20,
        "J": 1.0,
        "tau": 0.13,
        "sigma_theta": 0.035,
        "strategy": "cyclic",
        "seeds": 10,
        "horizon": 20000,
        "threshold": 0.9,
        "min_ratio": 50.0,
        "disorder_units": "energy",
    },
    "noise-budget": {
        "omega_hz": 15e3,
        "gate_time_s": 100e-9,
        "depth_hz": 50e3,
        "relative_sigma": 0.002,
        "move_time_s": 500e-6,
        "operations": 1000,
    },
}

STOCHASTIC = {"trotter", "vqe", "echo"}


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def load_config(path: str | None, command: str) -> dict:
    cfg = dict(DEFAULTS[command])
    if path is None:
        return cfg
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or raw.get("version") != CONFIG_VERSION:
        raise UsageError(f"config must be a JSON object with \"version\": {CONFIG_VERSION}")
    block = raw.get(command, {})
    if not isinstance(block, dict):
        raise UsageError(f"config block for {command} must be an object")
    unknown = set(block) - set(cfg)
    if unknown:
        raise UsageError(f"unknown {command} config keys: {sorted(unknown)}")
    cfg.update(block)
    return cfg


def _resolve_hamiltonian(spec: str):
    from .hamiltonian import HamiltonianFormatError, load_hamiltonian

    try:
        if spec.startswith("bundled:"):
            ref = resources.files("fermiproc") / "data" / f"{spec.split(':', 1)[1]}.ham"
            with resources.as_file(ref) as p:
                if not p.exists():
                    raise UsageError(f"no bundled Hamiltonian {spec!r}")
                return load_hamiltonian(p)
        return load_hamiltonian(spec)
    except FileNotFoundError:
        raise UsageError(f"Hamiltonian file {spec} not found") from None
    except HamiltonianFormatError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands; each returns True when its checks pass
# ---------------------------------------------------------------------------

def cmd_verify_decomp(cfg, args, out: Path) -> bool:
    from .decompose import decomposition_grid

    rows = []
    for target in cfg["targets"]:
        if target not in ("dt", "pt"):
            raise UsageError(f"unknown decomposition target {target!r}")
        for res in decomposition_grid(
            target, cfg["theta1"], cfg["theta2"], restarts=int(cfg["restarts"]),
            tolerance=float(cfg["tolerance"]), seed=args.seed or 0,
        ):
            rows.append([target, res.theta1, res.theta2, res.residual, res.template.gate_count,
                         res.template.depth, res.restarts_used, res.converged])
    write_csv(out / "decomp.csv", ["target", "theta1", "theta2", "residual", "gates", "depth", "restarts", "pass"], rows)
    bad = [r for r in rows if not r[-1]]
    print(f"verify-decomp: {len(rows) - len(bad)}/{len(rows)} grid points below tolerance")
    return not bad


def cmd_trotter(cfg, args, out: Path) -> bool:
    from .fock import build_basis
    from .hamiltonian import random_hamiltonian
    from .linalg import expm
    from .trotter import trotter_step

    if cfg["hamiltonian"]:
        ham = _resolve_hamiltonian(cfg["hamiltonian"])
    else:
        ham = random_hamiltonian(4, int(cfg["random_terms"]), np.random.default_rng(args.seed))
    basis = build_basis(ham.L, cfg["particles"])
    h = ham.dense(basis)
    total = float(cfg["time"])
    exact = expm(-1j * total * h)
    rows = []
    for dt in cfg["dts"]:
        steps = int(round(total / dt))
        if steps < 1 or abs(steps * dt - total) > 1e-9:
            raise UsageError(f"time {total} is not a whole number of steps of {dt}")
        u = np.linalg.matrix_power(trotter_step(ham, dt).unitary(basis), steps)
        rows.append([dt, steps, float(np.linalg.norm(u - exact, 2))])
    errs = np.array([r[2] for r in rows])
    if np.all(errs < 1e-12):
        slope, ok = 0.0, True  # commuting terms: every step size is exact
    else:
        slope = float(np.polyfit(np.log([r[0] for r in rows]), np.log(errs), 1)[0])
        ok = abs(slope - 1.0) <= 0.2
    write_csv(out / "trotter.csv", ["dt", "steps", "error"], rows)
    print(f"trotter: log-log slope {slope:.4f}")
    return ok


def cmd_vqe(cfg, args, out: Path) -> bool:
    from .vqe import UCCAnsatz, noise_sweep, optimize, threshold_crossing

    ham = _resolve_hamiltonian(cfg["hamiltonian"])
    try:
        ansatz = UCCAnsatz.from_reference(cfg["reference"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if ansatz.L != ham.L:
        raise UsageError("reference length does not match the Hamiltonian's mode count")
    res = optimize(ham, ansatz, cfg["method"], int(cfg["max_evaluations"]), int(cfg["restarts"]), seed=args.seed)
    ok = abs(res.delta_e) < CHEMICAL_ACCURACY
    write_csv(out / "vqe.csv", ["energy", "exact", "delta_e", "evaluations"],
              [[res.energy, res.exact, res.delta_e, res.evaluations]])
    write_csv(out / "vqe_params.csv", ["index", "theta"], list(enumerate(res.params)))
    print(f"vqe: E = {res.energy:.10f}, E0 = {res.exact:.10f}, dE = {res.delta_e:.3e}")
    sweep = cfg["sweep"]
    if sweep:
        stats = noise_sweep(
            ham, ansatz, res.params, sweep["delta_wr"], sweep["delta_r"], int(sweep["samples"]), args.seed,
            delta_z=sweep.get("delta_z"), workers=args.workers,
        )
        write_csv(out / "noise_sweep.csv", ["delta_wr", "delta_r", "mean_dE", "stderr", "n"],
                  [[s.delta_wr, s.delta_r, s.mean_de, s.stderr, s.n] for s in stats])
        cross = threshold_crossing(stats, CHEMICAL_ACCURACY)
        if cross is None:
            print("vqe: no grid cell exceeds chemical accuracy")
        else:
            print(f"vqe: chemical accuracy first lost at delta_wr={cross.delta_wr}, delta_r={cross.delta_r}")
    return ok


def cmd_lgt(cfg, args, out: Path) -> bool:
    from .fock import build_basis
    from .gates import register_unitary
    from .hamiltonian import gauss_operator, lgt_dense, parse_lattice, single_plaquette
    from .trotter import lgt_trotter_gates

    couplings = {k: float(cfg[k]) for k in ("lambda_e", "lambda_b", "lambda_j", "lambda_m")}
    try:
        if cfg["lattice"]:
            model = parse_lattice(Path(cfg["lattice"]).read_text(), **couplings)
        else:
            model = single_plaquette(**couplings)
    except FileNotFoundError:
        raise UsageError(f"lattice file {cfg['lattice']} not found") from None
    except ValueError as exc:
        raise UsageError(f"bad lattice: {exc}") from None
    particles = cfg["particles"]
    if particles is not None and particles % 2:
        # the Gauss operators multiply to (-1)^N, so odd N has no all-+1 sector
        raise UsageError("lgt needs an even particle number for the all-+1 Gauss sector")
    basis = build_basis(model.n_sites, particles)
    step = register_unitary(lgt_trotter_gates(model, float(cfg["dt"])), model.kinds, basis)
    gauss = [gauss_operator(model, basis, x) for x in range(model.n_sites)]
    h = lgt_dense(model, basis)
    comm = max(float(np.linalg.norm(h @ v - v @ h, 2)) for v in gauss)
    # start in a common +1 eigenstate of every Gauss operator: project a fixed product state
    vec = np.zeros(step.shape[0], dtype=np.complex128)
    vec[0] = 1.0
    for v in gauss:
        vec = 0.5 * (vec + v @ vec)
    if np.linalg.norm(vec) < 1e-12:
        raise UsageError("could not prepare a Gauss-law eigenstate in this sector")
    vec /= np.linalg.norm(vec)
    start = np.array([np.vdot(vec, v @ vec).real for v in gauss])
    rows = []
    worst = 0.0
    for n in range(1, int(cfg["steps"]) + 1):
        vec = step @ vec
        vals = np.array([np.vdot(vec, v @ vec).real for v in gauss])
        drift = float(np.max(np.abs(vals - start)))
        worst = max(worst, drift)
        rows.append([n, *vals, drift])
    write_csv(out / "lgt.csv", ["step", *[f"gauss_{x}" for x in range(model.n_sites)], "max_drift"], rows)
    tol = float(cfg["tolerance"])
    print(f"lgt: max Gauss-law drift {worst:.3e}, max |[H, V_x]| {comm:.3e}")
    return worst < tol and comm < 1e-12


def cmd_qpe(cfg, args, out: Path) -> bool:
    from .fock import StateVector, build_basis, ground_state
    from .gates import gate_unitary, number_gate, tunneling_gate
    from .linalg import circular_distance
    from .qpe import iterative_qpe

    bits = int(cfg["bits"])
    if bits < 1:
        raise UsageError("qpe needs at least one bit")
    rows = []
    ok = True
    for n, case in enumerate(cfg["cases"]):
        kind = case.get("kind")
        if kind == "number":
            basis = build_basis(1, 1)
            gates = [number_gate(0, float(case["theta"]))]
            state = StateVector.from_occupation(basis, "1")
        elif kind == "tunneling":
            basis = build_basis(2, 1)
            gates = [tunneling_gate(0, 1, *map(float, case["theta"]))]
            # lowest eigenvector of the generator
            u = gate_unitary(gates, basis)
            _, vec = ground_state(1j * (u - u.conj().T) / 2)
            state = StateVector(basis, vec)
        else:
            raise UsageError(f"qpe case {n}: unknown kind {kind!r}")
        u = gate_unitary(gates, basis)
        exact = float((-np.angle(np.vdot(state.amplitudes, u @ state.amplitudes)) / (2 * math.pi)) % 1.0)
        res = iterative_qpe(gates, state, bits)
        err = circular_distance(res.phase, exact)
        good = err <= 2.0 ** -bits
        ok &= good
        rows.append([n, kind, bits, "".join(map(str, res.bits)), res.phase, exact, err, res.min_confidence, good])
    write_csv(out / "qpe.csv", ["case", "kind", "bits", "digits", "estimate", "exact", "error", "min_confidence", "pass"], rows)
    print(f"qpe: {sum(r[-1] for r in rows)}/{len(rows)} cases within 2^-{bits}")
    return ok


def _echo_seed(args):
    cfg, seed = args
    from .echo import run_echo

    common = dict(L=int(cfg["L"]), N=int(cfg["N"]), J=float(cfg["J"]), tau=float(cfg["tau"]),
                  sigma_theta=float(cfg["sigma_theta"]), horizon=int(cfg["horizon"]), seed=seed,
                  threshold=float(cfg["threshold"]), disorder_units=cfg["disorder_units"])
    none = run_echo(strategy="none", **common)
    echo = run_echo(strategy=cfg["strategy"], **common)
    return none, echo


def cmd_echo(cfg, args, out: Path) -> bool:
    if int(cfg["N"]) > int(cfg["L"]) or int(cfg["N"]) < 1:
        raise UsageError(f"need 1 <= N <= L, got N={cfg['N']}, L={cfg['L']}")
    if not 0 < float(cfg["threshold"]) < 1:
        raise UsageError("threshold must lie in (0, 1)")
    seeds = [args.seed + k for k in range(int(cfg["seeds"]))]
    tasks = [(cfg, s) for s in seeds]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            runs = list(pool.map(_echo_seed, tasks))
    else:
        runs = [_echo_seed(t) for t in tasks]
    none0, echo0 = runs[0]
    write_csv(out / "echo.csv", ["round", "time", "fidelity_none", "fidelity_echo"],
              [[t, (t + 1) * none0.tau, a, b] for t, (a, b) in enumerate(zip(none0.fidelity, echo0.fidelity))])
    summary = []
    for s, (none, echo) in zip(seeds, runs):
        ratio = echo.useful_rounds / max(none.useful_rounds, 1)
        summary.append([s, none.useful_rounds, echo.useful_rounds, echo.censored, ratio])
    write_csv(out / "echo_summary.csv", ["seed", "rounds_none", "rounds_echo", "echo_censored", "ratio"], summary)
    if float(cfg["sigma_theta"]) == 0:
        flat = all(np.all(np.abs(r.fidelity - 1) < 1e-9) for pair in runs for r in pair)
        print(f"echo: zero disorder, fidelity flat: {flat}")
        return flat
    median = float(np.median([r[-1] for r in summary]))
    print(f"echo: median useful-time ratio {median:.2f} (threshold {cfg['min_ratio']})")
    return median >= float(cfg["min_ratio"])


def cmd_noise_budget(cfg, args, out: Path) -> bool:
    from .noise import dephasing_time_estimate, motion_budget, rydberg_heating_probability

    for key in DEFAULTS["noise-budget"]:
        if float(cfg[key]) < 0:
            raise UsageError(f"{key} must be non-negative")
    heat = rydberg_heating_probability(2 * math.pi * float(cfg["omega_hz"]), float(cfg["gate_time_s"]))
    t2 = dephasing_time_estimate(float(cfg["depth_hz"]), float(cfg["relative_sigma"]))
    total, moves = motion_budget(float(cfg["move_time_s"]), int(cfg["operations"]), t2)
    rows = [
        ["heating_probability", heat, "< 1e-4", heat < 1e-4],
        ["t2_star_s", t2, "1e-3 .. 3e-3", 1e-3 <= t2 <= 3e-3],
        ["total_move_time_s", total, "~0.5", abs(total - 0.5) < 1e-9],
        ["moves_within_t2", moves, "~4", moves is not None and 2 <= moves <= 6],
    ]
    write_csv(out / "budget.csv", ["quantity", "value", "reference", "pass"], rows)
    for r in rows:
        print(f"noise-budget: {r[0]} = {r[1]:.4g} ({'ok' if r[3] else 'outside reference'})")
    return all(r[3] for r in rows)


COMMANDS = {
    "verify-decomp": cmd_verify_decomp,
    "trotter": cmd_trotter,
    "vqe": cmd_vqe,
    "lgt": cmd_lgt,
    "qpe": cmd_qpe,
    "echo": cmd_echo,
    "noise-budget": cmd_noise_budget,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermiproc", description="Fermionic tweezer-processor emulator experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file (version 1)")
        s.add_argument("--seed", type=int, help="64-bit seed (required for stochastic runs)")
        s.add_argument("--out", default="results", help="output directory for CSV files")
        s.add_argument("--workers", type=int, default=1, help="worker processes for independent tasks")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in STOCHASTIC and args.seed is None:
            raise UsageError(f"{args.command} needs --seed")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        cfg = load_config(args.config, args.command)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        ok = COMMANDS[args.command](cfg, args, out)
    except UsageError as exc:
        print(f"fermiproc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
