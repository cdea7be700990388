"""Command-line front end.

Every subcommand reads one JSON config (``--config``) and writes its
outputs into a directory (``--out``). Configs carry ``"schema": 1``, a
``model`` block with :class:`~cavityqed.model.ModelParams` fields and a
``task`` block specific to the subcommand; unknown keys are rejected.

Exit codes: 0 success, 2 config error, 3 numerical guard, 4 I/O error.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import AlgebraKind
from .errors import AdmissibilityError, ConfigError, ConvergenceError, StepSizeError
from .model import (
    LAMBDAS,
    ModelParams,
    dressed_frame,
    e_delta,
    nist_constant_offset,
    nist_default_block,
    nist_equivalence,
)
from .propagator import (
    compare_rwa,
    coefficient_levels,
    evolve_exact,
    extract_coefficients,
    interaction_state,
    min_steps,
)
from .rwa import (
    Family,
    PulseTarget,
    ResonanceSpec,
    coefficient_labels,
    coupled_positions,
    default_alphas,
    rabi_solution,
    rabi_value,
    resonance_condition_value,
    solve_resonance,
)

log = logging.getLogger("cavityqed")

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_IO = 0, 2, 3, 4

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_LEVEL = {"type": "integer", "minimum": 0}
_FAMILY = {"enum": [f.value for f in Family]}

MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["N", "K", "J"]},
        "bargmann_k": _POS,
        "spin_j": _POS,
        "omega": _POS,
        "g1": _NONNEG,
        "g2": _NONNEG,
        "omega_E": _POS,
        "phi": _NUM,
        "delta": _NUM,
        "dim": {"type": "integer", "minimum": 2},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "K"}}}, "then": {"required": ["bargmann_k"]}},
        {"if": {"properties": {"kind": {"const": "J"}}}, "then": {"required": ["spin_j"]}},
        {"if": {"properties": {"kind": {"enum": ["N", "K"]}}}, "then": {"required": ["dim"]}},
    ],
}

_RESONANCE_PICK = {
    "type": "object",
    "additionalProperties": False,
    "required": ["family", "alpha", "n"],
    "properties": {
        "family": _FAMILY,
        "alpha": {"type": "integer"},
        "m": _LEVEL,
        "n": _LEVEL,
        "root_index": {"type": "integer"},
        "omega_E": _POS,
        "window": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
        "grid_points": {"type": "integer", "minimum": 2},
    },
}

TASK_SCHEMAS = {
    "spectrum": {
        "type": "object",
        "additionalProperties": False,
        "properties": {"levels": {"type": "integer", "minimum": 1}},
    },
    "resonance": {
        "type": "object",
        "additionalProperties": False,
        "required": ["families", "n"],
        "properties": {
            "families": {"type": "array", "items": _FAMILY, "minItems": 1},
            "alphas": {"type": "array", "items": {"type": "integer"}},
            "max_abs_alpha": {"type": "integer", "minimum": 1},
            "m": _LEVEL,
            "n": _LEVEL,
            "window": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
            "grid_points": {"type": "integer", "minimum": 2},
        },
    },
    "simulate": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "resonance": _RESONANCE_PICK,
            "target": {"enum": [t.value for t in PulseTarget]},
            "t_final": _POS,
            "steps": {"type": "integer", "minimum": 1},
            "sample_every": {"type": "integer", "minimum": 1},
            "initial": {
                "type": "array",
                "prefixItems": [_LEVEL, {"enum": [1, -1]}],
                "minItems": 2,
                "maxItems": 2,
            },
            "levels": {"type": "integer", "minimum": 1},
        },
    },
    "sweep": {
        "type": "object",
        "additionalProperties": False,
        "required": ["axis", "start", "stop", "points", "family", "alpha", "n"],
        "properties": {
            "axis": {"enum": ["gamma", "omega_E", "g2", "delta"]},
            "start": _NUM,
            "stop": _NUM,
            "points": {"type": "integer", "minimum": 2},
            "family": _FAMILY,
            "alpha": {"type": "integer"},
            "m": _LEVEL,
            "n": _LEVEL,
            "lam": {"enum": [1, -1]},
        },
    },
    "nist-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["omega0", "g", "delta", "etas", "dims"],
        "properties": {
            "omega0": _NUM,
            "g": _NUM,
            "delta": _NUM,
            "etas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 0.5}, "minItems": 1},
            "dims": {"type": "array", "items": {"type": "integer", "minimum": 64}, "minItems": 1},
            "block": {"type": "integer", "minimum": 1},
        },
    },
}


def config_schema(command: str) -> dict:
    needs_model = command != "nist-check"
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "additionalProperties": False,
        "required": ["schema", "task"] + (["model"] if needs_model else []),
        "properties": {
            "schema": {"const": 1},
            "model": MODEL_SCHEMA,
            "task": TASK_SCHEMAS[command],
        },
    }


def load_config(path: str | os.PathLike, command: str) -> dict:
    """Read and validate a config file; raises ConfigError."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    validator = jsonschema.Draft202012Validator(config_schema(command))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        where = "/".join(str(p) for p in errors[0].absolute_path) or "<root>"
        raise ConfigError(f"{path}: {where}: {errors[0].message}")
    return cfg


def build_params(model: dict) -> ModelParams:
    kind = model["kind"]
    if kind == "N":
        alg = AlgebraKind.heisenberg()
    elif kind == "K":
        alg = AlgebraKind.su11(model["bargmann_k"])
    else:
        alg = AlgebraKind.su2(model["spin_j"])
    fields = {k: model[k] for k in ("omega", "g1", "g2", "omega_E", "phi", "delta", "dim") if k in model}
    try:
        return ModelParams(alg, **fields)
    except AdmissibilityError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# --- output helpers -------------------------------------------------------------


def fmt(v) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, removed on failure."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _complex_pair(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _model_dict(p: ModelParams) -> dict:
    k = p.kind
    return {
        "kind": k.kind.value,
        "bargmann_k": k.bargmann_k,
        "spin_j": k.spin_j,
        "omega": p.omega,
        "g1": p.g1,
        "g2": p.g2,
        "omega_E": p.omega_E,
        "phi": p.phi,
        "delta": p.delta,
        "dim": p.dim,
    }


# --- commands --------------------------------------------------------------------


def cmd_spectrum(cfg: dict, out: Path) -> Path:
    """Dressed spectrum table (n, lam, E_n, E_delta, diagonal element) to spectrum.csv."""
    p = build_params(cfg["model"])
    frame = dressed_frame(p)
    n_lev = coefficient_levels(frame)
    levels = cfg["task"].get("levels", n_lev)
    if levels > n_lev:
        raise ConvergenceError(f"only {n_lev} levels are converged at dim={p.dim}, asked for {levels}")
    rows = [
        (n, lam, frame.energies[n], e_delta(frame, p, n, lam), frame.table.diagonal(n))
        for n in range(levels)
        for lam in LAMBDAS
    ]
    path = out / "spectrum.csv"
    write_atomic(path, csv_text(["n", "lam", "E_n", "E_delta", "diag_element"], rows))
    return path


RESONANCE_HEADER = ["family", "alpha", "m", "n", "omega_E", "gamma", "residual", "rabi_re", "rabi_im"]


def cmd_resonance(cfg: dict, out: Path) -> Path:
    """All resonance roots with their Rabi frequencies to resonance.csv."""
    p = build_params(cfg["model"])
    frame = dressed_frame(p)
    task = cfg["task"]
    kw = {k: task[k] for k in ("window", "grid_points") if k in task}
    if "window" in kw:
        kw["window"] = tuple(kw["window"])
    rows = []
    for fam in map(Family, task["families"]):
        m = task.get("m") if fam.is_two_qubit else None
        alphas = task.get("alphas") or default_alphas(fam, task.get("max_abs_alpha", 5))
        for a in alphas:
            if fam is Family.ONE_QUBIT and a == 0:
                continue
            for s in solve_resonance(fam, p, frame, a, m, task["n"], **kw):
                q = p.replace(omega_E=s.omega_E)
                r = rabi_value(fam, q, frame, a, m, s.n)
                rows.append((fam.value, a, "" if m is None else m, s.n, s.omega_E, q.gamma, s.residual, r.real, r.imag))
    path = out / "resonance.csv"
    write_atomic(path, csv_text(RESONANCE_HEADER, rows))
    return path


def pick_resonance(pick: dict, p: ModelParams, frame):
    """Resolve the ``resonance`` block of a simulate config to a spec."""
    fam = Family(pick["family"])
    m = pick.get("m") if fam.is_two_qubit else None
    if "omega_E" in pick:
        w = pick["omega_E"]
        res = abs(resonance_condition_value(fam, p, frame, pick["alpha"], m, pick["n"], w))
        return ResonanceSpec(fam, pick["alpha"], pick["n"], w, res, m)
    kw = {k: pick[k] for k in ("grid_points",) if k in pick}
    if "window" in pick:
        kw["window"] = tuple(pick["window"])
    roots = solve_resonance(fam, p, frame, pick["alpha"], m, pick["n"], **kw)
    if not roots:
        raise ConvergenceError(
            f"no {fam.value} alpha={pick['alpha']} resonance in the scan window; nothing to simulate"
        )
    idx = pick.get("root_index", 0)
    if not -len(roots) <= idx < len(roots):
        raise ConfigError(f"root_index {idx} out of range ({len(roots)} roots found)")
    return roots[idx]


def cmd_simulate(cfg: dict, out: Path) -> list[Path]:
    """Exact run, optionally against the rotating-wave solution of one resonance."""
    p = build_params(cfg["model"])
    frame = dressed_frame(p)
    task = cfg["task"]
    summary = {}
    rabi = None
    if "resonance" in task:
        spec = pick_resonance(task["resonance"], p, frame)
        p = p.replace(omega_E=spec.omega_E)
        rabi = rabi_solution(p, frame, spec, task.get("target", "PiPulse"))
        summary["resonance"] = {
            "family": spec.family.value,
            "alpha": spec.alpha,
            "m": spec.m,
            "n": spec.n,
            "omega_E": spec.omega_E,
            "residual": spec.residual,
            "rabi": _complex_pair(rabi.r),
            "pulse_duration": rabi.duration,
            "subspace": [list(x) for x in rabi.subspace],
            "description": rabi.describe(),
        }
    if "t_final" in task:
        t_final = task["t_final"]
    elif rabi is not None and rabi.r != 0:
        t_final = rabi.duration
    else:
        raise ConfigError("t_final is required when no nonzero Rabi frequency fixes the pulse length")
    every = task.get("sample_every", 1)
    steps = task.get("steps") or min_steps(p, t_final)
    steps += (-steps) % every
    if "initial" in task:
        n0, s0 = task["initial"]
    elif rabi is not None:
        n0, s0 = rabi.labels[coupled_positions(rabi.family)[0]]
    else:
        n0, s0 = 0, 1
    n_lev = coefficient_levels(frame)
    if n0 >= n_lev:
        raise ConvergenceError(f"initial level {n0} is outside the {n_lev} trustworthy levels")
    psi0 = interaction_state(p, frame, n0, s0)
    traj = evolve_exact(p, psi0, t_final, steps, sample_every=every)
    table = extract_coefficients(traj, p, frame)
    traj = traj.with_coefficients(table)
    levels = min(task.get("levels", 4), n_lev)
    labels = [(n, s) for n in range(levels) for s in LAMBDAS]
    if rabi is not None:
        for lab in coefficient_labels(rabi.spec):
            if lab not in labels:
                labels.append(lab)
    header = ["t"] + [f"p_{n}_{'p' if s == 1 else 'm'}" for n, s in labels] + ["p_total", "norm"]
    norms = traj.norms[::every]
    pops = [table.population(n, s) for n, s in labels]
    total = table.total_population()
    rows = [[t] + [pp[i] for pp in pops] + [total[i], norms[i]] for i, t in enumerate(traj.times)]
    summary.update(
        {
            "model": _model_dict(p),
            "t_final": t_final,
            "steps": steps,
            "dt": traj.dt,
            "initial": [n0, s0],
            "max_norm_drift": traj.max_norm_drift,
        }
    )
    if rabi is not None:
        summary["metrics"] = compare_rwa(traj, rabi).as_dict()
    p1, p2 = out / "trajectory.csv", out / "summary.json"
    write_atomic(p1, csv_text(header, rows))
    write_atomic(p2, json_text(summary))
    return [p1, p2]


SWEEP_HEADER = ["value", "gamma", "rabi_re", "rabi_im", "E_delta", "residual"]


def sweep_point(args):
    """One sweep row; module level so worker processes can import it."""
    model, task, value = args
    p = build_params(model)
    axis = task["axis"]
    if axis == "gamma":
        p = p.replace(g2=0.5 * value * p.omega_E)
    else:
        p = p.replace(**{axis: value})
    frame = _sweep_frame(p)
    fam = Family(task["family"])
    m = task.get("m") if fam.is_two_qubit else None
    a, n = task["alpha"], task["n"]
    r = rabi_value(fam, p, frame, a, m, n)
    ed = e_delta(frame, p, n, task.get("lam", 1))
    res = resonance_condition_value(fam, p, frame, a, m, n, p.omega_E)
    return (value, p.gamma, r.real, r.imag, ed, res)


_FRAMES: dict = {}


def _sweep_frame(p: ModelParams):
    # the frame depends only on (kind, omega, g1, dim); reuse it across points
    key = p.frame_key()
    if key not in _FRAMES:
        _FRAMES[key] = dressed_frame(p)
    return _FRAMES[key]


def sweep_grid(task: dict) -> np.ndarray:
    return np.linspace(task["start"], task["stop"], task["points"])


def cmd_sweep(cfg: dict, out: Path, workers: int | None = None) -> Path:
    """Rabi frequency and condition value along one parameter axis to sweep.csv."""
    task = cfg["task"]
    grid = sweep_grid(task)
    jobs = [(cfg["model"], task, float(v)) for v in grid]
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        rows = [sweep_point(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            # map keeps grid order whatever the completion order
            rows = list(pool.map(sweep_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    path = out / "sweep.csv"
    write_atomic(path, csv_text(SWEEP_HEADER, rows))
    return path


def cmd_nist_check(cfg: dict, out: Path) -> Path:
    """Trapped-ion equivalence check to nist_report.json."""
    t = cfg["task"]
    runs = []
    for eta in t["etas"]:
        prev = None
        for dim in t["dims"]:
            block = t.get("block") or nist_default_block(min(t["dims"]))
            res = nist_equivalence(t["omega0"], t["g"], t["delta"], eta, dim, block=block)
            runs.append(
                {
                    "eta": eta,
                    "dim": dim,
                    "block": block,
                    "residual": res,
                    "shrink_factor": (prev / res if res > 0 else math.inf) if prev is not None else None,
                }
            )
            prev = res
    report = {
        "omega0": t["omega0"],
        "g": t["g"],
        "delta": t["delta"],
        "constant_offset": {str(eta): nist_constant_offset(t["omega0"], eta) for eta in t["etas"]},
        "runs": runs,
    }
    path = out / "nist_report.json"
    write_atomic(path, json_text(report))
    return path


COMMANDS = {
    "spectrum": cmd_spectrum,
    "resonance": cmd_resonance,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "nist-check": cmd_nist_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cavityqed", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=(COMMANDS[name].__doc__ or name).split("\n")[0])
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", required=True, help="output directory")
        if name == "sweep":
            sp.add_argument("--workers", type=int, default=None, help="worker processes (default: CPUs)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    start = time.monotonic()
    try:
        cfg = load_config(args.config, args.command)
        out = Path(args.out)
        if args.command == "sweep":
            if args.workers is not None and args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            result = cmd_sweep(cfg, out, args.workers)
        else:
            result = COMMANDS[args.command](cfg, out)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepSizeError, ConvergenceError) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    paths = result if isinstance(result, list) else [result]
    for pth in paths:
        print(pth)
    log.info("%s finished in %.2f s", args.command, time.monotonic() - start)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
