"""Command-line entry point: ``subqchem {evolve,lcu-check,prep-prob,estimate}``.

Results go to ``--out`` or stdout; a one-line JSON run manifest goes to stderr.
Exit codes: 0 ok, 2 invalid input, 3 tolerance breach, 64 unknown subcommand.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from typing import Callable, Optional

import numpy as np

from . import __version__
from .dyson import evolve_state, exact_propagator, split_from_cell
from .estimator import estimate
from .hamiltonian import FirstQuantizedBasis, antisymmetric_projector, as_dense, build_U, build_V
from .lattice import CellError, cell_to_dict, load_cell
from .lcu import lambda_parts, reconstruct
from .momentum_prep import fig1_rows

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE, EXIT_USAGE = 0, 2, 3, 64

SUBCOMMANDS = ("evolve", "lcu-check", "prep-prob", "estimate")


class InputError(Exception):
    pass


def dumps(obj) -> str:
    """Canonical JSON; floats use shortest round-trip ``repr``."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _read_cell(path: str):
    try:
        return load_cell(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except CellError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _parse_state(basis: FirstQuantizedBasis, index: Optional[int], tuple_text: Optional[str]) -> np.ndarray:
    psi = np.zeros(basis.dim, dtype=complex)
    if index is not None:
        if not 0 <= index < basis.dim:
            raise InputError(f"state index {index} outside [0, {basis.dim})")
        psi[index] = 1.0
        return psi
    try:
        regs = [tuple(int(c) for c in part.split(",")) for part in tuple_text.split(";")]
    except ValueError as exc:
        raise InputError(f"cannot parse state tuple {tuple_text!r}") from exc
    if len(regs) != basis.eta or any(len(r) != 3 for r in regs):
        raise InputError(f"state tuple needs {basis.eta} momentum triples")
    g = basis.cell.g
    if any(abs(c) > g for r in regs for c in r):
        raise InputError(f"state momenta must lie in [-{g}, {g}]")
    psi[basis.index(regs)] = 1.0
    psi = as_dense(antisymmetric_projector(basis)) @ psi
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InputError("antisymmetrized state vanishes (repeated momenta)")
    return psi / norm


def cmd_evolve(args) -> tuple[str, int, dict]:
    cell = _read_cell(args.cell)
    if not 0 < args.epsilon < 1:
        raise InputError("--epsilon must lie in (0, 1)")
    if args.time < 0:
        raise InputError("--time must be non-negative")
    basis = FirstQuantizedBasis(cell)
    psi0 = _parse_state(basis, args.state_index, args.state_tuple)
    split = split_from_cell(cell)
    psi, plan = evolve_state(split, args.time, args.epsilon, psi0)
    summary = {
        "error_bound": args.epsilon,
        "segments": plan.segments,
        "K": plan.K,
        "quad_points": plan.quad_points,
        "lambda_B": split.lambda_B,
    }
    code = EXIT_OK
    if args.check:
        exact = exact_propagator(split, args.time) @ psi0
        err = float(np.linalg.norm(psi - exact))
        summary["measured_error"] = err
        if err > args.epsilon:
            code = EXIT_TOLERANCE
    rows = [[i, psi[i].real, psi[i].imag] for i in range(basis.dim)]
    return _csv(["index", "re", "im"], rows), code, summary


def cmd_lcu_check(args) -> tuple[str, int, dict]:
    cell = _read_cell(args.cell)
    basis = FirstQuantizedBasis(cell)
    if basis.dim > 4096:
        raise InputError(f"dimension {basis.dim} exceeds the dense limit 4096")
    recon, shift = reconstruct(cell)
    target = as_dense(build_U(basis) + build_V(basis)) + shift * np.eye(basis.dim)
    resid = float(np.max(np.abs(recon - target)))
    parts = lambda_parts(cell)
    out = {
        "lambda": parts["lambda"],
        "lambda_U": parts["lambda_U"],
        "lambda_V": parts["lambda_V"],
        "lambda_without_self_pairs": parts["lambda_without_self_pairs"],
        "shift": shift,
        "max_residual": resid,
        "dimension": basis.dim,
    }
    code = EXIT_OK if resid <= args.tol else EXIT_TOLERANCE
    return dumps(out) + "\n", code, {}


def cmd_prep_prob(args) -> tuple[str, int, dict]:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise InputError("need 2 <= --n-min <= --n-max")
    if args.M is not None and (args.M < 2 or args.M & (args.M - 1)):
        raise InputError("--M must be a power of two >= 2")
    rows = fig1_rows(args.n_max, args.n_min, args.M)
    header = ["n", "P_n", "amplified_failure"] + (["P_n_M"] if args.M is not None else [])
    return _csv(header, [[r[h] for h in header] for r in rows]), EXIT_OK, {}


_SWEEP_KEYS = {"eta": "eta", "n-orbitals": "N", "time": "t", "epsilon": "epsilon", "nuclei": "L"}


def cmd_estimate(args) -> tuple[str, int, dict]:
    base = {
        "eta": args.eta,
        "N": args.n_orbitals,
        "t": args.time,
        "epsilon": args.epsilon,
        "L": args.nuclei,
        "regular_lattice": args.regular_lattice,
        "volume_per_electron": args.volume_per_electron,
    }
    try:
        if args.csv_sweep is None:
            return dumps(estimate(**base).to_dict()) + "\n", EXIT_OK, {}
        key, _, values = args.csv_sweep.partition("=")
        if key not in _SWEEP_KEYS or not values:
            raise InputError(f"--csv-sweep expects one of {sorted(_SWEEP_KEYS)}=v1,v2,...")
        conv = int if key in ("eta", "nuclei") else float
        rows = []
        for raw in values.split(","):
            v = conv(float(raw)) if conv is int else conv(raw)
            r = estimate(**{**base, _SWEEP_KEYS[key]: v})
            rows.append([
                v, r.lambda_, r.segments, r.dyson_order, r.total_gates, r.logical_qubits,
                r.interaction_picture_powerlaw, r.comparison_second_quantized, r.qubitization_total,
            ])
        header = [
            key, "lambda", "segments", "dyson_order", "total_gates", "logical_qubits",
            "eta^(8/3)N^(1/3)", "N^(8/3)/eta^(2/3)", "qubitization_total",
        ]
        return _csv(header, rows), EXIT_OK, {}
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subqchem", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evolve", help="truncated Dyson evolution of a basis or antisymmetrized state")
    e.add_argument("--cell", required=True, help="cell JSON document")
    e.add_argument("--time", type=float, required=True)
    e.add_argument("--epsilon", type=float, default=1e-6)
    state = e.add_mutually_exclusive_group(required=True)
    state.add_argument("--state-index", type=int, help="computational basis index")
    state.add_argument("--state-tuple", help='register momenta, e.g. "0,0,0;1,0,0" (antisymmetrized)')
    e.add_argument("--check", action="store_true", help="compare against dense diagonalization")
    e.set_defaults(func=cmd_evolve)

    c = sub.add_parser("lcu-check", help="lambda and reconstruction residual of the U+V decomposition")
    c.add_argument("--cell", required=True)
    c.add_argument("--tol", type=float, default=1e-10)
    c.set_defaults(func=cmd_lcu_check)

    q = sub.add_parser("prep-prob", help="momentum-state preparation success table")
    q.add_argument("--n-min", type=int, default=2)
    q.add_argument("--n-max", type=int, default=12)
    q.add_argument("--M", type=int, default=None, help="also report finite-M success probability")
    q.set_defaults(func=cmd_prep_prob)

    s = sub.add_parser("estimate", help="closed-form resource estimate")
    s.add_argument("--eta", type=int, required=True)
    s.add_argument("--n-orbitals", type=float, required=True)
    s.add_argument("--time", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=1e-3)
    s.add_argument("--nuclei", type=int, default=0)
    s.add_argument("--regular-lattice", action="store_true")
    s.add_argument("--volume-per-electron", type=float, default=1.0)
    s.add_argument("--csv-sweep", default=None, metavar="PARAM=V1,V2,...")
    s.set_defaults(func=cmd_estimate)

    for sp_ in (e, c, q, s):
        sp_.add_argument("--out", default=None, help="output path (default stdout)")
    return p


def _manifest(command: str, args, extra: dict, wall: float) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    cell_path = getattr(args, "cell", None)
    if cell_path:
        try:
            cfg["cell_document"] = cell_to_dict(load_cell(cell_path))
        except Exception:
            pass
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return {
        "command": command,
        "config_hash": hashlib.sha256(canon.encode()).hexdigest(),
        "tool_version": __version__,
        "wall_time": wall,
        "threads": os.environ.get("SUBQCHEM_THREADS", "0"),
        **extra,
    }


def main(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is None and not any(a in ("-h", "--help", "--version") for a in argv) or (
        first is not None and first not in SUBCOMMANDS
    ):
        stderr.write(parser.format_usage())
        if first is not None:
            stderr.write(f"subqchem: unknown subcommand {first!r}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INVALID
    start = time.perf_counter()
    func: Callable = args.func
    try:
        text, code, extra = func(args)
    except InputError as exc:
        stderr.write(f"subqchem {args.command}: {exc}\n")
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    manifest = _manifest(args.command, args, extra, time.perf_counter() - start)
    stderr.write(json.dumps(manifest, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
