"""Command-line interface: JSON/CSV I/O around the library operations.

Exit codes: 0 success, 1 regression mismatch, 2 invalid input or I/O error.
The environment variable TROP_AMPERE_THREADS caps the numeric thread pools;
all randomness flows from the --seed flag, so outputs are reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _apply_thread_cap() -> None:
    cap = os.environ.get("TROP_AMPERE_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        from threadpoolctl import threadpool_limits

        threadpool_limits(int(cap))
    except Exception:
        pass  # env vars alone are a best-effort cap


class CliError(Exception):
    """Invalid input or I/O failure; maps to exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load_fn(path: str):
    from .cconvex import MaxAffineFn

    obj = _load_json(path)
    try:
        return MaxAffineFn.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid function file {path}: {exc}") from exc


def _load_measure(path: str):
    from .measures import measure_from_json

    obj = _load_json(path)
    try:
        return measure_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid measure file {path}: {exc}") from exc


def _load_points(path: str):
    """Query files: {"side": "A"|"B", "points": [[w0,...], ...]}."""
    from .geometry import BaryPoint

    obj = _load_json(path)
    try:
        side = obj["side"]
        return [BaryPoint.repaired(side, w) for w in obj["points"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid query file {path}: {exc}") from exc


def _backend(name: str) -> str:
    return {"exact": "exact", "mc": "monte-carlo", "monte-carlo": "monte-carlo"}[name]


def _cmd_solve(args) -> int:
    from .measures import AtomicMeasure
    from .solver import MassNormalizationError, SolveConfig, solve

    nu = _load_measure(args.target)
    if not isinstance(nu, AtomicMeasure):
        nu = nu.to_atoms(args.mc_samples // (nu.d + 2) or 128, seed=args.seed)
    if args.dim is not None and nu.d != args.dim:
        raise CliError(f"--dim {args.dim} does not match target dimension {nu.d}")
    cfg = SolveConfig(
        tol=args.tol,
        backend=_backend(args.backend),
        mc_samples=args.mc_samples,
        seed=args.seed,
        max_iter=args.max_iter,
    )
    try:
        res = solve(nu, cfg)
    except (MassNormalizationError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    _write_text(args.out, _dump_json(res.to_json()))
    if not res.converged:
        print("warning: iteration limit reached before convergence", file=sys.stderr)
        return 1
    return 0


def _cmd_ma(args) -> int:
    from .ma_operator import SymmetryError, trop_ma

    fn = _load_fn(args.fn)
    try:
        res = trop_ma(
            fn,
            backend=_backend(args.backend),
            mc_samples=args.mc_samples,
            seed=args.seed,
            allow_nonsymmetric=args.allow_nonsymmetric,
        )
    except SymmetryError as exc:
        raise CliError(str(exc)) from exc
    out = res.to_json()
    _write_text(args.out, _dump_json(out))
    return 0


def _cmd_ctransform(args) -> int:
    from .cconvex import ctransform_envelope, ctransform_exact, opposite

    fn = _load_fn(args.fn)
    result = {"fn": ctransform_exact(fn).to_json()}
    if args.queries:
        queries = _load_points(args.queries)
        for q in queries:
            if q.side != opposite(fn.side):
                raise CliError(
                    f"query side {q.side!r} must be opposite the function side"
                )
        result["queries"] = [q.to_json() for q in queries]
        result["values"] = [ctransform_envelope(fn, q) for q in queries]
    _write_text(args.out, _dump_json(result))
    return 0


def _cmd_eval(args) -> int:
    fn = _load_fn(args.fn)
    queries = _load_points(args.queries)
    for q in queries:
        if q.side != fn.side:
            raise CliError(f"query side {q.side!r} must match the function side")
    result = {
        "queries": [q.to_json() for q in queries],
        "values": [fn.value(q) for q in queries],
    }
    _write_text(args.out, _dump_json(result))
    return 0


def _cmd_cells(args) -> int:
    from .ma_operator import cells_from_weights

    atoms = _load_points(args.atoms)
    weights = _load_json(args.weights)
    if not isinstance(weights, list) or len(weights) != len(atoms):
        raise CliError("weights file must list one number per atom")
    try:
        complex_ = cells_from_weights(
            atoms,
            [float(w) for w in weights],
            backend=_backend(args.backend),
            mc_samples=args.mc_samples,
            seed=args.seed,
        )
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    _write_text(args.out, complex_.to_csv())
    return 0


def _cmd_examples(args) -> int:
    from .regression import format_table, run_examples

    try:
        rows = run_examples(name=args.name, dim=args.dim)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    print(format_table(rows))
    return 0 if all(r.ok for r in rows) else 1


def _cmd_export_plot(args) -> int:
    from .ma_operator import trop_ma

    fn = _load_fn(args.fn)
    if fn.d > 2:
        raise CliError("plot export supports d <= 2 only")
    res = trop_ma(
        fn,
        backend="exact",
        allow_nonsymmetric=args.allow_nonsymmetric,
    )
    prefix = args.out
    _write_text(prefix + "_cells.csv", res.cells.to_csv())
    _write_text(prefix + "_measure.csv", res.measure.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropma",
        description="Tropical Monge-Ampere calculus on the boundary of the "
        "polar simplex: c-transforms, cell masses, and the measure solver.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_backend(p):
        p.add_argument(
            "--backend", choices=["exact", "mc", "monte-carlo"], default="exact"
        )
        p.add_argument("--mc-samples", type=int, default=200_000)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="solve nu_psi = nu for a target measure")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--target", required=True, help="target measure JSON file")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=2000)
    add_backend(p)
    p.add_argument("--out", default=None, help="result JSON (default stdout)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("ma", help="Monge-Ampere measure of an envelope")
    p.add_argument("--fn", required=True, help="max-affine function JSON file")
    p.add_argument("--allow-nonsymmetric", action="store_true")
    add_backend(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_ma)

    p = sub.add_parser("ctransform", help="c-transform of a max-affine function")
    p.add_argument("--fn", required=True)
    p.add_argument("--queries", default=None, help="query points JSON file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_ctransform)

    p = sub.add_parser("eval", help="evaluate a max-affine function at points")
    p.add_argument("--fn", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("cells", help="cell decomposition for atoms + weights")
    p.add_argument("--atoms", required=True, help="atom points JSON file")
    p.add_argument("--weights", required=True, help="JSON list of weights")
    add_backend(p)
    p.add_argument("--out", default=None, help="CSV output (default stdout)")
    p.set_defaults(func=_cmd_cells)

    p = sub.add_parser(
        "paper-examples", help="run the built-in closed-form regression examples"
    )
    p.add_argument("--name", default=None)
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(func=_cmd_examples)

    p = sub.add_parser(
        "export-plot", help="emit d<=2 cell polygons and measure atoms as CSV"
    )
    p.add_argument("--fn", required=True)
    p.add_argument("--allow-nonsymmetric", action="store_true")
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=_cmd_export_plot)

    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
