"""Command-line interface.

Subcommands: gen-model, simulate, test-graph, bounds, experiment.  Exit
codes: 0 success/accept/pass, 1 statistical reject or suite failure, 2
usage or input errors, 3 size-guard rejection.  Every run writes a
manifest next to its outputs recording inputs, outputs, the configuration
hash, and wall-clock duration; output files themselves are byte-identical
across reruns with the same arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, _util, experiments
from .errors import ConfigurationError, DigInferError, DomainError, SizeGuardError
from .estimate import write_edge_stats_csv
from .graphtest import TestConfig, calibrate_threshold, graph_estimate, hypothesis_test, write_report_json
from .model import (
    build_random_model,
    dimensions,
    exact_directed_info,
    load_model,
    save_model,
)
from .rng import Stream
from .simulate import read_symbols_csv, simulate, write_path_csv
from .validation import check_symbol_array


def _parse_adjacency(spec, m, seed):
    """Adjacency from 'none', 'i>j,...', 'density=p', or 0/1 rows 'row;row;...'."""
    adj = np.zeros((m, m), dtype=bool)
    spec = spec.strip()
    if spec == "none":
        return adj
    if spec.startswith("density="):
        p = float(spec.split("=", 1)[1])
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"edge density must be in [0, 1], got {p}")
        stream = Stream(seed, 0xAD1)
        u = stream.uniforms(m * m).reshape(m, m)
        adj = u < p
        np.fill_diagonal(adj, False)
        return adj
    if ">" in spec:
        for part in spec.split(","):
            i, j = part.split(">")
            i, j = int(i), int(j)
            if i == j or not (0 <= i < m and 0 <= j < m):
                raise DomainError(f"invalid edge {part!r} for m={m}")
            adj[i, j] = True
        return adj
    rows = [r for r in spec.replace(" ", "").split(";") if r]
    if len(rows) != m:
        raise DomainError(f"adjacency matrix text must have {m} rows")
    for i, row in enumerate(rows):
        entries = row.split(",") if "," in row else list(row)
        if len(entries) != m:
            raise DomainError(f"adjacency row {i} must have {m} entries")
        for j, v in enumerate(entries):
            adj[i, j] = bool(int(v))
    np.fill_diagonal(adj, False)
    return adj


def _parse_matrix(spec, m):
    """0/1 matrix from '@file.json' or inline 'row;row;...' text."""
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            mat = np.asarray(json.load(fh))
    else:
        mat = _parse_adjacency(spec, m, seed=0)
    mat = np.asarray(mat).astype(bool)
    if mat.shape != (m, m):
        raise DomainError(f"hypothesis must be {m}x{m}")
    return mat


def _parse_grid(spec):
    spec = spec.strip()
    if ":" in spec:
        lo, hi, num = spec.split(":")
        return np.linspace(float(lo), float(hi), int(num)).tolist()
    return [float(v) for v in spec.split(",") if v]


def _parse_int_list(spec):
    return [int(v) for v in spec.split(",") if v]


def _write_manifest(out_paths, subcommand, payload, duration):
    target = Path(out_paths[0])
    manifest = {
        "subcommand": subcommand,
        "outputs": [str(p) for p in out_paths],
        "config_hash": _util.config_digest(payload),
        "tool_version": __version__,
        "duration_seconds": duration,
    }
    path = target.parent / (target.name + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_gen_model(args):
    started = time.monotonic()
    adj = _parse_adjacency(args.edges, args.m, args.seed)
    model = build_random_model(
        args.m, args.k, args.alphabet, adj, epsilon=args.epsilon, seed=args.seed
    )
    save_model(model, args.out)
    dims = model.dims()
    print(f"dimensions: r={dims.r} d={dims.d} d_prime={dims.d_prime} dof_null={dims.dof_null}")
    print("exact directed information (nats):")
    for i in range(args.m):
        for j in range(args.m):
            if i != j:
                print(f"  {i}->{j}: {_util.fmt9(exact_directed_info(model, i, j))}")
    payload = {
        "m": args.m,
        "k": args.k,
        "alphabet": args.alphabet,
        "edges": args.edges,
        "epsilon": args.epsilon,
        "seed": args.seed,
    }
    _write_manifest([args.out], "gen-model", payload, time.monotonic() - started)
    return 0


def _cmd_simulate(args):
    started = time.monotonic()
    model = load_model(args.model)
    path = simulate(model, args.n, burn_in=args.burn_in, seed=args.seed)
    write_path_csv(path, args.out)
    payload = {"model": args.model, "n": args.n, "burn_in": path.burn_in, "seed": args.seed}
    _write_manifest([args.out], "simulate", payload, time.monotonic() - started)
    print(f"wrote {path.n} steps of {path.m} nodes to {args.out}")
    return 0


def _cmd_test_graph(args):
    started = time.monotonic()
    if (args.threshold is None) == (args.alpha is None):
        raise DomainError("exactly one of --threshold / --alpha is required")
    symbols = read_symbols_csv(args.path)
    symbols, alphabet = check_symbol_array(symbols, alphabet_size=args.alphabet)
    m = symbols.shape[1]
    dims = dimensions(m, args.k, alphabet)
    if args.threshold is not None:
        if not args.threshold > 0:
            raise DomainError(f"threshold must be positive, got {args.threshold}")
        i_th = args.threshold
    else:
        i_th = calibrate_threshold(dims, args.alpha, single_edge=args.single_edge)
    config = TestConfig(i_th=i_th, k=args.k, dims=dims)
    if args.hypothesis is not None:
        report = hypothesis_test(symbols, config, _parse_matrix(args.hypothesis, m))
    else:
        report = graph_estimate(symbols, config)
    write_report_json(report, args.out, dims=dims)
    edges_csv = str(Path(args.out).with_suffix("")) + ".edges.csv"
    write_edge_stats_csv(report.per_edge, edges_csv)
    payload = {
        "path": args.path,
        "k": args.k,
        "threshold": _util.fmt9(i_th),
        "alphabet": alphabet,
        "hypothesis": args.hypothesis,
    }
    _write_manifest([args.out, edges_csv], "test-graph", payload, time.monotonic() - started)
    print(f"threshold {_util.fmt9(i_th)}; estimated adjacency:")
    for row in report.estimated_adjacency.astype(int).tolist():
        print("  " + " ".join(str(v) for v in row))
    if report.accepted is not None:
        print(f"hypothesis {'accepted' if report.accepted else 'rejected'}")
        return 0 if report.accepted else 1
    return 0


def _cmd_bounds(args):
    started = time.monotonic()
    dims = dimensions(args.m, args.k, args.alphabet)
    grid = _parse_grid(args.i_th_grid) if args.i_th_grid else np.linspace(1.0, 2.0 * dims.r, 200).tolist()
    n0_list = _parse_int_list(args.n0_list)
    rows = experiments.figure1_curves(dims, grid, n0_list)
    experiments.write_curves_csv(rows, args.out)
    payload = {
        "m": args.m,
        "k": args.k,
        "alphabet": args.alphabet,
        "grid": [_util.fmt9(v) for v in grid],
        "n0_list": n0_list,
    }
    _write_manifest([args.out], "bounds", payload, time.monotonic() - started)
    print(f"wrote {len(rows)} bound rows to {args.out}")
    return 0


def _load_experiment_config(suite, config_path):
    config = experiments.default_config(suite)
    if config_path is None:
        return config
    with open(config_path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    unknown = set(data) - set(config.__dataclass_fields__)
    if unknown:
        raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
    for key in ("n_grid", "edge", "null_edge", "true_edge", "sd_ratio_band"):
        if key in data and data[key] is not None:
            data[key] = tuple(data[key])
    return replace(config, **data)


def _cmd_experiment(args):
    started = time.monotonic()
    if args.suite not in experiments.SUITE_NAMES:
        raise DomainError(f"unknown suite {args.suite!r}; expected one of {experiments.SUITE_NAMES}")
    config = _load_experiment_config(args.suite, args.config)
    result = experiments.run_suite(config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.json"
    experiments.write_result_csv(result, csv_path)
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(experiments.result_summary_dict(result), fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    _write_manifest(
        [csv_path, summary_path],
        "experiment",
        {"suite": args.suite, "config_hash": result.config_hash},
        time.monotonic() - started,
    )
    print(f"suite {args.suite}: {'PASS' if result.passed else 'FAIL'}")
    for key, value in result.details.items():
        print(f"  {key}: {value}")
    return 0 if result.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="diginfer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-model", help="construct a random model with a prescribed adjacency")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--edges", default="none", help="'none', 'i>j,...', 'density=p', or '010;001;...'")
    p.add_argument("--epsilon", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen_model)

    p = sub.add_parser("simulate", help="draw a sample path from a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=None, dest="burn_in")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("test-graph", help="estimate/test the adjacency of a path CSV")
    p.add_argument("--path", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--single-edge", action="store_true", dest="single_edge",
                   help="calibrate --alpha with the single-edge null degrees of freedom")
    p.add_argument("--alphabet", type=int, default=None)
    p.add_argument("--hypothesis", default=None, help="'@file.json' or inline '010;000;...'")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_test_graph)

    p = sub.add_parser("bounds", help="emit false-alarm/detection bound curves")
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--i-th-grid", default=None, dest="i_th_grid", help="'lo:hi:num' or 'v1,v2,...'")
    p.add_argument("--n0-list", default="4,8,12", dest="n0_list")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("experiment", help="run a named validation suite")
    p.add_argument("suite", choices=list(experiments.SUITE_NAMES))
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.set_defaults(fn=_cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DigInferError, FileNotFoundError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
