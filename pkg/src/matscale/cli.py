"""matscale command line: curate, similarity, ce-fit, complexity, estimate.

Every subcommand prints a machine-readable JSON summary to stdout and
writes its file outputs atomically. Exit codes: 0 success, 1 module
error, 2 configuration error (bad flags, missing inputs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import complexity as cx
from . import costs, curation, io, regression, spectra
from .lattice import Cluster, SymmetryGroup, correlation_matrix
from .polyfeatures import enumerate_monomials, feature_matrix


class ConfigError(Exception):
    pass


def _parse_fractions(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--split needs three comma-separated fractions: {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad fraction in --split: {text!r}") from None


def _parse_hist_spec(text: str) -> tuple[str, float, float, int]:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--hist expects property:lo:hi:nbins, got {text!r}")
    name, lo, hi, nbins = parts
    try:
        return name, float(lo), float(hi), int(nbins)
    except ValueError:
        raise ConfigError(f"bad --hist values: {text!r}") from None


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"input not found: {path}")
    return p


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_curate(args):
    input_path = _require_file(args.input)
    other_path = _require_file(args.other) if args.other else None
    fractions = _parse_fractions(args.split)
    hist_specs = [_parse_hist_spec(h) for h in args.hist or []]
    outdir = _outdir(args)

    entries = io.read_structures(input_path)
    summary = {"input": str(input_path), "n_entries": len(entries), "outputs": []}

    shared = None
    if other_path is not None:
        other = io.read_structures(other_path)
        n_a, n_b, common = curation.dataset_overlap(entries, other)
        shared = common
        summary["other"] = str(other_path)
        summary["unique_ids_input"] = n_a
        summary["unique_ids_other"] = n_b
        summary["n_common_ids"] = len(common)

    datasets = [(input_path, entries)]
    if other_path is not None:
        datasets.append((other_path, other))

    split_counts = {}
    for path, data in datasets:
        assignment = curation.grouped_split(data, fractions, args.seed, shared)
        out_path = outdir / f"{path.stem}_split.csv"
        io.write_split_csv(out_path, data, assignment)
        summary["outputs"].append(str(out_path))
        counts = {name: 0 for name in curation.SPLIT_NAMES}
        for split in assignment.assignment.values():
            counts[split] += 1
        split_counts[path.stem] = counts
    summary["split_counts"] = split_counts

    for name, lo, hi, nbins in hist_specs:
        edges = np.linspace(lo, hi, nbins + 1)
        for path, data in datasets:
            hist = curation.property_histogram(data, name, edges)
            out_path = outdir / f"{path.stem}_hist_{name}.csv"
            io.write_histogram_csv(out_path, hist)
            summary["outputs"].append(str(out_path))
            summary.setdefault("histograms", {})[f"{path.stem}:{name}"] = {
                "binned": int(hist.counts.sum()),
                "missing": hist.n_missing,
                "out_of_range": hist.n_out_of_range,
            }
    return summary


def cmd_similarity(args):
    spectra_dir = _require_file(args.spectra)
    try:
        lo, hi = (float(x) for x in args.window.split(","))
    except ValueError:
        raise ConfigError(f"--window expects lo,hi, got {args.window!r}") from None
    try:
        ne, nd = (int(x) for x in args.grid.lower().split("x"))
    except ValueError:
        raise ConfigError(f"--grid expects NExND, got {args.grid!r}") from None
    outdir = _outdir(args)

    items = io.read_spectra_dir(spectra_dir)
    fps = spectra.fingerprint_set(
        [s for s, _ in items],
        window=(lo, hi),
        grid=(ne, nd),
        mode=args.mode,
        h_max=args.h_max,
    )
    matrix = spectra.similarity_matrix(
        list(zip(fps, [m for _, m in items])), n_workers=args.threads
    )
    if args.sort:
        matrix = spectra.sort_by_settings(matrix)

    csv_path = outdir / "similarity_matrix.csv"
    manifest_path = outdir / "similarity_manifest.json"
    io.write_matrix(csv_path, manifest_path, matrix)
    off_diag = [
        matrix.values[i, j]
        for i in range(matrix.n)
        for j in range(matrix.n)
        if i != j
    ]
    return {
        "n_spectra": matrix.n,
        "sorted": bool(args.sort),
        "mode": args.mode,
        "mean_off_diagonal": (sum(off_diag) / len(off_diag)) if off_diag else None,
        "outputs": [str(csv_path), str(manifest_path)],
    }


def cmd_ce_fit(args):
    configs_path = _require_file(args.configs)
    clusters_path = _require_file(args.clusters)
    group_path = _require_file(args.group)
    try:
        degrees = [int(d) for d in args.degree.split(",")]
    except ValueError:
        raise ConfigError(f"--degree expects integers like 1,2,3: {args.degree!r}")
    outdir = _outdir(args)

    ids, occupations, targets = io.read_ce_configs(configs_path)
    clusters = [Cluster(sites) for sites in io.read_index_lists(clusters_path)]
    group = SymmetryGroup(io.read_index_lists(group_path))

    traces = regression.compare_feature_spaces(
        occupations, targets, clusters, group, degrees,
        max_features=args.max_features, tol=args.tol,
    )

    trace_path = outdir / "fit_trace.csv"
    io.write_trace_csv(trace_path, traces)
    outputs = [str(trace_path)]
    summary = {"degrees": {}, "outputs": outputs}
    base = correlation_matrix(occupations, clusters, group)
    for d in sorted(traces):
        final = traces[d].final
        fm = enumerate_monomials(base.shape[1], d)
        predicted = final.model.predict(feature_matrix(base, fm))
        pred_path = outdir / f"predictions_d{d}.csv"
        io.write_predictions_csv(pred_path, ids, targets, predicted)
        outputs.append(str(pred_path))
        entry = {"n_features": final.n_features, "rmse": final.rmse}
        if args.plateau_window is not None:
            entry["plateau"] = regression.plateau_detect(
                traces[d], args.plateau_window, args.plateau_eps
            )
        summary["degrees"][str(d)] = entry
    return summary


def cmd_complexity(args):
    if args.nn:
        try:
            widths = [int(w) for w in args.nn.split(",")]
        except ValueError:
            raise ConfigError(f"--nn expects widths like 2,3,1: {args.nn!r}")
        weights, biases = cx.nn_descriptor(cx.NnSpec(widths))
        return {"model": "nn", "layer_widths": widths, "weights": weights,
                "biases": biases, "parameters": weights + biases}
    if args.rf:
        try:
            leaves = [int(l) for l in args.rf.split(",")]
        except ValueError:
            raise ConfigError(f"--rf expects leaf counts like 3,5: {args.rf!r}")
        total_leaves, splits = cx.rf_descriptor(cx.RfSpec(leaves))
        return {"model": "rf", "leaves_per_tree": leaves, "leaves": total_leaves,
                "splits": splits, "n_trees": len(leaves)}
    spec = _parse_sisso(args.sisso)
    rung, dimension = cx.sisso_descriptor(spec)
    return {"model": "sisso", "rung": rung, "dimension": dimension}


def _parse_sisso(text: str) -> cx.SissoSpec:
    rung = dimension = None
    bias = False
    for token in text.split(","):
        token = token.strip()
        if token == "bias":
            bias = True
        elif token.startswith("rung="):
            rung = int(token[5:])
        elif token.startswith("dim="):
            dimension = int(token[4:])
        else:
            raise ConfigError(f"bad --sisso token {token!r} in {text!r}")
    if rung is None or dimension is None:
        raise ConfigError(f"--sisso needs rung=R,dim=D[,bias], got {text!r}")
    return cx.SissoSpec(rung=rung, dimension=dimension, has_bias=bias)


def cmd_estimate(args):
    if args.kind == "workflow":
        spec = costs.WorkflowSpec(
            n_structures=args.structures,
            settings_per_structure=args.settings,
            files_per_run=args.files_per_run,
            bytes_per_run=round(args.mb_per_run * 10**6),
        )
        est = costs.workflow_estimate(spec)
        payload = {
            "runs": est.runs,
            "files": est.files,
            "bytes": est.bytes,
            "storage": costs.format_bytes(est.bytes, binary=args.binary),
        }
        human = (
            f"runs: {est.runs:,}\nfiles: {est.files:,}\n"
            f"storage: {payload['storage']}"
        )
    elif args.kind == "training":
        seconds = costs.training_time(
            costs.TrainingSpec(args.steps, args.t_batch, args.t_grad)
        )
        payload = {"seconds": seconds, "hours": seconds / 3600.0}
        human = f"training time: {seconds:,.1f} s ({seconds / 3600.0:.2f} h)"
    else:
        budget = costs.nas_budget(
            costs.NasSpec(args.archs, args.hours, args.price)
        )
        payload = {"gpu_hours": budget.gpu_hours, "cost": budget.cost}
        human = f"GPU hours: {budget.gpu_hours:,.0f}\ncost: {budget.cost:,.0f}"
    if args.format == "human":
        return human
    return payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matscale",
        description="Dataset curation, DOS similarity, cluster-expansion "
        "fitting, and infrastructure cost estimation.",
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (results are thread-count independent)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="dedup identities, splits, histograms")
    p.add_argument("--input", required=True)
    p.add_argument("--other", help="second dataset; overlap is computed and "
                   "shared identities land in the same split on both sides")
    p.add_argument("--split", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hist", action="append",
                   help="property:lo:hi:nbins (repeatable)")
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("similarity", help="fingerprint spectra, build the matrix")
    p.add_argument("--spectra", required=True, help="directory of CSV+JSON pairs")
    p.add_argument("--window", default="-10,10")
    p.add_argument("--grid", default="256x64")
    p.add_argument("--mode", choices=["raster", "vector"], default="raster")
    p.add_argument("--h-max", type=float, default=None)
    p.add_argument("--sort", action="store_true")
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("ce-fit", help="OMP traces over correlation feature spaces")
    p.add_argument("--configs", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--degree", default="1")
    p.add_argument("--max-features", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--plateau-window", type=int, default=None)
    p.add_argument("--plateau-eps", type=float, default=0.0)
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_ce_fit)

    p = sub.add_parser("complexity", help="model-complexity descriptors")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--nn", help="layer widths, e.g. 2,3,1")
    g.add_argument("--rf", help="leaves per tree, e.g. 3,5")
    g.add_argument("--sisso", help="rung=R,dim=D[,bias]")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("estimate", help="workflow and training budgets")
    est = p.add_subparsers(dest="kind", required=True)
    w = est.add_parser("workflow")
    w.add_argument("--structures", type=int, required=True)
    w.add_argument("--settings", type=int, required=True)
    w.add_argument("--files-per-run", type=int, required=True)
    w.add_argument("--mb-per-run", type=float, required=True)
    w.add_argument("--binary", action="store_true",
                   help="display binary (KiB/MiB/...) units")
    t = est.add_parser("training")
    t.add_argument("--steps", type=int, required=True)
    t.add_argument("--t-batch", type=float, required=True)
    t.add_argument("--t-grad", type=float, required=True)
    n = est.add_parser("nas")
    n.add_argument("--archs", type=int, required=True)
    n.add_argument("--hours", type=float, required=True)
    n.add_argument("--price", type=float, required=True)
    for q in (w, t, n):
        q.add_argument("--format", choices=["json", "human"], default="json")
    p.set_defaults(func=cmd_estimate)
    return parser


def _join_window_flag(argv):
    # lets "--window -10,10" survive argparse's leading-dash handling
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--window" and i + 1 < len(argv):
            out.append(f"--window={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_window_flag(list(argv)))
    try:
        result = args.func(args)
    except ConfigError as exc:
        print(f"matscale: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OverflowError, OSError, KeyError) as exc:
        print(f"matscale: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, str):
        print(result)
    else:
        print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
