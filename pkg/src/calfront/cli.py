"""Command-line front end.

Subcommands: ``evaluate`` (dataset MDE report), ``fuse`` (multi-annotator
aggregation + leave-one-out table), ``compare`` (statistics over report
files), ``synth`` (synthetic oracle dataset), ``report`` (subset tables
from a report JSON).

Exit codes: 0 = success (bad MDE is still success — metrics are data),
2 = operational failure (missing/corrupt inputs, bad arguments).

A ``--config FILE`` of ``key=value`` lines (TOML-like, ``#`` comments) may
supply any long-flag defaults; explicit flags always win.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import fusion, metrics, stats, synth
from .frontops import LengthMetric, LengthPolicy, apply_catchment, filter_short_fronts, refine_front_mask, zones_to_front
from .geodata import load_bbox, load_catchment_mask, load_front_mask, load_manifest, load_zone_mask, write_front_mask

__all__ = ["main"]


# --------------------------------------------------------------------------
# config file


def _load_config_tokens(path: str) -> list[str]:
    tokens: list[str] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("_", "-")
        tokens += [f"--{key}", value.strip().strip('"')]
    return tokens


def _apply_config(argv: list[str]) -> list[str]:
    """Inject config pairs right after the subcommand; later flags override."""
    if not argv or argv[0].startswith("-"):
        return argv
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    return [argv[0]] + _load_config_tokens(path) + argv[1:]


# --------------------------------------------------------------------------
# evaluate


def _evaluate_scene(task: tuple) -> metrics.ScenePairResult:
    """Worker: load one scene and compute its distance terms (picklable)."""
    scene_id, pred_path, truth_path, bbox_path, resolution_m, mode, metric, min_front_m = task
    bbox = load_bbox(bbox_path)
    truth = load_front_mask(truth_path)
    policy = LengthPolicy(metric=LengthMetric(metric), min_length_m=min_front_m)
    if mode == "zones":
        pred = zones_to_front(load_zone_mask(pred_path), bbox, resolution_m, policy)
    else:
        pred = refine_front_mask(load_front_mask(pred_path), bbox, resolution_m, policy)
    return metrics.pair_distance_terms(truth, pred, resolution_m, scene_id)


def cmd_evaluate(args) -> int:
    manifest = load_manifest(args.manifest)
    tasks = []
    for sid in manifest.ids:
        pred = Path(args.pred) / f"{sid}.png"
        truth = Path(args.truth) / f"{sid}.png"
        bbox = Path(args.bboxes) / f"{sid}.txt"
        for p in (pred, truth, bbox):
            if not p.exists():
                raise FileNotFoundError(f"scene {sid}: missing input {p}")
        tasks.append(
            (sid, str(pred), str(truth), str(bbox), manifest[sid].resolution_m,
             args.mode, args.metric, args.min_front_m)
        )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_evaluate_scene, tasks))
    else:
        results = [_evaluate_scene(t) for t in tasks]
    report = metrics.mde(results)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(metrics.report_to_json(report))
    for group in (metrics.GroupBy.SEASON, metrics.GroupBy.GLACIER,
                  metrics.GroupBy.SENSOR, metrics.GroupBy.RESOLUTION):
        rows = metrics.subset_report(report, manifest, group)
        side = out.with_name(f"{out.stem}_by_{group.value}.csv")
        side.write_text(metrics.render_subset_csv(rows, group))
    mde_txt = "/" if report.mde_m is None else f"{report.mde_m:.3f} m"
    print(f"evaluated {len(report.scenes)} scenes: MDE {mde_txt}, "
          f"no front predicted in {report.no_front_count}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# fuse


def cmd_fuse(args) -> int:
    manifest = load_manifest(args.manifest)
    annot_dirs = [Path(p) for p in args.annotators.split(",") if p]
    if len(annot_dirs) < 2:
        raise ValueError("fuse needs at least 2 annotator directories")
    annotations: dict[str, dict[str, object]] = {}
    for d in annot_dirs:
        masks = {}
        for sid in manifest.ids:
            p = d / f"{sid}.png"
            if not p.exists():
                raise FileNotFoundError(f"annotator {d.name}: missing scene {p}")
            masks[sid] = load_front_mask(p)
        annotations[d.name] = masks
    catchments = {}
    for sid in manifest.ids:
        p = Path(args.catchments) / f"{sid}.png"
        if not p.exists():
            raise FileNotFoundError(f"missing catchment {p}")
        catchments[sid] = load_catchment_mask(p)
    seeds = fusion.load_seeds(args.seeds)
    for sid in manifest.ids:
        if sid not in seeds:
            raise ValueError(f"seeds file has no entry for scene {sid!r}")
    threshold = None if args.threshold == "auto" else int(args.threshold)
    params = fusion.VoteParams(
        threshold=threshold, buffer_m=args.buffer_m, min_front_m=args.min_front_m
    )

    out = Path(args.out)
    (out / "aggregate").mkdir(parents=True, exist_ok=True)
    aggregates = {}
    for sid in manifest.ids:
        agg = fusion.aggregate_front(
            [annotations[name][sid] for name in annotations],
            catchments[sid],
            seeds[sid],
            params,
            manifest[sid].resolution_m,
        )
        if any(agg.leaks):
            bad = [name for name, leak in zip(annotations, agg.leaks) if leak]
            print(f"warning: scene {sid}: ocean flood leaked for {', '.join(bad)}",
                  file=sys.stderr)
        aggregates[sid] = agg.front
        write_front_mask(agg.front, out / "aggregate" / f"{sid}.png")

    rows = fusion.leave_one_out(annotations, manifest, catchments, seeds, params)

    lines = ["annotator,mde_m,no_front_count"]
    for row in rows:
        mde_txt = "/" if row.mde_m is None else format(row.mde_m, ".6g")
        lines.append(f"{row.annotator},{mde_txt},{row.no_front_count}")

    if args.predictions:
        pred_results = []
        policy = LengthPolicy(metric=LengthMetric.PIXEL_COUNT, min_length_m=args.min_front_m)
        for sid in manifest.ids:
            p = Path(args.predictions) / f"{sid}.png"
            if not p.exists():
                raise FileNotFoundError(f"missing prediction {p}")
            res = manifest[sid].resolution_m
            pred = load_front_mask(p)
            # predictions get the annotation post-processing minus the
            # ocean/coastline step: catchment removal + length filter
            pred = apply_catchment(pred, catchments[sid], args.buffer_m, res)
            pred = filter_short_fronts(pred, policy, res)
            if aggregates[sid].is_empty():
                continue
            pred_results.append(
                metrics.pair_distance_terms(aggregates[sid], pred, res, sid)
            )
        pred_report = metrics.mde(pred_results)
        mde_txt = "/" if pred_report.mde_m is None else format(pred_report.mde_m, ".6g")
        lines.append(f"predictions,{mde_txt},{pred_report.no_front_count}")

    (out / "leave_one_out.csv").write_text("\n".join(lines) + "\n")
    print(f"fused {len(manifest)} scenes from {len(annotations)} annotators", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# compare


def _report_scalar(path: str, metric: str) -> float:
    report = metrics.report_from_json(Path(path).read_text())
    if metric == "nofront":
        return float(report.no_front_count)
    if report.mde_m is None:
        raise ValueError(f"report {path} has no MDE (no scene with a predicted front)")
    return report.mde_m


def cmd_compare(args) -> int:
    groups = [[_report_scalar(p, args.metric) for p in group] for group in args.reports]
    alt = stats.Alternative(args.alternative)
    m = args.bonferroni
    rows = []
    if args.test == "kw":
        r = stats.kruskal_wallis(groups)
        rows.append(("kw", r.statistic, r.df, r.p_value, stats.adjust_p(r.p_value, m), r.method.value))
    elif args.test == "mwu":
        if len(groups) != 2:
            raise ValueError(f"mwu needs exactly 2 report groups, got {len(groups)}")
        r = stats.mann_whitney_u(groups[0], groups[1], alt)
        rows.append(("mwu", r.statistic, r.df, r.p_value, stats.adjust_p(r.p_value, m), r.method.value))
    elif args.test == "kendall":
        if len(groups) != 2:
            raise ValueError(f"kendall needs exactly 2 report groups, got {len(groups)}")
        r = stats.kendall_tau(groups[0], groups[1])
        rows.append(("kendall", r.statistic, r.df, r.p_value, stats.adjust_p(r.p_value, m), r.method.value))
    else:  # cohend
        if len(groups) != 2:
            raise ValueError(f"cohend needs exactly 2 report groups, got {len(groups)}")
        d = stats.cohens_d(groups[0], groups[1])
        rows.append(("cohend", d, None, None, None, "effect-size"))
    lines = ["test,statistic,df,p_value,p_bonferroni,method"]
    for test, statistic, df, p, p_adj, method in rows:
        df_txt = "" if df is None else str(df)
        p_txt = "" if p is None else format(p, ".6g")
        padj_txt = "" if p_adj is None else format(p_adj, ".6g")
        lines.append(f"{test},{format(statistic, '.6g')},{df_txt},{p_txt},{padj_txt},{method}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# synth / report


def cmd_synth(args) -> int:
    params = synth.SynthParams(
        seed=args.seed,
        size=args.size,
        boundary=synth.parse_boundary(args.boundary),
        rock_rows=args.rock_rows,
        na_corner=args.na_corner == "true",
        resolution_m=args.resolution_m,
        shift_px=args.shift_px,
    )
    scenes = synth.generate_dataset(params, args.n)
    synth.write_dataset(scenes, args.out)
    print(f"wrote {len(scenes)} scenes to {args.out}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    report = metrics.report_from_json(Path(args.infile).read_text())
    manifest = load_manifest(args.manifest)
    group = metrics.GroupBy(args.group_by)
    rows = metrics.subset_report(report, manifest, group)
    if args.format == "csv":
        text = metrics.render_subset_csv(rows, group)
    else:
        text = metrics.render_subset_markdown(rows, group)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calfront",
        description="Calving-front evaluation: extraction, MDE, fusion, statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("evaluate", help="score predictions against ground-truth fronts")
    pe.add_argument("--pred", required=True, help="directory of prediction PNGs (<id>.png)")
    pe.add_argument("--truth", required=True, help="directory of ground-truth front PNGs")
    pe.add_argument("--bboxes", required=True, help="directory of <id>.txt bounding boxes")
    pe.add_argument("--manifest", required=True, help="scene manifest CSV")
    pe.add_argument("--mode", choices=["zones", "front"], default="zones",
                    help="prediction type: zone masks or front masks")
    pe.add_argument("--min-front-m", type=float, default=750.0)
    pe.add_argument("--metric", choices=["pixelcount", "geometric"], default="pixelcount",
                    help="front length measure for the minimum-length rule")
    pe.add_argument("--out", required=True, help="report JSON path")
    pe.add_argument("--jobs", type=int, default=1, help="parallel scene workers")
    pe.add_argument("--config", help="key=value defaults file")
    pe.set_defaults(func=cmd_evaluate)

    pf = sub.add_parser("fuse", help="aggregate annotators and score leave-one-out")
    pf.add_argument("--annotators", required=True, help="comma-separated annotator directories")
    pf.add_argument("--catchments", required=True, help="directory of catchment PNGs")
    pf.add_argument("--seeds", required=True, help="seeds CSV (scene_id,row,col[,glacier_row,glacier_col])")
    pf.add_argument("--manifest", required=True, help="scene manifest CSV")
    pf.add_argument("--buffer-m", type=float, default=120.0)
    pf.add_argument("--threshold", default="auto", help="vote threshold: auto (majority) or an integer")
    pf.add_argument("--min-front-m", type=float, default=750.0)
    pf.add_argument("--predictions", help="optional prediction front dir scored against the full aggregate")
    pf.add_argument("--out", required=True, help="output directory")
    pf.add_argument("--config", help="key=value defaults file")
    pf.set_defaults(func=cmd_fuse)

    pc = sub.add_parser("compare", help="statistics over evaluation reports")
    pc.add_argument("--reports", nargs="+", action="append", required=True,
                    metavar="REPORT", help="one group per flag occurrence")
    pc.add_argument("--test", choices=["kw", "mwu", "kendall", "cohend"], required=True)
    pc.add_argument("--alternative", choices=["less", "greater", "two-sided"],
                    default="two-sided")
    pc.add_argument("--metric", choices=["mde", "nofront"], default="mde")
    pc.add_argument("--bonferroni", type=int, default=1, metavar="M")
    pc.add_argument("--out", required=True, help="stats CSV path")
    pc.add_argument("--config", help="key=value defaults file")
    pc.set_defaults(func=cmd_compare)

    ps = sub.add_parser("synth", help="generate a synthetic oracle dataset")
    ps.add_argument("--n", type=int, required=True, help="number of scenes")
    ps.add_argument("--size", type=int, default=256)
    ps.add_argument("--seed", type=int, default=42)
    ps.add_argument("--boundary", default="vertical", help="vertical or sinusoid:A:P")
    ps.add_argument("--rock-rows", type=int, default=12)
    ps.add_argument("--na-corner", choices=["true", "false"], default="true")
    ps.add_argument("--resolution-m", type=float, default=10.0)
    ps.add_argument("--shift-px", type=int, default=0,
                    help="shift the boundary right by K columns (same randomness)")
    ps.add_argument("--out", required=True, help="output dataset directory")
    ps.add_argument("--config", help="key=value defaults file")
    ps.set_defaults(func=cmd_synth)

    pr = sub.add_parser("report", help="render subset tables from a report JSON")
    pr.add_argument("--in", dest="infile", required=True, help="report JSON")
    pr.add_argument("--manifest", required=True)
    pr.add_argument("--group-by", choices=["all", "season", "glacier", "sensor", "resolution"],
                    default="all")
    pr.add_argument("--format", choices=["csv", "md"], default="csv")
    pr.add_argument("--out", help="output path (default: stdout)")
    pr.add_argument("--config", help="key=value defaults file")
    pr.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
