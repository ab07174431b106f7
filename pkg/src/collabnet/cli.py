"""Command-line interface and pipeline orchestration.

Every analysis stage is runnable standalone given the intermediate files
of earlier stages; `collabnet run --config FILE` executes the requested
stages in order and records a manifest (config hash, stage versions,
output checksums) so identical configurations reproduce byte-identical
results.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections import Counter
from pathlib import Path

from . import __version__, centrality, clustering, dynamics, graphio, ingest, structure
from .config import STAGE_ORDER, RunConfig, load_config, parse_config
from .graphs import build_authorship_graph, build_time_resolved, project_coauthorship

log = logging.getLogger("collabnet")


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _float(value) -> str:
    return repr(float(value))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------- stages


def do_ingest(pubs, fmt, seminars, out_dir) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = ingest.parse_publications(pubs, fmt)
    graphio.write_records_tsv(result.records, out / "records.tsv")
    written = ["records.tsv"]
    report = {
        "publications": {
            "parsed": len(result.records),
            "skipped": len(result.diagnostics),
            "diagnostics": result.diagnostics[:1000],
        }
    }
    if seminars:
        sem = ingest.parse_seminars(seminars)
        graphio.write_seminars_csv(sem.records, out / "seminars.csv")
        written.append("seminars.csv")
        report["seminars"] = {
            "parsed": len(sem.records),
            "skipped": len(sem.diagnostics),
            "diagnostics": sem.diagnostics[:1000],
        }
        authors = {name for rec in result.records for name in rec.authors}
        invitees = {rec.invitee_name for rec in sem.records}
        if authors and invitees:
            alignment = ingest.align_names(authors, invitees)
            report["alignment"] = {
                "invitees": len(invitees),
                "matched": len(alignment.matched),
                "match_fraction": alignment.match_fraction,
                "unmatched": alignment.unmatched[:1000],
            }
    graphio.write_json(report, out / "ingest_diagnostics.json")
    written.append("ingest_diagnostics.json")
    return written


def _load_records(directory) -> list:
    path = Path(directory) / "records.tsv"
    return ingest.parse_publications(path, "tsv").records


def do_build(in_dir, out_dir, window, step, min_venue_authors) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = _load_records(in_dir)
    g_pa = build_authorship_graph(records)
    graphio.write_graph(g_pa, out / "g_pa.graph")
    g_a = project_coauthorship(g_pa)
    graphio.write_graph(g_a, out / "g_a.graph")
    seq = build_time_resolved(records, window, step)
    snap_files = graphio.write_snapshots(seq, out / "snapshots")
    cover = clustering.topical_clusters(records, min_venue_authors)
    graphio.write_cover_csv(cover, out / "cover.csv")
    written = ["g_pa.graph", "g_a.graph", "cover.csv"]
    written.extend(f"snapshots/{name}" for name in snap_files)
    return written


def do_stats(graph_path, out_dir, xmin, samples, seed) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = graphio.read_graph(graph_path)
    comp = structure.connected_components(g)
    hist = structure.degree_histogram(g)
    cores = structure.core_numbers(g)
    core_hist = Counter(int(c) for c in cores.core_number)
    _write_csv(
        out / "degree_hist.csv",
        ["degree", "count"],
        sorted(hist.items()),
    )
    _write_csv(
        out / "core_hist.csv",
        ["core", "count"],
        sorted(core_hist.items()),
    )
    report = {
        "nodes": g.node_count,
        "edges": g.edge_count,
        "components": len(comp.sizes),
        "giant_fraction": comp.giant_fraction,
        "isolated_fraction": comp.isolated_fraction,
    }
    try:
        fit = structure.fit_power_law(hist, xmin)
        report["power_law"] = {"gamma": fit.gamma, "xmin": fit.xmin}
    except ValueError as exc:
        log.warning("power-law fit skipped: %s", exc)
        report["power_law"] = None
    try:
        report["average_distance"] = {
            "value": structure.sample_average_distance(g, samples, seed),
            "source_samples": samples,
            "seed": seed,
        }
    except ValueError as exc:
        log.warning("average distance skipped: %s", exc)
        report["average_distance"] = None
    graphio.write_json(report, out / "stats.json")
    return ["degree_hist.csv", "core_hist.csv", "stats.json"]


def do_centrality(graph_path, out_dir, tol, max_iter, subset=None) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = graphio.read_graph(graph_path)
    result = centrality.eigenvector_centrality(g, tol=tol, max_iter=max_iter)
    authors = centrality.rank_authors(result)
    _write_csv(
        out / "centrality_authors.csv",
        ["rank", "author", "score"],
        [(i + 1, name, _float(score)) for i, (name, score) in enumerate(authors)],
    )
    pubs = centrality.rank_publications(result)
    _write_csv(
        out / "centrality_publications.csv",
        ["rank", "publication", "score"],
        [(i + 1, key, _float(score)) for i, (key, score) in enumerate(pubs)],
    )
    report = {
        "eigenvalue": result.eigenvalue,
        "iterations": result.iterations,
        "tol": tol,
    }
    if subset:
        known = set(g.author_names)
        usable = {name for name in subset if name in known}
        if usable and len(usable) < g.author_count:
            median_in, median_out = centrality.compare_median_centrality(result, usable)
            report["subset_median"] = median_in
            report["others_median"] = median_out
            report["subset_size"] = len(usable)
        else:
            log.warning("subset empty or not a strict subset; medians skipped")
    graphio.write_json(report, out / "centrality.json")
    return ["centrality_authors.csv", "centrality_publications.csv", "centrality.json"]


def do_cluster(graph_path, out_dir, seed, refine_flag) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = graphio.read_graph(graph_path)
    flat, hierarchy = clustering.louvain(g, seed)
    result = clustering.refine(g, hierarchy) if refine_flag else flat
    graphio.write_clusters_csv(result, g, out / "clusters.csv")
    sizes = Counter(int(s) for s in result.sizes())
    report = {
        "modularity": clustering.modularity(g, result),
        "clusters": result.n_clusters,
        "levels": len(hierarchy.levels),
        "seed": seed,
        "refined": bool(refine_flag),
        "size_histogram": {str(k): v for k, v in sorted(sizes.items())},
    }
    graphio.write_json(report, out / "clustering.json")
    return ["clusters.csv", "clustering.json"]


def do_compare(
    clusters_path, cover_path, out_dir, measure, top, baseline_seed=None
) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    members, authors = graphio.read_clusters_csv(clusters_path)
    cover = graphio.read_cover_csv(cover_path)
    ranked = sorted(
        (c for c in members if members[c]), key=lambda c: (-len(members[c]), c)
    )
    top_ids = ranked[: min(top, len(ranked))]
    rows = [members[c] for c in top_ids]
    matrix = clustering.overlap_matrix(rows, cover, measure, row_labels=top_ids)
    with open(out / "overlap_matrix.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster"] + matrix.col_labels)
        for label, row in zip(matrix.row_labels, matrix.values):
            writer.writerow([label] + [_float(v) for v in row])
    report = {
        "measure": measure,
        "top": len(rows),
        "mean_max_overlap": clustering.mean_max_overlap(rows, cover, measure),
    }
    if baseline_seed is not None:
        all_rows = [members[c] for c in ranked]
        baseline = clustering.random_baseline(
            all_rows, len(rows), authors, baseline_seed
        )
        report["baseline"] = {
            "mean_max_overlap": clustering.mean_max_overlap(baseline, cover, measure),
            "seed": baseline_seed,
        }
    graphio.write_json(report, out / "compare.json")
    return ["overlap_matrix.csv", "compare.json"]


def do_cohorts(
    snapshots_dir,
    seminars_path,
    out_dir,
    random_n,
    connected_n,
    seed,
    career_split,
    min_absentees,
) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = Path(snapshots_dir)
    g_pa = graphio.read_graph(base / "g_pa.graph")
    sem = ingest.parse_seminars(seminars_path)
    cohorts = dynamics.seminar_cohorts(sem.records, g_pa.author_names, min_absentees)
    report = {"seminar_cohorts": len(cohorts)}
    typical = None
    if any(c.label == "attendees" for c in cohorts):
        typical = dynamics.typical_seminar_size(cohorts)
        report["typical_size"] = typical
    if random_n:
        if typical is None:
            raise ValueError("random cohorts need attendee cohorts for the typical size")
        cohorts.extend(
            dynamics.sample_random_cohorts(g_pa.author_names, typical, random_n, seed)
        )
    if connected_n:
        if typical is None:
            raise ValueError(
                "connected cohorts need attendee cohorts for the typical size"
            )
        cohorts.extend(
            dynamics.sample_connected_cohorts(g_pa, typical, connected_n, seed + 1)
        )
    cohorts.append(
        dynamics.AuthorCohort("all", "all", frozenset(g_pa.author_names), None)
    )
    if career_split:
        records = _load_records(base)
        first = dynamics.first_publication_years(records)
        extra = []
        for cohort in cohorts:
            if cohort.label not in ("attendees", "absentees"):
                continue
            early, mid, late = dynamics.career_stage_split(
                cohort.members, first, career_split
            )
            for suffix, subset in (("early", early), ("mid", mid), ("late", late)):
                if subset:
                    extra.append(
                        dynamics.AuthorCohort(
                            f"{cohort.cohort_id}#{suffix}",
                            cohort.label,
                            frozenset(subset),
                            cohort.anchor_year,
                        )
                    )
        cohorts.extend(extra)
        report["career_split_year"] = career_split
    graphio.write_cohorts_csv(cohorts, out / "cohorts.csv")
    report["cohorts"] = len(cohorts)
    report["by_label"] = dict(sorted(Counter(c.label for c in cohorts).items()))
    graphio.write_json(report, out / "cohorts.json")
    return ["cohorts.csv", "cohorts.json"]


def do_track(snapshots_dir, cohorts_path, out_dir, measures) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seq = graphio.read_snapshots(Path(snapshots_dir) / "snapshots")
    cohorts = graphio.read_cohorts_csv(cohorts_path)
    series = dynamics.track_cohorts(seq, cohorts, measures)
    with open(out / "series.csv", "w", encoding="utf-8", newline="") as fh:
        dynamics.emit_boxplot_series(series, fh)
    return ["series.csv"]


def do_launchers(seminars_path, cover_path, out_dir, threshold) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sem = ingest.parse_seminars(seminars_path)
    invitees: dict[str, set[str]] = {}
    for rec in sem.records:
        invitees.setdefault(rec.seminar_id, set()).add(rec.invitee_name)
    cover = graphio.read_cover_csv(cover_path)
    scores = dynamics.classify_area_launchers(invitees, cover, threshold)
    _write_csv(
        out / "launchers.csv",
        ["seminar_id", "max_overlap", "best_conference", "candidate"],
        [
            (s.seminar_id, _float(s.max_overlap), s.best_conference, int(s.is_candidate))
            for s in scores
        ],
    )
    return ["launchers.csv"]


# -------------------------------------------------------------- pipeline


def run_pipeline(cfg: RunConfig) -> dict:
    """Execute the requested stages in canonical order; returns the manifest."""
    cfg.validate()
    requested = set(cfg.stage_list())
    out = Path(cfg.out)
    outputs: list[str] = []
    executed: list[str] = []
    for stage in STAGE_ORDER:
        if stage not in requested:
            continue
        log.info("running stage %s", stage)
        try:
            if stage == "ingest":
                outputs += do_ingest(cfg.pubs, cfg.pubs_format, cfg.seminars, out)
            elif stage == "build":
                outputs += do_build(
                    out, out, cfg.window, cfg.step, cfg.min_venue_authors
                )
            elif stage == "stats":
                outputs += do_stats(
                    out / "g_a.graph",
                    out,
                    cfg.powerlaw_xmin,
                    cfg.distance_samples,
                    cfg.distance_seed,
                )
            elif stage == "centrality":
                subset = None
                seminars_csv = out / "seminars.csv"
                if seminars_csv.exists():
                    sem = ingest.parse_seminars(seminars_csv)
                    subset = {rec.invitee_name for rec in sem.records}
                outputs += do_centrality(
                    out / "g_pa.graph", out, cfg.tol, cfg.max_iter, subset
                )
            elif stage == "cluster":
                outputs += do_cluster(
                    out / "g_pa.graph", out, cfg.cluster_seed, cfg.refine
                )
            elif stage == "compare":
                outputs += do_compare(
                    out / "clusters.csv",
                    out / "cover.csv",
                    out,
                    cfg.compare_measure,
                    cfg.compare_top,
                    cfg.baseline_seed,
                )
            elif stage == "cohorts":
                outputs += do_cohorts(
                    out,
                    out / "seminars.csv",
                    out,
                    cfg.random_cohorts,
                    cfg.connected_cohorts,
                    cfg.cohort_seed,
                    cfg.career_split,
                    cfg.min_absentees,
                )
            elif stage == "track":
                outputs += do_track(out, out / "cohorts.csv", out, dynamics.MEASURES)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        executed.append(stage)
    manifest = {
        "config_sha256": cfg.sha256(),
        "tool": "collabnet",
        "stages": {stage: __version__ for stage in executed},
        "outputs": {rel: graphio.sha256_file(out / rel) for rel in sorted(set(outputs))},
    }
    graphio.write_json(manifest, out / "manifest.json")
    return manifest


# ------------------------------------------------------------------ CLI


def _add_out(parser, default=None):
    parser.add_argument(
        "--out", default=default, required=default is None, help="output directory"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collabnet",
        description="Collaboration-graph analysis toolkit",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker budget for parallelizable stages (current build is sequential)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse publication/seminar files")
    p.add_argument("--pubs", required=True)
    p.add_argument("--format", choices=("xml", "tsv"), required=True)
    p.add_argument("--seminars", default="")
    _add_out(p)

    p = sub.add_parser("build", help="build graphs and snapshots from records")
    p.add_argument("--in", dest="in_dir", required=True, help="ingest output directory")
    p.add_argument("--out", default=None, help="defaults to --in")
    p.add_argument("--window", type=int, default=1)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--min-venue-authors", type=int, default=10)

    p = sub.add_parser("stats", help="structural statistics of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--powerlaw-xmin", type=int, default=1)
    p.add_argument("--distance-samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    _add_out(p)

    p = sub.add_parser("centrality", help="eigenvector centrality ranking")
    p.add_argument("--graph", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--subset", default="", help="file with one author name per line")
    _add_out(p)

    p = sub.add_parser("cluster", help="modularity clustering")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--no-refine", action="store_true")
    _add_out(p)

    p = sub.add_parser("compare", help="cluster-vs-ground-truth overlap")
    p.add_argument("--clusters", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--measure", choices=("jaccard", "overlap"), required=True)
    p.add_argument("--baseline", choices=("random",), default=None)
    p.add_argument("--top", type=int, default=250)
    p.add_argument("--seed", type=int, default=1)
    _add_out(p)

    p = sub.add_parser("cohorts", help="derive tracked author cohorts")
    p.add_argument("--snapshots", required=True, help="build output directory")
    p.add_argument("--seminars", required=True)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--connected", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--career-split", type=int, default=0)
    p.add_argument("--min-absentees", type=int, default=5)
    _add_out(p)

    p = sub.add_parser("track", help="evaluate measures over snapshots")
    p.add_argument("--snapshots", required=True, help="build output directory")
    p.add_argument("--cohorts", required=True)
    p.add_argument("--measures", default=",".join(dynamics.MEASURES))
    _add_out(p)

    p = sub.add_parser("launchers", help="rank seminars as area-launcher candidates")
    p.add_argument("--seminars", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--threshold", type=float, default=0.2)
    _add_out(p)

    p = sub.add_parser("run", help="run the configured pipeline")
    p.add_argument("--config", required=True)
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config value",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "ingest":
            do_ingest(args.pubs, args.format, args.seminars, args.out)
        elif args.command == "build":
            do_build(
                args.in_dir,
                args.out or args.in_dir,
                args.window,
                args.step,
                args.min_venue_authors,
            )
        elif args.command == "stats":
            do_stats(
                args.graph, args.out, args.powerlaw_xmin, args.distance_samples, args.seed
            )
        elif args.command == "centrality":
            subset = None
            if args.subset:
                with open(args.subset, encoding="utf-8") as fh:
                    subset = {
                        ingest.normalize_name(line) for line in fh if line.strip()
                    }
            do_centrality(args.graph, args.out, args.tol, args.max_iter, subset)
        elif args.command == "cluster":
            do_cluster(args.graph, args.out, args.seed, not args.no_refine)
        elif args.command == "compare":
            do_compare(
                args.clusters,
                args.cover,
                args.out,
                args.measure,
                args.top,
                args.seed if args.baseline == "random" else None,
            )
        elif args.command == "cohorts":
            do_cohorts(
                args.snapshots,
                args.seminars,
                args.out,
                args.random,
                args.connected,
                args.seed,
                args.career_split,
                args.min_absentees,
            )
        elif args.command == "track":
            measures = [m.strip() for m in args.measures.split(",") if m.strip()]
            do_track(args.snapshots, args.cohorts, args.out, measures)
        elif args.command == "launchers":
            do_launchers(args.seminars, args.cover, args.out, args.threshold)
        elif args.command == "run":
            cfg = load_config(args.config)
            for item in args.overrides:
                if "=" not in item:
                    raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
                key, _, value = item.partition("=")
                cfg = parse_config(cfg.to_text() + f"{key.strip()} = {value.strip()}\n")
            cfg.threads = args.threads
            run_pipeline(cfg)
    except StageError as exc:
        print(f"collabnet: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, ingest.FormatError) as exc:
        print(f"collabnet: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
