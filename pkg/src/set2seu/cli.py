"""Command-line pipeline: parse -> cones -> sites -> sets -> propagate -> report.

Subcommands run a prefix of the pipeline and emit that stage's artifacts;
`report` can instead consume previously emitted stage files.  Progress
goes to stderr, machine-readable artifacts to files / stdout.

Exit codes: 0 success (overflowed sites are still sound), 2 netlist parse
errors, 3 I/O errors, 4 missing upstream artifact.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

from . import campaign, cones, ffsets, netlist, propagation

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_MISSING_STAGE = 4


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    mode: str = "collapsed"
    exclude: tuple[str, ...] = ()
    pattern_cap: int = propagation.DEFAULT_PATTERN_CAP
    conflict_cap: int = propagation.DEFAULT_CONFLICT_CAP
    margins: tuple[float, ...] = campaign.DEFAULT_MARGINS
    confidence: float = 95.0
    out: str = "out"
    jobs: int = 1
    seed: int = 0
    verbose: bool = False
    export_cnf: bool = False

    def validate(self) -> None:
        if self.mode not in ("collapsed", "all_nets"):
            raise ValueError(f"invalid mode '{self.mode}'")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.pattern_cap < 1:
            raise ValueError("pattern_cap must be >= 1")
        for m in self.margins:
            if not 0 < m < 1:
                raise ValueError(f"margin {m} outside (0, 1)")
        campaign.cutoff_for_confidence(self.confidence)


def config_from_file(path: str) -> dict:
    """Flat key = value text; '#' comments; lists are comma separated."""
    values: dict = {}
    names = {f.name for f in fields(RunConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key not in names:
            raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
        values[key] = _coerce(key, val)
    return values


def _coerce(key: str, val: str):
    if key == "exclude":
        return tuple(v.strip() for v in val.split(",") if v.strip())
    if key == "margins":
        return tuple(float(v) for v in val.split(",") if v.strip())
    if key in ("pattern_cap", "conflict_cap", "jobs", "seed"):
        return int(val)
    if key == "confidence":
        return float(val)
    if key in ("verbose", "export_cnf"):
        return val.lower() in ("1", "true", "yes", "on")
    return val


def log(msg: str) -> None:
    print(f"[set2seu] {msg}", file=sys.stderr)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _write_text(path: Path, text: str) -> None:
    path.write_text(text)


# -- stages -------------------------------------------------------------------


def load_circuit(cfg: RunConfig) -> netlist.Circuit:
    if not cfg.input:
        raise FileNotFoundError("no input netlist given (use --input)")
    text = Path(cfg.input).read_text()
    if cfg.input.endswith(".json"):
        c = netlist.circuit_from_json(text, exclude=cfg.exclude)
    else:
        c = netlist.parse_bench(text, exclude=cfg.exclude)
    s = c.stats()
    log(
        f"parse: {cfg.input}: {s.num_ffs} FFs, {s.num_gates} gates, "
        f"{s.num_pis} PIs, {s.num_pos} POs, {s.num_nets} nets"
    )
    return c


def _stats_json(c: netlist.Circuit) -> dict:
    s = c.stats()
    return {
        "num_ffs": s.num_ffs,
        "num_gates": s.num_gates,
        "num_pis": s.num_pis,
        "num_pos": s.num_pos,
        "num_nets": s.num_nets,
    }


def sets_json(
    c: netlist.Circuit, sites: list[cones.FaultSite], static: ffsets.SetCollection
) -> dict:
    cone_rows = []
    for f in c.flipflops:
        members = cones.cone_ff_set(c, f.id)
        cone_rows.append(
            {
                "cone": f.name,
                "members": [c.flipflops[m].name for m in members],
                "multiplicity": len(members),
            }
        )
    return {
        "circuit": _stats_json(c),
        "ffs": [f.name for f in c.flipflops],
        "cones": cone_rows,
        "num_sets": static.num_sets,
        "num_superset": static.num_unique,
        "max_multiplicity": static.max_multiplicity,
        "sets": ffsets.collection_to_json(static),
        "raw": [
            {"site": ref, "members": static.member_names(s)} for ref, s in static.raw_sets
        ],
    }


def patterns_json(
    c: netlist.Circuit,
    sites: list[cones.FaultSite],
    results: dict[str, propagation.PatternResult],
) -> dict:
    rows = []
    for s in sites:
        if not s.static_ffs:
            continue
        r = results[c.net_names[s.site_net]]
        names = sorted(
            ([c.flipflops[f].name for f in p.ffs.members] for p in r.patterns),
            key=lambda m: (len(m), m),
        )
        row = {
            "site": r.site,
            "patterns": names,
            "complete": r.complete,
            "overflow": r.overflow,
            "unknown": r.unknown,
        }
        if r.overflow or r.unknown:
            row["fallback"] = [c.flipflops[f].name for f in r.static_ffs.members]
        rows.append(row)
    return {"circuit": _stats_json(c), "ffs": [f.name for f in c.flipflops], "sites": rows}


def run_propagation(
    cfg: RunConfig, c: netlist.Circuit, sites: list[cones.FaultSite]
) -> dict[str, propagation.PatternResult]:
    work = [s for s in sites if s.static_ffs]
    log(f"propagate: {len(work)} sites (cap {cfg.pattern_cap}, jobs {cfg.jobs})")
    t0 = time.monotonic()
    if cfg.verbose and cfg.jobs == 1:
        results = {}
        for s in work:
            ts = time.monotonic()
            r = propagation.enumerate_patterns(c, s, cfg.pattern_cap, cfg.conflict_cap)
            results[r.site] = r
            log(
                f"  site {r.site}: {len(r.patterns)} patterns"
                f"{' overflow' if r.overflow else ''} in {time.monotonic() - ts:.3f}s"
            )
    else:
        results = propagation.analyze_sites(
            c, sites, cfg.pattern_cap, cfg.conflict_cap, cfg.jobs
        )
    n_over = sum(1 for r in results.values() if r.overflow)
    log(f"propagate: done in {time.monotonic() - t0:.2f}s, {n_over} overflowed")
    if cfg.export_cnf:
        cnf_dir = Path(cfg.out) / "cnf"
        cnf_dir.mkdir(parents=True, exist_ok=True)
        for s in work:
            path = cnf_dir / f"site_{s.site_net}.cnf"
            path.write_text(propagation.export_site_cnf(c, s))
        log(f"propagate: exported {len(work)} DIMACS files to {cnf_dir}")
    return results


def build_report(
    cfg: RunConfig,
    c_stats: dict,
    num_ffs: int,
    static: ffsets.SetCollection,
    optimized: ffsets.SetCollection,
    overflow_sites: int,
    unknown_sites: int,
) -> tuple[dict, campaign.CampaignReport]:
    report = campaign.build_campaign(
        num_ffs, static, optimized, cfg.margins, cfg.confidence
    )
    body = report.to_json()
    body["circuit"] = c_stats
    body["overflow_sites"] = overflow_sites
    body["unknown_sites"] = unknown_sites
    body["config"] = {
        "mode": cfg.mode,
        "exclude": list(cfg.exclude),
        "pattern_cap": cfg.pattern_cap,
        "conflict_cap": cfg.conflict_cap,
        "margins": list(cfg.margins),
        "confidence": cfg.confidence,
        "jobs": cfg.jobs,
        "seed": cfg.seed,
    }
    body["generated_at"] = datetime.now(timezone.utc).isoformat()
    return body, report


def run_pipeline(cfg: RunConfig, stage: str = "report") -> int:
    """Run the pipeline up to `stage`, writing that stage's artifacts."""
    cfg.validate()
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)

    c = load_circuit(cfg)
    if stage == "parse":
        _write_json(outdir / "circuit.json", netlist.circuit_to_json(c))
        log(f"wrote {outdir / 'circuit.json'}")
        return EXIT_OK

    site_list = cones.enumerate_fault_sites(c, cfg.mode)
    log(f"cones: {len(c.flipflops)} cones, {len(site_list)} fault sites ({cfg.mode})")
    if stage == "cones":
        _write_json(outdir / "cones.json", cones.cones_to_json(c))
        _write_json(outdir / "sites.json", cones.sites_to_json(c, site_list))
        log(f"wrote {outdir / 'cones.json'}, {outdir / 'sites.json'}")
        return EXIT_OK

    static = ffsets.collect_static_sets(c, site_list)
    log(
        f"sets: {static.num_sets} sets, {static.num_unique} unique, "
        f"max multiplicity {static.max_multiplicity}"
    )
    if stage == "sets":
        _write_json(outdir / "sets.json", sets_json(c, site_list, static))
        _write_text(outdir / "sets.csv", ffsets.collection_to_csv(static))
        log(f"wrote {outdir / 'sets.json'}, {outdir / 'sets.csv'}")
        return EXIT_OK

    results = run_propagation(cfg, c, site_list)
    if stage == "propagate":
        _write_json(outdir / "patterns.json", patterns_json(c, site_list, results))
        log(f"wrote {outdir / 'patterns.json'}")
        return EXIT_OK

    optimized = propagation.optimize_sets(static, results)
    body, report = build_report(
        cfg,
        _stats_json(c),
        len(c.flipflops),
        static,
        optimized,
        overflow_sites=sum(1 for r in results.values() if r.overflow),
        unknown_sites=sum(1 for r in results.values() if r.unknown),
    )
    if stage == "run":
        _write_json(outdir / "cones.json", cones.cones_to_json(c))
        _write_json(outdir / "sites.json", cones.sites_to_json(c, site_list))
        _write_json(outdir / "sets.json", sets_json(c, site_list, static))
        _write_text(outdir / "sets.csv", ffsets.collection_to_csv(static))
        _write_json(outdir / "patterns.json", patterns_json(c, site_list, results))
    _write_json(outdir / "report.json", body)
    _write_text(outdir / "report.csv", report.to_csv())
    log(
        f"report: static {report.static.total_faults} -> propagated "
        f"{report.propagated.total_faults} (random {report.random.total_faults})"
    )
    if not report.monotonic_reduction:
        log(
            "warning: propagated total exceeds static total; per-set counting "
            "double-counts overlapping combinations on this circuit"
        )
    log(f"wrote artifacts to {outdir}")
    return EXIT_OK


def report_from_artifacts(cfg: RunConfig) -> int:
    """Build report.json/csv from previously emitted sets.json/patterns.json."""
    outdir = Path(cfg.out)
    sets_path = outdir / "sets.json"
    patterns_path = outdir / "patterns.json"
    if not sets_path.exists():
        log("missing upstream artifact for stage 'sets' (sets.json)")
        return EXIT_MISSING_STAGE
    if not patterns_path.exists():
        log("missing upstream artifact for stage 'propagate' (patterns.json)")
        return EXIT_MISSING_STAGE
    sets_data = json.loads(sets_path.read_text())
    pat_data = json.loads(patterns_path.read_text())
    ff_names = tuple(sets_data["ffs"])
    idx = {n: i for i, n in enumerate(ff_names)}

    def to_set(members: list[str]) -> ffsets.FFSet:
        return ffsets.ffset(idx[m] for m in members)

    static = ffsets.SetCollection(
        ff_names,
        tuple((row["site"], to_set(row["members"])) for row in sets_data["raw"]),
    )
    raw = []
    for row in pat_data["sites"]:
        if row["overflow"] or row["unknown"]:
            raw.append((row["site"], to_set(row["fallback"])))
        else:
            raw.extend((row["site"], to_set(p)) for p in row["patterns"])
    optimized = ffsets.SetCollection(ff_names, tuple(raw))
    body, report = build_report(
        cfg,
        sets_data["circuit"],
        sets_data["circuit"]["num_ffs"],
        static,
        optimized,
        overflow_sites=sum(1 for r in pat_data["sites"] if r["overflow"]),
        unknown_sites=sum(1 for r in pat_data["sites"] if r["unknown"]),
    )
    _write_json(outdir / "report.json", body)
    _write_text(outdir / "report.csv", report.to_csv())
    log(f"wrote {outdir / 'report.json'}, {outdir / 'report.csv'}")
    return EXIT_OK


def sfi_only(cfg: RunConfig, population: int) -> int:
    t = campaign.cutoff_for_confidence(cfg.confidence)
    plans = [
        {"margin": m, "n": campaign.sfi_sample_size(population, m, t)}
        for m in cfg.margins
    ]
    print(
        json.dumps(
            {"N": str(population), "confidence": cfg.confidence, "t": t, "plans": plans},
            indent=2,
        )
    )
    return EXIT_OK


# -- argument handling ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--input", help=".bench or circuit .json netlist")
    common.add_argument("--mode", choices=["collapsed", "all_nets"])
    common.add_argument("--exclude", help="comma-separated net names (clock/reset)")
    common.add_argument("--pattern-cap", type=int, dest="pattern_cap")
    common.add_argument("--conflict-cap", type=int, dest="conflict_cap")
    common.add_argument("--margins", help="comma-separated error margins")
    common.add_argument("--confidence", type=float)
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--jobs", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--verbose", action="store_true", default=None)
    common.add_argument(
        "--export-cnf",
        action="store_true",
        default=None,
        dest="export_cnf",
        help="also write one DIMACS file per analyzed site",
    )

    ap = argparse.ArgumentParser(
        prog="set2seu",
        description=(
            "Identify which flip-flops each gate-level single-event transient can "
            "upset, and plan the matching multi-bit injection campaign."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="full pipeline, all artifacts")
    sub.add_parser("parse", parents=[common], help="parse/validate, emit circuit.json")
    sub.add_parser("cones", parents=[common], help="emit cones.json and sites.json")
    sub.add_parser("sets", parents=[common], help="emit sets.json and sets.csv")
    sub.add_parser("propagate", parents=[common], help="emit patterns.json")
    rp = sub.add_parser("report", parents=[common], help="emit report.json and report.csv")
    rp.add_argument("--sfi-only", action="store_true", help="just the sample-size table")
    rp.add_argument("--population", type=int, help="population N for --sfi-only")
    return ap


def _merge_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(config_from_file(args.config))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name == "exclude":
            v = tuple(s.strip() for s in v.split(",") if s.strip())
        elif f.name == "margins":
            v = tuple(float(s) for s in v.split(",") if s.strip())
        values[f.name] = v
    return replace(RunConfig(), **values)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        cfg.validate()
        if args.command == "report":
            if args.sfi_only:
                if args.population is None:
                    log("--sfi-only requires --population")
                    return EXIT_PARSE
                return sfi_only(cfg, args.population)
            if not cfg.input:
                return report_from_artifacts(cfg)
            return run_pipeline(cfg, "report")
        return run_pipeline(cfg, args.command)
    except netlist.NetlistError as e:
        log(f"netlist error: {e}")
        return EXIT_PARSE
    except OSError as e:
        log(f"I/O error: {e}")
        return EXIT_IO
    except ValueError as e:
        log(f"error: {e}")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
