"""Command-line entry point: validate, analyze and report on influence graphs.

Settings resolve in this order, later sources winning: built-in defaults,
a ``key=value`` config file (``--config``), ``INFLUENCE_NET_*`` environment
variables, command-line flags.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .centrality import (
    FAMILIES,
    MEASURES,
    CentralityResult,
    SolverConfig,
    betweenness_scores,
    pagerank_scores,
    run_suite,
)
from .errors import EmptyInputError, InfluenceNetError, NonConvergenceError
from .graph import InfluenceGraph
from .ingest import ParseReport, ValidationReport, parse_edge_csv, parse_triples, validate
from .layout import LayoutParams, export_dot, export_json, multi_circle_layout, render_svg
from .ranking import AggregateRanking, RankTable, aggregate, borda, rank, top_k

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

ENV_PREFIX = "INFLUENCE_NET_"
# Scores are rounded to this many decimals before ranking so that
# iteration noise in the last bits does not break symmetric ties.
RANK_DECIMALS = 12

TRIPLE_SUFFIXES = {".nt", ".triples", ".ttl"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: str = ""
    format: str = ""
    measures: tuple[str, ...] = MEASURES
    k: int = 10
    rings: int = 4
    out_dir: str = "influence-net-out"
    solver: SolverConfig = field(default_factory=SolverConfig)
    allow_isolated: bool = False
    drop_self_loops: bool = False

    def fingerprint(self) -> str:
        doc = {
            "format": self.format,
            "measures": list(self.measures),
            "k": self.k,
            "rings": self.rings,
            "solver": asdict(self.solver),
            "allow_isolated": self.allow_isolated,
            "drop_self_loops": self.drop_self_loops,
        }
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# -- configuration -------------------------------------------------------------

_KEYS = {
    "input": str,
    "format": str,
    "measures": str,
    "k": int,
    "rings": int,
    "tolerance": float,
    "max_iter": int,
    "damping": float,
    "out_dir": str,
    "weighted": str,
    "allow_isolated": str,
    "drop_self_loops": str,
}


def _truthy(value: str | bool) -> bool:
    if isinstance(value, bool):
        return value
    lowered = value.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise UsageError(f"expected a boolean, got {value!r}")


def read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        values[key] = value
    return values


def read_env(environ=os.environ) -> dict[str, str]:
    values = {}
    for key in _KEYS:
        name = ENV_PREFIX + key.upper()
        if name in environ:
            values[key] = environ[name]
    return values


def _measure_list(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise UsageError("--measures selects no measures")
    unknown = [m for m in names if m not in MEASURES]
    if unknown:
        raise UsageError(f"unknown measures: {', '.join(unknown)} (known: {', '.join(MEASURES)})")
    return names


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    merged: dict[str, object] = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    merged.update(read_env(environ))
    for key in _KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    try:
        typed = {k: (_KEYS[k](v) if not isinstance(v, bool) else v) for k, v in merged.items()}
    except ValueError as exc:
        raise UsageError(f"bad setting value: {exc}") from None

    cfg = RunConfig()
    cfg.input = str(typed.get("input", ""))
    if not cfg.input:
        raise UsageError("--input is required")
    fmt = str(typed.get("format", "")).lower()
    if not fmt:
        fmt = "triples" if Path(cfg.input).suffix.lower() in TRIPLE_SUFFIXES else "csv"
    if fmt not in ("csv", "triples"):
        raise UsageError(f"--format must be 'csv' or 'triples', got {fmt!r}")
    cfg.format = fmt
    if "measures" in typed:
        cfg.measures = _measure_list(str(typed["measures"]))
    cfg.k = int(typed.get("k", cfg.k))
    if cfg.k < 1:
        raise UsageError("--k must be at least 1")
    cfg.rings = int(typed.get("rings", cfg.rings))
    if cfg.rings < 1:
        raise UsageError("--rings must be at least 1")
    cfg.out_dir = str(typed.get("out_dir", cfg.out_dir))
    cfg.allow_isolated = _truthy(typed.get("allow_isolated", False))
    cfg.drop_self_loops = _truthy(typed.get("drop_self_loops", False))
    solver = {}
    if "tolerance" in typed:
        solver["tolerance"] = typed["tolerance"]
    if "max_iter" in typed:
        solver["max_iterations"] = typed["max_iter"]
    if "damping" in typed:
        solver["damping"] = typed["damping"]
    if "weighted" in typed:
        solver["weighted"] = _truthy(typed["weighted"])
    try:
        cfg.solver = SolverConfig(**solver)
    except InfluenceNetError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# -- pipeline ------------------------------------------------------------------


@dataclass
class Loaded:
    parsed: ParseReport
    raw: bytes

    @property
    def graph(self) -> InfluenceGraph:
        return self.parsed.graph

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.raw).hexdigest()[:16]


def load(cfg: RunConfig) -> Loaded:
    try:
        raw = Path(cfg.input).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input}: {exc.strerror}") from None
    text = raw.decode("utf-8", errors="replace")
    try:
        if cfg.format == "triples":
            parsed = parse_triples(text, drop_self_loops=cfg.drop_self_loops)
        else:
            parsed = parse_edge_csv(text, drop_self_loops=cfg.drop_self_loops)
    except EmptyInputError as exc:
        raise UsageError(f"{cfg.input}: {exc}") from None
    return Loaded(parsed, raw)


def check(loaded: Loaded, cfg: RunConfig) -> ValidationReport:
    return validate(loaded.graph, allow_isolated=cfg.allow_isolated, self_loops=loaded.parsed.self_loops)


@dataclass
class Analysis:
    results: list[CentralityResult]
    tables: list[RankTable]
    by_count: AggregateRanking | None
    by_borda: AggregateRanking | None

    @property
    def failures(self) -> list[CentralityResult]:
        return [r for r in self.results if not r.ok]


def analyze_graph(graph: InfluenceGraph, cfg: RunConfig) -> Analysis:
    results = run_suite(graph, cfg.solver, cfg.measures)
    labels = graph.labels
    tables = [rank(r, labels, RANK_DECIMALS) for r in results]
    usable = [t for t, r in zip(tables, results) if r.ok]
    by_count = aggregate(usable, cfg.k) if usable else None
    by_borda = borda(usable, cfg.k) if usable else None
    return Analysis(results, tables, by_count, by_borda)


def _layout_inputs(graph: InfluenceGraph, cfg: RunConfig) -> tuple[CentralityResult, CentralityResult]:
    bc = betweenness_scores(graph)
    try:
        pr = pagerank_scores(graph, config=cfg.solver)
    except NonConvergenceError as exc:
        pr = exc.partial
    return bc, pr


def _header(cfg: RunConfig, loaded: Loaded) -> str:
    return f"influence-net {__version__} config={cfg.fingerprint()} input={loaded.digest}"


def _fmt(x: float) -> str:
    return repr(float(x))


def scores_csv(graph: InfluenceGraph, results: list[CentralityResult], header: str) -> str:
    labels = graph.labels
    lines = [f"# {header}", "node_label,measure,score"]
    for res in sorted(results, key=lambda r: r.measure):
        for v in sorted(range(graph.node_count), key=lambda v: labels[v]):
            lines.append(f"{_csv(labels[v])},{res.measure},{_fmt(res.scores[v])}")
    return "\n".join(lines) + "\n"


def rank_csv(table: RankTable, header: str) -> str:
    lines = [f"# {header}", "rank,label,score"]
    for e in table.entries:
        lines.append(f"{e.rank:g},{_csv(e.label)},{_fmt(e.score)}")
    return "\n".join(lines) + "\n"


def aggregate_csv(agg: AggregateRanking, header: str) -> str:
    lines = [f"# {header}", "label,appearances,mean_rank,borda_points"]
    for r in agg.rows:
        lines.append(f"{_csv(r.label)},{r.appearances},{r.mean_rank:.6f},{r.points:g}")
    return "\n".join(lines) + "\n"


def aggregate_text(agg: AggregateRanking, count: int | None = None) -> str:
    rows = agg.top(count)
    width = max([len("label")] + [len(r.label) for r in rows])
    lines = [f"{'#':>3}  {'label':<{width}}  {'appearances':>11}  {'mean rank':>9}"
             + ("  borda points" if agg.method == "borda" else "")]
    for i, r in enumerate(rows, start=1):
        line = f"{i:>3}  {r.label:<{width}}  {r.appearances:>11}  {r.mean_rank:>9.3f}"
        if agg.method == "borda":
            line += f"  {r.points:>12g}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def diagnostics_csv(results: list[CentralityResult], header: str) -> str:
    lines = [f"# {header}", "measure,converged,iterations,residual,error"]
    for r in results:
        err = _csv(r.error) if r.error else ""
        lines.append(f"{r.measure},{str(r.converged).lower()},{r.iterations},{r.residual:.3e},{err}")
    return "\n".join(lines) + "\n"


def _csv(text: str) -> str:
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_artifacts(loaded: Loaded, cfg: RunConfig, analysis: Analysis) -> list[Path]:
    out = Path(cfg.out_dir)
    (out / "ranks").mkdir(parents=True, exist_ok=True)
    header = _header(cfg, loaded)
    graph = loaded.graph
    files: dict[str, str] = {
        "scores.csv": scores_csv(graph, analysis.results, header),
        "diagnostics.csv": diagnostics_csv(analysis.results, header),
    }
    for res, table in zip(analysis.results, analysis.tables):
        if res.ok:
            files[f"ranks/{table.measure}.csv"] = rank_csv(table, header)
    if analysis.by_count is not None:
        files["aggregate.csv"] = aggregate_csv(analysis.by_count, header)
        files["aggregate.txt"] = f"# {header}\n" + aggregate_text(analysis.by_count)
        files["aggregate_borda.csv"] = aggregate_csv(analysis.by_borda, header)
    bc, pr = _layout_inputs(graph, cfg)
    layout = multi_circle_layout(graph, bc, pr, LayoutParams(rings=cfg.rings))
    files["layout.svg"] = render_svg(layout, graph, header)
    files["layout.json"] = export_json(layout, graph, header)
    files["graph.dot"] = export_dot(graph, pr, header)
    written = []
    for name, content in files.items():
        path = out / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        written.append(path)
    return written


# -- commands ------------------------------------------------------------------


def cmd_validate(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    loaded = load(cfg)
    report = check(loaded, cfg)
    graph = loaded.graph
    status = "valid" if report.is_valid else f"{len(report.violations)} violations"
    print(
        f"{graph.node_count} constructs, {graph.edge_count} influence edges, "
        f"{loaded.parsed.dropped_lines} dropped lines: {status}",
        file=stdout,
    )
    for line in report.lines():
        print(line, file=stdout)
    return EXIT_OK if report.is_valid else EXIT_INVALID


def _print_failures(analysis: Analysis, stream) -> None:
    for r in analysis.failures:
        print(f"measure {r.measure} failed: {r.error}", file=stream)


def cmd_analyze(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    loaded = load(cfg)
    report = check(loaded, cfg)
    for line in report.lines():
        print(f"warning: {line}", file=stderr)
    analysis = analyze_graph(loaded.graph, cfg)
    write_artifacts(loaded, cfg, analysis)
    if analysis.by_count is not None:
        print(f"top {cfg.k} constructs by top-{cfg.k} appearances across {len(analysis.tables) - len(analysis.failures)} measures", file=stdout)
        print(aggregate_text(analysis.by_count), end="", file=stdout)
    _print_failures(analysis, stderr)
    return EXIT_PARTIAL if analysis.failures else EXIT_OK


def build_report(loaded: Loaded, cfg: RunConfig, analysis: Analysis) -> str:
    graph = loaded.graph
    codes = sorted({c for e in graph.edges() for c in e.provenance})
    isolated = sum(1 for v in range(graph.node_count) if not graph.neighbors(v, "all"))
    n = graph.node_count
    density = graph.edge_count / (n * (n - 1)) if n > 1 else 0.0
    out = [
        "INFLUENCE GRAPH REPORT",
        _header(cfg, loaded),
        "",
        "graph",
        f"  constructs: {n}",
        f"  influence edges: {graph.edge_count}",
        f"  total edge weight: {sum(e.weight for e in graph.edges()):g}",
        f"  density: {density:.4f}",
        f"  isolated constructs: {isolated}",
        f"  theory codes: {', '.join(map(str, codes)) if codes else '(none)'}",
        "",
    ]
    by_measure = {t.measure: (t, r) for t, r in zip(analysis.tables, analysis.results)}
    family_of = {m: name for name, m in FAMILIES}
    ordered = [m for _, m in FAMILIES if m in by_measure] + [m for m in MEASURES if m in by_measure and m not in family_of]
    out.append(f"top {cfg.k} per measure")
    for m in ordered:
        table, res = by_measure[m]
        title = f"{family_of[m]} ({m})" if m in family_of else m
        out.append(f"  {title}")
        if not res.ok:
            out.append(f"    failed: {res.error}")
            continue
        top = top_k(table, cfg.k)
        ranks = table.rank_of()
        for v in top.nodes:
            out.append(f"    {ranks[v]:>5g}  {graph.label(v)}  {res.scores[v]:.6g}")
        if top.overflow:
            out.append(f"    (tie at position {cfg.k} extends the list to {len(top.nodes)})")
    out.append("")
    for agg, title in ((analysis.by_count, "aggregate (top-k appearances)"), (analysis.by_borda, "aggregate (borda)")):
        out.append(title)
        if agg is None:
            out.append("  no measure succeeded")
        else:
            out.extend("  " + line for line in aggregate_text(agg).rstrip("\n").split("\n"))
        out.append("")
    out.append("convergence")
    for r in analysis.results:
        state = "ok" if r.ok else f"FAILED: {r.error}"
        out.append(f"  {r.measure:<22} iterations={r.iterations:<5} residual={r.residual:.3e} {state}")
    return "\n".join(out) + "\n"


def cmd_report(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    loaded = load(cfg)
    analysis = analyze_graph(loaded.graph, cfg)
    print(build_report(loaded, cfg, analysis), end="", file=stdout)
    return EXIT_PARTIAL if analysis.failures else EXIT_OK


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="influence-net", description="Centrality analysis of influence ontology graphs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value settings file")
        p.add_argument("--input", help="edge CSV or triple file")
        p.add_argument("--format", choices=["csv", "triples"], help="input format (default: by extension)")
        p.add_argument("--allow-isolated", dest="allow_isolated", action="store_const", const=True, default=None)
        p.add_argument("--drop-self-loops", dest="drop_self_loops", action="store_const", const=True, default=None)

    def analysis(p: argparse.ArgumentParser) -> None:
        p.add_argument("--measures", help="comma-separated measure names (default: all 20)")
        p.add_argument("--k", type=int, help="top-k per measure and in the aggregate (default 10)")
        p.add_argument("--rings", type=int, help="rings in the multi-circle layout (default 4)")
        p.add_argument("--tolerance", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--damping", type=float)
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--weighted", dest="weighted", action="store_const", const=True, default=None)
        p.add_argument("--unweighted", dest="weighted", action="store_const", const=False)

    p = sub.add_parser("validate", help="check structural codification rules")
    common(p)
    p = sub.add_parser("analyze", help="run the centrality suite and write artifacts")
    common(p)
    analysis(p)
    p = sub.add_parser("report", help="print a single text report")
    common(p)
    analysis(p)
    return parser


COMMANDS = {"validate": cmd_validate, "analyze": cmd_analyze, "report": cmd_report}


def main(argv: list[str] | None = None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args, os.environ if environ is None else environ)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"influence-net: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"influence-net: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
