"""Edge-list CSV and plain-triple parsers plus structural validation."""

from __future__ import annotations

import csv
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import EmptyInputError
from .graph import InfluenceGraph

# Theory codes listed in the top-25 theory ranking table.
THEORY_CODES = frozenset(
    {28, 27, 15, 35, 44, 2, 10, 12, 14, 8, 49, 41, 18, 51, 34, 22, 39, 5, 23, 11, 9, 33, 43, 21, 45}
)

RELATION = "influences"
CSV_HEADER = ("source", "relation", "target", "theory")


class ParseWarning(NamedTuple):
    line: int
    message: str
    dropped: bool = True


@dataclass
class ParseReport:
    graph: InfluenceGraph
    warnings: list[ParseWarning] = field(default_factory=list)
    # (line, label) of self-influence rows that were not silently dropped
    self_loops: list[tuple[int, str]] = field(default_factory=list)

    @property
    def dropped_lines(self) -> int:
        return sum(1 for w in self.warnings if w.dropped)


class Violation(NamedTuple):
    rule: str
    element: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [f"{v.rule}\t{v.element}\t{v.message}" for v in self.violations]


def _parse_codes(field_text: str) -> list[int]:
    codes = []
    for part in field_text.split(";"):
        part = part.strip()
        if part:
            codes.append(int(part))
    return codes


def _finish(graph: InfluenceGraph, report: ParseReport, consumed: int, what: str) -> ParseReport:
    if consumed == 0:
        raise EmptyInputError(f"no well-formed {what} found in input")
    report.graph = graph.canonical()
    return report


def parse_edge_csv(text: str, has_header: bool | None = None, drop_self_loops: bool = False) -> ParseReport:
    """Parse ``source,relation,target[,theory]`` rows into a canonical graph.

    ``has_header=None`` detects the header row by its column names. Lines
    starting with ``#`` are comments. The
    theory column may hold several codes joined by ``;``. Self-influence
    rows never enter the graph; unless ``drop_self_loops`` is set they are
    also listed in ``report.self_loops`` so validation can flag them.
    """
    graph = InfluenceGraph()
    report = ParseReport(graph)
    consumed = 0
    first = True
    for lineno, raw in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
        if raw.lstrip().startswith("#"):
            continue
        try:
            row = next(csv.reader([raw.replace("\x00", "")]), [])
        except csv.Error as exc:
            report.warnings.append(ParseWarning(lineno, f"dropped: unreadable row ({exc})"))
            first = False
            continue
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        if first and has_header is not False:
            first = False
            if tuple(c.lower() for c in cells[:3]) == CSV_HEADER[:3]:
                continue
            if has_header:
                report.warnings.append(ParseWarning(lineno, "dropped: expected header row"))
                continue
        first = False
        if len(cells) not in (3, 4):
            report.warnings.append(ParseWarning(lineno, f"dropped: expected 3 or 4 fields, got {len(cells)}"))
            continue
        source, relation, target = cells[:3]
        if not source or not target:
            report.warnings.append(ParseWarning(lineno, "dropped: empty construct label"))
            continue
        if relation.lower() != RELATION:
            report.warnings.append(ParseWarning(lineno, f"dropped: non-influence relation {relation!r}"))
            continue
        try:
            codes = _parse_codes(cells[3]) if len(cells) == 4 else []
        except ValueError:
            report.warnings.append(ParseWarning(lineno, f"dropped: theory code is not an integer: {cells[3]!r}"))
            continue
        consumed += 1
        if source == target:
            report.warnings.append(ParseWarning(lineno, f"dropped: self-influence of {source!r}"))
            if not drop_self_loops:
                report.self_loops.append((lineno, source))
            continue
        u, v = graph.add_construct(source), graph.add_construct(target)
        if codes:
            for code in codes:
                graph.merge_edge(u, v, code)
        else:
            graph.merge_edge(u, v)
    return _finish(graph, report, consumed, "edge rows")


_TRIPLE = re.compile(r"^<([^<>\s]+)>\s+<([^<>\s]+)>\s+<([^<>\s]+)>\s*\.\s*(?:#.*)?$")


def _local_name(iri: str) -> str:
    return re.split(r"[#/]", iri)[-1]


def parse_triples(text: str, drop_self_loops: bool = False) -> ParseReport:
    """Parse ``<s> <p> <o> .`` lines whose predicate local name is ``influences``.

    Only absolute IRIs in angle brackets are understood; no prefixes,
    literals or blank nodes. Labels are the IRI fragment after the last
    ``#`` or ``/``.
    """
    graph = InfluenceGraph()
    report = ParseReport(graph)
    consumed = 0
    for lineno, raw in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _TRIPLE.match(line)
        if m is None:
            report.warnings.append(ParseWarning(lineno, "dropped: malformed triple"))
            continue
        subject, predicate, obj = (_local_name(part) for part in m.groups())
        if predicate.lower() != RELATION:
            report.warnings.append(ParseWarning(lineno, "dropped: non-influence predicate"))
            continue
        if not subject or not obj:
            report.warnings.append(ParseWarning(lineno, "dropped: IRI has an empty local name"))
            continue
        consumed += 1
        if subject == obj:
            report.warnings.append(ParseWarning(lineno, f"dropped: self-influence of {subject!r}"))
            if not drop_self_loops:
                report.self_loops.append((lineno, subject))
            continue
        graph.merge_edge(graph.add_construct(subject), graph.add_construct(obj))
    return _finish(graph, report, consumed, "triples")


def _label_key(label: str) -> str:
    folded = unicodedata.normalize("NFKC", label).casefold()
    return re.sub(r"[\s_\-]+", "", folded)


def validate(
    graph: InfluenceGraph,
    known_theory_codes: Iterable[int] = THEORY_CODES,
    allow_isolated: bool = False,
    self_loops: Iterable[tuple[int, str]] = (),
) -> ValidationReport:
    """Check the structural codification rules V1..V5.

    V1 unique labels (also after case/separator folding), V2 no
    self-influence, V3 provenance codes known, V4 no isolated constructs,
    V5 weight equals the number of supporting theories.
    """
    known = set(known_theory_codes)
    violations: list[Violation] = []
    labels = graph.labels

    seen: dict[str, str] = {}
    for label in labels:
        key = _label_key(label)
        if key in seen:
            violations.append(Violation("V1", label, f"duplicates construct {seen[key]!r}"))
        else:
            seen[key] = label

    for lineno, label in self_loops:
        violations.append(Violation("V2", f"{label}->{label}", f"self-influence (line {lineno})"))

    for e in graph.edges():
        name = f"{labels[e.source]}->{labels[e.target]}"
        if e.source == e.target:
            violations.append(Violation("V2", name, "self-influence"))
        unknown = sorted(e.provenance - known)
        if unknown:
            violations.append(Violation("V3", name, f"unknown theory codes {unknown}"))
        if e.provenance and e.weight != len(e.provenance):
            violations.append(
                Violation("V5", name, f"weight {e.weight:g} != {len(e.provenance)} supporting theories")
            )

    if not allow_isolated:
        for node in range(graph.node_count):
            if not graph.neighbors(node, "all"):
                violations.append(Violation("V4", labels[node], "isolated construct"))

    order = {"V1": 0, "V2": 1, "V3": 2, "V4": 3, "V5": 4}
    violations.sort(key=lambda v: (order[v.rule], v.element, v.message))
    return ValidationReport(violations)
