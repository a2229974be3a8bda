"""Metric definition files (versioned `gmet 1` format) and the bundled catalog.

Sections: [chart] (coords = comma list), [params] (declarations with range
assumptions, e.g. `M > 0`), [assume] (coordinate-range assumptions, e.g.
`r > 2*M`), [metric] (`signature = +---`, `coframeK = <expr> * d <coord>
[+ ...]`), [expect] (`class = vacuum|nonVacuum|flat`).  Coefficient
expressions use the shared scalar grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .forms import Chart, DegenerateCoframeError, FrameMetric, OrdForm, coframe_inverse
from .symexpr import ExprSyntaxError, ScalarExpr, UnknownSymbolError, parse_scalar

__all__ = [
    "MetricSpec",
    "MetricFileError",
    "parse_metric_file",
    "parse_metric_text",
    "serialize_metric",
    "catalog_names",
    "load_catalog_metric",
    "CLASSIFICATIONS",
]

CLASSIFICATIONS = ("vacuum", "nonVacuum", "flat")

CATALOG = (
    "minkowski_cartesian",
    "minkowski_spherical",
    "schwarzschild",
    "kasner",
    "pp_wave",
    "de_sitter",
    "flrw_radiation",
)


class MetricFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line


@dataclass(frozen=True)
class MetricSpec:
    """A catalog entry: chart, frame metric, coframe, expected classification.

    The classification is an expectation checked by the pipeline, never an
    input to the geometry.
    """

    name: str
    chart: Chart
    eta: FrameMetric
    coframe: tuple[OrdForm, ...]
    classification: str
    coframe_text: tuple[str, ...] = ()

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise MetricFileError(f"unknown classification {self.classification!r}")
        coframe_inverse(self.coframe)  # raises DegenerateCoframeError

    @property
    def expects_ricci_flat(self) -> bool:
        return self.classification in ("vacuum", "flat")


_TERM_RE = re.compile(r"^(?P<coeff>.*?)(?:\*)?\s*\bd\s+(?P<coord>[A-Za-z_][A-Za-z0-9_]*)\s*$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    """Split a coframe row on top-level +/- into signed term strings."""
    terms: list[tuple[int, str]] = []
    depth = 0
    sign = 1
    cur: list[str] = []
    last_solid = ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and ch in "+-" and last_solid and last_solid not in "*/^(+-":
            terms.append((sign, "".join(cur).strip()))
            sign = 1 if ch == "+" else -1
            cur = []
            last_solid = ""
        else:
            cur.append(ch)
            if not ch.isspace():
                last_solid = ch
    if "".join(cur).strip():
        terms.append((sign, "".join(cur).strip()))
    return terms


def _parse_coframe_row(row: str, chart: Chart, line_no: int) -> OrdForm:
    names = chart.names
    total = OrdForm.zero(chart, 1)
    for sign, term in _split_terms(row):
        mt = _TERM_RE.match(term)
        if not mt:
            raise MetricFileError(f"coframe term must look like '<expr> * d <coord>': {term!r}", line_no)
        coord_name = mt.group("coord")
        if coord_name not in {str(c) for c in chart.coords}:
            raise MetricFileError(f"unknown coordinate '{coord_name}' in coframe term", line_no)
        coeff_text = mt.group("coeff").strip().rstrip("*").strip() or "1"
        try:
            coeff = parse_scalar(coeff_text, names)
        except UnknownSymbolError as exc:
            raise MetricFileError(f"unknown symbol '{exc.name}' in coframe coefficient", line_no) from None
        except ExprSyntaxError as exc:
            raise MetricFileError(f"bad coframe coefficient {coeff_text!r}: {exc}", line_no) from None
        if sign < 0:
            coeff = -coeff
        k = [str(c) for c in chart.coords].index(coord_name)
        total = total + OrdForm(chart, 1, {(k,): coeff})
    return total


def parse_metric_text(text: str, name: str = "<memory>") -> MetricSpec:
    lines = text.splitlines()
    if not lines or lines[0].split("#")[0].strip() != "gmet 1":
        raise MetricFileError("first line must be the version header 'gmet 1'", 1)

    section = None
    coords: list[str] = []
    param_lines: list[tuple[int, str]] = []
    assume_lines: list[tuple[int, str]] = []
    signature = None
    coframe_rows: dict[int, tuple[int, str]] = {}
    classification = None

    for i, raw in enumerate(lines[1:], start=2):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("chart", "params", "assume", "metric", "expect"):
                raise MetricFileError(f"unknown section [{section}]", i)
            continue
        if section == "chart":
            if not line.startswith("coords"):
                raise MetricFileError("the [chart] section takes 'coords = ...'", i)
            _, _, rhs = line.partition("=")
            coords = [c.strip() for c in rhs.split(",") if c.strip()]
        elif section == "params":
            param_lines.append((i, line))
        elif section == "assume":
            assume_lines.append((i, line))
        elif section == "metric":
            key, _, rhs = line.partition("=")
            key = key.strip()
            if key == "signature":
                signature = rhs.strip()
            elif key.startswith("coframe"):
                try:
                    idx = int(key[len("coframe") :])
                except ValueError:
                    raise MetricFileError(f"bad coframe key {key!r}", i) from None
                coframe_rows[idx] = (i, rhs.strip())
            else:
                raise MetricFileError(f"unknown [metric] entry {key!r}", i)
        elif section == "expect":
            key, _, rhs = line.partition("=")
            if key.strip() != "class":
                raise MetricFileError("the [expect] section takes 'class = ...'", i)
            classification = rhs.strip()
        else:
            raise MetricFileError("content before any section header", i)

    if not coords:
        raise MetricFileError("missing [chart] coords")
    if signature is None:
        raise MetricFileError("missing signature in [metric]")
    if classification is None:
        raise MetricFileError("missing [expect] class")

    param_names: list[str] = []
    assumptions: list[str] = []
    coord_set = set(coords)
    for line_no, decl in param_lines:
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*([<>])\s*(.+)$", decl)
        if m:
            sym = m.group(1)
            if sym not in coord_set and sym not in param_names:
                param_names.append(sym)
            assumptions.append(decl)
        else:
            if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", decl):
                raise MetricFileError(f"bad parameter declaration {decl!r}", line_no)
            if decl not in param_names:
                param_names.append(decl)
    for line_no, decl in assume_lines:
        if not re.search(r"[<>]", decl):
            raise MetricFileError(f"assumption must be an inequality: {decl!r}", line_no)
        for tok in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", decl):
            if tok not in coord_set and tok not in param_names and tok != "pi":
                param_names.append(tok)
        assumptions.append(decl)

    try:
        chart = Chart.make(coords, param_names, assumptions)
    except ValueError as exc:
        raise MetricFileError(str(exc)) from None
    try:
        eta = FrameMetric.from_signature(signature)
    except ValueError as exc:
        raise MetricFileError(str(exc)) from None
    if eta.n != len(coords):
        raise MetricFileError(f"signature length {eta.n} does not match {len(coords)} coordinates")

    expected = set(range(len(coords)))
    if set(coframe_rows) != expected:
        raise MetricFileError(f"need coframe rows {sorted(expected)}, found {sorted(coframe_rows)}")
    coframe = []
    texts = []
    for k in range(len(coords)):
        line_no, row = coframe_rows[k]
        coframe.append(_parse_coframe_row(row, chart, line_no))
        texts.append(row)

    if classification not in CLASSIFICATIONS:
        raise MetricFileError(f"unknown classification {classification!r}")
    try:
        return MetricSpec(name, chart, eta, tuple(coframe), classification, tuple(texts))
    except DegenerateCoframeError as exc:
        raise MetricFileError(f"non-invertible coframe: {exc}") from None


def parse_metric_file(path) -> MetricSpec:
    import os

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return parse_metric_text(text, name)


def serialize_metric(spec: MetricSpec) -> str:
    """Round-trip serializer for MetricSpec."""
    out = ["gmet 1", "", "[chart]", "coords = " + ", ".join(str(c) for c in spec.chart.coords), ""]
    out.append("[params]")
    for p in spec.chart.params:
        out.append(str(p))
    out.append("")
    out.append("[assume]")
    for rel in spec.chart.assumptions:
        op = ">" if rel.rel_op == ">" else "<"
        out.append(f"{rel.lhs} {op} {rel.rhs}")
    out.append("")
    out.append("[metric]")
    out.append(f"signature = {spec.eta}")
    names = [str(c) for c in spec.chart.coords]
    for k, th in enumerate(spec.coframe):
        bits = []
        for (mu,), coeff in sorted(th.terms.items()):
            bits.append(f"({coeff.re}) * d {names[mu]}")
        out.append(f"coframe{k} = " + " + ".join(bits))
    out.append("")
    out.append("[expect]")
    out.append(f"class = {spec.classification}")
    out.append("")
    return "\n".join(out)


def catalog_names() -> tuple[str, ...]:
    return CATALOG


def load_catalog_metric(name: str) -> MetricSpec:
    if name not in CATALOG:
        raise MetricFileError(f"unknown catalog metric {name!r}; available: {', '.join(CATALOG)}")
    text = resources.files("gfcalc").joinpath(f"metrics/{name}.gmet").read_text(encoding="utf-8")
    return parse_metric_text(text, name)
