"""Text formats: edge lists, a Newick subset, and JSON analysis reports.

Edge list
    One edge per line, ``<label> <label> <length>``. ``#`` starts a comment,
    blank lines are skipped. A line holding a single label declares a vertex,
    which is how a one-vertex tree is written. Vertex order is the order of
    first appearance.

Newick
    ``(child,child,...)name:length`` nested to any depth and closed by ``;``.
    Every non-root node needs a length; a length on the root is accepted and
    dropped. Leaves need names; unnamed internal nodes become ``_i1``, ``_i2``,
    ... in preorder. Labels may be single-quoted (``''`` escapes a quote).
    Vertices are numbered in preorder and each edge is listed when its child
    is reached.

Lengths in both formats are integers, ``p/q`` or finite decimals, all read
exactly. Exponent notation is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .exact_linalg import Inertia
from .graph_model import Tree, VertexSubset, build_tree, leaves
from .minor_formulas import MinorReport

SCHEMA_VERSION = "1.0"

_NUMBER = re.compile(r"[+-]?(\d+(/\d+)?|\d+\.\d*|\.\d+)")


def parse_length(token: str, line: int = 1, column: int = 1) -> Fraction:
    """Exact value of an integer, ``p/q`` or decimal token."""
    if not _NUMBER.fullmatch(token):
        raise ParseError(f"bad length {token!r}", line, column)
    if "/" in token:
        p, q = token.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {token!r}", line, column)
        return Fraction(int(p), int(q))
    return Fraction(token)


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str) or not re.fullmatch(r"-?\d+(/\d+)?", text):
        raise ValueError(f"not an exact rational string: {text!r}")
    return Fraction(text)


# ---------------------------------------------------------------- edge lists


def parse_edge_list(text: str) -> Tree:
    labels: dict[str, None] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]
        if not tokens:
            continue
        if len(tokens) == 1:
            labels.setdefault(tokens[0][0])
            continue
        if len(tokens) != 3:
            col = tokens[3][1] if len(tokens) > 3 else tokens[-1][1] + len(tokens[-1][0])
            raise ParseError(f"expected '<label> <label> <length>', got {len(tokens)} fields",
                             lineno, col)
        (a, _), (b, _), (length, col) = tokens
        labels.setdefault(a)
        labels.setdefault(b)
        edges.append((a, b, parse_length(length, lineno, col)))
    return build_tree(list(labels), edges)


def serialize_edge_list(t: Tree) -> str:
    lines = [f"{t.labels[e.tail]} {t.labels[e.head]} {format_rational(e.length)}" for e in t.edges]
    if not t.edges:
        lines = [str(t.labels[0])]
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------- Newick


class _Scanner:
    """Character cursor that tracks line and column for error messages."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        return line, pos - (self.text.rfind("\n", 0, pos) + 1) + 1

    def fail(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, *self.where(pos))

    def skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self) -> str | None:
        self.skip_space()
        if self.peek() == "'":
            start = self.pos
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(self.text):
                    raise self.fail("unterminated quoted label", start)
                c = self.text[self.pos]
                self.pos += 1
                if c == "'":
                    if self.text.startswith("'", self.pos):
                        out.append("'")
                        self.pos += 1
                        continue
                    return "".join(out)
                out.append(c)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),:;'[]" \
                and not self.text[self.pos].isspace():
            self.pos += 1
        return self.text[start:self.pos] or None

    def length(self) -> Fraction | None:
        if self.peek() != ":":
            return None
        self.pos += 1
        self.skip_space()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),:;" \
                and not self.text[self.pos].isspace():
            self.pos += 1
        token = self.text[start:self.pos]
        line, col = self.where(start)
        return parse_length(token, line, col)


@dataclass
class _Node:
    name: str | None
    length: Fraction | None = None
    children: list["_Node"] = field(default_factory=list)
    pos: int = 0


def _read_newick(sc: _Scanner) -> _Node:
    # explicit stack of open '(' nodes: deep nesting must not hit the recursion limit
    stack: list[_Node] = []
    root: _Node | None = None

    def attach(node: _Node) -> None:
        nonlocal root
        if stack:
            stack[-1].children.append(node)
        else:
            root = node

    while True:
        if sc.peek() == "(":
            node = _Node(None, pos=sc.pos)
            sc.pos += 1
            attach(node)
            stack.append(node)
            continue
        pos = sc.pos
        leaf = _Node(sc.label(), pos=pos)
        leaf.length = sc.length()
        attach(leaf)
        while True:
            c = sc.peek()
            if c == ",":
                if not stack:
                    raise sc.fail("',' outside parentheses")
                sc.pos += 1
                break
            if c == ")":
                if not stack:
                    raise sc.fail("unbalanced ')'")
                sc.pos += 1
                closed = stack.pop()
                closed.pos = sc.pos
                closed.name = sc.label()
                closed.length = sc.length()
                continue
            if c == ";":
                if stack:
                    raise sc.fail("unbalanced parentheses: missing ')'")
                sc.pos += 1
                if sc.peek():
                    raise sc.fail("trailing text after ';'")
                return root
            if not c:
                raise sc.fail("unbalanced parentheses: missing ')'" if stack
                              else "unexpected end of input, expected ';'")
            raise sc.fail(f"unexpected {c!r}")


def parse_newick(text: str) -> tuple[Tree, VertexSubset]:
    """Tree plus its leaf set (vertices of degree at most one)."""
    sc = _Scanner(text)
    root = _read_newick(sc)
    labels: list[str] = []
    edges: list[tuple] = []
    auto = 0
    order = [(root, None)]
    while order:
        node, parent = order.pop()
        if node.name is None:
            if not node.children:
                raise sc.fail("leaf without a name", node.pos)
            auto += 1
            node.name = f"_i{auto}"
        labels.append(node.name)
        if parent is not None:
            if node.length is None:
                raise sc.fail(f"missing branch length for {node.name!r}", node.pos)
            edges.append((parent.name, node.name, node.length))
        order.extend((child, node) for child in reversed(node.children))
    t = build_tree(labels, edges)
    return t, leaves(t)


_PLAIN_LABEL = re.compile(r"[^\s(),:;'\[\]]+")


def _quote(label) -> str:
    text = str(label)
    if _PLAIN_LABEL.fullmatch(text):
        return text
    return "'" + text.replace("'", "''") + "'"


def serialize_newick(t: Tree, root: int = 0) -> str:
    """Newick text rooted at vertex ``root``; children follow edge order."""
    children: list[list[tuple[int, Fraction]]] = [[] for _ in range(t.n)]
    seen = {root}
    frontier = [root]
    while frontier:
        v = frontier.pop()
        for j in t.adjacency[v]:
            e = t.edges[j]
            w = e.head if e.tail == v else e.tail
            if w not in seen:
                seen.add(w)
                children[v].append((w, e.length))
                frontier.append(w)
    for c in children:
        c.sort(key=lambda item: item[0])
    out: list[str] = []
    # post-order emission with an explicit stack
    stack: list[tuple[int, Fraction | None, int]] = [(root, None, 0)]
    while stack:
        v, length, i = stack.pop()
        kids = children[v]
        if i == 0 and kids:
            out.append("(")
        if i < len(kids):
            if i:
                out.append(",")
            stack.append((v, length, i + 1))
            w, a = kids[i]
            stack.append((w, a, 0))
            continue
        if kids:
            out.append(")")
        out.append(_quote(t.labels[v]))
        if length is not None:
            out.append(":" + format_rational(length))
    return "".join(out) + ";"


# -------------------------------------------------------------- JSON reports


@dataclass
class AnalysisReport:
    input_format: str
    vertices: int
    edges: int
    subset: tuple
    minor: MinorReport
    seconds: float
    tool_version: str
    schema_version: str = SCHEMA_VERSION


def _rat_list(xs) -> list[str]:
    return [format_rational(x) for x in xs]


def minor_to_json(r: MinorReport) -> dict[str, Any]:
    return {
        "subset": list(r.subset),
        "det_formula": format_rational(r.det_formula),
        "det_direct": format_rational(r.det_direct),
        "cof": format_rational(r.cof),
        "kappa": format_rational(r.kappa),
        "lambda": format_rational(r.lam),
        "ratio": format_rational(r.ratio),
        "m": _rat_list(r.m),
        "histogram": {str(d): format_rational(w) for d, w in r.histogram.items()},
        "f1_count": r.f1_count,
        "f2_count": r.f2_count,
        "inertia": list(r.inertia),
        "symanzik_psi": format_rational(r.symanzik_psi),
        "symanzik_phi": format_rational(r.symanzik_phi),
        "bounds": None if r.bounds is None else _rat_list(r.bounds),
        "checks": list(r.checks),
    }


def minor_from_json(d: dict[str, Any]) -> MinorReport:
    q = parse_rational
    return MinorReport(
        subset=tuple(d["subset"]),
        det_formula=q(d["det_formula"]),
        det_direct=q(d["det_direct"]),
        cof=q(d["cof"]),
        kappa=q(d["kappa"]),
        lam=q(d["lambda"]),
        ratio=q(d["ratio"]),
        m=tuple(q(x) for x in d["m"]),
        histogram={int(k): q(v) for k, v in d["histogram"].items()},
        f1_count=d["f1_count"],
        f2_count=d["f2_count"],
        inertia=Inertia(*d["inertia"]),
        symanzik_psi=q(d["symanzik_psi"]),
        symanzik_phi=q(d["symanzik_phi"]),
        bounds=None if d["bounds"] is None else tuple(q(x) for x in d["bounds"]),
        checks=list(d["checks"]),
    )


def report_to_json(r: AnalysisReport) -> dict[str, Any]:
    return {
        "schema_version": r.schema_version,
        "tool_version": r.tool_version,
        "input": {
            "format": r.input_format,
            "vertices": r.vertices,
            "edges": r.edges,
            "subset": list(r.subset),
        },
        "report": minor_to_json(r.minor),
        "timing": {"seconds": r.seconds},
    }


def report_from_json(d: dict[str, Any]) -> AnalysisReport:
    inp = d["input"]
    return AnalysisReport(
        input_format=inp["format"],
        vertices=inp["vertices"],
        edges=inp["edges"],
        subset=tuple(inp["subset"]),
        minor=minor_from_json(d["report"]),
        seconds=d["timing"]["seconds"],
        tool_version=d["tool_version"],
        schema_version=d["schema_version"],
    )


_RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
_LABEL = {"type": ["string", "integer"]}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "treeminors analysis report",
    "type": "object",
    "required": ["schema_version", "tool_version", "input", "report", "timing"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "input": {
            "type": "object",
            "required": ["format", "vertices", "edges", "subset"],
            "properties": {
                "format": {"enum": ["edgelist", "newick"]},
                "vertices": {"type": "integer", "minimum": 1},
                "edges": {"type": "integer", "minimum": 0},
                "subset": {"type": "array", "items": _LABEL, "minItems": 1},
            },
        },
        "report": {
            "type": "object",
            "required": [
                "subset", "det_formula", "det_direct", "cof", "kappa", "lambda", "ratio",
                "m", "histogram", "f1_count", "f2_count", "inertia", "symanzik_psi",
                "symanzik_phi", "bounds", "checks",
            ],
            "properties": {
                "subset": {"type": "array", "items": _LABEL},
                "det_formula": _RATIONAL,
                "det_direct": _RATIONAL,
                "cof": _RATIONAL,
                "kappa": _RATIONAL,
                "lambda": _RATIONAL,
                "ratio": _RATIONAL,
                "m": {"type": "array", "items": _RATIONAL},
                "histogram": {
                    "type": "object",
                    "propertyNames": {"pattern": "^[0-9]+$"},
                    "additionalProperties": _RATIONAL,
                },
                "f1_count": {"type": "integer", "minimum": 1},
                "f2_count": {"type": "integer", "minimum": 0},
                "inertia": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 0},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "symanzik_psi": _RATIONAL,
                "symanzik_phi": _RATIONAL,
                "bounds": {
                    "oneOf": [
                        {"type": "null"},
                        {"type": "array", "items": _RATIONAL, "minItems": 2, "maxItems": 2},
                    ]
                },
                "checks": {"type": "array", "items": {"type": "string"}},
            },
        },
        "timing": {
            "type": "object",
            "required": ["seconds"],
            "properties": {"seconds": {"type": "number", "minimum": 0}},
        },
    },
}
