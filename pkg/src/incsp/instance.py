"""Reading and writing the plain-text instance format.

::

    n m0
    u v w          (m0 initial edges)
    + u v w        insert
    ~ u v w        decrease
    ? u v          all-pairs query
    ?s v           single-source query
    ?off v t       offline query against version t
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .graph import DynGraph, Update, UpdateKind


class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Query:
    kind: str  # "apsp" | "sssp" | "offline"
    args: tuple[int, ...]


Op = Union[Update, Query]


@dataclass
class Instance:
    n: int
    edges: list[tuple[int, int, float]]
    ops: list[Op] = field(default_factory=list)
    # source line of each op, for diagnostics raised during replay
    lines: list[int] = field(default_factory=list)

    @property
    def updates(self) -> list[Update]:
        return [op for op in self.ops if isinstance(op, Update)]

    def graph(self) -> DynGraph:
        return DynGraph(self.n, self.edges)


def _number(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceFormatError(lineno, f"expected a number, got {tok!r}") from None


def _vertex(tok: str, n: int, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise InstanceFormatError(lineno, f"expected a vertex id, got {tok!r}") from None
    if not 0 <= v < n:
        raise InstanceFormatError(lineno, f"vertex {v} out of range [0, {n})")
    return v


_ARITY = {"+": 3, "~": 3, "?": 2, "?s": 1, "?off": 2}


def parse_instance(text: str) -> Instance:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise InstanceFormatError(1, "empty instance")
    lineno, head = lines[0]
    if len(head) != 2:
        raise InstanceFormatError(lineno, "header must be 'n m0'")
    try:
        n, m0 = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceFormatError(lineno, "header must hold two integers") from None
    if n < 1 or m0 < 0:
        raise InstanceFormatError(lineno, "need n >= 1 and m0 >= 0")
    if len(lines) < 1 + m0:
        raise InstanceFormatError(lines[-1][0], f"expected {m0} initial edges")
    inst = Instance(n, [])
    for lineno, toks in lines[1 : 1 + m0]:
        if len(toks) != 3:
            raise InstanceFormatError(lineno, "initial edge must be 'u v w'")
        inst.edges.append((_vertex(toks[0], n, lineno), _vertex(toks[1], n, lineno), _number(toks[2], lineno)))
    for lineno, toks in lines[1 + m0 :]:
        tag, rest = toks[0], toks[1:]
        inst.lines.append(lineno)
        if tag not in _ARITY:
            raise InstanceFormatError(lineno, f"unknown record {tag!r}")
        if len(rest) != _ARITY[tag]:
            raise InstanceFormatError(lineno, f"{tag!r} takes {_ARITY[tag]} fields")
        if tag in ("+", "~"):
            u, v = _vertex(rest[0], n, lineno), _vertex(rest[1], n, lineno)
            inst.ops.append(Update(UpdateKind(tag), u, v, _number(rest[2], lineno)))
        elif tag == "?":
            inst.ops.append(Query("apsp", (_vertex(rest[0], n, lineno), _vertex(rest[1], n, lineno))))
        elif tag == "?s":
            inst.ops.append(Query("sssp", (_vertex(rest[0], n, lineno),)))
        else:
            try:
                t = int(rest[1])
            except ValueError:
                raise InstanceFormatError(lineno, f"bad version {rest[1]!r}") from None
            inst.ops.append(Query("offline", (_vertex(rest[0], n, lineno), t)))
    return inst


def _fmt(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def format_instance(n: int, edges: Iterable[tuple[int, int, float]], ops: Iterable[Op]) -> str:
    edges = list(edges)
    out = [f"{n} {len(edges)}"]
    out += [f"{u} {v} {_fmt(w)}" for u, v, w in edges]
    for op in ops:
        if isinstance(op, Update):
            out.append(f"{op.kind.value} {op.tail} {op.head} {_fmt(op.weight)}")
        elif op.kind == "apsp":
            out.append(f"? {op.args[0]} {op.args[1]}")
        elif op.kind == "sssp":
            out.append(f"?s {op.args[0]}")
        else:
            out.append(f"?off {op.args[0]} {op.args[1]}")
    return "\n".join(out) + "\n"
