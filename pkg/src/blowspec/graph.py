"""Simple graphs: parsing, induced subgraphs and connected-subset enumeration.

Vertices are labeled ``0..n-1``. Neighborhoods are kept as integer bitmasks,
so a vertex subset is just an ``int`` whose bit ``i`` marks vertex ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import GraphFormatError, ValidationError

MAX_GRAPH6_N = 62


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph.

    Build through :meth:`from_edges` so edges are validated and normalized.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    rows: tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValidationError(f"vertex count must be nonnegative, got {n}")
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) out of range for n={n}")
            norm.add((min(u, v), max(u, v)))
        rows = [0] * n
        for u, v in norm:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(sorted(norm)), tuple(rows))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.rows[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix as float64."""
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def is_connected_mask(self, mask: int) -> bool:
        """True if the subgraph induced by ``mask`` is nonempty and connected."""
        if mask == 0:
            return False
        start = mask & -mask
        seen = frontier = start
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            nbrs = self.rows[low.bit_length() - 1] & mask & ~seen
            seen |= nbrs
            frontier |= nbrs
        return seen == mask


@dataclass(frozen=True)
class VertexSubset:
    """A set of vertices of a parent graph, stored as a bitmask."""

    parent_n: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.parent_n:
            raise ValidationError(
                f"subset mask {self.mask:#x} exceeds parent vertex count {self.parent_n}"
            )

    @classmethod
    def of(cls, parent_n: int, members: Iterable[int]) -> "VertexSubset":
        mask = 0
        for v in members:
            if not 0 <= v < parent_n:
                raise ValidationError(f"vertex {v} out of range for n={parent_n}")
            mask |= 1 << v
        return cls(parent_n, mask)

    @property
    def members(self) -> list[int]:
        return _bits(self.mask)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self):
        return iter(self.members)


# --------------------------------------------------------------------------
# parsing


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines, with an optional leading ``n <count>`` line.

    Blank lines and lines starting with ``#`` are skipped.
    """
    declared = None
    edges = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if seen_content:
                raise GraphFormatError("'n' declaration must come first", lineno)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise GraphFormatError(f"malformed vertex count line {line!r}", lineno)
            declared = int(tokens[1])
            seen_content = True
            continue
        seen_content = True
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise GraphFormatError(f"expected two nonnegative integers, got {line!r}", lineno)
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            raise GraphFormatError(f"self-loop {u} {v} not allowed", lineno)
        if declared is not None and max(u, v) >= declared:
            raise GraphFormatError(
                f"vertex {max(u, v)} out of range for declared n={declared}", lineno
            )
        edges.append((u, v))
    if declared is None:
        declared = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(declared, edges)


def _strip_graph6(text: str) -> str:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):].strip()
    return s


def parse_graph6(text: str) -> Graph:
    """Decode a single-byte-size graph6 string (n <= 62)."""
    s = _strip_graph6(text)
    if not s:
        raise GraphFormatError("empty graph6 string")
    data = []
    for pos, ch in enumerate(s):
        b = ord(ch)
        if not 63 <= b <= 126:
            raise GraphFormatError(f"byte {b} at position {pos} outside [63, 126]")
        data.append(b - 63)
    if data[0] == 63:
        raise GraphFormatError("long-form graph6 size (n > 62) is not supported")
    n = data[0]
    nbits = n * (n - 1) // 2
    nbytes = -(-nbits // 6)
    body = data[1:]
    if len(body) < nbytes:
        raise GraphFormatError(f"truncated graph6: need {nbytes} data bytes, got {len(body)}")
    if len(body) > nbytes:
        raise GraphFormatError(f"trailing data in graph6: expected {nbytes} data bytes, got {len(body)}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if body[k // 6] >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    if nbytes and body[-1] & ((1 << (6 * nbytes - nbits)) - 1):
        raise GraphFormatError("nonzero padding bits in graph6")
    return Graph.from_edges(n, edges)


def encode_graph6(g: Graph) -> str:
    if g.n > MAX_GRAPH6_N:
        raise ValidationError(f"graph6 encoding limited to n <= {MAX_GRAPH6_N}")
    bits = [int(g.has_edge(i, j)) for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(g.n + 63)]
    for p in range(0, len(bits), 6):
        val = 0
        for b in bits[p:p + 6]:
            val = val << 1 | b
        out.append(chr(val + 63))
    return "".join(out)


# --------------------------------------------------------------------------
# subgraphs


def induced_subgraph(g: Graph, subset: VertexSubset) -> tuple[Graph, list[int]]:
    """Induced subgraph relabeled ``0..k-1`` by ascending original label.

    Returns the subgraph and the list mapping new labels to original ones.
    """
    if subset.parent_n != g.n:
        raise ValidationError(f"subset is over {subset.parent_n} vertices, graph has {g.n}")
    labels = subset.members
    if not labels:
        raise ValidationError("induced subgraph of an empty vertex set")
    index = {v: i for i, v in enumerate(labels)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph.from_edges(len(labels), edges), labels


def _connected_from(g: Graph, anchor: int) -> list[int]:
    # Binary include/exclude branching over the frontier: every connected set
    # whose minimum vertex is `anchor` is reached along exactly one path.
    above = ~((1 << (anchor + 1)) - 1)
    found = []
    stack = [(1 << anchor, g.rows[anchor] & above, 0)]
    while stack:
        current, frontier, banned = stack.pop()
        frontier &= ~banned
        if not frontier:
            found.append(current)
            continue
        low = frontier & -frontier
        w = low.bit_length() - 1
        # exclude w
        stack.append((current, frontier ^ low, banned | low))
        # include w
        grown = current | low
        stack.append((grown, (frontier | g.rows[w]) & above & ~grown, banned))
    return found


def enumerate_connected_subsets(g: Graph) -> Iterator[VertexSubset]:
    """Every vertex set inducing a connected subgraph, each exactly once.

    Sets are grouped by minimum vertex; within a group they come in
    increasing bitmask order.
    """
    for anchor in range(g.n):
        for mask in sorted(_connected_from(g, anchor)):
            yield VertexSubset(g.n, mask)


def enumerate_all_subsets(g: Graph) -> Iterator[VertexSubset]:
    """Every nonempty vertex set, in the same grouping as the connected stream."""
    for anchor in range(g.n):
        base = 1 << anchor
        rest = [1 << v for v in range(anchor + 1, g.n)]
        masks = []
        for bits in range(1 << len(rest)):
            mask = base
            for i, b in enumerate(rest):
                if bits >> i & 1:
                    mask |= b
            masks.append(mask)
        for mask in sorted(masks):
            yield VertexSubset(g.n, mask)


def spectral_radius(g: Graph) -> float:
    """Largest adjacency eigenvalue (the Perron root); 0 for edgeless graphs."""
    if g.m == 0:
        return 0.0
    return float(np.linalg.eigvalsh(g.adjacency())[-1])
