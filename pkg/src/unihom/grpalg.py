"""Free-group words and the truncated group algebra ``Q F_r / J^{n+1}``.

The truncation is realized through the Magnus expansion ``g_i -> 1 + e_i``
into tensors of degree at most ``n``.  Generators are numbered from 1, as
in the word syntax ``g1 g2^-1 g1``.  Words are read left to right in
traversal order.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Word",
    "TruncElem",
    "GroupoidSetup",
    "parse_word",
    "format_word",
    "inverse_word",
    "magnus",
    "mul",
    "project",
    "monomials",
    "algebra_dimension",
    "basis_lift",
    "lift_product",
    "groupoid_class",
    "groupoid_setup",
]

Word = tuple  # tuple of (generator, sign) pairs

_TOKEN = re.compile(r"^g(\d+)(\^-1)?$")


def parse_word(text: str, rank: int | None = None) -> Word:
    """``"g1 g2^-1"`` -> ``((1, 1), (2, -1))``; ``""`` or ``"1"`` is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    letters = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad word token {tok!r}")
        g = int(m.group(1))
        if g < 1 or (rank is not None and g > rank):
            raise ValueError(f"generator g{g} outside rank {rank}")
        letters.append((g, -1 if m.group(2) else 1))
    return tuple(letters)


def format_word(w: Word) -> str:
    if not w:
        return "1"
    return " ".join(f"g{g}" if s > 0 else f"g{g}^-1" for g, s in w)


def inverse_word(w: Word) -> Word:
    return tuple((g, -s) for g, s in reversed(w))


def monomials(rank: int, n: int) -> list[tuple]:
    """Tensor monomials of degree <= n: by degree, then lexicographically."""
    out = []
    for k in range(n + 1):
        out.extend(itertools.product(range(1, rank + 1), repeat=k))
    return out


def algebra_dimension(rank: int, n: int) -> int:
    return sum(rank ** k for k in range(n + 1))


@dataclass(frozen=True)
class TruncElem:
    """Element of the tensor algebra truncated above degree ``level``."""
    level: int
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.coeffs.items():
            m = tuple(m)
            if len(m) > self.level:
                raise ValueError(f"monomial {m} above level {self.level}")
            c = Fraction(c)
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def one(cls, level: int) -> "TruncElem":
        return cls(level, {(): 1})

    def __add__(self, other: "TruncElem") -> "TruncElem":
        _same_level(self, other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return TruncElem(self.level, out)

    def __sub__(self, other: "TruncElem") -> "TruncElem":
        return self + other.scale(-1)

    def scale(self, k) -> "TruncElem":
        k = Fraction(k)
        return TruncElem(self.level, {m: k * c for m, c in self.coeffs.items()})

    def __mul__(self, other: "TruncElem") -> "TruncElem":
        return mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncElem):
            return NotImplemented
        return self.level == other.level and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.level, frozenset(self.coeffs.items())))

    def vector(self, rank: int) -> tuple:
        """Coordinates in the basis ``monomials(rank, level)``."""
        return tuple(self.coeffs.get(m, Fraction(0)) for m in monomials(rank, self.level))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs, key=lambda m: (len(m), m)):
            c = self.coeffs[m]
            mono = "1" if not m else "⊗".join(f"e{i}" for i in m)
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _same_level(a: TruncElem, b: TruncElem):
    if a.level != b.level:
        raise ValueError(f"level mismatch: {a.level} vs {b.level}")


def mul(a: TruncElem, b: TruncElem) -> TruncElem:
    """Concatenation product, truncated at the common level."""
    _same_level(a, b)
    n = a.level
    out: dict[tuple, Fraction] = {}
    for m1, c1 in a.coeffs.items():
        for m2, c2 in b.coeffs.items():
            if len(m1) + len(m2) > n:
                continue
            m = m1 + m2
            out[m] = out.get(m, 0) + c1 * c2
    return TruncElem(n, out)


def project(a: TruncElem, level: int | None = None) -> TruncElem:
    """Drop monomials above ``level`` (default: one level down)."""
    level = a.level - 1 if level is None else level
    if level < 0 or level > a.level:
        raise ValueError(f"cannot project level {a.level} to {level}")
    return TruncElem(level, {m: c for m, c in a.coeffs.items() if len(m) <= level})


def _letter(g: int, s: int, n: int) -> TruncElem:
    if s > 0:
        return TruncElem(n, {(): 1, (g,): 1} if n >= 1 else {(): 1})
    # (1 + e)^-1 = sum (-e)^k
    return TruncElem(n, {(g,) * k: (-1) ** k for k in range(n + 1)})


def magnus(w: Word, n: int) -> TruncElem:
    out = TruncElem.one(n)
    for g, s in w:
        out = mul(out, _letter(g, s, n))
    return out


def basis_lift(mono: Sequence[int]) -> dict:
    """``e_{i1}⊗...⊗e_{ik}`` -> expansion of ``(g_{i1}-1)...(g_{ik}-1)`` as ``{word: coeff}``."""
    return lift_product([(i, 1) for i in mono])


def lift_product(letters: Sequence[tuple]) -> dict:
    """Expand ``(l_1 - 1)...(l_k - 1)`` for letters ``l_j`` into signed words."""
    out: dict[Word, Fraction] = {}
    k = len(letters)
    for keep in itertools.product((True, False), repeat=k):
        w = tuple(l for l, kp in zip(letters, keep) if kp)
        c = Fraction((-1) ** (k - sum(keep)))
        out[w] = out.get(w, 0) + c
    return {w: c for w, c in out.items() if c != 0}


# groupoid data of a graph-like model


@dataclass
class GroupoidSetup:
    """Free-generator bookkeeping for paths in a model space.

    ``edge_word`` translates each nondegenerate edge into a word (empty for
    spanning-tree edges).  ``letter_path`` realizes each letter as a
    directed edge loop at ``x``; ``ref_path`` runs from ``x`` to ``y``.
    """
    rank: int
    x: int
    y: int
    ref_path: tuple
    edge_word: dict
    letter_path: dict
    tree_edges: frozenset = frozenset()

    @property
    def basepoints_equal(self) -> bool:
        return self.x == self.y

    def word_of_path(self, path: Iterable[int]) -> Word:
        w: list = []
        for e in path:
            w.extend(self.edge_word[e])
        return tuple(w)

    def class_word(self, path: Sequence[int]) -> Word:
        """Word of ``path`` followed by the reference path backwards: a loop at ``x``."""
        return self.word_of_path(path) + inverse_word(self.word_of_path(self.ref_path))

    def path_of_word(self, w: Word) -> tuple:
        """Directed path ``x -> y`` realizing ``w`` followed by the reference path."""
        out: list = []
        for letter in w:
            try:
                out.extend(self.letter_path[letter])
            except KeyError:
                raise ValueError(f"letter {format_word((letter,))} has no directed realization "
                                 "in this model") from None
        return tuple(out) + tuple(self.ref_path)


def groupoid_class(path: Sequence[int], setup: GroupoidSetup, n: int, X=None) -> TruncElem:
    """Class of an edge path ``x -> y`` in the level-``n`` truncation."""
    if X is not None:
        start, end = path_endpoints(X, path, setup.x)
        if (start, end) != (setup.x, setup.y):
            raise ValueError("path does not run from x to y")
    return magnus(setup.class_word(path), n)


def path_endpoints(X, path: Sequence[int], default: int) -> tuple[int, int]:
    """Start and end vertex of a directed edge path; raises if not composable."""
    if not path:
        return default, default
    start, cur = X.edge_ends(path[0])
    for e in path[1:]:
        a, b = X.edge_ends(e)
        if a != cur:
            raise ValueError("edges of the path are not consecutive")
        cur = b
    return start, cur


def _directed_bfs(n_vertices, out_edges, src):
    """Shortest directed paths from ``src``: ``{vertex: tuple of edges}``."""
    paths = {src: ()}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for e, w in out_edges[u]:
            if w not in paths:
                paths[w] = paths[u] + (e,)
                queue.append(w)
    return paths


def groupoid_setup(X, x, y) -> GroupoidSetup:
    """Spanning-tree trivialization of the fundamental groupoid of a graph model.

    Edges listed in ``X.inverse_edges`` (the ``wedge_inv`` gadget) are
    formal inverses and do not count as graph edges.  The tree grows first
    along directed edges out of ``x`` so that tree paths from ``x`` are
    directed whenever possible.
    """
    if X.dim > 1 and not X.inverse_edges:
        raise ValueError("groupoid setup needs a graph model (free fundamental group)")
    x = X.vertex_id(x)
    y = X.vertex_id(y)
    nv = X.count(0)
    ne = X.count(1) if X.top >= 1 else 0
    inv_of = {f: e for e, f in X.inverse_edges.items()}
    graph_edges = [e for e in range(ne) if e not in inv_of]
    ends = {e: X.edge_ends(e) for e in range(ne)}
    out_edges = {v: [] for v in range(nv)}
    for e in range(ne):
        a, b = ends[e]
        out_edges[a].append((e, b))
    # directed arborescence from x, then undirected completion
    parent: dict[int, int | None] = {x: None}
    tree = set()
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for e in graph_edges:
            a, b = ends[e]
            if a == u and b not in parent:
                parent[b] = e
                tree.add(e)
                queue.append(b)
    queue = deque(sorted(parent))
    while queue:
        u = queue.popleft()
        for e in graph_edges:
            a, b = ends[e]
            for s, t in ((a, b), (b, a)):
                if s == u and t not in parent:
                    parent[t] = e
                    tree.add(e)
                    queue.append(t)
    if len(parent) != nv:
        raise ValueError("model is not connected")
    edge_word = {}
    letter_of = {}
    g = 0
    for e in graph_edges:
        if e in tree:
            edge_word[e] = ()
        else:
            g += 1
            letter_of[e] = g
            edge_word[e] = ((g, 1),)
    for f, e in inv_of.items():
        edge_word[f] = inverse_word(edge_word[e])
    rank = g
    from_x = _directed_bfs(nv, out_edges, x)
    to_x = {}
    for v in range(nv):
        p = _directed_bfs(nv, out_edges, v).get(x)
        if p is not None:
            to_x[v] = p
    letter_path = {}
    for e, k in letter_of.items():
        a, b = ends[e]
        if a in from_x and b in to_x:
            letter_path[(k, 1)] = from_x[a] + (e,) + to_x[b]
        f = X.inverse_edges.get(e)
        if f is not None and b in from_x and a in to_x:
            letter_path[(k, -1)] = from_x[b] + (f,) + to_x[a]
    if y not in from_x:
        raise ValueError("no directed path from x to y")
    return GroupoidSetup(rank, x, y, from_x[y], edge_word, letter_path, frozenset(tree))
