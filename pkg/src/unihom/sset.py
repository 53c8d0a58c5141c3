"""Finite simplicial sets, their powers and face-closed subsets.

A simplex is addressed by a :class:`SimplexKey`: a nondegenerate simplex
(its dimension and integer id) together with the surjection
``eta: [degree] -> [dim]`` of its degeneracy, stored as a nondecreasing
tuple.  This is the Eilenberg-Zilber normal form; the degeneracy word
``s_{j_k} ... s_{j_1}`` is recovered from the positions where ``eta``
repeats.

Edges are oriented by ``d1 = start`` and ``d0 = end``.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "SimplexKey",
    "SimplicialSet",
    "SubsetMask",
    "Eq",
    "PinnedTo",
    "ResourceLimitExceeded",
    "DEFAULT_MAX_CELLS",
    "standard_model",
    "custom_graph",
    "face",
    "degeneracy",
    "total_degeneracy",
    "all_simplices",
    "power",
    "coordinate_constraint_subset",
    "union_subsets",
    "intersect_subsets",
    "full_mask",
    "empty_mask",
    "check_simplicial_identities",
]

DEFAULT_MAX_CELLS = 5_000_000
MAX_CELLS_ENV = "UNIHOM_MAX_CELLS"


class ResourceLimitExceeded(RuntimeError):
    """The nondegenerate-cell guard was hit while building a simplicial set."""


class SimplexKey(NamedTuple):
    dim: int
    index: int
    eta: tuple

    @property
    def degree(self) -> int:
        return len(self.eta) - 1

    @property
    def is_degenerate(self) -> bool:
        return self.degree != self.dim

    @property
    def degeneracy_word(self) -> list[int]:
        """Indices ``[j_k, ..., j_1]`` (strictly decreasing) with ``self = s_{j_k}...s_{j_1} y``."""
        e = self.eta
        return [j for j in range(len(e) - 2, -1, -1) if e[j] == e[j + 1]]

    @classmethod
    def from_word(cls, dim: int, index: int, word: Sequence[int]) -> "SimplexKey":
        word = list(word)
        if any(a <= b for a, b in zip(word, word[1:])):
            raise ValueError(f"degeneracy word {word} is not strictly decreasing")
        degree = dim + len(word)
        rep = set(word)
        if any(j < 0 or j >= degree for j in rep):
            raise ValueError(f"degeneracy index out of range in {word}")
        eta = [0]
        for t in range(degree):
            eta.append(eta[-1] + (0 if t in rep else 1))
        return cls(dim, index, tuple(eta))


def total_degeneracy(vertex: int, degree: int) -> SimplexKey:
    return SimplexKey(0, vertex, (0,) * (degree + 1))


def degeneracy(key: SimplexKey, j: int) -> SimplexKey:
    """Apply ``s_j``."""
    e = key.eta
    if not 0 <= j < len(e):
        raise IndexError(f"s_{j} undefined in degree {key.degree}")
    return SimplexKey(key.dim, key.index, e[: j + 1] + e[j:])


def _repeat_mask(eta: tuple) -> int:
    m = 0
    for j in range(len(eta) - 1):
        if eta[j] == eta[j + 1]:
            m |= 1 << j
    return m


def _surjections(d: int, m: int):
    """Nondecreasing surjections ``[d] -> [m]``, as tuples, in lexicographic order."""
    for jumps in itertools.combinations(range(d), m):
        eta = [0]
        js = set(jumps)
        for t in range(d):
            eta.append(eta[-1] + (1 if t in js else 0))
        yield tuple(eta)


class SimplicialSet:
    """A simplicial set given by its nondegenerate simplices and their faces.

    ``cells[d]`` lists labels of the nondegenerate ``d``-simplices and
    ``faces[d][k]`` holds ``(d_0 x, ..., d_d x)`` for the ``k``-th of them.
    ``cap`` is the highest degree that is known to be complete; ``None``
    means every nondegenerate simplex is listed (finite dimensional).
    """

    def __init__(self, cells, faces, cap=None, name="", vertex_names=None):
        self.cells = [list(c) for c in cells]
        self.faces = [list(f) for f in faces]
        self.cap = cap
        self.name = name
        self.index = [{lab: k for k, lab in enumerate(c)} for c in self.cells]
        if any(len(ix) != len(c) for ix, c in zip(self.index, self.cells)):
            raise ValueError("duplicate simplex labels")
        self.vertex_names = list(vertex_names) if vertex_names is not None else None
        # model metadata filled in by constructors
        self.model = name
        self.inverse_edges: dict[int, int] = {}
        self.factors = None
        self.base = None

    @property
    def top(self) -> int:
        """Highest degree with stored data."""
        return len(self.cells) - 1

    @property
    def dim(self) -> int:
        """Highest degree carrying a nondegenerate simplex."""
        for d in range(len(self.cells) - 1, -1, -1):
            if self.cells[d]:
                return d
        return -1

    def count(self, d: int) -> int:
        self._check_degree(d)
        return len(self.cells[d]) if d < len(self.cells) else 0

    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def _check_degree(self, d: int):
        if self.cap is not None and d > self.cap:
            raise ValueError(f"degree {d} exceeds the cap {self.cap} of {self.name or 'this set'}")

    def nondeg_face(self, dim: int, index: int, i: int) -> SimplexKey:
        return self.faces[dim][index][i]

    def key(self, d: int, label) -> SimplexKey:
        k = self.index[d][label]
        return SimplexKey(d, k, tuple(range(d + 1)))

    def nondeg(self, d: int, index: int) -> SimplexKey:
        return SimplexKey(d, index, tuple(range(d + 1)))

    def vertex_id(self, v) -> int:
        if isinstance(v, int) and not isinstance(v, bool):
            if not 0 <= v < len(self.cells[0]):
                raise ValueError(f"no vertex {v}")
            return v
        try:
            return self.index[0][v]
        except KeyError:
            raise ValueError(f"no vertex named {v!r}") from None

    def edge_id(self, e) -> int:
        if isinstance(e, int) and not isinstance(e, bool):
            if not 0 <= e < self.count(1):
                raise ValueError(f"no edge {e}")
            return e
        try:
            return self.index[1][e]
        except (KeyError, IndexError):
            raise ValueError(f"no edge named {e!r}") from None

    def edge_ends(self, e: int) -> tuple[int, int]:
        """``(start, end)`` vertex ids of a nondegenerate edge."""
        end, start = self.faces[1][e]
        return start.index, end.index

    def label(self, key: SimplexKey) -> str:
        """Readable name of a simplex, e.g. ``s0 e1`` or ``(s1 e, s0 e)``."""
        lab = self.cells[key.dim][key.index]
        if isinstance(lab, tuple):
            inner = ", ".join(self.base.label(c) for c in self.components(key))
            return f"({inner})"
        word = key.degeneracy_word
        return " ".join([f"s{j}" for j in word] + [str(lab)])

    # products

    def components(self, key: SimplexKey) -> tuple[SimplexKey, ...]:
        """Factor simplices of a simplex of a power (degeneracies pushed in)."""
        if self.factors is None:
            raise ValueError("not a power")
        comps = self.cells[key.dim][key.index]
        eta = key.eta
        return tuple(SimplexKey(c.dim, c.index, tuple(c.eta[v] for v in eta)) for c in comps)

    def key_of(self, comps: Sequence[SimplexKey], degree: int | None = None) -> SimplexKey:
        """Normalized key of the product simplex with the given components."""
        if self.factors is None:
            raise ValueError("not a power")
        if degree is None:
            if not comps:
                raise ValueError("degree required for the empty product")
            degree = comps[0].degree
        rep = (1 << degree) - 1
        for c in comps:
            if c.degree != degree:
                raise ValueError("components of different degrees")
            rep &= _repeat_mask(c.eta)
        eta = [0]
        for t in range(degree):
            eta.append(eta[-1] + (0 if rep >> t & 1 else 1))
        m = eta[-1]
        first = {}
        for t, v in enumerate(eta):
            first.setdefault(v, t)
        reps = [first[k] for k in range(m + 1)]
        label = tuple(SimplexKey(c.dim, c.index, tuple(c.eta[t] for t in reps)) for c in comps)
        self._check_degree(m)
        try:
            k = self.index[m][label]
        except (KeyError, IndexError):
            raise KeyError(f"product simplex {label} not found in degree {m}") from None
        return SimplexKey(m, k, tuple(eta))

    def __repr__(self):
        return f"SimplicialSet({self.name!r}, counts={self.counts()}, cap={self.cap})"


def face(X: SimplicialSet, key: SimplexKey, i: int) -> SimplexKey:
    """``d_i`` of an arbitrary simplex, in normal form."""
    d = key.degree
    if not 0 <= i <= d or d == 0:
        raise IndexError(f"face d_{i} undefined in degree {d}")
    eta = key.eta
    k = eta[i]
    rest = eta[:i] + eta[i + 1:]
    if (i > 0 and eta[i - 1] == k) or (i < d and eta[i + 1] == k):
        return SimplexKey(key.dim, key.index, rest)
    sub = X.nondeg_face(key.dim, key.index, k)
    reduced = tuple(v - 1 if v > k else v for v in rest)
    return SimplexKey(sub.dim, sub.index, tuple(sub.eta[v] for v in reduced))


def all_simplices(X: SimplicialSet, d: int) -> list[SimplexKey]:
    """Every ``d``-simplex, degenerate ones included, in a fixed order."""
    out = []
    for m in range(min(d, X.top) + 1):
        for eta in _surjections(d, m):
            for k in range(len(X.cells[m])):
                out.append(SimplexKey(m, k, eta))
    return out


def check_simplicial_identities(X: SimplicialSet, upto: int | None = None) -> list[str]:
    """Violations of ``d_i d_j = d_{j-1} d_i`` (i < j) on nondegenerate simplices."""
    top = X.top if upto is None else min(upto, X.top)
    bad = []
    for d in range(2, top + 1):
        for k in range(len(X.cells[d])):
            s = X.nondeg(d, k)
            for j in range(d + 1):
                for i in range(j):
                    a = face(X, face(X, s, j), i)
                    b = face(X, face(X, s, i), j - 1)
                    if a != b:
                        bad.append(f"degree {d} simplex {k}: d{i}d{j} != d{j - 1}d{i}")
    return bad


# model spaces


def _build(vertices, edges, triangles=(), name="", model=None) -> SimplicialSet:
    """Simplicial set from named vertices, edges ``(name, start, end)`` and
    2-simplices ``(name, (d0, d1, d2))``.  A triangle face is an edge name
    or ``("s0", vertex)`` for a degenerate edge."""
    vertices = list(vertices)
    if len(set(vertices)) != len(vertices):
        raise ValueError("duplicate vertex names")
    vix = {v: k for k, v in enumerate(vertices)}
    cells = [vertices, [], []]
    faces = [[() for _ in vertices], [], []]
    eix = {}
    for name_, a, b in edges:
        if a not in vix or b not in vix:
            raise ValueError(f"edge {name_!r} refers to an unknown vertex")
        if name_ in eix:
            raise ValueError(f"duplicate edge {name_!r}")
        eix[name_] = len(cells[1])
        cells[1].append(name_)
        faces[1].append((total_degeneracy(vix[b], 0), total_degeneracy(vix[a], 0)))
    for name_, fs in triangles:
        keys = []
        for f in fs:
            if isinstance(f, tuple):
                keys.append(total_degeneracy(vix[f[1]], 1))
            else:
                keys.append(SimplexKey(1, eix[f], (0, 1)))
        cells[2].append(name_)
        faces[2].append(tuple(keys))
    if not cells[2]:
        cells.pop()
        faces.pop()
        if not cells[1]:
            cells.pop()
            faces.pop()
    X = SimplicialSet(cells, faces, cap=None, name=name, vertex_names=vertices)
    X.model = model or name
    bad = check_simplicial_identities(X)
    if bad:
        raise ValueError("2-simplex faces violate the simplicial identities: " + "; ".join(bad))
    return X


def custom_graph(vertices, edges, name="custom_graph") -> SimplicialSet:
    """Directed graph as a 1-dimensional simplicial set.

    ``edges`` holds ``(id, from, to)`` triples or dicts with those keys.
    """
    norm = []
    for e in edges:
        if isinstance(e, dict):
            try:
                e = (e["id"], e["from"], e["to"])
            except KeyError as exc:
                raise ValueError(f"edge missing field {exc}") from None
        if len(e) != 3:
            raise ValueError(f"malformed edge {e!r}")
        norm.append(tuple(e))
    vertices = list(vertices)
    if not vertices:
        raise ValueError("graph without vertices")
    return _build(vertices, norm, name=name, model="custom_graph")


def standard_model(kind: str, *, r: int | None = None, L: int | None = None,
                   vertices=None, edges=None) -> SimplicialSet:
    """Model spaces: ``wedge``, ``wedge_inv``, ``two_vertex_circle``,
    ``interval_chain`` and ``custom_graph``."""
    if kind in ("wedge", "wedge_inv"):
        if r is None or r <= 0:
            raise ValueError(f"{kind} needs a positive rank, got {r}")
        edges_ = [(f"e{i}", "v", "v") for i in range(1, r + 1)]
        tris = []
        if kind == "wedge_inv":
            edges_ += [(f"f{i}", "v", "v") for i in range(1, r + 1)]
            # d0 = f_i, d1 = constant, d2 = e_i: the gadget e_i . f_i ~ const
            tris = [(f"t{i}", (f"f{i}", ("s0", "v"), f"e{i}")) for i in range(1, r + 1)]
        X = _build(["v"], edges_, tris, name=f"{kind}({r})", model=kind)
        if kind == "wedge_inv":
            X.inverse_edges = {X.edge_id(f"e{i}"): X.edge_id(f"f{i}") for i in range(1, r + 1)}
        return X
    if kind == "two_vertex_circle":
        return _build(["x", "y"], [("a", "x", "y"), ("b", "y", "x")],
                      name="two_vertex_circle", model=kind)
    if kind == "interval_chain":
        if L is None or L <= 0:
            raise ValueError(f"interval_chain needs a positive length, got {L}")
        vs = [str(k) for k in range(L + 1)]
        es = [(f"e{k}", str(k), str(k + 1)) for k in range(L)]
        return _build(vs, es, name=f"interval_chain({L})", model=kind)
    if kind == "custom_graph":
        if vertices is None or edges is None:
            raise ValueError("custom_graph needs vertices and edges")
        return custom_graph(vertices, edges)
    raise ValueError(f"unknown model {kind!r}")


# powers


def _max_cells(max_cells):
    if max_cells is not None:
        return int(max_cells)
    env = os.environ.get(MAX_CELLS_ENV)
    return int(env) if env else DEFAULT_MAX_CELLS


def power(X: SimplicialSet, n: int, cap: int, max_cells: int | None = None) -> SimplicialSet:
    """The ``n``-fold product ``X^n`` through degree ``cap``.

    A ``d``-simplex of the product is an ``n``-tuple of ``d``-simplices of
    ``X``; it is nondegenerate iff the components share no degeneracy.
    """
    if n < 0 or cap < 0:
        raise ValueError("n and cap must be nonnegative")
    if X.cap is not None and cap > X.cap:
        raise ValueError(f"cap {cap} exceeds the cap {X.cap} of the factor")
    limit = _max_cells(max_cells)
    cells: list[list] = []
    faces: list[list] = []
    P = SimplicialSet(cells, faces, cap=cap, name=f"{X.name}^{n}")
    P.factors = n
    P.base = X
    P.model = X.model
    total = 0
    for d in range(cap + 1):
        simp = all_simplices(X, d)
        masks = [_repeat_mask(s.eta) for s in simp]
        full = (1 << d) - 1
        layer = []
        for combo in itertools.product(range(len(simp)), repeat=n):
            m = full
            for c in combo:
                m &= masks[c]
                if not m:
                    break
            if m:
                continue
            layer.append(tuple(simp[c] for c in combo))
            total += 1
            if total > limit:
                raise ResourceLimitExceeded(
                    f"{X.name}^{n} exceeds {limit} nondegenerate simplices by degree {d}")
        P.cells.append(layer)
        P.index.append({lab: k for k, lab in enumerate(layer)})
        layer_faces = []
        if d > 0:
            for lab in layer:
                layer_faces.append(tuple(
                    P.key_of(tuple(face(X, c, i) for c in lab), d - 1) for i in range(d + 1)))
        else:
            layer_faces = [() for _ in layer]
        P.faces.append(layer_faces)
    return P


# subsets


@dataclass(frozen=True)
class Eq:
    """Components ``i`` and ``j`` (1-based) coincide."""
    i: int
    j: int


@dataclass(frozen=True)
class PinnedTo:
    """Component ``i`` (1-based) is the total degeneracy of ``vertex``."""
    i: int
    vertex: object


class SubsetMask:
    """A set of nondegenerate simplices of ``parent``, closed under faces."""

    def __init__(self, parent: SimplicialSet, members: Iterable[Iterable[int]], check=True):
        self.parent = parent
        self.members = tuple(frozenset(m) for m in members)
        if len(self.members) != len(parent.cells):
            raise ValueError("mask must list members for every stored degree")
        if check and not self.is_face_closed():
            raise ValueError("subset is not closed under faces")

    def __contains__(self, key: SimplexKey) -> bool:
        return key.index in self.members[key.dim]

    def count(self, d: int) -> int:
        return len(self.members[d])

    def counts(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def is_face_closed(self) -> bool:
        P = self.parent
        for d in range(1, len(self.members)):
            for k in self.members[d]:
                for f in P.faces[d][k]:
                    if f.index not in self.members[f.dim]:
                        return False
        return True

    def issubset(self, other: "SubsetMask") -> bool:
        _same_parent([self, other])
        return all(a <= b for a, b in zip(self.members, other.members))

    def __eq__(self, other):
        if not isinstance(other, SubsetMask):
            return NotImplemented
        return self.parent is other.parent and self.members == other.members

    def __hash__(self):
        return hash((id(self.parent), self.members))

    def __repr__(self):
        return f"SubsetMask(counts={self.counts()})"


def _same_parent(masks):
    masks = list(masks)
    if not masks:
        raise ValueError("no masks given")
    p = masks[0].parent
    for m in masks[1:]:
        if m.parent is not p:
            raise ValueError("masks have different parents")
    return p


def full_mask(P: SimplicialSet) -> SubsetMask:
    return SubsetMask(P, [range(len(c)) for c in P.cells], check=False)


def empty_mask(P: SimplicialSet) -> SubsetMask:
    return SubsetMask(P, [() for _ in P.cells], check=False)


def union_subsets(masks: Sequence[SubsetMask]) -> SubsetMask:
    P = _same_parent(masks)
    return SubsetMask(P, [frozenset().union(*(m.members[d] for m in masks))
                          for d in range(len(P.cells))], check=False)


def intersect_subsets(masks: Sequence[SubsetMask]) -> SubsetMask:
    P = _same_parent(masks)
    return SubsetMask(P, [frozenset.intersection(*(m.members[d] for m in masks))
                          for d in range(len(P.cells))], check=False)


def coordinate_constraint_subset(P: SimplicialSet, constraint) -> SubsetMask:
    """Simplices of a power satisfying ``Eq(i, j)`` or ``PinnedTo(i, v)``."""
    if P.factors is None:
        raise ValueError("constraint subsets live in powers")
    n = P.factors
    if isinstance(constraint, Eq):
        i, j = constraint.i, constraint.j
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"component index out of range 1..{n}: {constraint}")
        members = [[k for k, lab in enumerate(layer) if lab[i - 1] == lab[j - 1]]
                   for layer in P.cells]
    elif isinstance(constraint, PinnedTo):
        i = constraint.i
        if not 1 <= i <= n:
            raise ValueError(f"component index out of range 1..{n}: {constraint}")
        v = P.base.vertex_id(constraint.vertex)
        members = [[k for k, lab in enumerate(layer) if lab[i - 1] == total_degeneracy(v, d)]
                   for d, layer in enumerate(P.cells)]
    else:
        raise TypeError(f"unknown constraint {constraint!r}")
    return SubsetMask(P, members)
