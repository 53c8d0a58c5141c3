"""Normalized chain complexes, rational homology, induced and connecting maps.

Chains are dictionaries ``{simplex id: Fraction}`` over the nondegenerate
simplices of one degree of the ambient simplicial set.  A relative complex
is described by the ambient set, an optional face-closed ``sub`` (the
space) and an optional face-closed ``rel`` (the subspace quotiented out).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exactla import QMatrix, kernel_basis, left_inverse, rank, rref
from .sset import SimplicialSet, SubsetMask, empty_mask

__all__ = [
    "ChainComplex",
    "HomologySpace",
    "NotACycle",
    "normalized_chain_complex",
    "boundary_chain",
    "homology_space",
    "induced_map",
    "connecting_map",
    "connecting_triple",
    "ExactnessNode",
    "LESReport",
    "verify_les",
    "verify_triple_les",
]

Chain = dict


class NotACycle(ValueError):
    """A vector handed to a homology space is not a relative cycle."""


def boundary_chain(P: SimplicialSet, d: int, chain: Chain) -> Chain:
    """Full boundary of a ``d``-chain of ``P``; degenerate faces dropped."""
    out: dict[int, Fraction] = {}
    if d == 0:
        return out
    for k, c in chain.items():
        for i, f in enumerate(P.faces[d][k]):
            if f.is_degenerate:
                continue
            s = out.get(f.index, 0) + (c if i % 2 == 0 else -c)
            if s == 0:
                out.pop(f.index, None)
            else:
                out[f.index] = s
    return out


@dataclass(eq=False)
class ChainComplex:
    """Relative normalized chains of ``(sub, rel)`` inside ``space``.

    ``basis[d]`` lists the simplex ids spanning degree ``d``;
    ``boundary[d]`` maps degree ``d`` to degree ``d - 1`` (``boundary[0]``
    has zero rows).
    """
    space: SimplicialSet
    sub: SubsetMask | None
    rel: SubsetMask | None
    basis: tuple
    boundary: tuple
    provenance: str = ""
    position: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.position = tuple({k: i for i, k in enumerate(b)} for b in self.basis)

    @property
    def top(self) -> int:
        return len(self.basis) - 1

    def rank(self, d: int) -> int:
        return len(self.basis[d]) if 0 <= d <= self.top else 0

    def in_rel(self, d: int, k: int) -> bool:
        return self.rel is not None and k in self.rel.members[d]

    def in_sub(self, d: int, k: int) -> bool:
        return self.sub is None or k in self.sub.members[d]

    def vector(self, d: int, chain: Chain) -> tuple:
        """Coordinates of a chain; terms in ``rel`` vanish in the quotient."""
        v = [Fraction(0)] * len(self.basis[d])
        pos = self.position[d]
        for k, c in chain.items():
            if c == 0:
                continue
            i = pos.get(k)
            if i is None:
                if self.in_rel(d, k):
                    continue
                raise ValueError(f"degree-{d} simplex {k} is not in the complex {self.provenance}")
            v[i] += c
        return tuple(v)

    def chain(self, d: int, vec: Sequence) -> Chain:
        return {self.basis[d][i]: Fraction(c) for i, c in enumerate(vec) if c != 0}

    def check_dd(self) -> bool:
        return all((self.boundary[d - 1] @ self.boundary[d]).is_zero()
                   for d in range(2, self.top + 1))


def normalized_chain_complex(P: SimplicialSet, rel: SubsetMask | None = None,
                             cap: int | None = None, sub: SubsetMask | None = None,
                             provenance: str = "") -> ChainComplex:
    """Normalized chains of ``(sub, rel)``, ``sub`` defaulting to all of ``P``."""
    top = P.top if cap is None else cap
    if P.cap is not None and top > P.cap:
        raise ValueError(f"cap {top} exceeds the structure of {P.name} (cap {P.cap})")
    for m in (sub, rel):
        if m is not None and m.parent is not P:
            raise ValueError("mask belongs to a different simplicial set")
    basis = []
    for d in range(top + 1):
        ids = range(len(P.cells[d])) if d < len(P.cells) else ()
        basis.append(tuple(k for k in ids
                           if (sub is None or k in sub.members[d])
                           and (rel is None or k not in rel.members[d])))
    basis = tuple(basis)
    pos = [{k: i for i, k in enumerate(b)} for b in basis]
    mats = [QMatrix(0, len(basis[0]))]
    for d in range(1, top + 1):
        entries: dict[tuple[int, int], Fraction] = {}
        for j, k in enumerate(basis[d]):
            for i, f in enumerate(P.faces[d][k]):
                if f.is_degenerate:
                    continue
                r = pos[d - 1].get(f.index)
                if r is None:
                    if rel is not None and f.index in rel.members[d - 1]:
                        continue
                    raise ValueError("sub is not face-closed")
                s = entries.get((r, j), 0) + (1 if i % 2 == 0 else -1)
                entries[(r, j)] = s
        mats.append(QMatrix(len(basis[d - 1]), len(basis[d]), entries))
    return ChainComplex(P, sub, rel, basis, tuple(mats), provenance or P.name)


class HomologySpace:
    """``H_q`` of a chain complex with chosen representative cycles."""

    def __init__(self, C: ChainComplex, q: int):
        if q < 0 or q + 1 > C.top:
            raise ValueError(f"H_{q} needs degrees through {q + 1}; complex stops at {C.top}")
        self.complex = C
        self.degree = q
        nq = C.rank(q)
        dq = C.boundary[q]
        if q == 0:
            cycles = [tuple(Fraction(int(i == j)) for i in range(nq)) for j in range(nq)]
        else:
            cycles = kernel_basis(dq)
        d_next = C.boundary[q + 1]
        _, piv = rref(d_next)
        bounds = [d_next.column(j) for j in piv]
        nb = len(bounds)
        stacked = QMatrix.from_columns(bounds + cycles, nq)
        _, piv2 = rref(stacked)
        reps = [cycles[j - nb] for j in piv2 if j >= nb]
        self.representatives = tuple(reps)
        self.dimension = len(reps)
        self._dq = dq
        if reps:
            L = left_inverse(QMatrix.from_columns(bounds + reps, nq))
            self._proj = L.select_rows(range(nb, nb + len(reps)))
        else:
            self._proj = QMatrix(0, nq)
        self._boundary_rank = nb

    def __repr__(self):
        return f"HomologySpace(H_{self.degree} of {self.complex.provenance}, dim={self.dimension})"

    def coords(self, v: Sequence) -> tuple:
        v = tuple(Fraction(x) for x in v)
        if len(v) != self.complex.rank(self.degree):
            raise ValueError("vector length does not match the chain group")
        if any(self._dq @ v):
            raise NotACycle(f"not a cycle of {self.complex.provenance} in degree {self.degree}")
        return self._proj @ v

    def coords_of_chain(self, chain: Chain) -> tuple:
        return self.coords(self.complex.vector(self.degree, chain))

    def rep_chain(self, i: int) -> Chain:
        return self.complex.chain(self.degree, self.representatives[i])


def homology_space(C: ChainComplex, q: int) -> HomologySpace:
    return HomologySpace(C, q)


def _columns_matrix(cols: list, nrows: int) -> QMatrix:
    return QMatrix.from_columns(cols, nrows) if cols else QMatrix(nrows, 0)


def induced_map(src: HomologySpace, tgt: HomologySpace,
                chain_map: Callable[[Chain], Chain] | None = None) -> QMatrix:
    """Matrix of the map on homology induced by ``chain_map``.

    Without ``chain_map`` the two complexes must share their ambient set and
    the map is the inclusion ``(sub, rel) -> (sub', rel')``.
    """
    if src.degree != tgt.degree:
        raise ValueError("induced maps preserve degree")
    if chain_map is None:
        a, b = src.complex, tgt.complex
        if a.space is not b.space:
            raise ValueError("inclusion between complexes over different spaces")
        if b.sub is not None and (a.sub is None or not a.sub.issubset(b.sub)):
            raise ValueError("source space is not contained in the target space")
        if a.rel is not None and (b.rel is None or not a.rel.issubset(b.rel)):
            raise ValueError("source subspace is not contained in the target subspace")
        chain_map = dict
    cols = []
    for i in range(src.dimension):
        image = chain_map(src.rep_chain(i))
        try:
            cols.append(tgt.coords_of_chain(image))
        except NotACycle as exc:
            raise NotACycle(f"image of representative {i} is not a relative cycle: {exc}") from None
    return _columns_matrix(cols, tgt.dimension)


def connecting_map(src: HomologySpace, tgt: HomologySpace) -> QMatrix:
    """``H_q(P, Y) -> H_{q-1}(Y, Z)``, ``[c] -> [dc]``.

    ``src`` is built on ``(P, Y)`` and ``tgt`` on ``(Y, Z)`` over the same
    ambient set.
    """
    q = src.degree
    if tgt.degree != q - 1:
        raise ValueError("connecting map lowers degree by one")
    P = src.complex.space
    Y = tgt.complex.sub
    cols = []
    for i in range(src.dimension):
        dc = boundary_chain(P, q, src.rep_chain(i))
        if Y is not None and any(k not in Y.members[q - 1] for k in dc):
            raise ValueError(f"boundary of representative {i} leaves the subspace")
        cols.append(tgt.coords_of_chain(dc))
    return _columns_matrix(cols, tgt.dimension)


def connecting_triple(P: SimplicialSet, Y: SubsetMask, Z: SubsetMask, q: int) -> QMatrix:
    """Connecting morphism of the triple ``Z ⊂ Y ⊂ P`` in degree ``q``."""
    if not Z.issubset(Y):
        raise ValueError("Z is not contained in Y")
    src = homology_space(normalized_chain_complex(P, rel=Y, cap=q + 1), q)
    tgt = homology_space(normalized_chain_complex(P, rel=Z, sub=Y, cap=q), q - 1)
    return connecting_map(src, tgt)


@dataclass
class ExactnessNode:
    name: str
    dimension: int
    rank_in: int
    rank_out: int
    composite_zero: bool

    @property
    def ok(self) -> bool:
        return self.composite_zero and self.rank_in + self.rank_out == self.dimension


@dataclass
class LESReport:
    title: str
    nodes: list

    @property
    def ok(self) -> bool:
        return all(n.ok for n in self.nodes)

    def lines(self) -> list[str]:
        return [f"{self.title} {n.name}: dim={n.dimension} in={n.rank_in} out={n.rank_out} "
                f"{'exact' if n.ok else 'NOT EXACT'}" for n in self.nodes]


def verify_triple_les(P: SimplicialSet, Y: SubsetMask, Z: SubsetMask,
                      degrees: Sequence[int] | None = None, title: str = "") -> LESReport:
    """Rank check of ``... H_q(Y,Z) -> H_q(P,Z) -> H_q(P,Y) -> H_{q-1}(Y,Z) ...``."""
    if not Z.issubset(Y):
        raise ValueError("Z is not contained in Y")
    top = P.top if P.cap is None else P.cap
    degrees = sorted(degrees if degrees is not None else range(top), reverse=True)
    if degrees and degrees[0] + 1 > top:
        raise ValueError(f"degree {degrees[0]} needs structure through {degrees[0] + 1}")
    cap = degrees[0] + 1 if degrees else 0
    C_yz = normalized_chain_complex(P, rel=Z, sub=Y, cap=cap, provenance="(Y,Z)")
    C_pz = normalized_chain_complex(P, rel=Z, cap=cap, provenance="(P,Z)")
    C_py = normalized_chain_complex(P, rel=Y, cap=cap, provenance="(P,Y)")
    spaces, maps = [], []
    for q in degrees:
        h_yz = homology_space(C_yz, q)
        h_pz = homology_space(C_pz, q)
        h_py = homology_space(C_py, q)
        if spaces:
            maps.append(connecting_map(spaces[-1][1], h_yz))
        spaces += [(f"H{q}(Y,Z)", h_yz), (f"H{q}(P,Z)", h_pz), (f"H{q}(P,Y)", h_py)]
        maps += [induced_map(h_yz, h_pz), induced_map(h_pz, h_py)]
    if degrees and degrees[-1] > 0:
        q = degrees[-1]
        h_low = homology_space(C_yz, q - 1)
        maps.append(connecting_map(spaces[-1][1], h_low))
        spaces.append((f"H{q - 1}(Y,Z)", h_low))
    else:
        # the sequence ends in H_0(P,Y) -> 0
        maps.append(QMatrix(0, spaces[-1][1].dimension) if spaces else QMatrix(0, 0))
    nodes = []
    for k in range(1, len(spaces)):
        f, g = maps[k - 1], maps[k] if k < len(maps) else None
        name, h = spaces[k]
        if g is None:
            continue
        nodes.append(ExactnessNode(name, h.dimension, rank(f), rank(g), (g @ f).is_zero()))
    return LESReport(title or "triple", nodes)


def verify_les(P: SimplicialSet, A: SubsetMask, degrees: Sequence[int] | None = None) -> LESReport:
    """Exactness of the long exact sequence of the pair ``(P, A)``."""
    return verify_triple_les(P, A, empty_mask(P), degrees, title="pair")
