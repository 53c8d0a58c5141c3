"""Pair families ``(X^n, Y^(n))``, staircase chains, tau, kappa and the
commutative square relating consecutive truncations.

For a path ``gamma`` from ``x`` to ``y`` the chain ``gamma^(n)`` is the
image of ``{0 <= t_1 <= ... <= t_n <= L}`` under
``(gamma(t_1), ..., gamma(t_n))``, triangulated cube by cube.  Each cell
``c`` of ``{0..L-1}^n`` and permutation ``pi`` give the simplex whose
vertices step from ``c`` through the unit vectors ``pi(1), ..., pi(n)``.

Two orientations of the ordered simplex are provided.  ``"descending"``
(the default) orders its vertices from ``(1, ..., 1)`` down to
``(0, ..., 0)``, so ``d_0`` is the face ``t_1 = 0``; ``"ascending"`` uses
the opposite order.  They differ by ``(-1)^(n(n+1)/2)``.  With the
default orientation the square commutes exactly when ``Y_0`` is the
retained component.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .exactla import QMatrix, inverse, is_invertible
from .grpalg import (GroupoidSetup, TruncElem, algebra_dimension, basis_lift, format_word, lift_product,
                     magnus, monomials, path_endpoints, project)
from .homology import (HomologySpace, NotACycle, boundary_chain, connecting_map,
                       homology_space, induced_map, normalized_chain_complex)
from .sset import (Eq, PinnedTo, SimplexKey, SimplicialSet, SubsetMask, coordinate_constraint_subset,
                   empty_mask, full_mask, intersect_subsets, power, total_degeneracy,
                   union_subsets)

__all__ = [
    "PairFamily",
    "StaircaseChain",
    "StaircaseError",
    "ExcisionFailure",
    "KappaResult",
    "CDEntry",
    "CDReport",
    "ORIENTATIONS",
    "build_pair_family",
    "staircase_sign",
    "staircase_chain",
    "tau",
    "tau_matrix",
    "embed_prev",
    "identification_problems",
    "excision_iso",
    "kappa",
    "verify_cd",
    "expected_homology_dimension",
    "ideal_element",
]

ORIENTATIONS = ("descending", "ascending")
RETAINED = ("first", "last")


class StaircaseError(RuntimeError):
    """A staircase chain is not a relative cycle of ``(X^n, Y^(n))``."""


class ExcisionFailure(RuntimeError):
    """The excision map ``g_{n-1}`` came out non-invertible."""


def expected_homology_dimension(rank: int, n: int, basepoints_equal: bool) -> int:
    return algebra_dimension(rank, n) - (1 if basepoints_equal else 0)


# pair families


@dataclass(eq=False)
class PairFamily:
    X: SimplicialSet
    x: int
    y: int
    n: int
    retained: str
    P: SimplicialSet
    Y: list
    Ymask: SubsetMask
    Zmask: SubsetMask
    Amask: SubsetMask

    @property
    def retained_index(self) -> int:
        return 0 if self.retained == "first" else self.n

    @cached_property
    def complex(self):
        return normalized_chain_complex(self.P, rel=self.Ymask, cap=self.n + 1,
                                        provenance=f"(X^{self.n},Y^({self.n}))")

    @cached_property
    def homology(self) -> HomologySpace:
        """``H_n(X^n, Y^(n))``."""
        return homology_space(self.complex, self.n)

    @cached_property
    def yz_homology(self) -> HomologySpace:
        """``H_{n-1}(Y^(n), Z^(n))``."""
        if self.n == 0:
            raise ValueError("no (Y, Z) pair at level 0")
        C = normalized_chain_complex(self.P, rel=self.Zmask, sub=self.Ymask, cap=self.n,
                                     provenance=f"(Y^({self.n}),Z^({self.n}))")
        return homology_space(C, self.n - 1)

    def __repr__(self):
        return (f"PairFamily(n={self.n}, X={self.X.name}, x={self.x}, y={self.y}, "
                f"retained={self.retained}, cells={self.P.counts()})")


def build_pair_family(X: SimplicialSet, x, y, n: int, retained: str = "first",
                      max_cells: int | None = None) -> PairFamily:
    """``X^n`` (through degree ``n + 1``) with ``Y_0, ..., Y_n`` and the
    derived subsets ``Y``, ``Z`` and ``A``.

    ``Y_0`` pins the first coordinate to ``x``, ``Y_i`` (0 < i < n) is
    ``x_i = x_{i+1}`` and ``Y_n`` pins the last coordinate to ``y``.
    """
    if retained not in RETAINED:
        raise ValueError(f"retained must be 'first' or 'last', not {retained!r}")
    if n < 0:
        raise ValueError("level must be nonnegative")
    x = X.vertex_id(x)
    y = X.vertex_id(y)
    P = power(X, n, n + 1, max_cells=max_cells)
    if n == 0:
        Ym = full_mask(P) if x == y else empty_mask(P)
        e = empty_mask(P)
        return PairFamily(X, x, y, 0, retained, P, [], Ym, e, e)
    cons = [PinnedTo(1, x)] + [Eq(i, i + 1) for i in range(1, n)] + [PinnedTo(n, y)]
    Ys = [coordinate_constraint_subset(P, c) for c in cons]
    Ym = union_subsets(Ys)
    keep = 0 if retained == "first" else n
    Zm = union_subsets([m for i, m in enumerate(Ys) if i != keep])
    Am = intersect_subsets([Ys[keep], Zm])
    return PairFamily(X, x, y, n, retained, P, Ys, Ym, Zm, Am)


def embed_prev(pf: PairFamily, chain: Mapping, prev: PairFamily, degree: int) -> dict:
    """Push a chain of ``X^{n-1}`` into the retained component of ``X^n``.

    The pinned vertex (``x`` in front or ``y`` at the back) is inserted as a
    totally degenerate coordinate.
    """
    out: dict[int, Fraction] = {}
    pin = pf.x if pf.retained == "first" else pf.y
    for k, c in chain.items():
        comps = prev.P.cells[degree][k]
        extra = (total_degeneracy(pin, degree),)
        new = extra + comps if pf.retained == "first" else comps + extra
        key = pf.P.key_of(new, degree)
        if key.is_degenerate:
            raise AssertionError("pinning a coordinate produced a degenerate simplex")
        out[key.index] = out.get(key.index, 0) + c
    return {k: c for k, c in out.items() if c != 0}


def identification_problems(pf: PairFamily, prev: PairFamily) -> list[str]:
    """Check that pinning is a bijection ``X^{n-1} -> Y_retained`` carrying
    ``Y^(n-1)`` onto ``A`` and commuting with faces."""
    problems = []
    keep = pf.Y[pf.retained_index]
    top = min(prev.P.cap, pf.P.cap)
    images = []
    for d in range(top + 1):
        image = {}
        for k in range(prev.P.count(d)):
            (j, _), = embed_prev(pf, {k: 1}, prev, d).items()
            image[k] = j
        images.append(image)
        if sorted(image.values()) != sorted(keep.members[d]):
            problems.append(f"degree {d}: image is not the retained component")
        a_img = {image[k] for k in prev.Ymask.members[d]}
        if a_img != set(pf.Amask.members[d]):
            problems.append(f"degree {d}: Y^(n-1) does not map onto A")
        if d == 0:
            continue
        for k in range(prev.P.count(d)):
            for i, f in enumerate(prev.P.faces[d][k]):
                g = pf.P.faces[d][image[k]][i]
                if f.eta != g.eta or images[f.dim][f.index] != g.index:
                    problems.append(f"degree {d}: face {i} of simplex {k} not preserved")
    return problems


# staircase chains


def staircase_sign(perm: Sequence[int], n: int, orientation: str = "descending") -> int:
    """Orientation sign of the simplex stepping through ``perm`` (1-based coordinates)."""
    inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    s = -1 if inversions % 2 else 1
    if orientation == "ascending":
        return s * (-1) ** (n * (n - 1) // 2)
    if orientation == "descending":
        return s * (-1) ** n
    raise ValueError(f"unknown orientation {orientation!r}")


@dataclass
class StaircaseChain:
    path: tuple
    n: int
    chain: dict
    P: SimplicialSet = field(repr=False)

    def terms(self) -> list[tuple[str, Fraction]]:
        return [(self.P.label(self.P.nondeg(self.n, k)), c) for k, c in sorted(self.chain.items())]

    def boundary(self) -> dict:
        return boundary_chain(self.P, self.n, self.chain)


def staircase_chain(X: SimplicialSet, path: Sequence[int], n: int, P: SimplicialSet | None = None,
                    orientation: str = "descending") -> StaircaseChain:
    path = tuple(X.edge_id(e) for e in path)
    if path:
        path_endpoints(X, path, 0)
    if P is None:
        P = power(X, n, n)
    elif P.factors != n or P.base is not X:
        raise ValueError("P is not the matching power of X")
    chain: dict[int, Fraction] = {}
    if n == 0:
        return StaircaseChain(path, 0, {0: Fraction(1)}, P)
    L = len(path)
    for cell in itertools.combinations_with_replacement(range(L), n):
        for perm in itertools.permutations(range(1, n + 1)):
            p = list(cell)
            ok = True
            step_of = [0] * (n + 1)
            for k, j in enumerate(perm, start=1):
                p[j - 1] += 1
                step_of[j] = k
                if j < n and p[j - 1] > p[j]:
                    ok = False
                    break
            if not ok:
                continue
            comps = tuple(
                SimplexKey(1, path[cell[j - 1]],
                           tuple(0 if k < step_of[j] else 1 for k in range(n + 1)))
                for j in range(1, n + 1))
            key = P.key_of(comps, n)
            if key.is_degenerate:
                continue
            s = staircase_sign(perm, n, orientation)
            v = chain.get(key.index, 0) + s
            if v:
                chain[key.index] = Fraction(v)
            else:
                chain.pop(key.index, None)
    return StaircaseChain(path, n, chain, P)


def _as_combination(paths) -> dict:
    if isinstance(paths, Mapping):
        return dict(paths)
    if isinstance(paths, (tuple, list)) and (not paths or isinstance(paths[0], (int, str))):
        return {tuple(paths): Fraction(1)}
    return {tuple(p): Fraction(c) for c, p in paths}


def tau_chain(pf: PairFamily, paths, orientation: str = "descending") -> dict:
    """Chain of ``sum coeff * gamma^(n)`` after checking every path runs ``x -> y``."""
    total: dict[int, Fraction] = {}
    for path, c in _as_combination(paths).items():
        path = tuple(pf.X.edge_id(e) for e in path)
        if path_endpoints(pf.X, path, pf.x) != (pf.x, pf.y):
            raise ValueError("path does not run from x to y")
        sc = staircase_chain(pf.X, path, pf.n, pf.P, orientation)
        for k, v in sc.chain.items():
            total[k] = total.get(k, 0) + c * v
    return {k: v for k, v in total.items() if v != 0}


def tau(pf: PairFamily, paths, orientation: str = "descending") -> tuple:
    """Coordinates of the class of ``sum coeff * gamma^(n)`` in ``H_n(X^n, Y^(n))``.

    ``paths`` is a single edge path, a mapping ``{path: coeff}`` or a list of
    ``(coeff, path)`` pairs.
    """
    chain = tau_chain(pf, paths, orientation)
    if pf.n > 0:
        bd = boundary_chain(pf.P, pf.n, chain)
        outside = [k for k in bd if k not in pf.Ymask.members[pf.n - 1]]
        if outside:
            raise StaircaseError(f"boundary leaves Y^({pf.n}) on {len(outside)} simplices")
    try:
        return pf.homology.coords_of_chain(chain)
    except NotACycle as exc:
        raise StaircaseError(str(exc)) from None


def _word_paths(setup: GroupoidSetup, combo: Mapping) -> dict:
    out: dict[tuple, Fraction] = {}
    for w, c in combo.items():
        p = setup.path_of_word(w)
        out[p] = out.get(p, 0) + c
    return {p: c for p, c in out.items() if c != 0}


def tau_matrix(pf: PairFamily, setup: GroupoidSetup, orientation: str = "descending") -> QMatrix:
    """Matrix of tau in the Magnus monomial basis (columns in ``monomials`` order).

    Basis monomials are lifted to ``(g-1)`` products, realized as directed
    paths and fed through the staircase map.  When the realizing loops are
    not the free generators themselves the result is corrected by the
    inverse of their Magnus matrix.
    """
    n = pf.n
    if (setup.x, setup.y) != (pf.x, pf.y):
        raise ValueError("groupoid setup and pair family disagree on basepoints")
    monos = monomials(setup.rank, n)
    H = pf.homology
    want = expected_homology_dimension(setup.rank, n, pf.x == pf.y)
    if H.dimension != want:
        raise ValueError(f"H_{n} has dimension {H.dimension}, algebra predicts {want}")
    cols, mag = [], []
    for m in monos:
        combo = _word_paths(setup, basis_lift(m))
        cols.append(tau(pf, combo, orientation))
        acc = None
        for p, c in combo.items():
            t = magnus(setup.class_word(p), n).scale(c)
            acc = t if acc is None else acc + t
        mag.append(acc.vector(setup.rank))
    T = QMatrix.from_columns(cols, H.dimension) if cols else QMatrix(H.dimension, 0)
    M = QMatrix.from_columns(mag, len(monos))
    if M != QMatrix.identity(len(monos)):
        if not is_invertible(M):
            raise ValueError("realizing loops do not generate the truncated algebra")
        T = T @ inverse(M)
    return T


# excision and kappa


def excision_iso(pf: PairFamily, prev: PairFamily) -> QMatrix:
    """``g_{n-1}: H_{n-1}(X^{n-1}, Y^(n-1)) -> H_{n-1}(Y^(n), Z^(n))``."""
    if prev.n != pf.n - 1 or (prev.x, prev.y) != (pf.x, pf.y) or prev.X is not pf.X:
        raise ValueError("previous pair family does not match")
    d = pf.n - 1
    g = induced_map(prev.homology, pf.yz_homology, lambda ch: embed_prev(pf, ch, prev, d))
    if not is_invertible(g):
        raise ExcisionFailure(f"g_{d} has shape {g.shape} and is not invertible")
    return g


@dataclass
class KappaResult:
    matrix: QMatrix
    excision: QMatrix
    connecting: QMatrix
    log: list


def kappa(pf: PairFamily, prev: PairFamily) -> KappaResult:
    """``kappa_n = g_{n-1}^{-1} o delta`` with ``delta`` the connecting map of
    the triple ``Z ⊂ Y ⊂ X^n``."""
    g = excision_iso(pf, prev)
    delta = connecting_map(pf.homology, pf.yz_homology)
    K = inverse(g) @ delta
    lines = [f"kappa_{pf.n}: retained={pf.retained}, H_{pf.n} dim {pf.homology.dimension} -> "
             f"H_{pf.n - 1} dim {prev.homology.dimension}"]
    P = pf.P
    for i in range(pf.homology.dimension):
        rep = pf.homology.rep_chain(i)
        bd = boundary_chain(P, pf.n, rep)
        lines.append(f"class {i}: representative with {len(rep)} simplices, "
                     f"boundary {len(bd)} terms, delta -> {_fmt_vec(delta.column(i))}, "
                     f"kappa -> {_fmt_vec(K.column(i))}")
    return KappaResult(K, g, delta, lines)


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


# the commutative square


@dataclass
class CDEntry:
    label: str
    lhs: tuple | None
    rhs: tuple | None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and self.lhs == self.rhs


@dataclass
class CDReport:
    n: int
    retained: str
    orientation: str
    entries: list

    @property
    def ok(self) -> bool:
        return bool(self.entries) and all(e.ok for e in self.entries)

    @property
    def relation(self) -> str:
        """``exact``, ``negated`` (every entry off by -1) or ``fails``."""
        if any(e.error for e in self.entries):
            return "fails"
        if all(e.lhs == e.rhs for e in self.entries):
            return "exact"
        if all(e.lhs == tuple(-x for x in e.rhs) for e in self.entries):
            return "negated"
        return "fails"


def verify_cd(pf: PairFamily, prev: PairFamily, setup: GroupoidSetup,
              words: Iterable = (), orientation: str = "descending") -> CDReport:
    """Check ``kappa_n(tau_n(w)) == tau_{n-1}(project(w))`` on every Magnus
    basis monomial and on each given word."""
    entries = []
    try:
        K = kappa(pf, prev).matrix
        Tn = tau_matrix(pf, setup, orientation)
        Tp = tau_matrix(prev, setup, orientation)
    except (StaircaseError, ExcisionFailure, NotACycle, ValueError) as exc:
        return CDReport(pf.n, pf.retained, orientation, [CDEntry("setup", None, None, str(exc))])
    monos = monomials(setup.rank, pf.n)
    for j, m in enumerate(monos):
        lhs = K @ Tn.column(j)
        low = project(TruncElem(pf.n, {m: 1}))
        rhs = Tp @ low.vector(setup.rank)
        label = "1" if not m else "⊗".join(f"e{i}" for i in m)
        entries.append(CDEntry(f"monomial {label}", lhs, rhs))
    for w in words:
        label = f"word {format_word(w)}"
        try:
            path = setup.path_of_word(w)
            lhs = K @ tau(pf, path, orientation)
            rhs = tau(prev, path, orientation)
        except (StaircaseError, NotACycle, ValueError) as exc:
            entries.append(CDEntry(label, None, None, str(exc)))
            continue
        entries.append(CDEntry(label, lhs, rhs))
    return CDReport(pf.n, pf.retained, orientation, entries)


def ideal_element(setup: GroupoidSetup, generators: Sequence[int], word=()) -> dict:
    """``(g_{i_1}-1)...(g_{i_k}-1) * word`` as a combination of directed paths ``x -> y``."""
    combo: dict = {}
    for u, c in lift_product([(g, 1) for g in generators]).items():
        w = u + tuple(word)
        combo[w] = combo.get(w, 0) + c
    return _word_paths(setup, combo)
