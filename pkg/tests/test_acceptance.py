"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Everything is exact rational arithmetic, so every tolerance is zero.
Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also repeated in the pytest terminal summary.
"""
import random
import time

import pytest

import unihom.beilinson as bl
from acceptance_log import record
from unihom.cli import main as cli_main
from unihom.exactla import kernel_basis, rank
from unihom.grpalg import groupoid_setup
from unihom.homology import boundary_chain, verify_les, verify_triple_les
from unihom.sset import check_simplicial_identities, standard_model

# (model, kwargs, x, y, levels) of the dimension oracle
CONFIGS = [
    ("wedge", {"r": 1}, "v", "v", (1, 2, 3)),
    ("wedge", {"r": 2}, "v", "v", (1, 2)),
    ("two_vertex_circle", {}, "x", "y", (1, 2)),
]


def expected_dim(model, kw, n):
    if model == "wedge" and kw["r"] == 1:
        return n
    if model == "wedge":
        return 2 ** (n + 1) - 2
    return n + 1


class Space:
    """A model with its groupoid data and cached pair families."""

    def __init__(self, model, kw, x, y, retained="first"):
        self.name = model + (f"({kw['r']})" if kw else "")
        self.X = standard_model(model, **kw)
        self.x, self.y = x, y
        self.setup = groupoid_setup(self.X, x, y)
        self.retained = retained
        self._fams = {}

    def fam(self, n):
        if n not in self._fams:
            self._fams[n] = bl.build_pair_family(self.X, self.x, self.y, n, self.retained)
        return self._fams[n]


@pytest.fixture(scope="module")
def spaces():
    return {(m, tuple(kw.items())): Space(m, kw, x, y) for m, kw, x, y, _ in CONFIGS}


def config_spaces(spaces):
    for m, kw, x, y, levels in CONFIGS:
        yield m, kw, spaces[(m, tuple(kw.items()))], levels


def cd_outcomes(spaces):
    """``verify_cd`` over every dimension-oracle configuration."""
    out = []
    for _, _, sp, levels in config_spaces(spaces):
        for n in levels:
            rep = bl.verify_cd(sp.fam(n), sp.fam(n - 1), sp.setup)
            out.append((sp.name, n, rep))
    return out


def positive_words(rank_, count, max_len, seed):
    rng = random.Random(seed)
    return [tuple((rng.randint(1, rank_), 1) for _ in range(rng.randint(1, max_len)))
            for _ in range(count)]


RELATIVE_CYCLE_MODELS = [("wedge", {"r": 1}, "v", "v"), ("wedge", {"r": 2}, "v", "v"),
                         ("two_vertex_circle", {}, "x", "y"), ("wedge_inv", {"r": 1}, "v", "v")]


def staircase_violations(n_max=3):
    """Count sampled staircase chains whose boundary leaves ``Y^(n)``."""
    bad, total = [], 0
    for i, (m, kw, x, y) in enumerate(RELATIVE_CYCLE_MODELS):
        sp = Space(m, kw, x, y)
        words = positive_words(sp.setup.rank, 50, 4, seed=1000 + i)
        for n in range(1, n_max + 1):
            pf = sp.fam(n)
            for w in words:
                chain = bl.tau_chain(pf, sp.setup.path_of_word(w))
                bd = boundary_chain(pf.P, n, chain)
                total += 1
                if any(k not in pf.Ymask.members[n - 1] for k in bd):
                    bad.append((sp.name, n, w))
    return bad, total


def test_criterion_1_dimension_oracle(spaces):
    t0 = time.perf_counter()
    got, ok = [], True
    for m, kw, sp, levels in config_spaces(spaces):
        for n in levels:
            d = sp.fam(n).homology.dimension
            want = expected_dim(m, kw, n)
            got.append(f"{sp.name} n={n}: {d}/{want}")
            ok &= d == want
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    record(1, "dimension oracle", ok, "; ".join(got) + f" ({elapsed:.1f}s)")
    assert ok


def test_criterion_2_tau_rank_contract(spaces):
    notes, ok = [], True
    levels = {"wedge(1)": (1, 2, 3), "wedge(2)": (1, 2), "two_vertex_circle": (1, 2)}
    for _, _, sp, _ in config_spaces(spaces):
        for n in levels[sp.name]:
            T = bl.tau_matrix(sp.fam(n), sp.setup)
            if sp.x != sp.y:
                good = T.nrows == T.ncols and rank(T) == T.ncols
            else:
                unit = tuple(int(i == 0) for i in range(T.ncols))
                good = rank(T) == T.ncols - 1 and kernel_basis(T) == [unit]
            notes.append(f"{sp.name} n={n} {T.nrows}x{T.ncols} rank {rank(T)}")
            ok &= good
    record(2, "tau rank contract", ok, "; ".join(notes))
    assert ok


def test_criterion_3_excision(spaces):
    notes, ok = [], True
    for _, _, sp, levels in config_spaces(spaces):
        for n in levels:
            try:
                g = bl.excision_iso(sp.fam(n), sp.fam(n - 1))
                notes.append(f"{sp.name} n={n} g {g.nrows}x{g.ncols}")
            except bl.ExcisionFailure as exc:
                notes.append(f"{sp.name} n={n}: {exc}")
                ok = False
    record(3, "excision isomorphism", ok, "; ".join(notes))
    assert ok


def test_criterion_4_commutative_square(spaces):
    t0 = time.perf_counter()
    outcomes = cd_outcomes(spaces)
    ok = all(rep.ok and rep.relation == "exact" for _, _, rep in outcomes)
    # the variant retaining the last component: exact or one global sign per level
    last_rel = []
    for m, kw, x, y, levels in CONFIGS:
        sp = Space(m, kw, x, y, retained="last")
        for n in levels:
            rel = bl.verify_cd(sp.fam(n), sp.fam(n - 1), sp.setup).relation
            last_rel.append(f"{sp.name} n={n}: {rel}")
            ok &= rel in ("exact", "negated")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    entries = sum(len(rep.entries) for _, _, rep in outcomes)
    record(4, "commutative square", ok,
           f"retained=first exact on {entries} monomials; retained=last "
           + "; ".join(last_rel) + f" ({elapsed:.1f}s)")
    assert ok


def test_criterion_5_relative_cycles():
    bad, total = staircase_violations()
    ok = not bad
    record(5, "staircase chains are relative cycles", ok, f"{total - len(bad)}/{total} supported on Y")
    assert ok


def test_criterion_6_well_defined():
    notes, ok = [], True
    rng = random.Random(6)
    for m, kw, x, y in RELATIVE_CYCLE_MODELS:
        sp = Space(m, kw, x, y)
        r = sp.setup.rank
        for n in (1, 2):
            for _ in range(3):
                gens = [rng.randint(1, r) for _ in range(n + 1)]
                word = positive_words(r, 1, 3, rng.randrange(10 ** 6))[0]
                v = bl.tau(sp.fam(n), bl.ideal_element(sp.setup, gens, word))
                ok &= not any(v)
            notes.append(f"{sp.name} n={n}")
    record(6, "tau vanishes on the ideal", ok, ", ".join(notes))
    assert ok


def test_criterion_7_homotopy_invariance():
    t0 = time.perf_counter()
    X = standard_model("wedge_inv", r=1)
    e, f = X.edge_id("e1"), X.edge_id("f1")
    paths = [(e,), (e, e), (e, e, e)]
    ok, checked = True, 0
    for n in (1, 2):
        pf = bl.build_pair_family(X, "v", "v", n)
        for p in paths:
            base = bl.tau(pf, p)
            for pos in range(len(p) + 1):
                ok &= bl.tau(pf, p[:pos] + (e, f) + p[pos:]) == base
                checked += 1
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    record(7, "homotopy invariance on wedge_inv(1)", ok, f"{checked} backtracks ({elapsed:.1f}s)")
    assert ok


def test_criterion_8_engine_self_checks(spaces):
    problems, count = [], 0
    all_spaces = list(spaces.values()) + [Space("wedge_inv", {"r": 1}, "v", "v")]
    for sp in all_spaces:
        top = 3 if sp.name == "wedge(1)" else 2
        for n in range(1, top + 1):
            pf = sp.fam(n)
            count += 1
            problems += check_simplicial_identities(pf.P, upto=n + 1)
            if not pf.complex.check_dd() or not pf.yz_homology.complex.check_dd():
                problems.append(f"{sp.name} n={n}: dd != 0")
            for rep in (verify_les(pf.P, pf.Ymask, range(n + 1)),
                        verify_triple_les(pf.P, pf.Ymask, pf.Zmask, range(n + 1))):
                if not rep.ok:
                    problems.append(f"{sp.name} n={n}: {rep.title} not exact")
    ok = not problems
    record(8, "engine self-checks", ok,
           f"{count} complexes" + ("" if ok else ": " + "; ".join(problems[:3])))
    assert ok


def test_criterion_9_negative_control(spaces, monkeypatch, tmp_path, capsys):
    # drop the permutation sign: only the global orientation factor survives
    monkeypatch.setattr(bl, "staircase_sign",
                        lambda perm, n, orientation="descending": (-1) ** n)
    cd_fails = not all(rep.ok for _, _, rep in cd_outcomes(spaces))
    bad, _ = staircase_violations(n_max=2)
    space = tmp_path / "tvc.json"
    space.write_text('{"model": "two_vertex_circle", "x": "x", "y": "y"}')
    code = cli_main(["verify", "--space", str(space), "--n", "2"])
    capsys.readouterr()
    ok = cd_fails and bool(bad) and code == 1
    record(9, "negative control", ok,
           f"criterion 4 {'fails' if cd_fails else 'passes'}, criterion 5 "
           f"{'fails' if bad else 'passes'}, exit code {code}")
    assert ok
