"""Command line front end.

    unihom dims   --space FILE --n N_MAX
    unihom verify --space FILE --n N [--checks cd,excision,...]
    unihom tau    --space FILE --n N [--words "g1 g1, g1"]
    unihom kappa  --space FILE --n N [--words ...]

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import beilinson as bl
from .exactla import QMatrix, rank
from .grpalg import (algebra_dimension, format_word, groupoid_setup, monomials, parse_word)
from .homology import boundary_chain, verify_les, verify_triple_les
from .sset import MAX_CELLS_ENV, ResourceLimitExceeded, SimplicialSet, standard_model

log = logging.getLogger("unihom")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
CHECKS = ("cd", "excision", "tau-rank", "staircase-boundary", "les")
MODELS = ("wedge", "wedge_inv", "two_vertex_circle", "custom_graph")


class InputError(ValueError):
    pass


# space descriptions


@dataclass
class SpaceSpec:
    model: str
    x: str
    y: str
    rank: int | None = None
    vertices: list | None = None
    edges: list | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "SpaceSpec":
        if not isinstance(doc, dict):
            raise InputError("space description must be a JSON object")
        model = doc.get("model")
        if model not in MODELS:
            raise InputError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}")
        unknown = set(doc) - {"model", "rank", "vertices", "edges", "x", "y"}
        if unknown:
            raise InputError(f"unknown fields: {', '.join(sorted(unknown))}")
        default = {"two_vertex_circle": ("x", "y")}.get(model, ("v", "v"))
        spec = cls(model, str(doc.get("x", default[0])), str(doc.get("y", default[1])),
                   doc.get("rank"), doc.get("vertices"), doc.get("edges"))
        if model in ("wedge", "wedge_inv") and not (isinstance(spec.rank, int) and spec.rank > 0):
            raise InputError(f"{model} needs a positive integer 'rank'")
        if model == "custom_graph" and (spec.vertices is None or spec.edges is None):
            raise InputError("custom_graph needs 'vertices' and 'edges'")
        return spec

    def build(self) -> SimplicialSet:
        try:
            if self.model == "custom_graph":
                X = standard_model("custom_graph", vertices=[str(v) for v in self.vertices],
                                   edges=self.edges)
            else:
                X = standard_model(self.model, r=self.rank)
            X.vertex_id(self.x)
            X.vertex_id(self.y)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return X

    def describe(self) -> str:
        if self.model in ("wedge", "wedge_inv"):
            return f"{self.model}({self.rank}) x={self.x} y={self.y}"
        return f"{self.model} x={self.x} y={self.y}"


def load_space(path: str) -> SpaceSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    return SpaceSpec.from_dict(doc)


# reports


def _q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec(v) -> list[str]:
    return [_q(x) for x in v] if v is not None else None


def matrix_doc(M: QMatrix, rows: Sequence[str] | None = None, cols: Sequence[str] | None = None) -> dict:
    doc: dict[str, Any] = {"shape": [M.nrows, M.ncols],
                           "entries": [[_q(x) for x in M.row(i)] for i in range(M.nrows)]}
    if rows is not None:
        doc["rows"] = list(rows)
    if cols is not None:
        doc["cols"] = list(cols)
    return doc


@dataclass
class CheckRecord:
    name: str
    params: str
    expected: str
    got: str
    passed: bool


@dataclass
class RunReport:
    command: str
    space: str
    params: dict
    checks: list = field(default_factory=list)
    dims: list = field(default_factory=list)
    matrices: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, params, expected, got, passed) -> CheckRecord:
        rec = CheckRecord(name, str(params), str(expected), str(got), bool(passed))
        self.checks.append(rec)
        log.info("%s [%s]: %s", name, params, "pass" if passed else "FAIL")
        return rec

    def to_dict(self, timing: bool = True) -> dict:
        doc = {"command": self.command, "space": self.space, "params": self.params,
               "passed": self.passed,
               "checks": [asdict(c) for c in self.checks],
               "dims": self.dims, "matrices": self.matrices, "notes": self.notes}
        if timing:
            doc["timing"] = self.timing
        return doc

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, ensure_ascii=False) + "\n"

    def to_tsv(self) -> str:
        out = [f"# {self.command}\t{self.space}\t"
               + " ".join(f"{k}={v}" for k, v in self.params.items())]
        if self.dims:
            cols = list(self.dims[0])
            out.append("\t".join(cols))
            out += ["\t".join(str(r[c]) for c in cols) for r in self.dims]
        if self.checks:
            out.append("check\tparams\texpected\tgot\tstatus")
            out += [f"{c.name}\t{c.params}\t{c.expected}\t{c.got}\t{'pass' if c.passed else 'FAIL'}"
                    for c in self.checks]
        for name, m in self.matrices.items():
            out.append(f"# matrix {name} {m['shape'][0]}x{m['shape'][1]}")
            if "cols" in m:
                out.append("\t" + "\t".join(m["cols"]))
            for i, row in enumerate(m["entries"]):
                head = m["rows"][i] + "\t" if "rows" in m else ""
                out.append(head + "\t".join(row))
        out += [f"# {line}" for line in self.notes]
        return "\n".join(out) + "\n"


# commands


def _mono_label(m) -> str:
    return "1" if not m else "⊗".join(f"e{i}" for i in m)


def _parse_words(text: str | None, rank: int) -> list:
    if not text:
        return []
    try:
        return [parse_word(w, rank) for w in text.split(",")]
    except ValueError as exc:
        raise InputError(str(exc)) from None


class Session:
    """Pair families of one space, built on demand and cached per level."""

    def __init__(self, spec: SpaceSpec, retained="first", max_cells=None, orientation="descending"):
        self.spec = spec
        self.X = spec.build()
        try:
            self.setup = groupoid_setup(self.X, spec.x, spec.y)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        self.retained = retained
        self.max_cells = max_cells
        self.orientation = orientation
        self._fams: dict[int, bl.PairFamily] = {}

    def family(self, n: int) -> bl.PairFamily:
        if n not in self._fams:
            self._fams[n] = bl.build_pair_family(self.X, self.spec.x, self.spec.y, n,
                                                 self.retained, self.max_cells)
        return self._fams[n]

    @property
    def equal(self) -> bool:
        return self.setup.x == self.setup.y


def cmd_dims(sess: Session, n_max: int) -> RunReport:
    rep = RunReport("dims", sess.spec.describe(), {"n_max": n_max})
    r = sess.setup.rank
    for n in range(1, n_max + 1):
        h = sess.family(n).homology.dimension
        a = algebra_dimension(r, n)
        pred = bl.expected_homology_dimension(r, n, sess.equal)
        rep.dims.append({"n": n, "homology_dim": h, "algebra_dim": a, "predicted": pred,
                         "status": "ok" if h == pred else "MISMATCH"})
        rep.check("dimension", f"n={n}", pred, h, h == pred)
    return rep


def _tau_contract(sess: Session, n: int, rep: RunReport) -> QMatrix:
    T = bl.tau_matrix(sess.family(n), sess.setup, sess.orientation)
    rk = rank(T)
    if sess.equal:
        unit_col_zero = not any(T.column(0))
        ok = rk == T.ncols - 1 and unit_col_zero
        rep.check("tau-rank", f"n={n}", f"corank 1, kernel = unit ({T.ncols - 1})", rk, ok)
    else:
        ok = T.nrows == T.ncols and rk == T.ncols
        rep.check("tau-rank", f"n={n}", f"invertible ({T.ncols})", rk, ok)
    return T


def _random_words(rank: int, count: int, max_len: int, seed: int) -> list:
    rng = random.Random(seed)
    return [tuple((rng.randint(1, rank), 1) for _ in range(rng.randint(1, max_len)))
            for _ in range(count)]


def cmd_verify(sess: Session, n: int, checks: Sequence[str], words: Sequence) -> RunReport:
    rep = RunReport("verify", sess.spec.describe(),
                    {"n": n, "retained": sess.retained, "orientation": sess.orientation,
                     "checks": ",".join(checks)})
    levels = range(1, n + 1)
    if "staircase-boundary" in checks:
        samples = _random_words(max(sess.setup.rank, 1), 50, 4, seed=n) if sess.setup.rank else [()]
        for m in levels:
            pf = sess.family(m)
            bad = 0
            for w in samples:
                path = sess.setup.path_of_word(w)
                chain = bl.tau_chain(pf, path, sess.orientation)
                bd = boundary_chain(pf.P, m, chain)
                if any(k not in pf.Ymask.members[m - 1] for k in bd):
                    bad += 1
            rep.check("staircase-boundary", f"n={m} words={len(samples)}", 0, bad, bad == 0)
    if "tau-rank" in checks:
        for m in levels:
            try:
                _tau_contract(sess, m, rep)
            except bl.StaircaseError as exc:
                rep.check("tau-rank", f"n={m}", "relative cycles", str(exc), False)
    if "excision" in checks:
        for m in levels:
            pf, prev = sess.family(m), sess.family(m - 1)
            probs = bl.identification_problems(pf, prev)
            rep.check("identification", f"n={m}", "bijection onto retained component",
                      "ok" if not probs else "; ".join(probs[:3]), not probs)
            try:
                g = bl.excision_iso(pf, prev)
                rep.check("excision", f"n={m}", "invertible", f"{g.nrows}x{g.ncols} rank {rank(g)}", True)
            except bl.ExcisionFailure as exc:
                rep.check("excision", f"n={m}", "invertible", str(exc), False)
    if "les" in checks:
        pf = sess.family(n)
        for r in (verify_les(pf.P, pf.Ymask, range(n + 1)),
                  verify_triple_les(pf.P, pf.Ymask, pf.Zmask, range(n + 1))):
            bad = [node.name for node in r.nodes if not node.ok]
            rep.check(f"les-{r.title}", f"n={n} nodes={len(r.nodes)}", "exact",
                      "exact" if not bad else "not exact at " + ",".join(bad), not bad)
    if "cd" in checks:
        for m in levels:
            cd = bl.verify_cd(sess.family(m), sess.family(m - 1), sess.setup, words, sess.orientation)
            bad = [e.label for e in cd.entries if not e.ok]
            rep.check("cd", f"n={m} entries={len(cd.entries)}", "commutes",
                      f"{cd.relation}" + (f" (failing: {', '.join(bad[:4])})" if bad else ""), cd.ok)
            for e in cd.entries:
                if e.error:
                    rep.notes.append(f"cd n={m} {e.label}: {e.error}")
    return rep


def cmd_tau(sess: Session, n: int, words: Sequence) -> RunReport:
    rep = RunReport("tau", sess.spec.describe(), {"n": n, "orientation": sess.orientation})
    pf = sess.family(n)
    T = bl.tau_matrix(pf, sess.setup, sess.orientation)
    cols = [_mono_label(m) for m in monomials(sess.setup.rank, n)]
    rep.matrices[f"tau_{n}"] = matrix_doc(T, [f"h{i}" for i in range(T.nrows)], cols)
    for w in words:
        v = bl.tau(pf, sess.setup.path_of_word(w), sess.orientation)
        rep.notes.append(f"tau_{n}({format_word(w)}) = ({', '.join(_vec(v))})")
    return rep


def cmd_kappa(sess: Session, n: int, words: Sequence) -> RunReport:
    if n < 1:
        raise InputError("kappa needs n >= 1")
    rep = RunReport("kappa", sess.spec.describe(),
                    {"n": n, "retained": sess.retained, "orientation": sess.orientation})
    pf, prev = sess.family(n), sess.family(n - 1)
    res = bl.kappa(pf, prev)
    rep.matrices[f"kappa_{n}"] = matrix_doc(res.matrix)
    rep.matrices[f"g_{n - 1}"] = matrix_doc(res.excision)
    rep.matrices[f"delta_{n}"] = matrix_doc(res.connecting)
    rep.notes += res.log
    if words:
        cd = bl.verify_cd(pf, prev, sess.setup, words, sess.orientation)
        for e in cd.entries:
            if e.label.startswith("word"):
                rep.check("cd", e.label, _vec(e.rhs), _vec(e.lhs) if not e.error else e.error, e.ok)
    return rep


# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unihom", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_format):
        sp.add_argument("--space", required=True, help="space description (JSON)")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--format", choices=("json", "tsv"), default=default_format)
        sp.add_argument("--retained", choices=bl.RETAINED, default="first")
        sp.add_argument("--orientation", choices=bl.ORIENTATIONS, default="descending")
        sp.add_argument("--max-cells", type=int, default=None,
                        help=f"nondegenerate cell guard (env {MAX_CELLS_ENV})")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--no-timing", action="store_true", help="omit timing from JSON output")

    common(sub.add_parser("dims", help="dimension table against the algebra"), "tsv")
    v = sub.add_parser("verify", help="run verification checks")
    common(v, "tsv")
    v.add_argument("--checks", default=",".join(CHECKS))
    v.add_argument("--words", default=None, help='comma-separated words, e.g. "g1 g1, g1 g2^-1"')
    for name in ("tau", "kappa"):
        sp = sub.add_parser(name, help=f"matrix of {name}")
        common(sp, "json")
        sp.add_argument("--words", default=None)
    return p


def run(args) -> tuple[RunReport, int]:
    if args.n < 0 or (args.command != "tau" and args.n < 1):
        raise InputError("--n must be positive")
    max_cells = args.max_cells
    if max_cells is None and os.environ.get(MAX_CELLS_ENV):
        try:
            max_cells = int(os.environ[MAX_CELLS_ENV])
        except ValueError:
            raise InputError(f"{MAX_CELLS_ENV} must be an integer") from None
    spec = load_space(args.space)
    sess = Session(spec, args.retained, max_cells, args.orientation)
    words = _parse_words(getattr(args, "words", None), sess.setup.rank)
    for w in words:
        try:
            sess.setup.path_of_word(w)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    t0 = time.perf_counter()
    if args.command == "dims":
        rep = cmd_dims(sess, args.n)
    elif args.command == "verify":
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = set(checks) - set(CHECKS)
        if unknown:
            raise InputError(f"unknown checks: {', '.join(sorted(unknown))}")
        rep = cmd_verify(sess, args.n, checks, words)
    elif args.command == "tau":
        rep = cmd_tau(sess, args.n, words)
    else:
        rep = cmd_kappa(sess, args.n, words)
    rep.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    return rep, EXIT_OK if rep.passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rep, code = run(args)
    except InputError as exc:
        print(f"unihom: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitExceeded as exc:
        print(f"unihom: resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    text = rep.to_json(not args.no_timing) if args.format == "json" else rep.to_tsv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
