import itertools
import json
import random

import numpy as np
import pytest

from qaut.models import two_projection_rep
from qaut.ncalg import G_ONE, NCPoly, ONE, X, ZERO, gen, intern
from qaut.presentations import aut_Mn_presentation, magic_presentation
from qaut.rewrite import (UnorientableRelation, Verdict, complete, ideal_member, ideal_system,
                          orient, reduce)


def mono(w):
    return NCPoly({tuple(w): G_ONE}, _trusted=True)


def random_poly(gens, rng, terms=4, deg=3):
    p = ZERO
    for _ in range(terms):
        m = ONE
        for _ in range(rng.randint(0, deg)):
            g = rng.choice(gens)
            m = m * (gen(g).star() if rng.random() < 0.3 else gen(g))
        p = p + m * rng.randint(-3, 3)
    return p


def test_orient_is_monic_and_star_closed():
    a = gen(X(1, 1))
    sys = orient([a * a * 2 - a * 2, a.star() - a])
    for r in sys.rules:
        assert r.rhs.coefficient(r.lhs) == 0
        assert not reduce(r.relation(), sys)
    assert reduce(a * a * a, sys) == a
    assert sys.status.kind == "raw"


def test_zero_relation_rejected():
    with pytest.raises(UnorientableRelation):
        orient([ZERO])


def test_magic2_finite_and_commutative(magic_sys):
    s = magic_sys[2]
    assert s.status.kind == "confluent" and s.status.finite
    a, b = gen(X(1, 1)), gen(X(2, 2))
    assert ideal_member(a * b - b * a, s).verdict is Verdict.IN_IDEAL
    assert reduce(gen(X(1, 2)), s) == ONE - a


def test_magic3_commutators_in_ideal(magic_sys):
    s = magic_sys[3]
    a, b = gen(X(1, 1)), gen(X(2, 2))
    assert ideal_member(a * b - b * a, s).verdict is Verdict.IN_IDEAL


def test_magic4_noncommuting_pair_is_not_member(magic_sys):
    s = magic_sys[4]
    a, b = gen(X(1, 1)), gen(X(3, 3))
    m = ideal_member(a * b - b * a, s)
    assert m.verdict is Verdict.NOT_IN_IDEAL
    # independent witness: the commutator is nonzero in a representation
    rep = two_projection_rep(0.7)
    assert np.linalg.norm(rep.evaluate(a * b - b * a), 2) > 0.1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_confluence_random_strategy(n, magic, magic_sys):
    """Any reduction order reaches the same normal form."""
    s = magic_sys[n]
    rng = random.Random(n)
    for _ in range(25):
        p = random_poly(magic[n].generators, rng)
        nf = reduce(p, s)
        for seed in range(3):
            assert reduce(p, s, strategy="random", rng=random.Random(seed)) == nf


def test_normal_forms_are_irreducible(magic_sys):
    s = magic_sys[4]
    lhs = {r.lhs for r in s.rules}
    rng = random.Random(4)
    gens = magic_presentation(4).generators
    for _ in range(20):
        nf = reduce(random_poly(gens, rng), s)
        for w in nf.terms:
            for i in range(len(w)):
                for j in range(i + 1, len(w) + 1):
                    assert w[i:j] not in lhs


def test_ideal_elements_reduce_to_zero_and_vanish_numerically(magic, magic_sys):
    """Soundness bridge: combinations of relations are InIdeal and vanish in a model."""
    P, s = magic[4], magic_sys[4]
    rep = two_projection_rep(0.4)
    rng = random.Random(7)
    for _ in range(15):
        p = ZERO
        for _ in range(3):
            r = rng.choice(P.relations)
            p = p + random_poly(P.generators, rng, 1, 2) * r * random_poly(P.generators, rng, 1, 2)
        assert reduce(p, s).is_zero()
        assert np.linalg.norm(rep.evaluate(p), 2) < 1e-9


def test_linear_algebra_oracle_magic2():
    """p - nf(p) lies in the span of u r v (unstarred multipliers, degree <= 4)."""
    P = magic_presentation(2)
    s = ideal_system(P.relations, cstar=False)
    gens = [intern(g) for g in P.generators]
    mults = []
    for r in P.relations:
        room = 4 - r.degree()
        for a in range(room + 1):
            for b in range(room + 1 - a):
                for w1 in itertools.product(gens, repeat=a):
                    for w2 in itertools.product(gens, repeat=b):
                        mults.append(mono(w1) * r * mono(w2))
    rng = random.Random(2)
    probes = []
    for _ in range(4):
        p = ONE
        for _ in range(3):
            p = p * gen(rng.choice(P.generators))
        probes.append(p - reduce(p, s))
    cols: dict = {}
    for m in mults + probes:
        for w in m.terms:
            cols.setdefault(w, len(cols))

    def row(p):
        v = np.zeros(len(cols))
        for w, c in p.terms.items():
            v[cols[w]] = float(c.re)
        return v

    A = np.array([row(m) for m in mults])
    rank = np.linalg.matrix_rank(A)
    for p in probes:
        assert np.linalg.matrix_rank(np.vstack([A, row(p)])) == rank
    # and a nonzero normal form is genuinely outside the span
    assert np.linalg.matrix_rank(np.vstack([A, row(gen(X(1, 1)))])) == rank + 1


def test_positivity_lemmas(magic):
    P = magic[4]
    pure = ideal_system(P.relations, cstar=False)
    full = ideal_system(P.relations)
    x = gen(X(1, 1)) * gen(X(1, 2))
    assert pure.status.finite
    assert ideal_member(x, pure).verdict is Verdict.NOT_IN_IDEAL
    assert ideal_member(x, full).verdict is Verdict.IN_IDEAL
    assert full.stats["positivity_lemmas"] > 0
    lemmas = [t for t in full.trace if t.get("origin") == "positivity"]
    assert lemmas
    # every certificate is a sum of x* x that lies in the purely algebraic ideal
    for t in lemmas[:12]:
        assert reduce(NCPoly.from_json(t["certificate"]), pure).is_zero()
        assert reduce(NCPoly.from_json(t["lhs"]), full).is_zero()


def test_budget_exhaustion_gives_inconclusive():
    P = aut_Mn_presentation(2)
    s = ideal_system(P.relations, rule_cap=10, cstar=False)
    assert s.status.kind == "budget_exhausted"
    p = gen(P.generators[0]) * gen(P.generators[5]) - gen(P.generators[5]) * gen(P.generators[0])
    m = ideal_member(p, s)
    assert m.verdict in (Verdict.INCONCLUSIVE, Verdict.IN_IDEAL)
    if reduce(p, s):
        assert m.verdict is Verdict.INCONCLUSIVE


def test_complete_is_deterministic():
    P = magic_presentation(3)
    a = complete(orient(P.relations))
    b = complete(orient(P.relations))
    assert [(r.lhs, r.rhs) for r in a.rules] == [(r.lhs, r.rhs) for r in b.rules]
    assert a.trace == b.trace


def test_trace_jsonl(tmp_path, magic_sys):
    path = tmp_path / "trace.jsonl"
    magic_sys[3].write_trace(path)
    lines = path.read_text().splitlines()
    assert lines
    rec = json.loads(lines[0])
    assert "origin" in rec
