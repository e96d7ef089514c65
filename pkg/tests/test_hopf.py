import random
from dataclasses import replace

import numpy as np
import pytest

from qaut.hopf import (antipode_image, check_antipode, check_coassociativity, check_commutativity,
                       check_counit, check_coproduct_well_defined, check_kac_unitarity,
                       check_morphism, doubled, system_for, verdict_from)
from qaut.models import au_model_rep, two_projection_rep
from qaut.ncalg import MissingImage, evaluate_scalar, NCPoly, ONE, X, ZERO, const, copy_of, gen, relabel, substitute
from qaut.presentations import (appendix_presentations, aut_B_presentation, aut_Mn_presentation,
                                magic_presentation, q_variant, QMatrix)
from qaut.rewrite import RewriteSystem, Status, reduce

STRUCTURE = [check_coproduct_well_defined, check_coassociativity, check_counit, check_antipode,
             check_kac_unitarity]


@pytest.mark.parametrize("P", [magic_presentation(2), magic_presentation(3),
                               aut_Mn_presentation(2), aut_B_presentation((1, 2)),
                               appendix_presentations("a_u", n=2)],
                         ids=lambda P: P.name)
def test_structure_passes(P):
    s = system_for(P)
    for check in STRUCTURE:
        rep = check(P, s)
        assert rep.verdict == "Pass", (check.__name__, rep.witness)
        assert rep.witness is None


def test_coproduct_on_idempotent_numeric_oracle():
    """Phi(a11^2 - a11) vanishes in the tensor square of two characters."""
    P = magic_presentation(2)
    r = gen(X(1, 1)) * gen(X(1, 1)) - gen(X(1, 1))
    img = substitute(r, P.coproduct)
    assert doubled(P).normal_form(img).is_zero()
    swap = {X(1, 1): 0, X(1, 2): 1, X(2, 1): 1, X(2, 2): 0}
    ident = {X(1, 1): 1, X(1, 2): 0, X(2, 1): 0, X(2, 2): 1}
    for c1 in (swap, ident):
        for c2 in (swap, ident):
            vals = {g._replace(copy=1): v for g, v in c1.items()}
            vals.update({g._replace(copy=2): v for g, v in c2.items()})
            assert evaluate_scalar(img, vals) == 0


def test_doubled_normal_form_matches_explicit_system():
    P = magic_presentation(3)
    D = doubled(P)
    explicit = D.rewrite_system()
    rng = random.Random(3)
    gens = [g._replace(copy=c) for g in P.generators for c in (1, 2)]
    for _ in range(30):
        p = ZERO
        for _ in range(3):
            m = ONE
            for _ in range(rng.randint(1, 4)):
                g = rng.choice(gens)
                m = m * (gen(g).star() if rng.random() < 0.2 else gen(g))
            p = p + m * rng.randint(-2, 2)
        nf = D.normal_form(p)
        assert nf == reduce(p, explicit)
        # left word times right word
        for w in nf.terms:
            copies = [copy_of(k) for k in w]
            assert copies == sorted(copies)


def test_wrong_coproduct_fails():
    P = magic_presentation(3)
    wrong = {g: relabel(gen(g), 1) * relabel(gen(g), 2) for g in P.generators}
    rep = check_morphism(P, doubled(P), wrong)
    assert rep.verdict == "Fail"
    assert rep.witness is not None and not rep.witness.is_zero()


def test_wrong_antipode_fails():
    P = magic_presentation(3)
    bad = replace(P, antipode_rule=lambda a, b: gen(P.entry(a, b)))
    rep = check_antipode(bad)
    assert rep.verdict == "Fail"
    assert rep.witness is not None


def test_antipode_reverses_products():
    P = aut_Mn_presentation(2)
    a, b = P.generators[1], P.generators[6]
    lhs = antipode_image(P, gen(a) * gen(b).star())
    assert lhs == P.antipode[b].star() * P.antipode[a]


def test_antipode_law_numeric_soundness():
    rep = two_projection_rep(0.9)
    P = magic_presentation(4)
    s = system_for(P)
    for i in range(1, 5):
        for j in range(1, 5):
            law = sum((gen(X(k, i)) * gen(X(k, j)) for k in range(1, 5)), ZERO) - const(int(i == j))
            assert reduce(law, s).is_zero()
            assert np.linalg.norm(rep.evaluate(law), 2) < 1e-9


def test_kac_unitarity_numeric_on_au_model():
    P = aut_Mn_presentation(2)
    th = 0.3
    w = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]) @ np.diag([1, 1j])
    rep = au_model_rep(2, w)
    u = P.u
    n = len(u)
    for i in range(n):
        for j in range(n):
            e = sum((u[i][k] * u[j][k].star() for k in range(n)), ZERO) - const(int(i == j))
            assert np.abs(rep.evaluate(e)).max() < 1e-9


def test_twisted_variant_antipode_and_non_kac():
    Q = QMatrix.diag([1, 2])
    P = appendix_presentations("a_o_new", Q=Q)
    s = system_for(P)
    assert check_antipode(P, s).verdict == "Pass"
    assert check_kac_unitarity(P, s).verdict in ("Fail", "Inconclusive")
    Pq = q_variant("X", 3, QMatrix.diag([1, 1, 2]))
    sq = system_for(Pq)
    for check in (check_coproduct_well_defined, check_coassociativity, check_counit, check_antipode):
        assert check(Pq, sq).verdict == "Pass"


def test_morphism_missing_image():
    P = magic_presentation(2)
    with pytest.raises(MissingImage):
        check_morphism(P, magic_presentation(2), {X(1, 1): gen(X(1, 1))})


def test_commutativity_probe():
    assert check_commutativity(magic_presentation(2)).verdict == "Pass"
    rep = check_commutativity(magic_presentation(4), pairs=[(X(1, 1), X(3, 3))])
    assert rep.verdict == "Fail" and not rep.required
    assert rep.details["probes"]["[X[1,1],X[3,3]]"] == "NotInIdeal_upTo"


def test_verdict_logic():
    w = gen(X(1, 1)) * gen(X(1, 2))
    mk = lambda st: RewriteSystem((), st)
    assert verdict_from([], mk(Status("budget_exhausted", 8, 10)))[0] == "Pass"
    assert verdict_from([w], mk(Status("confluent", 8, finite=True)))[0] == "Fail"
    assert verdict_from([w], mk(Status("confluent", 8)))[0] == "Fail"
    assert verdict_from([w], mk(Status("confluent", 1)))[0] == "Inconclusive"
    assert verdict_from([w], mk(Status("budget_exhausted", 8, 10)))[0] == "Inconclusive"


def test_report_json_is_timing_free_by_default():
    rep = check_counit(magic_presentation(2))
    assert rep.to_json()["elapsed_ms"] is None
    assert rep.to_json(timings=True)["elapsed_ms"] >= 0
