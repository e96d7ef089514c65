from itertools import product

import numpy as np
import pytest

from qaut.ncalg import B, GaussQ, M, U, X, ZERO, const, gen
from qaut.presentations import (DimensionMismatch, NotPositive, QMatrix, appendix_presentations,
                                aut_B_presentation, aut_Mn_presentation, finite_space,
                                magic_presentation, q_variant, rename_generators)
from qaut.rewrite import Verdict, ideal_member, ideal_system, orient, reduce


def expected_counts(kind, n=None, blocks=None):
    if kind == "X":
        return {"idempotent": n * n, "self_adjoint": n * n, "row_sum": n, "column_sum": n}
    S = n * n if kind == "M" else sum(b * b for b in blocks)
    return {"multiplicative": S ** 3, "antimultiplicative": S ** 3, "adjoint": S ** 2,
            "unit": S, "trace": S}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_magic_counts(n):
    P = magic_presentation(n)
    assert len(P.generators) == n * n
    assert P.family_counts() == expected_counts("X", n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_aut_m_counts(n):
    P = aut_Mn_presentation(n)
    assert len(P.generators) == n ** 4
    assert P.family_counts() == expected_counts("M", n)


def test_relation_5_has_64_instances_at_n2():
    assert len(aut_Mn_presentation(2).family("multiplicative")) == 64


@pytest.mark.parametrize("blocks", [(1, 2), (2, 1), (1, 1, 1), (2, 2)])
def test_aut_b_counts(blocks):
    P = aut_B_presentation(blocks)
    S = sum(b * b for b in blocks)
    assert len(P.generators) == S * S
    assert P.family_counts() == expected_counts("B", blocks=blocks)


def test_blocks_12_has_25_generators():
    assert len(aut_B_presentation((1, 2)).generators) == 25


@pytest.mark.parametrize("P", [magic_presentation(1), aut_Mn_presentation(1)])
def test_size_one_is_scalar(P):
    s = ideal_system(P.relations)
    assert reduce(gen(P.generators[0]), s) == const(1)


def test_magic2_collapses():
    s = ideal_system(magic_presentation(2).relations)
    assert reduce(gen(X(2, 2)) - gen(X(1, 1)), s).is_zero()


def test_counit_and_antipode_values():
    P = aut_Mn_presentation(2)
    assert P.counit[M(1, 2, 1, 2)] == 1 and P.counit[M(1, 2, 2, 1)] == 0
    assert P.antipode[M(1, 2, 2, 1)] == gen(M(1, 2, 2, 1))
    assert P.antipode[M(1, 1, 1, 2)] == gen(M(2, 1, 1, 1))
    assert magic_presentation(3).antipode[X(1, 2)] == gen(X(2, 1))


@pytest.mark.parametrize("P", [magic_presentation(3), aut_Mn_presentation(2),
                               aut_B_presentation((1, 2))])
def test_builder_sanity(P):
    assert P.bound_check()
    s = orient(P.relations)
    assert all(reduce(r, s).is_zero() for r in P.relations)
    full = ideal_system(P.relations)
    assert all(reduce(r.star(), full).is_zero() for r in P.relations)


def test_degeneration_single_block_exact():
    for n in (1, 2):
        P = aut_B_presentation((n,))
        renamed = rename_generators(P.relations, lambda g: M(*g.indices[:4]))
        assert set(renamed) == set(aut_Mn_presentation(n).relations)


def test_degeneration_point_blocks():
    """Renamed relation set of blocks (1,..,1) contains the magic one; the extra
    relations are orthogonality instances; both sets generate the same ideal."""
    m = 3
    P = aut_B_presentation((1,) * m)
    ren = [r for r in rename_generators(P.relations, lambda g: X(*g.indices[4:])) if r]
    Xm = magic_presentation(m)
    assert set(Xm.relations) <= set(ren)
    a = lambda i, j: gen(X(i, j))
    R = range(1, m + 1)
    ortho = {a(x, y) * a(x, z) for x in R for y in R for z in R if y != z}
    ortho |= {a(y, x) * a(z, x) for x in R for y in R for z in R if y != z}
    assert set(ren) - set(Xm.relations) == ortho
    sx, sb = ideal_system(Xm.relations), ideal_system(tuple(set(ren)))
    assert all(reduce(r, sx).is_zero() for r in ren)
    assert all(reduce(r, sb).is_zero() for r in Xm.relations)


def test_redundant_families_not_algebraically_derivable():
    P = magic_presentation(3)
    s = ideal_system(tuple(P.reduced_relations()))
    for r in P.family("column_sum"):
        assert ideal_member(r, s).verdict is Verdict.NOT_IN_IDEAL
    Pm = aut_Mn_presentation(2)
    sm = ideal_system(tuple(Pm.reduced_relations()))
    for r in Pm.family("trace"):
        assert ideal_member(r, sm).verdict is Verdict.NOT_IN_IDEAL


def test_q_identity_matches_untwisted():
    for base, param, P in (("X", 3, magic_presentation(3)), ("M", 2, aut_Mn_presentation(2))):
        dim = 3 if base == "X" else 4
        Pq = q_variant(base, param, QMatrix.identity(dim))
        sq, s = ideal_system(Pq.relations), ideal_system(P.relations)
        assert all(reduce(r, s).is_zero() for r in Pq.relations)
        assert all(reduce(r, sq).is_zero() for r in P.relations)


def test_q_errors():
    with pytest.raises(DimensionMismatch):
        q_variant("X", 3, QMatrix.diag([1, 2]))
    with pytest.raises(NotPositive):
        q_variant("X", 2, QMatrix.diag([1, -2]))
    with pytest.raises(NotPositive):
        appendix_presentations("a_o_new", Q=QMatrix.of([[1, 2], [2, 1]]))


def test_appendix_presentations():
    au = appendix_presentations("a_u", n=2)
    assert len(au.generators) == 4 and len(au.relations) == 16
    new = appendix_presentations("a_o_new", Q=QMatrix.identity(2))
    old = appendix_presentations("a_o_old", Q=QMatrix.identity(2))
    sn, so = ideal_system(new.relations), ideal_system(old.relations)
    assert all(reduce(r, so).is_zero() for r in new.relations)
    assert all(reduce(r, sn).is_zero() for r in old.relations)
    Q = QMatrix.diag([1, 2])
    old_q = appendix_presentations("a_o_old", Q=Q)
    s = ideal_system(old_q.relations)
    for r in appendix_presentations("a_o_new", Q=Q).relations:
        assert reduce(r, s).is_zero()
    for r in old_q.family("orthogonal_left") + old_q.family("orthogonal_right"):
        assert reduce(r, s).is_zero()


def test_qmatrix_exact():
    Q = QMatrix.of([[2, GaussQ(0, 1)], [GaussQ(0, -1), 2]])
    assert Q.is_positive()
    inv = Q.inverse()
    prod = [[sum((Q[i, k] * inv[k, j] for k in range(2)), GaussQ(0)) for j in range(2)]
            for i in range(2)]
    assert prod == [[1, 0], [0, 1]]
    assert not QMatrix.of([[1, 2], [2, 1]]).is_positive()


@pytest.mark.parametrize("blocks", [(2,), (1, 2), (2, 3)])
def test_finite_space_against_dense(blocks):
    B_ = finite_space(blocks)
    assert B_.dim == sum(n * n for n in blocks)
    dense = {e: np.array(B_.dense(e)) for e in B_.basis}
    for e, f in product(B_.basis, repeat=2):
        g = B_.mul(e, f)
        want = dense[g] if g is not None else 0 * dense[e]
        assert (dense[e] @ dense[f] == want).all()
        assert (dense[B_.star(e)] == dense[e].T).all()
    unit = sum(dense[e] for e in B_.unit())
    assert (unit == np.eye(len(unit))).all()
    assert sum(B_.psi(e) for e in B_.unit()) == sum(blocks)


def test_finite_space_examples():
    B2 = finite_space((2,))
    assert B2.mul((1, 1, 1), (1, 2, 1)) == (1, 2, 1)
    assert B2.mul((1, 2, 1), (1, 1, 1)) is None
    B3 = finite_space((3,))
    assert B3.psi((1, 2, 1)) == 0 and B3.psi((2, 2, 1)) == 1
    with pytest.raises(ValueError):
        finite_space((0, 1))
