"""Morphisms between the presentations: block embeddings and the A_u model."""
from __future__ import annotations

from .hopf import StructureReport, check_morphism, system_for
from .ncalg import B, M, U, X, ZERO, const, gen
from .presentations import (Presentation, appendix_presentations, aut_B_presentation,
                            aut_Mn_presentation, magic_presentation, rename_generators)
from .rewrite import ideal_system, reduce

__all__ = ["block_embedding", "diagonal_embedding", "au_model_map", "embedding_reports",
           "degeneration_report"]


def block_embedding(blocks, k0: int, literal: bool = False):
    """A_aut(B) -> A_aut(M_{n_k0}) concentrated on block k0.

    The other diagonal blocks are sent to the identity coaction.  With
    ``literal`` they are sent to zero instead, which breaks the unit relation
    whenever B has more than one block.
    """
    def phi(g):
        if g.starred:
            return None
        k, l, r, s, x, y = g.indices
        if x == y == k0:
            return gen(M(k, l, r, s))
        if x == y and not literal:
            return const(int(k == r and l == s))
        return ZERO
    return phi


def diagonal_embedding(m: int, n: int):
    """A_aut(M_n + ... + M_n) -> A_aut(X_m): a^{kl}_{rs,xy} -> delta_kr delta_ls a_xy."""
    def phi(g):
        if g.starred:
            return None
        k, l, r, s, x, y = g.indices
        return gen(X(x, y)) if (k == r and l == s) else ZERO
    return phi


def au_model_map(g):
    """A_aut(M_n) -> A_u(n): a^{kl}_{ij} -> a_ki a_lj*."""
    if g.starred:
        return None
    k, l, i, j = g.indices
    return gen(U(k, i)) * gen(U(l, j)).star()


def embedding_reports(blocks=(1, 2), k0: int | None = None, diag=(2, 2), au_n: int = 2,
                      **budget) -> list:
    blocks = tuple(blocks)
    if k0 is None:
        k0 = max(range(1, len(blocks) + 1), key=lambda i: blocks[i - 1])
    src = aut_B_presentation(blocks)
    dst = aut_Mn_presentation(blocks[k0 - 1])
    sys_m = system_for(dst, **budget)
    reps = [check_morphism(src, dst, block_embedding(blocks, k0), "embedding.block",
                           sys_m)]
    lit = check_morphism(src, dst, block_embedding(blocks, k0, literal=True),
                         "embedding.block_literal", sys_m)
    lit.required = False
    reps.append(lit)
    m, n = diag
    xm = magic_presentation(m)
    reps.append(check_morphism(aut_B_presentation((n,) * m), xm, diagonal_embedding(m, n),
                               "embedding.diagonal", system_for(xm, **budget)))
    au = appendix_presentations("a_u", n=au_n)
    reps.append(check_morphism(aut_Mn_presentation(au_n), au, au_model_map,
                               "embedding.au_model", system_for(au, **budget)))
    for r in reps:
        r.details.setdefault("blocks", list(blocks))
    reps[0].details["k0"] = reps[1].details["k0"] = k0
    return reps


def degeneration_report(m: int, **budget) -> dict:
    """Compare A_aut(B) for m one-dimensional blocks with the magic presentation.

    Relation sets are compared after renaming b^{11}_{11,xy} -> a_xy, and the
    two ideals are compared by reducing each relation set in the other system.
    """
    B1 = aut_B_presentation((1,) * m)
    Xm = magic_presentation(m)
    renamed = rename_generators(B1.relations, lambda g: X(g.indices[4], g.indices[5]))
    ren_set = {p for p in renamed if p}
    x_set = set(Xm.relations)
    sys_x = system_for(Xm, **budget)
    sys_b = ideal_system(tuple(ren_set), **budget)
    return {
        "m": m,
        "magic_subset_of_renamed": x_set <= ren_set,
        "extra_relations": len(ren_set - x_set),
        "renamed_in_magic_ideal": all(not reduce(r, sys_x) for r in ren_set),
        "magic_in_renamed_ideal": all(not reduce(r, sys_b) for r in x_set),
    }
