"""The coaction alpha: B -> B (x) A on a finite space and checks of its axioms."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .hopf import StructureReport, _report, doubled, system_for
from .ncalg import G_ONE, GaussQ, NCPoly, ONE, ZERO, const, gen, relabel, substitute
from .presentations import FiniteSpace, Presentation, finite_space
from .rewrite import RewriteSystem, reduce

__all__ = [
    "ShapeMismatch", "BTensorElement", "alpha", "check_homomorphism", "check_multiplicative",
    "check_star", "check_unital", "check_coaction_square", "check_counit_action",
    "check_invariant_functional", "check_faithfulness_shadow", "coaction_suite",
]


class ShapeMismatch(ValueError):
    """The presentation does not act on the given finite space."""


@dataclass(frozen=True)
class BTensorElement:
    """sum_e e (x) components[e], with e a matrix unit (k, l, block)."""
    space: FiniteSpace
    components: Mapping

    def __mul__(self, other: "BTensorElement") -> "BTensorElement":
        out: dict = {}
        for e, x in self.components.items():
            for f, y in other.components.items():
                g = self.space.mul(e, f)
                if g is not None:
                    out[g] = out.get(g, ZERO) + x * y
        return BTensorElement(self.space, _prune(out))

    def __sub__(self, other: "BTensorElement") -> "BTensorElement":
        out = dict(self.components)
        for e, y in other.components.items():
            out[e] = out.get(e, ZERO) - y
        return BTensorElement(self.space, _prune(out))

    def scale(self, c) -> "BTensorElement":
        return BTensorElement(self.space, _prune({e: x * c for e, x in self.components.items()}))

    def star(self) -> "BTensorElement":
        return BTensorElement(self.space, {self.space.star(e): x.star()
                                           for e, x in self.components.items()})

    def map(self, fn) -> "BTensorElement":
        return BTensorElement(self.space, _prune({e: fn(x) for e, x in self.components.items()}))

    def is_zero(self) -> bool:
        return not self.components


def _prune(d: dict) -> dict:
    return {e: x for e, x in d.items() if x}


def space_of(P: Presentation) -> FiniteSpace:
    if P.blocks is None:
        raise ShapeMismatch(f"{P.name} is not the automorphism algebra of a finite space")
    return finite_space(P.blocks)


def _check_shape(space: FiniteSpace, P: Presentation) -> None:
    if P.blocks is None or tuple(P.blocks) != tuple(space.blocks):
        raise ShapeMismatch(f"{P.name} does not act on blocks {space.blocks}")


def alpha(space: FiniteSpace, P: Presentation, b) -> BTensorElement:
    """alpha of ``b``: a matrix unit, or a mapping unit -> scalar coefficient."""
    _check_shape(space, P)
    if isinstance(b, tuple):
        b = {b: G_ONE}
    out: dict = {}
    for f, c in b.items():
        if f not in space.basis:
            raise ShapeMismatch(f"{f} is not a matrix unit of {space.blocks}")
        c = GaussQ.coerce(c)
        if not c:
            continue
        for e in space.basis:
            out[e] = out.get(e, ZERO) + gen(P.entry(e, f)) * c
    return BTensorElement(space, _prune(out))


def _unit_tensor(space: FiniteSpace) -> BTensorElement:
    return BTensorElement(space, {e: ONE for e in space.unit()})


def _nonzero(elems, nf) -> list:
    bad = []
    for t in elems:
        for x in t.components.values():
            r = nf(x)
            if r:
                bad.append(r)
    return bad


def _setup(space, P, sys, budget):
    if space is None:
        space = space_of(P)
    _check_shape(space, P)
    return space, (sys or system_for(P, **budget))


def check_multiplicative(P: Presentation, space: FiniteSpace | None = None,
                         sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    images = {e: alpha(space, P, e) for e in space.basis}
    diffs = []
    for e in space.basis:
        for f in space.basis:
            g = space.mul(e, f)
            lhs = images[g] if g is not None else BTensorElement(space, {})
            diffs.append(lhs - images[e] * images[f])
    bad = _nonzero(diffs, lambda x: reduce(x, sys))
    return _report("coaction.multiplicative", bad, sys, t0, {"pairs": len(diffs)})


def check_star(P: Presentation, space: FiniteSpace | None = None,
               sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    diffs = [alpha(space, P, space.star(e)) - alpha(space, P, e).star() for e in space.basis]
    bad = _nonzero(diffs, lambda x: reduce(x, sys))
    return _report("coaction.star", bad, sys, t0)


def check_unital(P: Presentation, space: FiniteSpace | None = None,
                 sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    diff = alpha(space, P, space.unit()) - _unit_tensor(space)
    bad = _nonzero([diff], lambda x: reduce(x, sys))
    return _report("coaction.unital", bad, sys, t0)


def check_homomorphism(P: Presentation, space: FiniteSpace | None = None,
                       sys: RewriteSystem | None = None, **budget) -> StructureReport:
    """Multiplicative, star-preserving and unital, combined into one report."""
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    parts = [check_multiplicative(P, space, sys), check_star(P, space, sys),
             check_unital(P, space, sys)]
    worst = next((p for p in parts if p.verdict == "Fail"), None) or \
        next((p for p in parts if p.verdict == "Inconclusive"), None)
    return StructureReport("coaction.homomorphism", worst.verdict if worst else "Pass",
                           worst.witness if worst else None, len(sys.rules),
                           (time.perf_counter() - t0) * 1000,
                           {p.check: p.verdict for p in parts})


def check_coaction_square(P: Presentation, space: FiniteSpace | None = None,
                          sys: RewriteSystem | None = None, **budget) -> StructureReport:
    """(id (x) Phi) alpha = (alpha (x) id) alpha on every matrix unit."""
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    D = doubled(P, sys)
    phi = P.coproduct
    diffs = []
    for f in space.basis:
        lhs = {e: phi[P.entry(e, f)] for e in space.basis}
        rhs: dict = {}
        for c in space.basis:
            right = relabel(gen(P.entry(c, f)), 2)
            for e in space.basis:
                rhs[e] = rhs.get(e, ZERO) + relabel(gen(P.entry(e, c)), 1) * right
        diffs.append(BTensorElement(space, _prune({e: lhs[e] - rhs.get(e, ZERO) for e in lhs})))
    bad = _nonzero(diffs, D.normal_form)
    return _report("coaction.square", bad, sys, t0)


def check_counit_action(P: Presentation, space: FiniteSpace | None = None,
                        sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    eps = P.counit
    bad = []
    for f in space.basis:
        image = {e: eps[P.entry(e, f)] for e in space.basis}
        image = {e: c for e, c in image.items() if c}
        if image != {f: G_ONE}:
            bad.append(sum((const(c) for c in image.values()), ZERO) - ONE)
    rep = _report("coaction.counit", bad, sys, t0)
    if bad:
        rep.verdict = "Fail"   # exact scalar identity, independent of completion
    return rep


def check_invariant_functional(P: Presentation, weights: Mapping | None = None,
                               space: FiniteSpace | None = None,
                               sys: RewriteSystem | None = None, **budget) -> StructureReport:
    """(phi (x) id) alpha(e) = phi(e) 1 for each matrix unit; default phi is the trace psi."""
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    if weights is None:
        weights = space.psi_weights()
    w = {e: GaussQ.coerce(weights.get(e, 0)) for e in space.basis}
    bad = []
    for f in space.basis:
        acc = ZERO
        for e in space.basis:
            if w[e]:
                acc = acc + gen(P.entry(e, f)) * w[e]
        nf = reduce(acc - const(w[f]), sys)
        if nf:
            bad.append(nf)
    return _report("coaction.invariant_functional", bad, sys, t0,
                   {"weights": {str(e): str(c) for e, c in sorted(w.items()) if c}})


def check_faithfulness_shadow(P: Presentation, space: FiniteSpace | None = None,
                              sys: RewriteSystem | None = None, **budget) -> StructureReport:
    """Finite shadow of faithfulness: the components of alpha(basis) span the generators.

    Works modulo the ideal: every reduced generator must lie in the linear span
    of the reduced components.
    """
    t0 = time.perf_counter()
    space, sys = _setup(space, P, sys, budget)
    comps = []
    for f in space.basis:
        comps.extend(alpha(space, P, f).components.values())
    comps = [reduce(x, sys) for x in comps]
    targets = [reduce(gen(g), sys) for g in P.generators]
    words = sorted({w for p in comps + targets for w in p.terms})
    col = {w: i for i, w in enumerate(words)}

    def mat(polys):
        m = np.zeros((len(polys), max(len(words), 1)), dtype=complex)
        for r, p in enumerate(polys):
            for w, c in p.terms.items():
                m[r, col[w]] = complex(c)
        return m

    A = mat(comps)
    rank = np.linalg.matrix_rank(A) if comps else 0
    missing = [g for g, t in zip(P.generators, targets)
               if np.linalg.matrix_rank(np.vstack([A, mat([t])])) > rank]
    verdict = "Fail" if missing else "Pass"
    return StructureReport("coaction.faithfulness_shadow", verdict,
                           gen(missing[0]) if missing else None, len(sys.rules),
                           (time.perf_counter() - t0) * 1000,
                           {"rank": int(rank), "generators": len(P.generators)}, required=False)


def coaction_suite(P: Presentation, weights: Mapping | None = None,
                   sys: RewriteSystem | None = None, **budget) -> list:
    space = space_of(P)
    sys = sys or system_for(P, **budget)
    return [check_multiplicative(P, space, sys), check_star(P, space, sys),
            check_unital(P, space, sys), check_coaction_square(P, space, sys),
            check_counit_action(P, space, sys),
            check_invariant_functional(P, weights, space, sys),
            check_faithfulness_shadow(P, space, sys)]
