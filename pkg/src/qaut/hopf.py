"""Hopf-structure checks for presentations: coproduct, counit, antipode, unitarity.

The tensor square A (x) A is modelled by two disjoint copies of the generators
(copy tags 1 and 2) that commute with each other.  Normal forms there are
"left word times right word": letters are stably sorted by copy and each leg is
reduced in the single-copy system, which is the normal form of the tensor
product of two confluent systems.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .ncalg import (G_ONE, GaussQ, GenId, MissingImage, NCPoly, ONE, ZERO, _add_into,
                    _mul_terms, const, copy_of, evaluate_scalar, gen, intern, lookup,
                    relabel, substitute, _COPY_SHIFT)
from .presentations import Presentation, poly_matmul
from .rewrite import (DEFAULT_DEGREE_CAP, DEFAULT_RULE_CAP, RewriteRule, RewriteSystem,
                      Verdict, _nf, ideal_member, ideal_system, reduce)

__all__ = [
    "StructureReport", "DoubledPresentation", "doubled", "system_for",
    "check_coproduct_well_defined", "check_coassociativity", "check_counit",
    "check_antipode", "check_kac_unitarity", "check_morphism", "check_commutativity",
    "antipode_image", "verdict_from",
]


@dataclass
class StructureReport:
    check: str
    verdict: str                      # Pass | Fail | Inconclusive
    witness: NCPoly | None = None
    rules_used: int = 0
    elapsed_ms: float = 0.0
    details: dict = field(default_factory=dict)
    required: bool = True

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"

    def to_json(self, timings: bool = False) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "witness": None if self.witness is None else str(self.witness),
            "rules_used": self.rules_used,
            "elapsed_ms": round(self.elapsed_ms, 3) if timings else None,
            "required": self.required,
            "details": self.details,
        }


def system_for(P: Presentation, degree_cap: int = DEFAULT_DEGREE_CAP,
               rule_cap: int = DEFAULT_RULE_CAP, cstar: bool = True) -> RewriteSystem:
    return ideal_system(P.relations, degree_cap, rule_cap, cstar)


def verdict_from(nonzero: list, sys: RewriteSystem) -> tuple[str, NCPoly | None]:
    """Pass when nothing survived; otherwise Fail or Inconclusive per the system status."""
    if not nonzero:
        return "Pass", None
    witness = min(nonzero, key=lambda p: (p.degree(), len(p), str(p)))
    st = sys.status
    if st.kind == "confluent" and (st.finite or witness.degree() <= st.degree - sys.max_degree):
        return "Fail", witness
    return "Inconclusive", witness


def _report(name, nonzero, sys, t0, details=None, required=True) -> StructureReport:
    verdict, witness = verdict_from(nonzero, sys)
    d = {"system": str(sys.status)}
    d.update(details or {})
    return StructureReport(name, verdict, witness, len(sys.rules),
                           (time.perf_counter() - t0) * 1000, d, required)


# -- tensor powers -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DoubledPresentation:
    """Tensor power of a presentation, ``copies`` legs sharing one rewrite system."""
    base: Presentation
    system: RewriteSystem
    copies: int = 2

    def __post_init__(self):
        object.__setattr__(self, "_leg_cache", {})

    def normal_form(self, p: NCPoly) -> NCPoly:
        base = self.system
        cache = self._leg_cache
        acc: dict = {}
        for w, c in p.terms.items():
            legs = [[] for _ in range(self.copies + 1)]
            for k in w:
                legs[copy_of(k)].append(k)
            if legs[0]:
                raise ValueError("untagged letter in a tensor-power polynomial")
            prod = {(): c}
            for cp in range(1, self.copies + 1):
                leg = tuple(legs[cp])
                if not leg:
                    continue
                nf = cache.get(leg)
                if nf is None:
                    shift = cp << _COPY_SHIFT
                    plain = tuple(k - shift for k in leg)
                    red = _nf({plain: G_ONE}, base._lhs_map, base._lens)
                    nf = cache[leg] = {tuple(k + shift for k in rw): rc for rw, rc in red.items()}
                if not nf:
                    prod = {}
                    break
                prod = _mul_terms(prod, nf)
            _add_into(acc, prod)
        return NCPoly(acc, _trusted=True)

    def rewrite_system(self) -> RewriteSystem:
        """The explicit rule set: every leg's rules plus cross-leg commutation."""
        rules = []
        letters = {g for r in self.system.rules for g in r.lhs}
        letters |= {g for r in self.system.rules for w in r.rhs.terms for g in w}
        letters |= {intern(g) for g in self.base.generators}
        letters |= {k ^ 1 for k in letters}
        shift = lambda k, cp: k + (cp << _COPY_SHIFT)
        idx = 0
        for cp in range(1, self.copies + 1):
            for r in self.system.rules:
                rhs = NCPoly({tuple(shift(k, cp) for k in w): c for w, c in r.rhs.terms.items()},
                             _trusted=True)
                rules.append(RewriteRule(tuple(shift(k, cp) for k in r.lhs), rhs, r.origin, (), idx))
                idx += 1
        for hi in range(2, self.copies + 1):
            for lo in range(1, hi):
                for g in sorted(letters):
                    for h in sorted(letters):
                        rules.append(RewriteRule((shift(g, hi), shift(h, lo)),
                                                 NCPoly({(shift(h, lo), shift(g, hi)): G_ONE},
                                                        _trusted=True),
                                                 "commutation", (), idx))
                        idx += 1
        return RewriteSystem(tuple(rules), self.system.status, self.system.degree_cap,
                             self.system.rule_cap)


def doubled(P: Presentation, sys: RewriteSystem | None = None, copies: int = 2) -> DoubledPresentation:
    return DoubledPresentation(P, sys if sys is not None else system_for(P), copies)


# -- checks ----------------------------------------------------------------------

def check_coproduct_well_defined(P: Presentation, sys: RewriteSystem | None = None,
                                 **budget) -> StructureReport:
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    D = doubled(P, sys)
    phi = P.coproduct
    bad = []
    for r in P.relations:
        img = D.normal_form(substitute(r, phi))
        if img:
            bad.append(img)
    return _report("hopf.coproduct_well_defined", bad, sys, t0,
                   {"relations": len(P.relations), "nonzero": len(bad)})


def _to_copy(g: GenId, cp: int) -> NCPoly:
    return gen(g._replace(copy=cp))


def check_coassociativity(P: Presentation, sys: RewriteSystem | None = None,
                          **budget) -> StructureReport:
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    T = doubled(P, sys, copies=3)
    phi = P.coproduct
    shift_up = lambda p: substitute(p, lambda g: None if g.starred else _to_copy(g, g.copy + 1))

    def lmap(g):
        if g.starred:
            return None
        base = g._replace(copy=0)
        if g.copy == 1:
            return phi[base]
        return _to_copy(base, 3)

    def rmap(g):
        if g.starred:
            return None
        base = g._replace(copy=0)
        if g.copy == 1:
            return _to_copy(base, 1)
        return shift_up(phi[base])

    bad = []
    for g in P.generators:
        a = T.normal_form(substitute(phi[g], lmap))
        b = T.normal_form(substitute(phi[g], rmap))
        if a != b:
            bad.append(a - b)
    return _report("hopf.coassociativity", bad, sys, t0, {"generators": len(P.generators)})


def check_counit(P: Presentation, sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    eps = P.counit
    phi = P.coproduct

    def side(g, keep):
        def m(h):
            if h.starred:
                return None
            base = h._replace(copy=0)
            return gen(base) if h.copy == keep else const(eps[base])
        return substitute(phi[g], m)

    bad = []
    for g in P.generators:
        for keep in (2, 1):
            diff = side(g, keep) - gen(g)
            if diff:
                bad.append(diff)
    scalar_bad = []
    for r in P.relations:
        v = evaluate_scalar(r, eps)
        if v:
            scalar_bad.append(r)
    rep = _report("hopf.counit", bad, sys, t0,
                  {"relations_killed_by_counit": len(P.relations) - len(scalar_bad),
                   "relations": len(P.relations)})
    if scalar_bad and rep.verdict == "Pass":
        rep.verdict, rep.witness = "Fail", scalar_bad[0]
    return rep


def antipode_image(P: Presentation, p: NCPoly) -> NCPoly:
    """Order-reversing extension of the antipode, with kappa(g*) = kappa(g)*."""
    kappa = P.antipode
    out = ZERO
    for w, c in p.terms.items():
        term = const(c)
        for k in reversed(w):
            g = lookup(k)
            img = kappa[g.star()].star() if g.starred else kappa[g]
            term = term * img
        out = out + term
    return out


def check_antipode(P: Presentation, sys: RewriteSystem | None = None, **budget) -> StructureReport:
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    if not P.antipode:
        return StructureReport("hopf.antipode", "Fail", None, 0, 0.0,
                               {"error": "no antipode images declared"})
    kappa = P.antipode
    eps = P.counit
    bad = []
    for a in P.index:
        for b in P.index:
            g = P.entry(a, b)
            left = right = ZERO
            for c in P.index:
                x, y = P.entry(a, c), P.entry(c, b)
                left = left + kappa[x] * gen(y)
                right = right + gen(x) * kappa[y]
            for expr in (left - const(eps[g]), right - const(eps[g])):
                nf = reduce(expr, sys)
                if nf:
                    bad.append(nf)
    anti = []
    kac = P.Q is None or P.Q.is_identity()
    if kac:
        for r in P.relations:
            nf = reduce(antipode_image(P, r), sys)
            if nf:
                anti.append(nf)
    return _report("hopf.antipode", bad + anti, sys, t0,
                   {"antipode_law_nonzero": len(bad),
                    "anti_homomorphism_checked": kac,
                    "anti_homomorphism_nonzero": len(anti)})


def check_kac_unitarity(P: Presentation, sys: RewriteSystem | None = None,
                        **budget) -> StructureReport:
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    u = P.u
    ustar = [[x.star() for x in col] for col in zip(*u)]
    ubar = [[x.star() for x in row] for row in u]
    ut = [list(col) for col in zip(*u)]
    n = len(u)
    products = {
        "u u*": poly_matmul(u, ustar), "u* u": poly_matmul(ustar, u),
        "ubar u^t": poly_matmul(ubar, ut), "u^t ubar": poly_matmul(ut, ubar),
    }
    bad = []
    per = {}
    for name, m in products.items():
        cnt = 0
        for i in range(n):
            for j in range(n):
                nf = reduce(m[i][j] - const(int(i == j)), sys)
                if nf:
                    bad.append(nf)
                    cnt += 1
        per[name] = cnt
    return _report("hopf.kac_unitarity", bad, sys, t0, {"nonzero_entries": per})


def check_morphism(src: Presentation, dst, phi, name: str = "hopf.morphism",
                   sys: RewriteSystem | None = None, **budget) -> StructureReport:
    """Every relation of ``src`` must vanish after substituting ``phi`` into ``dst``.

    ``dst`` is a Presentation (single copy) or a DoubledPresentation.
    """
    t0 = time.perf_counter()
    if isinstance(dst, DoubledPresentation):
        sys = dst.system
        nf = dst.normal_form
    else:
        sys = sys or system_for(dst, **budget)
        nf = lambda p: reduce(p, sys)
    bad = []
    for g in src.generators:
        if (phi(g) if callable(phi) else phi.get(g)) is None:
            raise MissingImage(str(g))
    for r in src.relations:
        img = nf(substitute(r, phi))
        if img:
            bad.append(img)
    return _report(name, bad, sys, t0, {"relations": len(src.relations), "nonzero": len(bad)})


def check_commutativity(P: Presentation, sys: RewriteSystem | None = None,
                        pairs: Iterable[tuple] | None = None, **budget) -> StructureReport:
    """Probe [g, h] for generator pairs; Pass only if every commutator is in the ideal.

    Informational: a noncommutative algebra is not a defect.
    """
    t0 = time.perf_counter()
    sys = sys or system_for(P, **budget)
    gens = P.generators
    if pairs is None:
        pairs = [(g, h) for i, g in enumerate(gens) for h in gens[i + 1:]]
    verdicts = {}
    bad = []
    for g, h in pairs:
        m = ideal_member(gen(g) * gen(h) - gen(h) * gen(g), sys)
        verdicts[f"[{g},{h}]"] = m.verdict.value
        if m.verdict is not Verdict.IN_IDEAL:
            bad.append(m.normal_form)
    rep = _report("hopf.commutativity", bad, sys, t0, {"probes": verdicts}, required=False)
    return rep
