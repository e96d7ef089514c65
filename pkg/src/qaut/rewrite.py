"""Oriented rewrite systems for two-sided *-ideals of the free algebra.

Relations are turned into monic rules ``lhs -> rhs`` (lhs the degree-lex
leading word) and completed by resolving word overlaps, in ascending order of
the overlap word, up to a degree cap.  Reduction to normal form then decides
ideal membership for everything the completed rules can see.
"""
from __future__ import annotations

import enum
import heapq
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ncalg import G_ONE, NCPoly, lookup, word_key

__all__ = [
    "RewriteRule", "RewriteSystem", "Status", "Verdict", "Membership",
    "UnorientableRelation", "orient", "reduce", "complete", "ideal_member",
    "DEFAULT_DEGREE_CAP", "DEFAULT_RULE_CAP", "ideal_system",
    "projection_partitions", "positivity_consequences",
]

DEFAULT_DEGREE_CAP = 8
DEFAULT_RULE_CAP = 20000


class UnorientableRelation(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: NCPoly
    origin: str = "declared"  # declared | star-closure | critical-pair
    parents: tuple = ()
    index: int = 0

    @property
    def degree(self) -> int:
        return len(self.lhs)

    def relation(self) -> NCPoly:
        return NCPoly({self.lhs: G_ONE}) - self.rhs

    def __str__(self):
        lhs = " ".join(str(lookup(g)) for g in self.lhs) or "1"
        return f"{lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Status:
    kind: str  # raw | confluent | budget_exhausted
    degree: int | None = None
    rule_cap: int | None = None
    # True when no overlap was left unresolved, not even above the cap
    finite: bool = False

    def __str__(self):
        if self.kind == "raw":
            return "raw"
        if self.kind == "confluent":
            return "confluent" if self.finite else f"confluent_up_to({self.degree})"
        return f"budget_exhausted({self.degree}, {self.rule_cap})"


class Verdict(str, enum.Enum):
    IN_IDEAL = "InIdeal"
    NOT_IN_IDEAL = "NotInIdeal_upTo"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Membership:
    verdict: Verdict
    normal_form: NCPoly
    degree: int | None = None

    def __str__(self):
        if self.verdict is Verdict.NOT_IN_IDEAL:
            return f"NotInIdeal_upTo({self.degree})"
        return self.verdict.value


@dataclass(frozen=True, eq=False)
class RewriteSystem:
    rules: tuple
    status: Status = Status("raw")
    degree_cap: int = DEFAULT_DEGREE_CAP
    rule_cap: int = DEFAULT_RULE_CAP
    trace: tuple = ()
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        lhs_map = {r.lhs: r.rhs.terms for r in self.rules}
        object.__setattr__(self, "_lhs_map", lhs_map)
        object.__setattr__(self, "_lens", tuple(sorted({len(k) for k in lhs_map})))

    def __len__(self):
        return len(self.rules)

    @property
    def max_degree(self) -> int:
        return max(self._lens, default=0)

    def rule_for(self, lhs: tuple) -> RewriteRule | None:
        for r in self.rules:
            if r.lhs == lhs:
                return r
        return None

    def write_trace(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.trace:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


# -- reduction -----------------------------------------------------------------

def _find_divisor(w: tuple, lhs_map: dict, lens: Sequence[int]):
    n = len(w)
    for L in lens:
        if L > n:
            break
        for pos in range(n - L + 1):
            rhs = lhs_map.get(w[pos:pos + L])
            if rhs is not None:
                return pos, L, rhs
    return None


def _nf(terms: dict, lhs_map: dict, lens: Sequence[int]) -> dict:
    """Full normal form, always rewriting the largest remaining word."""
    if not lhs_map:
        return dict(terms)
    work = dict(terms)
    heap = [(-word_key(w), w) for w in work]
    heapq.heapify(heap)
    out: dict = {}
    while heap:
        _, w = heapq.heappop(heap)
        c = work.pop(w, None)
        if c is None:
            continue
        hit = _find_divisor(w, lhs_map, lens)
        if hit is None:
            out[w] = c
            continue
        pos, L, rhs = hit
        pre, suf = w[:pos], w[pos + L:]
        for rw, rc in rhs.items():
            nw = pre + rw + suf
            old = work.get(nw)
            if old is None:
                work[nw] = c * rc
                heapq.heappush(heap, (-word_key(nw), nw))
            else:
                v = old + c * rc
                if v:
                    work[nw] = v
                else:
                    del work[nw]
    return out


def _nf_random(terms: dict, lhs_map: dict, lens: Sequence[int], rng: random.Random) -> dict:
    """Normal form by rewriting a random reducible occurrence each step."""
    cur = dict(terms)
    while True:
        reducible = []
        for w in sorted(cur, key=word_key):
            n = len(w)
            occ = [(pos, L) for L in lens if L <= n for pos in range(n - L + 1)
                   if w[pos:pos + L] in lhs_map]
            if occ:
                reducible.append((w, occ))
        if not reducible:
            return cur
        w, occ = rng.choice(reducible)
        pos, L = rng.choice(occ)
        c = cur.pop(w)
        rhs = lhs_map[w[pos:pos + L]]
        for rw, rc in rhs.items():
            nw = w[:pos] + rw + w[pos + L:]
            v = cur.get(nw)
            v = c * rc if v is None else v + c * rc
            if v:
                cur[nw] = v
            else:
                cur.pop(nw, None)


def reduce(p: NCPoly, sys: RewriteSystem, *, strategy: str = "largest",
           rng: random.Random | None = None) -> NCPoly:
    if strategy == "largest":
        return NCPoly(_nf(p.terms, sys._lhs_map, sys._lens), _trusted=True)
    if strategy == "random":
        return NCPoly(_nf_random(p.terms, sys._lhs_map, sys._lens, rng or random.Random(0)),
                      _trusted=True)
    raise ValueError(f"unknown strategy {strategy!r}")


def ideal_member(p: NCPoly, sys: RewriteSystem) -> Membership:
    nf = reduce(p, sys)
    if nf.is_zero():
        return Membership(Verdict.IN_IDEAL, nf)
    if sys.status.kind == "confluent":
        return Membership(Verdict.NOT_IN_IDEAL, nf, sys.status.degree)
    return Membership(Verdict.INCONCLUSIVE, nf)


# -- rule bookkeeping shared by orient and complete ------------------------------------

class _Builder:
    def __init__(self, degree_cap: int, rule_cap: int):
        self.degree_cap = degree_cap
        self.rule_cap = rule_cap
        self.rules: dict[int, list] = {}  # id -> [lhs, rhs_terms, origin, parents]
        self.lhs_map: dict = {}
        self.lens: dict[int, int] = {}
        self._lens_sorted: tuple = ()
        self.factors: dict = {}   # factor word -> set of rule ids whose lhs contains it
        self.prefixes: dict = {}  # proper prefix -> rule ids
        self.suffixes: dict = {}  # proper suffix -> rule ids
        self.next_id = 0
        self.pairs: list = []
        self.track_pairs = False
        self.seeding = False
        self.trace: list = []
        self.pairs_done = 0
        self.pairs_skipped = 0

    def nf(self, terms: dict) -> dict:
        return _nf(terms, self.lhs_map, self._lens_sorted)

    def _index(self, rid: int, lhs: tuple, add: bool) -> None:
        L = len(lhs)
        subs = {lhs[i:j] for i in range(L) for j in range(i + 1, L + 1)}
        for s in subs:
            if add:
                self.factors.setdefault(s, set()).add(rid)
            else:
                self.factors[s].discard(rid)
        for k in range(1, L):
            for table, key in ((self.prefixes, lhs[:k]), (self.suffixes, lhs[L - k:])):
                if add:
                    table.setdefault(key, set()).add(rid)
                else:
                    table[key].discard(rid)
        if add:
            self.lens[L] = self.lens.get(L, 0) + 1
        else:
            self.lens[L] -= 1
            if not self.lens[L]:
                del self.lens[L]
        self._lens_sorted = tuple(sorted(self.lens))

    def add(self, terms: dict, origin: str, parents: tuple = (), degree: int | None = None) -> None:
        queue = [(terms, origin, parents, degree)]
        while queue:
            terms, origin, parents, degree = queue.pop(0)
            nf = self.nf(terms)
            if not nf:
                continue
            lead = max(nf, key=word_key)
            inv = nf.pop(lead).inverse()
            rhs = {w: -c * inv for w, c in nf.items()}
            # rules whose lhs contains the new leading word are no longer reduced
            for rid in sorted(self.factors.get(lead, ())):
                old_lhs, old_rhs, old_origin, old_parents = self.rules.pop(rid)
                del self.lhs_map[old_lhs]
                self._index(rid, old_lhs, add=False)
                back = dict((w, -c) for w, c in old_rhs.items())
                back[old_lhs] = G_ONE
                queue.append((back, old_origin, old_parents, None))
            rid = self.next_id
            self.next_id += 1
            self.rules[rid] = [lead, rhs, origin, parents]
            self.lhs_map[lead] = rhs
            self._index(rid, lead, add=True)
            if not self.seeding and origin != "declared":
                self.trace.append({
                    "id": rid,
                    "lhs": [str(lookup(g)) for g in lead],
                    "rhs": NCPoly(rhs, _trusted=True).to_json(),
                    "origin": origin,
                    "parents": list(parents),
                    "degree": degree if degree is not None else len(lead),
                })
            if self.track_pairs:
                self._new_pairs(rid, lead)

    def _new_pairs(self, rid: int, a: tuple) -> None:
        L = len(a)
        for k in range(1, L):
            # a's suffix of length k is a prefix of b
            for b in self.prefixes.get(a[L - k:], ()):
                blhs = self.rules[b][0]
                word = a + blhs[k:]
                heapq.heappush(self.pairs, (word_key(word), rid, b, k, word))
            # a's prefix of length k is a suffix of b (b != a handled above when b == a)
            for b in self.suffixes.get(a[:k], ()):
                if b == rid:
                    continue
                blhs = self.rules[b][0]
                word = blhs + a[k:]
                heapq.heappush(self.pairs, (word_key(word), b, rid, k, word))

    def spoly(self, ra: int, rb: int, k: int) -> dict:
        a, rhs_a = self.rules[ra][0], self.rules[ra][1]
        b, rhs_b = self.rules[rb][0], self.rules[rb][1]
        tail, head = b[k:], a[:len(a) - k]
        out: dict = {}
        for w, c in rhs_a.items():
            out[w + tail] = c
        for w, c in rhs_b.items():
            nw = head + w
            v = out.get(nw)
            v = -c if v is None else v - c
            if v:
                out[nw] = v
            else:
                out.pop(nw, None)
        return out

    def finish(self) -> list:
        # tail-reduce every rhs against the final rule set
        ids = sorted(self.rules, key=lambda r: word_key(self.rules[r][0]))
        for rid in ids:
            lhs, rhs, origin, parents = self.rules[rid]
            del self.lhs_map[lhs]
            lens = self._lens_sorted
            new = _nf(rhs, self.lhs_map, lens)
            self.lhs_map[lhs] = new
            self.rules[rid][1] = new
        return [RewriteRule(self.rules[r][0], NCPoly(self.rules[r][1], _trusted=True),
                            self.rules[r][2], tuple(self.rules[r][3]), r) for r in ids]


def orient(relations: Iterable[NCPoly], degree_cap: int = DEFAULT_DEGREE_CAP,
           rule_cap: int = DEFAULT_RULE_CAP) -> RewriteSystem:
    """Monic, star-closed, interreduced rules for ``relations`` (status raw)."""
    b = _Builder(degree_cap, rule_cap)
    rels = list(relations)
    for r in rels:
        if r.is_zero():
            raise UnorientableRelation("zero relation cannot be oriented")
        b.add(r.terms, "declared")
    # close under star until stable
    while True:
        added = False
        for rid in sorted(b.rules):
            if rid not in b.rules:
                continue
            lhs, rhs = b.rules[rid][0], b.rules[rid][1]
            rel = {lhs: G_ONE}
            for w, c in rhs.items():
                rel[w] = -c
            s = NCPoly(rel, _trusted=True).star().terms
            if b.nf(s):
                b.add(s, "star-closure", (rid,))
                added = True
        if not added:
            break
    rules = b.finish()
    return RewriteSystem(tuple(rules), Status("raw"), degree_cap, rule_cap,
                         tuple(b.trace), {"rules": len(rules)})


def complete(sys: RewriteSystem, degree_cap: int | None = None,
             rule_cap: int | None = None) -> RewriteSystem:
    """Resolve overlaps with overlap word degree <= degree_cap."""
    D = sys.degree_cap if degree_cap is None else degree_cap
    cap = sys.rule_cap if rule_cap is None else rule_cap
    b = _Builder(D, cap)
    b.track_pairs = True
    b.trace = list(sys.trace)
    b.seeding = True
    for r in sorted(sys.rules, key=lambda r: word_key(r.lhs)):
        b.next_id = r.index
        b.add(dict(r.relation().terms), r.origin, r.parents)
    b.seeding = False
    b.next_id = max([r.index + 1 for r in sys.rules] + [rec["id"] + 1 for rec in b.trace])
    exhausted = False
    finite = True
    while b.pairs:
        key, ra, rb, k, word = b.pairs[0]
        if len(word) > D:
            finite = False
            break
        heapq.heappop(b.pairs)
        if ra not in b.rules or rb not in b.rules:
            b.pairs_skipped += 1
            continue
        b.pairs_done += 1
        s = b.spoly(ra, rb, k)
        b.add(s, "critical-pair", (ra, rb), len(word))
        if len(b.rules) > cap:
            exhausted = True
            finite = False
            break
    rules = b.finish()
    status = (Status("budget_exhausted", D, cap) if exhausted
              else Status("confluent", D, cap, finite=finite))
    stats = {"rules": len(rules), "pairs_resolved": b.pairs_done,
             "pairs_stale": b.pairs_skipped, "pairs_pending": len(b.pairs)}
    return RewriteSystem(tuple(rules), status, D, cap, tuple(b.trace), stats)


# -- C*-positivity consequences ----------------------------------------------------

def projection_partitions(relations: Iterable[NCPoly], sys: RewriteSystem) -> list:
    """Relations of the form p_1 + ... + p_k = 1 whose letters are projections in ``sys``."""
    out = []
    seen = set()
    for r in relations:
        const_c = r.terms.get(())
        letters = [w for w in r.terms if w]
        if const_c is None or len(letters) < 2 or any(len(w) != 1 for w in letters):
            continue
        if any(r.terms[w] != -const_c for w in letters):
            continue
        key = tuple(sorted(w[0] for w in letters))
        if key in seen:
            continue
        ok = True
        for g in key:
            p = NCPoly({(g,): G_ONE}, _trusted=True)
            if reduce(p * p - p, sys) or reduce(p.star() - p, sys):
                ok = False
                break
        if ok:
            seen.add(key)
            out.append(key)
    return out


def positivity_consequences(sys: RewriteSystem, partitions: Sequence[tuple]) -> list:
    """Elements forced to vanish in every C*-quotient.

    For a partition of unity by projections p_1..p_k and each j, the sum of
    x_i* x_i with x_i = p_i p_j (i != j) lies in the ideal; in a C*-algebra a
    vanishing sum of such terms forces each x_i = 0.  The certificate sum is
    checked by reduction before anything is returned.
    """
    found = []
    for part in partitions:
        for j in part:
            xs = [NCPoly({(i, j): G_ONE}, _trusted=True) for i in part if i != j]
            cert = NCPoly({}, _trusted=True)
            for x in xs:
                cert = cert + x.star() * x
            if reduce(cert, sys).is_zero():
                found.extend((x, cert) for x in xs)
    return found


_CACHE: dict = {}


def ideal_system(relations: Sequence[NCPoly], degree_cap: int = DEFAULT_DEGREE_CAP,
                 rule_cap: int = DEFAULT_RULE_CAP, cstar: bool = True) -> RewriteSystem:
    """Completed system for ``relations``, optionally closed under positivity lemmas.

    Results are memoised on the relation tuple and budgets.
    """
    key = (tuple(relations), degree_cap, rule_cap, cstar)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    rels = list(relations)
    sys = complete(orient(rels, degree_cap, rule_cap))
    lemmas: list = []
    while cstar and sys.status.kind != "budget_exhausted":
        new = [(x, c) for x, c in positivity_consequences(sys, projection_partitions(rels, sys))
               if reduce(x, sys)]
        if not new:
            break
        lemmas.extend(new)
        sys = complete(orient(rels + [x for x, _ in lemmas], degree_cap, rule_cap))
    if lemmas:
        extra = tuple({"origin": "positivity", "lhs": x.to_json(), "certificate": c.to_json()}
                      for x, c in lemmas)
        stats = dict(sys.stats, positivity_lemmas=len(lemmas))
        sys = RewriteSystem(sys.rules, sys.status, sys.degree_cap, sys.rule_cap,
                            extra + sys.trace, stats)
    _CACHE[key] = sys
    return sys
