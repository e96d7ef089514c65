"""Concrete models: characters (classical points), numeric matrix representations,
numeric checks of the Q-twisted relations, and brute-force oracles.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Mapping

import numpy as np

from .hopf import StructureReport
from .ncalg import (G_ONE, G_ZERO, GaussQ, GenId, M, MissingImage, NCPoly, X, evaluate_scalar,
                    lookup, parse_gen)
from .presentations import (NotPositive, Presentation, QMatrix,
                            magic_presentation, q_variant)

__all__ = [
    "CapExceeded", "MissingValue", "NotUnitary", "Character", "NumericRep",
    "enumerate_characters_magic", "characters_magic_q", "check_character",
    "two_projection_rep", "commutator_norm", "au_model_rep", "numeric_verify",
    "random_positive", "random_unitary", "sqrtm_psd", "pair_reindex", "ad_character", "phase_unitaries", "appendix_q_checks", "classical_point_discrepancy",
    "parse_gen", "DEFAULT_CAP", "DEFAULT_TOL",
]

DEFAULT_CAP = 6
DEFAULT_TOL = 1e-9


class CapExceeded(ValueError):
    """Brute force requested above the configured size cap."""


class MissingValue(KeyError):
    """A character does not assign a value to some generator."""


class NotUnitary(ValueError):
    pass


# -- characters ----------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    values: Mapping      # GenId -> GaussQ
    label: str = ""

    def __call__(self, g: GenId) -> GaussQ:
        return self.values[g]

    def to_json(self) -> dict:
        return {"label": self.label,
                "values": {str(g): v.to_json() for g, v in sorted(self.values.items())}}


def _perm_character(sigma: tuple) -> Character:
    n = len(sigma)
    vals = {X(i, j): GaussQ(int(sigma[i - 1] == j)) for i in range(1, n + 1)
            for j in range(1, n + 1)}
    return Character(vals, "".join(map(str, sigma)))


def _relations_vanish(P: Presentation, c: Character) -> bool:
    return all(not evaluate_scalar(r, c.values) for r in P.relations)


def enumerate_characters_magic(n: int, cap: int = DEFAULT_CAP) -> list:
    """All characters of the magic algebra: one per permutation matrix.

    Characters take 0/1 values on projections and the rows sum to one, so the
    candidates are exactly the 0/1 matrices with one 1 per row; of those the
    column sums keep the permutations.  Each survivor is verified exactly.
    """
    if n > cap:
        raise CapExceeded(f"n={n} exceeds cap {cap}")
    P = magic_presentation(n)
    out = []
    for rows in product(range(1, n + 1), repeat=n):
        c = _perm_character(rows)
        if _relations_vanish(P, c):
            out.append(c)
    return out


def characters_magic_q(n: int, Q, cap: int = DEFAULT_CAP) -> list:
    if n > cap:
        raise CapExceeded(f"n={n} exceeds cap {cap}")
    if not isinstance(Q, QMatrix):
        Q = QMatrix.of(Q)
    if not Q.is_diagonal():
        raise ValueError("Q must be diagonal for character enumeration")
    P = q_variant("X", n, Q)
    return [c for c in map(_perm_character, permutations(range(1, n + 1)))
            if _relations_vanish(P, c)]


def _induced_map_ok(P: Presentation, c: Character) -> tuple[bool, str]:
    """For M_n: e_ij -> sum chi(a^{kl}_{ij}) e_kl must be a unital *-automorphism."""
    n = P.blocks[0]
    R = range(1, n + 1)
    T = {(i, j): {(k, l): c(M(k, l, i, j)) for k in R for l in R} for i in R for j in R}

    def mul(x, y):
        out: dict = {}
        for (k, v), a in x.items():
            if not a:
                continue
            for (w, l), b in y.items():
                if v == w and b:
                    out[(k, l)] = out.get((k, l), G_ZERO) + a * b
        return {key: val for key, val in out.items() if val}

    def clean(x):
        return {key: val for key, val in x.items() if val}

    for (i, j), (r, s) in product(T, T):
        want = clean(T[(i, s)]) if j == r else {}
        if mul(T[(i, j)], T[(r, s)]) != want:
            return False, f"not multiplicative at e{i}{j}*e{r}{s}"
    for i, j in T:
        adj = clean({(l, k): v.conj() for (k, l), v in T[(i, j)].items()})
        if adj != clean(T[(j, i)]):
            return False, f"not star-preserving at e{i}{j}"
    unit: dict = {}
    for i in R:
        for key, val in T[(i, i)].items():
            unit[key] = unit.get(key, G_ZERO) + val
    if clean(unit) != {(k, k): G_ONE for k in R}:
        return False, "not unital"
    mat = np.array([[complex(T[b].get(a, 0)) for b in T] for a in T])
    if np.linalg.matrix_rank(mat) < n * n:
        return False, "not bijective"
    return True, ""


def check_character(P: Presentation, c: Character) -> StructureReport:
    t0 = time.perf_counter()
    missing = [g for g in P.generators if g not in c.values]
    if missing:
        raise MissingValue(str(missing[0]))
    bad = [r for r in P.relations if evaluate_scalar(r, c.values)]
    details = {"character": c.label, "relations": len(P.relations), "nonzero": len(bad)}
    verdict = "Fail" if bad else "Pass"
    if not bad and P.kind == "M":
        ok, why = _induced_map_ok(P, c)
        details["induces_automorphism"] = ok
        if not ok:
            verdict = "Fail"
            details["reason"] = why
    return StructureReport("models.character", verdict, bad[0] if bad else None, 0,
                           (time.perf_counter() - t0) * 1000, details)


# -- numeric representations ---------------------------------------------------

@dataclass
class NumericRep:
    dim: int
    images: dict          # GenId (unstarred, copy 0) -> (dim x dim) complex array
    tolerance: float = DEFAULT_TOL
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def image(self, g: GenId) -> np.ndarray:
        if g.starred:
            return self.image(g.star()).conj().T
        try:
            return self.images[g]
        except KeyError:
            raise MissingImage(str(g)) from None

    def evaluate(self, p: NCPoly) -> np.ndarray:
        eye = np.eye(self.dim, dtype=complex)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for w, c in p.terms.items():
            m = self._cache.get(w)
            if m is None:
                m = eye
                for k in w:
                    m = m @ self.image(lookup(k))
                if len(w) <= 4:
                    self._cache[w] = m
            out = out + complex(c) * m
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "tolerance": self.tolerance,
            "images": {str(g): [[[float(z.real), float(z.imag)] for z in row] for row in m]
                       for g, m in sorted(self.images.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "NumericRep":
        imgs = {parse_gen(k): np.array([[complex(re_, im_) for re_, im_ in row] for row in v])
                for k, v in data["images"].items()}
        return cls(int(data["dim"]), imgs, float(data.get("tolerance", DEFAULT_TOL)))


def _opnorm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def numeric_verify(P: Presentation, rep: NumericRep, identities: Iterable[NCPoly] = ()) -> dict:
    """Operator-norm residuals of every relation, plus any extra identities."""
    for g in P.generators:
        rep.image(g)
    res = [_opnorm(rep.evaluate(r)) for r in P.relations]
    extra = [_opnorm(rep.evaluate(p)) for p in identities]
    worst = max(res, default=0.0)
    return {
        "presentation": P.name,
        "dim": rep.dim,
        "max_residual": worst,
        "identity_residuals": extra,
        "tolerance": rep.tolerance,
        "ok": worst <= rep.tolerance and all(e <= rep.tolerance for e in extra),
    }


def two_projection_rep(theta: float) -> NumericRep:
    """2x2 model of the 4x4 magic unitary built from two projections at angle theta."""
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    c, s = math.cos(theta), math.sin(theta)
    p = np.diag([1.0, 0.0]).astype(complex)
    q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    one, zero = np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex)
    u = [[p, one - p, zero, zero], [one - p, p, zero, zero],
         [zero, zero, q, one - q], [zero, zero, one - q, q]]
    imgs = {X(i + 1, j + 1): u[i][j] for i in range(4) for j in range(4)}
    return NumericRep(2, imgs, 1e-12, f"two_projection(theta={theta!r})")


def commutator_norm(rep: NumericRep, g: GenId, h: GenId) -> float:
    a, b = rep.image(g), rep.image(h)
    return _opnorm(a @ b - b @ a)


def au_model_rep(n: int, w, tol: float = DEFAULT_TOL) -> NumericRep:
    """Scalar specialization a^{kl}_{ij} -> w_ki conj(w_lj) at a unitary w."""
    w = np.asarray(w, dtype=complex)
    if w.shape != (n, n):
        raise ValueError(f"w must be {n}x{n}")
    if _opnorm(w @ w.conj().T - np.eye(n)) > tol:
        raise NotUnitary("w is not unitary")
    imgs = {M(k + 1, l + 1, i + 1, j + 1): np.array([[w[k, i] * np.conj(w[l, j])]])
            for k, l, i, j in product(range(n), repeat=4)}
    return NumericRep(1, imgs, tol, "A_u scalar model")


# -- Q-twisted numerics --------------------------------------------------------

def random_positive(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return a @ a.conj().T + 0.5 * np.eye(dim)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def sqrtm_psd(Q: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    Q = np.asarray(Q, dtype=complex)
    H = (Q + Q.conj().T) / 2
    if _opnorm(Q - H) > tol * max(1.0, _opnorm(Q)):
        raise NotPositive("Q is not Hermitian")
    vals, vecs = np.linalg.eigh(H)
    if vals.min() <= 0:
        raise NotPositive("Q is not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _twisted_residual(u, Q) -> float:
    Qi = np.linalg.inv(Q)
    eye = np.eye(len(Q))
    us = u.conj().T
    return max(_opnorm(us @ Q @ u @ Qi - eye), _opnorm(Q @ u @ Qi @ us - eye))


def _unitary_residual(v) -> float:
    eye = np.eye(len(v))
    return max(_opnorm(v.conj().T @ v - eye), _opnorm(v @ v.conj().T - eye))


def pair_reindex(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P, P~ and the literal P~ on the (k,l) pair index of an n^2 x n^2 matrix.

    p^{kl}_{ij} = q^{lk}_{ij}; the inverse is read off Q^-1 with swapped
    lower indices.  The literal variant reads it off Q itself.
    """
    N = len(Q)
    n = math.isqrt(N)
    if n * n != N:
        raise ValueError("pair reindexing needs a square number of rows")
    pos = lambda a, b: (a - 1) * n + (b - 1)
    Qi = np.linalg.inv(Q)
    Pm = np.zeros_like(Q)
    Pt = np.zeros_like(Q)
    lit = np.zeros_like(Q)
    for k, l, i, j in product(range(1, n + 1), repeat=4):
        Pm[pos(k, l), pos(i, j)] = Q[pos(l, k), pos(i, j)]
        Pt[pos(k, l), pos(i, j)] = Qi[pos(k, l), pos(j, i)]
        lit[pos(k, l), pos(i, j)] = Q[pos(k, l), pos(j, i)]
    return Pm, Pt, lit


def appendix_q_checks(Q=None, u=None, *, dims: Iterable[int] = (3, 4), samples: int = 20,
                      seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    """Numeric checks of the twisted relations.

    With Q and u given: the twisted relations hold for u iff v = Q^1/2 u Q^-1/2
    is unitary.  Otherwise ``samples`` seeded random Q per dimension are drawn
    and, for each, a u satisfying the relations, a generic u that does not, and
    (for square dimensions) the pair reindexing P P~ = I.
    """
    cases = []
    if Q is not None:
        Q = np.asarray(Q, dtype=complex)
        pools = [(len(Q), [Q], [None if u is None else np.asarray(u, dtype=complex)])]
    else:
        rng = np.random.default_rng(seed)
        pools = []
        for d in dims:
            Qs = [random_positive(d, rng) for _ in range(samples)]
            pools.append((d, Qs, [None] * samples))
    rng = np.random.default_rng(seed + 1)
    for d, Qs, us in pools:
        for Qm, um in zip(Qs, us):
            S = sqrtm_psd(Qm, tol)
            Si = np.linalg.inv(S)
            case = {"dim": d}
            if um is None:
                good = Si @ random_unitary(d, rng) @ S
                bad = good + 0.1 * (rng.standard_normal((d, d)))
                pairs = [("constructed", good), ("perturbed", bad)]
            else:
                pairs = [("given", um)]
            ok = True
            for name, x in pairs:
                tw = _twisted_residual(x, Qm)
                un = _unitary_residual(S @ x @ Si)
                same = (tw <= tol) == (un <= tol)
                case[name] = {"twisted_residual": tw, "v_unitary_residual": un,
                              "equivalent": same}
                ok &= same
            if um is None:
                ok &= case["constructed"]["twisted_residual"] <= tol
            if math.isqrt(d) ** 2 == d and d > 1:
                Pm, Pt, lit = pair_reindex(Qm)
                eye = np.eye(d)
                case["p_ptilde_residual"] = _opnorm(Pm @ Pt - eye)
                case["literal_ptilde_residual"] = _opnorm(Pm @ lit - eye)
                ok &= case["p_ptilde_residual"] <= tol
            case["ok"] = bool(ok)
            cases.append(case)
    return {"cases": cases, "tolerance": tol, "ok": all(c["ok"] for c in cases),
            "max_p_ptilde_residual": max((c.get("p_ptilde_residual", 0.0) for c in cases),
                                         default=0.0)}


# -- classical points ----------------------------------------------------------

def phase_unitaries(n: int):
    """Permutation matrices times diagonal phases from the fourth roots of unity."""
    phases = {"1": GaussQ(1), "i": GaussQ(0, 1), "-1": GaussQ(-1), "-i": GaussQ(0, -1)}
    for sigma in permutations(range(n)):
        for names in product(phases, repeat=n - 1):
            names = ("1",) + names      # overall phase drops out of Ad_w
            ph = [phases[x] for x in names]
            w = [[ph[i] if sigma[i] == j else G_ZERO for j in range(n)] for i in range(n)]
            yield "".join(str(s + 1) for s in sigma) + ":" + ",".join(names), w


def ad_character(n: int, w, label: str) -> Character:
    vals = {M(k + 1, l + 1, i + 1, j + 1): w[k][i] * w[l][j].conj()
            for k, l, i, j in product(range(n), repeat=4)}
    return Character(vals, label)


def classical_point_discrepancy(space, Q1, Q2, cap: int = DEFAULT_CAP) -> dict:
    """Compare classical points of the Q1- and Q2-twisted algebras on ``space``.

    ``space`` is ('X', n) or ('M', n).  For X_n the point sets are complete; for
    M_n they are restricted to the finite family of permutation-phase unitaries.
    """
    kind, n = space
    if kind == "X":
        pts = [[c.label for c in characters_magic_q(n, Q, cap)] for Q in (Q1, Q2)]
        sampled = False
    elif kind == "M":
        if n > 3:
            raise CapExceeded(f"n={n} exceeds cap 3 for M_n sampling")
        pts = []
        for Q in (Q1, Q2):
            P = q_variant("M", n, Q)
            pts.append([lab for lab, w in phase_unitaries(n)
                        if _relations_vanish(P, ad_character(n, w, lab))])
        sampled = True
    else:
        raise ValueError(f"unsupported space {space!r}")
    return {"space": f"{kind}_{n}", "points_Q1": pts[0], "points_Q2": pts[1],
            "distinct": set(pts[0]) != set(pts[1]), "sampled": sampled}
