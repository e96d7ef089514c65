"""Generators-and-relations presentations of the quantum automorphism groups.

Every presentation carries its fundamental matrix ``u`` (rows and columns
indexed by the matrix-unit basis ``(k, l, block)`` of the space it acts on),
its relation list grouped into named families, and the images of the
generators under coproduct, counit and antipode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Sequence

from .ncalg import (B, GaussQ, GenId, M, NCPoly, ONE, U, X, ZERO, G_ONE, G_ZERO,
                    const, gen, relabel, substitute)

__all__ = [
    "Presentation", "FiniteSpace", "QMatrix", "DimensionMismatch", "NotPositive",
    "magic_presentation", "aut_Mn_presentation", "aut_B_presentation",
    "q_variant", "appendix_presentations", "finite_space", "poly_matmul",
    "rename_generators",
]


class DimensionMismatch(ValueError):
    pass


class NotPositive(ValueError):
    pass


def _rng(n: int) -> range:
    return range(1, n + 1)


def _delta(*pairs) -> int:
    return int(all(a == b for a, b in pairs))


# -- exact matrices ------------------------------------------------------------

@dataclass(frozen=True)
class QMatrix:
    """Square matrix of exact Gaussian rationals."""
    entries: tuple

    @classmethod
    def of(cls, rows) -> "QMatrix":
        return cls(tuple(tuple(GaussQ.coerce(x) for x in row) for row in rows))

    @classmethod
    def diag(cls, values) -> "QMatrix":
        vals = list(values)
        n = len(vals)
        return cls.of([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.diag([1] * n)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_identity(self) -> bool:
        return all(self.entries[i][j] == _delta((i, j)) for i in range(self.dim)
                   for j in range(self.dim))

    def is_diagonal(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.dim)
                   for j in range(self.dim) if i != j)

    def inverse(self) -> "QMatrix":
        n = self.dim
        a = [list(row) + [GaussQ(_delta((i, j))) for j in range(n)]
             for i, row in enumerate(self.entries)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise NotPositive("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = a[col][col].inverse()
            a[col] = [x * inv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return QMatrix(tuple(tuple(row[n:]) for row in a))

    def is_positive(self) -> bool:
        """Exact test: Hermitian with all LDL* pivots strictly positive."""
        n = self.dim
        if any(self.entries[i][j] != self.entries[j][i].conj()
               for i in range(n) for j in range(n)):
            return False
        a = [list(row) for row in self.entries]
        for k in range(n):
            p = a[k][k]
            if p.im or p.re <= 0:
                return False
            inv = p.inverse()
            for i in range(k + 1, n):
                f = a[i][k] * inv
                for j in range(k + 1, n):
                    a[i][j] = a[i][j] - f * a[k][j]
        return True

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.entries]


def poly_matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    """Product of matrices whose entries are NCPoly or scalars (noncommutative)."""
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = ZERO
            for k in range(m):
                x, y = a[i][k], b[k][j]
                if _is_zero(x) or _is_zero(y):
                    continue
                acc = acc + _as_poly(x) * _as_poly(y)
            row.append(acc)
        out.append(row)
    return out


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, NCPoly) else not GaussQ.coerce(x)


def _as_poly(x) -> NCPoly:
    return x if isinstance(x, NCPoly) else const(x)


# -- finite space -------------------------------------------------------------

@dataclass(frozen=True)
class FiniteSpace:
    """B = M_{n_1} + ... + M_{n_m} with matrix units e_{kl,i}."""
    blocks: tuple

    def __post_init__(self):
        if not self.blocks or any(int(n) < 1 for n in self.blocks):
            raise ValueError("blocks must be a nonempty list of positive integers")

    @cached_property
    def basis(self) -> tuple:
        return tuple((k, l, i) for i, n in enumerate(self.blocks, 1)
                     for k in _rng(n) for l in _rng(n))

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    def mul(self, e: tuple, f: tuple):
        """Product of two matrix units: another unit or None (zero)."""
        (k, l, i), (r, s, j) = e, f
        if i == j and l == r:
            return (k, s, i)
        return None

    def star(self, e: tuple) -> tuple:
        k, l, i = e
        return (l, k, i)

    def unit(self) -> dict:
        return {(p, p, q): G_ONE for q, n in enumerate(self.blocks, 1) for p in _rng(n)}

    def psi(self, e: tuple) -> int:
        k, l, _ = e
        return int(k == l)

    def psi_weights(self) -> dict:
        return {e: GaussQ(self.psi(e)) for e in self.basis}

    def dense(self, e: tuple):
        """Block-diagonal matrix of a unit, as nested lists of ints."""
        k, l, i = e
        off = sum(self.blocks[:i - 1])
        N = sum(self.blocks)
        m = [[0] * N for _ in range(N)]
        m[off + k - 1][off + l - 1] = 1
        return m


def finite_space(blocks) -> FiniteSpace:
    return FiniteSpace(tuple(int(n) for n in blocks))


# -- presentations ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Presentation:
    name: str
    kind: str                  # X | M | B | U
    variant: str               # aut | q_aut | a_o_new | a_o_old | a_u
    index: tuple               # row/column labels of u
    entry: Callable = field(repr=False)  # (row, col) -> GenId
    relations: tuple = ()
    families: tuple = ()       # family label per relation
    antipode_rule: Callable | None = field(default=None, repr=False)
    blocks: tuple | None = None
    Q: QMatrix | None = None

    @cached_property
    def generators(self) -> tuple:
        return tuple(self.entry(a, b) for a in self.index for b in self.index)

    @cached_property
    def u(self) -> list:
        return [[gen(self.entry(a, b)) for b in self.index] for a in self.index]

    def family(self, label: str) -> list:
        return [r for r, f in zip(self.relations, self.families) if f == label]

    def family_counts(self) -> dict:
        out: dict = {}
        for f in self.families:
            out[f] = out.get(f, 0) + 1
        return out

    @cached_property
    def coproduct(self) -> dict:
        out = {}
        for a in self.index:
            for b in self.index:
                acc = ZERO
                for c in self.index:
                    acc = acc + relabel(gen(self.entry(a, c)), 1) * relabel(gen(self.entry(c, b)), 2)
                out[self.entry(a, b)] = acc
        return out

    @cached_property
    def counit(self) -> dict:
        return {self.entry(a, b): GaussQ(int(a == b)) for a in self.index for b in self.index}

    @cached_property
    def antipode(self) -> dict:
        if self.antipode_rule is None:
            return {}
        return {self.entry(a, b): self.antipode_rule(a, b) for a in self.index for b in self.index}

    def reduced_relations(self, drop: Sequence[str] = ()) -> list:
        """Relations without the families the structure theory makes redundant."""
        drop = set(drop) or _REDUNDANT.get(self.variant, set())
        return [r for r, f in zip(self.relations, self.families) if f not in drop]

    def bound_check(self) -> bool:
        gens = set(self.generators)
        for r in self.relations:
            for g in r.generators():
                base = g.star() if g.starred else g
                if base._replace(copy=0) not in gens:
                    return False
        return True


_REDUNDANT = {"aut": {"column_sum", "antimultiplicative", "trace"}}


def _make(name, kind, variant, index, entry, fams, antipode=None, blocks=None, Q=None):
    rels, labels = [], []
    for label, polys in fams:
        for p in polys:
            rels.append(p)
            labels.append(label)
    return Presentation(name, kind, variant, tuple(index), entry, tuple(rels), tuple(labels),
                        antipode, blocks, Q)


def _x_entry(a, b):
    return X(a[2], b[2])


def _m_entry(a, b):
    return M(a[0], a[1], b[0], b[1])


def _b_entry(a, b):
    return B(a[0], a[1], b[0], b[1], a[2], b[2])


def _u_entry(a, b):
    return U(a[0], b[0])


def _x_index(n):
    return [(1, 1, i) for i in _rng(n)]


def _magic_families(n):
    a = lambda i, j: gen(X(i, j))
    idem = [a(i, j) * a(i, j) - a(i, j) for i in _rng(n) for j in _rng(n)]
    adj = [a(i, j).star() - a(i, j) for i in _rng(n) for j in _rng(n)]
    rows = [sum((a(i, j) for j in _rng(n)), ZERO) - ONE for i in _rng(n)]
    cols = [sum((a(i, j) for i in _rng(n)), ZERO) - ONE for j in _rng(n)]
    return idem, adj, rows, cols


def magic_presentation(n: int) -> Presentation:
    if n < 1:
        raise ValueError("n must be positive")
    idem, adj, rows, cols = _magic_families(n)
    return _make(f"A_aut(X_{n})", "X", "aut", _x_index(n), _x_entry,
                 [("idempotent", idem), ("self_adjoint", adj), ("row_sum", rows),
                  ("column_sum", cols)],
                 antipode=lambda a, b: gen(X(b[2], a[2])), blocks=(1,) * n)


def _m_families(n):
    a = lambda k, l, i, j: gen(M(k, l, i, j))
    R = list(_rng(n))
    mult, anti = [], []
    for i, j, k, l, r, s in product(R, repeat=6):
        lhs = sum((a(k, v, i, j) * a(v, l, r, s) for v in R), ZERO)
        mult.append(lhs - (a(k, l, i, s) if j == r else ZERO))
        lhs = sum((a(s, r, l, v) * a(j, i, v, k) for v in R), ZERO)
        anti.append(lhs - (a(s, i, l, k) if j == r else ZERO))
    adj = [a(k, l, i, j).star() - a(l, k, j, i) for i, j, k, l in product(R, repeat=4)]
    unit = [sum((a(k, l, r, r) for r in R), ZERO) - const(_delta((k, l)))
            for k, l in product(R, repeat=2)]
    trace = [sum((a(r, r, k, l) for r in R), ZERO) - const(_delta((k, l)))
             for k, l in product(R, repeat=2)]
    return mult, anti, adj, unit, trace


def _m_index(n):
    return [(k, l, 1) for k in _rng(n) for l in _rng(n)]


def aut_Mn_presentation(n: int) -> Presentation:
    if n < 1:
        raise ValueError("n must be positive")
    mult, anti, adj, unit, trace = _m_families(n)
    return _make(f"A_aut(M_{n})", "M", "aut", _m_index(n), _m_entry,
                 [("multiplicative", mult), ("antimultiplicative", anti), ("adjoint", adj),
                  ("unit", unit), ("trace", trace)],
                 antipode=lambda a, b: gen(M(b[1], b[0], a[1], a[0])), blocks=(n,))


def _b_families(blocks):
    nb = dict(enumerate(blocks, 1))
    m = len(blocks)
    a = lambda k, l, r, s, x, y: gen(B(k, l, r, s, x, y))
    Xs = list(_rng(m))
    mult, anti, adj, unit, trace = [], [], [], [], []
    for x, y, z in product(Xs, repeat=3):
        for i, j, k, l, r, s in product(_rng(nb[y]), _rng(nb[y]), _rng(nb[x]), _rng(nb[x]),
                                        _rng(nb[z]), _rng(nb[z])):
            lhs = sum((a(k, v, i, j, x, y) * a(v, l, r, s, x, z) for v in _rng(nb[x])), ZERO)
            rhs = a(k, l, i, s, x, y) if (j == r and y == z) else ZERO
            mult.append(lhs - rhs)
    for x, y, z in product(Xs, repeat=3):
        for i, j, k, l, r, s in product(_rng(nb[z]), _rng(nb[z]), _rng(nb[x]), _rng(nb[x]),
                                        _rng(nb[y]), _rng(nb[y])):
            lhs = sum((a(s, r, l, v, y, x) * a(j, i, v, k, z, x) for v in _rng(nb[x])), ZERO)
            rhs = a(s, i, l, k, y, x) if (j == r and y == z) else ZERO
            anti.append(lhs - rhs)
    for y, z in product(Xs, repeat=2):
        for i, j, k, l in product(_rng(nb[z]), _rng(nb[z]), _rng(nb[y]), _rng(nb[y])):
            adj.append(a(k, l, i, j, y, z).star() - a(l, k, j, i, y, z))
    for y in Xs:
        for k, l in product(_rng(nb[y]), repeat=2):
            s_ = sum((a(k, l, r, r, y, z) for z in Xs for r in _rng(nb[z])), ZERO)
            unit.append(s_ - const(_delta((k, l))))
    for z in Xs:
        for k, l in product(_rng(nb[z]), repeat=2):
            s_ = sum((a(r, r, k, l, y, z) for y in Xs for r in _rng(nb[y])), ZERO)
            trace.append(s_ - const(_delta((k, l))))
    return mult, anti, adj, unit, trace


def aut_B_presentation(blocks) -> Presentation:
    blocks = tuple(int(n) for n in blocks)
    if not blocks or min(blocks) < 1:
        raise ValueError("blocks must be a nonempty list of positive integers")
    mult, anti, adj, unit, trace = _b_families(blocks)
    space = finite_space(blocks)
    return _make(f"A_aut(B{blocks})", "B", "aut", space.basis, _b_entry,
                 [("multiplicative", mult), ("antimultiplicative", anti), ("adjoint", adj),
                  ("unit", unit), ("trace", trace)],
                 antipode=lambda a, b: gen(B(b[1], b[0], a[1], a[0], b[2], a[2])),
                 blocks=blocks)


def _check_q(Q: QMatrix, dim: int) -> QMatrix:
    if not isinstance(Q, QMatrix):
        Q = QMatrix.of(Q)
    if Q.dim != dim:
        raise DimensionMismatch(f"Q has dimension {Q.dim}, expected {dim}")
    if not Q.is_positive():
        raise NotPositive("Q must be positive definite")
    return Q


def _entries_minus_identity(mat) -> list:
    n = len(mat)
    return [mat[i][j] - const(_delta((i, j))) for i in range(n) for j in range(n)]


def _q_pair(u, ut, Q: QMatrix):
    """Entries of ut Q u Q^-1 - I and Q u Q^-1 ut - I."""
    Qm = [list(r) for r in Q.entries]
    Qi = [list(r) for r in Q.inverse().entries]
    left = poly_matmul(poly_matmul(poly_matmul(ut, Qm), u), Qi)
    right = poly_matmul(poly_matmul(poly_matmul(Qm, u), Qi), ut)
    return _entries_minus_identity(left), _entries_minus_identity(right)


def _transpose(u):
    return [list(col) for col in zip(*u)]


def _adjoint(u):
    return [[x.star() for x in col] for col in zip(*u)]


def _twisted_antipode(P: Presentation, Q: QMatrix, use_star: bool):
    """kappa(u) = Q^-1 u^t Q (or Q^-1 u* Q), entrywise."""
    Qm = [list(r) for r in Q.entries]
    Qi = [list(r) for r in Q.inverse().entries]
    ut = _adjoint(P.u) if use_star else _transpose(P.u)
    k = poly_matmul(poly_matmul(Qi, ut), Qm)
    pos = {a: i for i, a in enumerate(P.index)}
    return lambda a, b: k[pos[a]][pos[b]]


def q_variant(base: str, params, Q) -> Presentation:
    """Q-twisted presentations for base in {'X', 'M', 'B'}.

    ``params`` is n for X and M, the block tuple for B.
    """
    if base == "X":
        n = int(params)
        Q = _check_q(Q, n)
        idem, adj, rows, _ = _magic_families(n)
        index = _x_index(n)
        u = [[gen(_x_entry(a, b)) for b in index] for a in index]
        left, right = _q_pair(u, _transpose(u), Q)
        P = _make(f"A^Q_aut(X_{n})", "X", "q_aut", index, _x_entry,
                  [("idempotent", idem), ("self_adjoint", adj), ("row_sum", rows),
                   ("twisted_left", left), ("twisted_right", right)],
                  blocks=(1,) * n, Q=Q)
        return _with_antipode(P, _twisted_antipode(P, Q, use_star=False))
    if base == "M":
        n = int(params)
        Q = _check_q(Q, n * n)
        mult, _, adj, unit, _ = _m_families(n)
        index = _m_index(n)
        u = [[gen(_m_entry(a, b)) for b in index] for a in index]
        left, right = _q_pair(u, _adjoint(u), Q)
        P = _make(f"A^Q_aut(M_{n})", "M", "q_aut", index, _m_entry,
                  [("multiplicative", mult), ("adjoint", adj), ("unit", unit),
                   ("twisted_left", left), ("twisted_right", right)], blocks=(n,), Q=Q)
        return _with_antipode(P, _twisted_antipode(P, Q, use_star=True))
    if base == "B":
        blocks = tuple(int(n) for n in params)
        space = finite_space(blocks)
        Q = _check_q(Q, space.dim)
        mult, _, adj, unit, _ = _b_families(blocks)
        index = space.basis
        u = [[gen(_b_entry(a, b)) for b in index] for a in index]
        left, right = _q_pair(u, _adjoint(u), Q)
        P = _make(f"A^Q_aut(B{blocks})", "B", "q_aut", index, _b_entry,
                  [("multiplicative", mult), ("adjoint", adj), ("unit", unit),
                   ("twisted_left", left), ("twisted_right", right)], blocks=blocks, Q=Q)
        return _with_antipode(P, _twisted_antipode(P, Q, use_star=True))
    raise ValueError(f"unknown base space {base!r}")


def _with_antipode(P: Presentation, rule) -> Presentation:
    return Presentation(P.name, P.kind, P.variant, P.index, P.entry, P.relations, P.families,
                        rule, P.blocks, P.Q)


def appendix_presentations(kind: str, Q=None, n: int | None = None) -> Presentation:
    """kind in {'a_o_new', 'a_o_old', 'a_u'}; Q for the first two, n for a_u."""
    if kind in ("a_o_new", "a_o_old"):
        if Q is None:
            raise ValueError("A_o presentations need Q")
        if not isinstance(Q, QMatrix):
            Q = QMatrix.of(Q)
        if not Q.is_positive():
            raise NotPositive("Q must be positive definite")
        m = Q.dim
        index = [(i,) for i in _rng(m)]
        u = [[gen(U(i, j)) for j in _rng(m)] for i in _rng(m)]
        real = [u[i][j].star() - u[i][j] for i in range(m) for j in range(m)]
        left, right = _q_pair(u, _transpose(u), Q)
        fams = [("real", real), ("twisted_left", left), ("twisted_right", right)]
        if kind == "a_o_old":
            ut = _transpose(u)
            fams += [("orthogonal_left", _entries_minus_identity(poly_matmul(u, ut))),
                     ("orthogonal_right", _entries_minus_identity(poly_matmul(ut, u)))]
            name = f"A_o^old(Q)_{m}"
        else:
            name = f"A_o(Q)_{m}"
        P = _make(name, "U", kind, index, _u_entry, fams, Q=Q)
        if kind == "a_o_old":
            return _with_antipode(P, lambda a, b: gen(U(b[0], a[0])))
        return _with_antipode(P, _twisted_antipode(P, Q, use_star=False))
    if kind == "a_u":
        if n is None or n < 1:
            raise ValueError("A_u needs n >= 1")
        index = [(i,) for i in _rng(n)]
        u = [[gen(U(i, j)) for j in _rng(n)] for i in _rng(n)]
        ustar = _adjoint(u)
        ubar = [[x.star() for x in row] for row in u]
        ubar_star = _transpose(u)
        fams = [("unitary_left", _entries_minus_identity(poly_matmul(u, ustar))),
                ("unitary_right", _entries_minus_identity(poly_matmul(ustar, u))),
                ("conjugate_unitary_left", _entries_minus_identity(poly_matmul(ubar, ubar_star))),
                ("conjugate_unitary_right", _entries_minus_identity(poly_matmul(ubar_star, ubar)))]
        return _make(f"A_u({n})", "U", "a_u", index, _u_entry, fams,
                     antipode=lambda a, b: gen(U(b[0], a[0])).star())
    raise ValueError(f"unknown appendix kind {kind!r}")


def rename_generators(polys, mapping: Callable[[GenId], GenId | None]) -> list:
    """Rename generators (and their stars) through ``mapping``."""
    def phi(g):
        if g.starred:
            return None
        h = mapping(g)
        return None if h is None else gen(h)
    return [substitute(p, phi) for p in polys]
