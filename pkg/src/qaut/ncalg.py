"""Exact noncommutative *-polynomials over the Gaussian rationals.

Generators are interned into integer keys whose natural integer order is the
generator order used everywhere else (copy tag, family, indices, star bit), so
words are plain tuples of ints and comparing words is comparing ints.

    >>> a = X(1, 1); b = X(1, 2)
    >>> p = gen(a) * gen(b) - gen(b)
    >>> p.star()
    NCPoly(X[1,2]* X[1,1]* - X[1,2]*)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Union

from gmpy2 import mpq

__all__ = [
    "GenId", "GaussQ", "NCPoly", "MissingImage",
    "X", "M", "B", "U", "gen", "const", "ZERO", "ONE", "I_UNIT",
    "intern", "lookup", "parse_gen", "star_key", "word_key", "relabel", "substitute",
]

# family tags, in generator order
FAMILIES = ("X", "M", "B", "U")
_IDX_BITS = 6
_IDX_SLOTS = 8
_MAX_INDEX = (1 << _IDX_BITS) - 1
_FAM_SHIFT = 1 + _IDX_BITS * _IDX_SLOTS
_COPY_SHIFT = _FAM_SHIFT + 4
KEY_BITS = _COPY_SHIFT + 4


class GenId(NamedTuple):
    """A generator symbol.

    ``copy`` is 0 for a plain algebra and 1, 2, 3 for the legs of a tensor
    power; it is the most significant part of the order so that letters of a
    later leg are larger than letters of an earlier one.
    """
    family: str
    indices: tuple
    starred: bool = False
    copy: int = 0

    def star(self) -> "GenId":
        return self._replace(starred=not self.starred)

    def __str__(self) -> str:
        s = f"{self.family}[{','.join(map(str, self.indices))}]"
        if self.copy:
            s += "'" * self.copy
        return s + ("*" if self.starred else "")


def X(i: int, j: int) -> GenId:
    return GenId("X", (i, j))


def M(k: int, l: int, i: int, j: int) -> GenId:
    """a^{kl}_{ij}; superscripts first."""
    return GenId("M", (k, l, i, j))


def B(k: int, l: int, r: int, s: int, x: int, y: int) -> GenId:
    """a^{kl}_{rs,xy}."""
    return GenId("B", (k, l, r, s, x, y))


def U(i: int, j: int) -> GenId:
    return GenId("U", (i, j))


_key_of: dict = {}
_gen_of: dict = {}


_GEN_RE = re.compile(r"^([XMBU])\[([0-9,]*)\]('*)(\*?)$")


def parse_gen(text: str) -> GenId:
    """Inverse of ``str(GenId)``."""
    m = _GEN_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a generator: {text!r}")
    fam, idx, primes, star = m.groups()
    indices = tuple(int(x) for x in idx.split(",")) if idx else ()
    return GenId(fam, indices, bool(star), len(primes))


def intern(g: GenId) -> int:
    k = _key_of.get(g)
    if k is not None:
        return k
    if len(g.indices) > _IDX_SLOTS:
        raise ValueError(f"too many indices on {g}")
    packed = 0
    for slot in range(_IDX_SLOTS):
        v = g.indices[slot] if slot < len(g.indices) else 0
        if not 0 <= v <= _MAX_INDEX:
            raise ValueError(f"index {v} out of range on {g}")
        packed = (packed << _IDX_BITS) | v
    k = ((g.copy << _COPY_SHIFT) | (FAMILIES.index(g.family) << _FAM_SHIFT)
         | (packed << 1) | int(g.starred))
    _key_of[g] = k
    _gen_of[k] = g
    # keep the partner registered so star_key can always be decoded
    partner = g.star()
    if partner not in _key_of:
        _key_of[partner] = k ^ 1
        _gen_of[k ^ 1] = partner
    return k


_ARITY = {"X": 2, "M": 4, "B": 6, "U": 2}


def lookup(key: int) -> GenId:
    g = _gen_of.get(key)
    if g is None:
        # decode keys built arithmetically (e.g. shifted into another tensor leg)
        fam = FAMILIES[(key >> _FAM_SHIFT) & 0xF]
        packed = (key >> 1) & ((1 << (_IDX_BITS * _IDX_SLOTS)) - 1)
        idx = [(packed >> (_IDX_BITS * (_IDX_SLOTS - 1 - s))) & _MAX_INDEX
               for s in range(_ARITY[fam])]
        g = GenId(fam, tuple(idx), bool(key & 1), key >> _COPY_SHIFT)
        _gen_of[key] = g
        _key_of[g] = key
    return g


def star_key(key: int) -> int:
    return key ^ 1


def copy_of(key: int) -> int:
    return key >> _COPY_SHIFT


def word_key(w: tuple) -> int:
    """Integer sort key of a word in degree-lexicographic order."""
    k = len(w)
    for g in w:
        k = (k << KEY_BITS) | g
    return k


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class GaussQ:
    """Exact element re + i*im of Q(i)."""
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZQ) else _q(re)
        self.im = im if type(im) is type(_ZQ) else _q(im)

    @classmethod
    def coerce(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real).limit_denominator(10**12),
                       Fraction(x.imag).limit_denominator(10**12))
        return cls(x)

    def __add__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussQ.coerce(o) - self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussQ.coerce(o)
        if not self.im and not o.im:
            return GaussQ(self.re * o.re, _ZQ)
        return GaussQ(self.re * o.re - self.im * o.im,
                      self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussQ":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("GaussQ inverse of zero")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * GaussQ.coerce(o).inverse()

    def __rtruediv__(self, o):
        return GaussQ.coerce(o) * self.inverse()

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im) if self.im else self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, GaussQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction, type(_ZQ))):
            return not self.im and self.re == o
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussQ({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self):
        return [str(self.re), str(self.im)]


_ZQ = mpq(0)
G_ZERO = GaussQ(0)
G_ONE = GaussQ(1)
G_I = GaussQ(0, 1)


class MissingImage(KeyError):
    pass


Scalar = Union[int, Fraction, GaussQ]


def _mul_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            c = ca * cb
            old = out.get(w)
            if old is None:
                out[w] = c
            else:
                c = old + c
                if c:
                    out[w] = c
                else:
                    del out[w]
    return out


def _add_into(acc: dict, terms: Mapping, scale: GaussQ | None = None) -> None:
    for w, c in terms.items():
        if scale is not None:
            c = c * scale
        old = acc.get(w)
        if old is not None:
            c = old + c
            if c:
                acc[w] = c
            else:
                del acc[w]
        elif c:
            acc[w] = c


class NCPoly:
    """Immutable element of the free *-algebra: a map word -> GaussQ.

    Words are tuples of interned generator keys; zero coefficients are never
    stored.  Iteration and printing use descending degree-lex order.
    """
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | None = None, *, _trusted: bool = False):
        if _trusted:
            self.terms = terms
        else:
            self.terms = {tuple(w): GaussQ.coerce(c) for w, c in (terms or {}).items()
                          if GaussQ.coerce(c)}
        self._hash = None

    # construction helpers
    @classmethod
    def from_gen(cls, g: GenId) -> "NCPoly":
        return cls({(intern(g),): G_ONE}, _trusted=True)

    @classmethod
    def scalar(cls, c) -> "NCPoly":
        c = GaussQ.coerce(c)
        return cls({(): c} if c else {}, _trusted=True)

    @classmethod
    def from_word(cls, w: Iterable[GenId], c=1) -> "NCPoly":
        return cls({tuple(intern(g) for g in w): GaussQ.coerce(c)})

    # ring structure
    def __add__(self, o):
        o = _poly(o)
        acc = dict(self.terms)
        _add_into(acc, o.terms)
        return NCPoly(acc, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()}, _trusted=True)

    def __sub__(self, o):
        return self + (-_poly(o))

    def __rsub__(self, o):
        return _poly(o) - self

    def __mul__(self, o):
        if isinstance(o, NCPoly):
            return NCPoly(_mul_terms(self.terms, o.terms), _trusted=True)
        c = GaussQ.coerce(o)
        if not c:
            return ZERO
        return NCPoly({w: v * c for w, v in self.terms.items()}, _trusted=True)

    def __rmul__(self, o):
        if isinstance(o, NCPoly):
            return o * self
        return self * o

    def __pow__(self, n: int):
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def star(self) -> "NCPoly":
        return NCPoly({tuple(g ^ 1 for g in reversed(w)): c.conj()
                       for w, c in self.terms.items()}, _trusted=True)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def coefficient(self, w) -> GaussQ:
        w = tuple(intern(g) if isinstance(g, GenId) else g for g in w)
        return self.terms.get(w, G_ZERO)

    def constant(self) -> GaussQ:
        return self.terms.get((), G_ZERO)

    def leading(self) -> tuple:
        return max(self.terms, key=word_key)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]), reverse=True)

    def generators(self) -> set:
        return {lookup(g) for w in self.terms for g in w}

    def __iter__(self) -> Iterator:
        return iter(self.sorted_terms())

    def __len__(self):
        return len(self.terms)

    def __eq__(self, o):
        if isinstance(o, NCPoly):
            return self.terms == o.terms
        if isinstance(o, (int, Fraction, GaussQ)):
            return self == NCPoly.scalar(o)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"NCPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            mono = " ".join(str(lookup(g)) for g in w)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c} {mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [[[str(lookup(g)) for g in w], c.to_json()] for w, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data) -> "NCPoly":
        terms: dict = {}
        for word, (re_, im_) in data:
            key = tuple(intern(parse_gen(g)) for g in word)
            terms[key] = terms.get(key, G_ZERO) + GaussQ(Fraction(re_), Fraction(im_))
        return cls({w: c for w, c in terms.items() if c}, _trusted=True)


def _poly(x) -> NCPoly:
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, GenId):
        return NCPoly.from_gen(x)
    return NCPoly.scalar(x)


ZERO = NCPoly({}, _trusted=True)
ONE = NCPoly({(): G_ONE}, _trusted=True)
I_UNIT = NCPoly({(): G_I}, _trusted=True)


def gen(g: GenId) -> NCPoly:
    return NCPoly.from_gen(g)


def const(c) -> NCPoly:
    return NCPoly.scalar(c)


def relabel(p: NCPoly, copy: int) -> NCPoly:
    """Move every letter of ``p`` into tensor leg ``copy``."""
    cache: dict = {}

    def move(k):
        r = cache.get(k)
        if r is None:
            r = cache[k] = intern(lookup(k)._replace(copy=copy))
        return r

    return NCPoly({tuple(move(k) for k in w): c for w, c in p.terms.items()}, _trusted=True)


def substitute(p: NCPoly, phi: Mapping[GenId, NCPoly] | Callable[[GenId], NCPoly]) -> NCPoly:
    """Apply the unital *-morphism determined by ``phi`` on unstarred generators.

    A starred letter maps to the star of the image of its unstarred partner,
    unless ``phi`` names the starred generator explicitly.
    """
    getter = phi if callable(phi) else None
    images: dict = {}

    def image(k: int) -> dict:
        t = images.get(k)
        if t is not None:
            return t
        g = lookup(k)
        img = None
        if getter is not None:
            img = getter(g)
            if img is None and g.starred:
                base = getter(g.star())
                img = None if base is None else _poly(base).star()
        elif g in phi:
            img = phi[g]
        elif g.starred and g.star() in phi:
            img = _poly(phi[g.star()]).star()
        if img is None:
            raise MissingImage(str(g))
        t = images[k] = _poly(img).terms
        return t

    acc: dict = {}
    prefix_cache: dict = {(): {(): G_ONE}}
    for w, c in p.terms.items():
        # share products of common prefixes between words
        cur = prefix_cache.get(w)
        if cur is None:
            cut = len(w)
            while w[:cut] not in prefix_cache:
                cut -= 1
            cur = prefix_cache[w[:cut]]
            for n in range(cut, len(w)):
                cur = _mul_terms(cur, image(w[n]))
                prefix_cache[w[:n + 1]] = cur
        _add_into(acc, cur, c)
    return NCPoly(acc, _trusted=True)


def evaluate_scalar(p: NCPoly, values: Mapping[GenId, GaussQ]) -> GaussQ:
    """Evaluate at commuting scalar values; starred letters take conjugates."""
    total = G_ZERO
    vals: dict = {}
    for w, c in p.terms.items():
        term = c
        for k in w:
            v = vals.get(k)
            if v is None:
                g = lookup(k)
                if g in values:
                    v = GaussQ.coerce(values[g])
                elif g.starred and g.star() in values:
                    v = GaussQ.coerce(values[g.star()]).conj()
                else:
                    raise MissingImage(str(g))
                vals[k] = v
            term = term * v
            if not term:
                break
        total = total + term
    return total
