"""Exact rational functions over the integers in a fixed set of indeterminates.

A monomial is packed into one Python int, ``BITS`` bits per indeterminate, so
multiplying monomials is integer addition.  The top bit of every field is kept
clear and used as a guard when testing divisibility.

A :class:`Scalar` is ``num / den`` with ``num`` a :class:`Poly` and the
denominator stored factored as ``dc * x^dm * prod(f^e)``.  No multivariate gcd
is ever taken; only integer content and monomial factors are cancelled.
Equality is decided by cross-multiplication, i.e. by expanding a numerator.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Mapping, Union

BITS = 24
FIELD = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1

BASE_NAMES = ("s", "u", "v", "lambda", "mu", "alpha", "eta")
MAX_INDEX = 16
NAMES = (
    BASE_NAMES
    + tuple(f"c_{i}" for i in range(1, MAX_INDEX + 1))
    + tuple(f"d_{i}" for i in range(1, MAX_INDEX + 1))
)
INDEX = {name: i for i, name in enumerate(NAMES)}
ALIASES = {"λ": "lambda", "μ": "mu", "α": "alpha", "η": "eta", "lam": "lambda"}

GUARD = sum(1 << (BITS * i + BITS - 1) for i in range(len(NAMES)))

DEFAULT_MAX_TERMS = 2_000_000
_max_terms = int(os.environ.get("REFLECTK_MAX_TERMS", DEFAULT_MAX_TERMS))


class ExpressionTooLarge(RuntimeError):
    """A polynomial exceeded the configured term-count ceiling."""


class PoleError(ZeroDivisionError):
    """A denominator vanished (identically, or at a sample point)."""


def set_max_terms(n: int) -> None:
    global _max_terms
    _max_terms = int(n)


def get_max_terms() -> int:
    return _max_terms


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in INDEX:
        raise KeyError(f"unknown indeterminate {name!r}")
    return name


# ---------------------------------------------------------------------------
# monomials


def monomial(exps: Mapping[str, int]) -> int:
    """Pack ``{'u': 2, 's': 1}`` into a monomial key."""
    m = 0
    for name, e in exps.items():
        if e < 0 or e > MAX_EXP:
            raise ValueError(f"exponent out of range: {name}^{e}")
        if e:
            m += e << (BITS * INDEX[canonical_name(name)])
    return m


def unpack(m: int) -> list:
    out = []
    while m:
        out.append(m & FIELD)
        m >>= BITS
    return out


def exponents(m: int) -> Dict[str, int]:
    return {NAMES[i]: e for i, e in enumerate(unpack(m)) if e}


def mono_divides(a: int, b: int) -> bool:
    """True iff monomial ``a`` divides monomial ``b``."""
    return ((b | GUARD) - a) & GUARD == GUARD


def mono_gcd(a: int, b: int) -> int:
    if not a or not b:
        return 0
    m, shift = 0, 0
    while a and b:
        m |= min(a & FIELD, b & FIELD) << shift
        a >>= BITS
        b >>= BITS
        shift += BITS
    return m


def mono_lcm(a: int, b: int) -> int:
    m, shift = 0, 0
    while a or b:
        m |= max(a & FIELD, b & FIELD) << shift
        a >>= BITS
        b >>= BITS
        shift += BITS
    return m


def mono_degree(m: int) -> int:
    return sum(unpack(m))


def mono_exp(m: int, idx: int) -> int:
    return (m >> (BITS * idx)) & FIELD


def _order_key(m: int):
    exps = unpack(m)
    exps += [0] * (len(NAMES) - len(exps))
    return (sum(exps), exps)


def mono_str(m: int) -> str:
    parts = []
    for i, e in enumerate(unpack(m)):
        if e == 1:
            parts.append(NAMES[i])
        elif e:
            parts.append(f"{NAMES[i]}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# polynomials


def _checked(terms: dict) -> dict:
    if len(terms) > _max_terms:
        raise ExpressionTooLarge(
            f"polynomial with {len(terms)} terms exceeds the ceiling of {_max_terms} "
            "(set REFLECTK_MAX_TERMS to raise it)"
        )
    return terms


class Poly:
    """Sparse polynomial with integer coefficients, ``{monomial: coeff}``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({0: c}) if c else cls()

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        return cls({monomial({name: power}): 1})

    @classmethod
    def mono(cls, m: int, c: int = 1) -> "Poly":
        return cls({m: c}) if c else cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def const_value(self) -> int:
        return self.terms.get(0, 0) if self.is_const() else None

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: "Poly") -> "Poly":
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(_checked(out))

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) - c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(_checked(out))

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly()
        if len(self.terms) < len(other.terms):
            self, other = other, self
        if len(other.terms) == 1:
            (m2, c2), = other.terms.items()
            return Poly({m + m2: c * c2 for m, c in self.terms.items()})
        out: dict = {}
        get = out.get
        for m2, c2 in other.terms.items():
            for m, c in self.terms.items():
                k = m + m2
                out[k] = get(k, 0) + c * c2
        out = {m: c for m, c in out.items() if c}
        return Poly(_checked(out))

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, k: int) -> "Poly":
        if k == 1:
            return self
        if not k:
            return Poly()
        return Poly({m: c * k for m, c in self.terms.items()})

    def shift(self, m0: int, k: int = 1) -> "Poly":
        """Multiply by ``k * x^m0``."""
        return Poly({m + m0: c * k for m, c in self.terms.items()})

    def unshift(self, m0: int, k: int = 1) -> "Poly":
        """Exact division by ``k * x^m0`` (caller guarantees divisibility)."""
        return Poly({m - m0: c // k for m, c in self.terms.items()})

    def leading(self) -> int:
        """Leading monomial in the graded lexicographic order over ``NAMES``."""
        return max(self.terms, key=_order_key)

    def content(self) -> int:
        """Integer content, signed so the leading coefficient becomes positive."""
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
            if g == 1:
                break
        if self.terms and self.terms[self.leading()] < 0:
            g = -g
        return g

    def mono_gcd(self) -> int:
        it = iter(self.terms)
        g = next(it, 0)
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    def degree_in(self, idx: int) -> int:
        shift = BITS * idx
        return max(((m >> shift) & FIELD for m in self.terms), default=0)

    def indices(self) -> set:
        acc = 0
        for m in self.terms:
            acc |= m
        out, i = set(), 0
        while acc:
            if acc & FIELD:
                out.add(i)
            acc >>= BITS
            i += 1
        return out

    def evaluate(self, values: Mapping[int, Fraction]) -> Fraction:
        """Evaluate with every occurring indeterminate bound (by index)."""
        cache: dict = {}
        total = Fraction(0)
        for m, c in self.terms.items():
            t = Fraction(c)
            i = 0
            while m:
                e = m & FIELD
                if e:
                    key = (i, e)
                    p = cache.get(key)
                    if p is None:
                        p = cache[key] = values[i] ** e
                    t *= p
                m >>= BITS
                i += 1
            total += t
        return total

    def split_var(self, idx: int) -> Dict[int, "Poly"]:
        """Coefficients with respect to one indeterminate: ``{k: A_k}``."""
        shift = BITS * idx
        out: dict = {}
        for m, c in self.terms.items():
            k = (m >> shift) & FIELD
            out.setdefault(k, {})[m - (k << shift)] = c
        return {k: Poly(t) for k, t in out.items()}

    def divide_linear(self, idx: int, p: int, q: int) -> "Poly | None":
        """Exact quotient by ``q*x - p`` with ``x`` the indeterminate ``idx``, or None."""
        coeffs = self.split_var(idx)
        if not coeffs:
            return Poly()
        n = max(coeffs)
        if n == 0:
            return None
        zero = Poly()
        b: dict = {}
        carry = zero
        for k in range(n, 0, -1):
            a = coeffs.get(k, zero) + carry.scale(p)
            if any(c % q for c in a.terms.values()):
                return None
            bk = Poly({m: c // q for m, c in a.terms.items()})
            b[k - 1] = bk
            carry = bk
        if coeffs.get(0, zero) + carry.scale(p):
            return None
        shift = BITS * idx
        out: dict = {}
        for k, poly in b.items():
            for m, c in poly.terms.items():
                out[m + (k << shift)] = c
        return Poly(out)

    def divexact(self, d: "Poly") -> "Poly":
        """Exact multivariate division; raises ArithmeticError if not exact."""
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lm = max(d.terms)
        lc = d.terms[lm]
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            m = max(rem)
            c = rem[m]
            if not mono_divides(lm, m) or c % lc:
                raise ArithmeticError("polynomial division is not exact")
            t, k = m - lm, c // lc
            quot[t] = k
            for dm_, dc_ in d.terms.items():
                key = dm_ + t
                v = rem.get(key, 0) - k * dc_
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        return Poly(quot)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _order_key(mc[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            body = mono_str(m)
            mag = abs(c)
            if not body:
                piece = str(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{mag}*{body}"
            if not out:
                out.append(piece if c > 0 else "-" + piece)
            else:
                out.append((" + " if c > 0 else " - ") + piece)
        return "".join(out)

    def __repr__(self) -> str:
        return f"Poly({self})"


@lru_cache(maxsize=8192)
def _factor_power(f: Poly, e: int) -> Poly:
    return f ** e


# ---------------------------------------------------------------------------
# rational functions


Number = Union[int, Fraction]


def _split_poly(p: Poly):
    """Return ``(content, monomial, primitive)`` with ``p = content * x^monomial * primitive``."""
    c = p.content()
    m = p.mono_gcd()
    prim = p
    if m or c != 1:
        prim = Poly({k - m: v // c for k, v in p.terms.items()})
    return c, m, prim


class Scalar:
    """An element of the field of rational functions; immutable."""

    __slots__ = ("num", "dc", "dm", "df")

    def __init__(self, num: Poly, dc: int = 1, dm: int = 0, df: dict | None = None):
        self.num = num
        self.dc = dc
        self.dm = dm
        self.df = df if df is not None else {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def _make(num: Poly, dc: int, dm: int, df: dict) -> "Scalar":
        if not num.terms:
            return ZERO
        if dc != 1:
            g = gcd(dc, num.content())
            if g != 1:
                num = Poly({m: c // g for m, c in num.terms.items()})
                dc //= g
        if dm:
            g = mono_gcd(num.mono_gcd(), dm)
            if g:
                num = Poly({m - g: c for m, c in num.terms.items()})
                dm -= g
        if df and len(num.terms) > 1:
            num, df = _cancel_factors(num, df)
        return Scalar(num, dc, dm, df)

    @classmethod
    def of(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, int):
            return cls(Poly.const(x))
        if isinstance(x, Fraction):
            return cls(Poly.const(x.numerator), x.denominator)
        if isinstance(x, Poly):
            return cls(x)
        if isinstance(x, str):
            from reflectk.expr import parse

            return parse(x)
        raise TypeError(f"cannot make a Scalar from {type(x).__name__}")

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls(Poly.var(canonical_name(name)))

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self) -> bool:
        return bool(self.num.terms)

    def is_const(self) -> bool:
        return self.num.is_const() and not self.dm and not self.df

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.num.const_value(), self.dc)

    def has_trivial_den(self) -> bool:
        return self.dc == 1 and not self.dm and not self.df

    def names(self) -> set:
        idx = self.num.indices()
        acc = self.dm
        i = 0
        while acc:
            if acc & FIELD:
                idx.add(i)
            acc >>= BITS
            i += 1
        for f in self.df:
            idx |= f.indices()
        return {NAMES[i] for i in idx}

    @property
    def den(self) -> Poly:
        """The expanded denominator polynomial."""
        d = Poly.mono(self.dm, self.dc)
        for f, e in self.df.items():
            d = d * _factor_power(f, e)
        return d

    def _same_den(self, other: "Scalar") -> bool:
        return self.dc == other.dc and self.dm == other.dm and self.df == other.df

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "Scalar":
        if not self.num.terms:
            return self
        return Scalar(-self.num, self.dc, self.dm, self.df)

    def _combine(self, other: "Scalar", sign: int) -> "Scalar":
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other if sign > 0 else -other
        if self._same_den(other):
            num = self.num + other.num if sign > 0 else self.num - other.num
            return Scalar._make(num, self.dc, self.dm, self.df)
        g = gcd(self.dc, other.dc)
        lc = self.dc // g * other.dc
        lm = mono_lcm(self.dm, other.dm)
        df = dict(self.df)
        for f, e in other.df.items():
            if df.get(f, 0) < e:
                df[f] = e
        a = self.num.shift(lm - self.dm, lc // self.dc)
        for f, e in df.items():
            k = e - self.df.get(f, 0)
            if k:
                a = a * _factor_power(f, k)
        b = other.num.shift(lm - other.dm, lc // other.dc)
        for f, e in df.items():
            k = e - other.df.get(f, 0)
            if k:
                b = b * _factor_power(f, k)
        return Scalar._make(a + b if sign > 0 else a - b, lc, lm, df)

    def __add__(self, other) -> "Scalar":
        return self._combine(_coerce(other), 1)

    def __radd__(self, other) -> "Scalar":
        return _coerce(other)._combine(self, 1)

    def __sub__(self, other) -> "Scalar":
        return self._combine(_coerce(other), -1)

    def __rsub__(self, other) -> "Scalar":
        return _coerce(other)._combine(self, -1)

    def __mul__(self, other) -> "Scalar":
        other = _coerce(other)
        if not self.num.terms or not other.num.terms:
            return ZERO
        if other.is_const() and other.dc == 1:
            k = other.num.terms[0]
            return Scalar._make(self.num.scale(k), self.dc, self.dm, self.df)
        df = dict(self.df)
        for f, e in other.df.items():
            df[f] = df.get(f, 0) + e
        return Scalar._make(self.num * other.num, self.dc * other.dc, self.dm + other.dm, df)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if not self.num.terms:
            raise ZeroDivisionError("inverse of the zero Scalar")
        c, m, prim = _split_poly(self.num)
        num = self.den
        if c < 0:
            num, c = -num, -c
        df = {} if prim.is_const() else {prim: 1}
        return Scalar._make(num, c, m, df)

    def __truediv__(self, other) -> "Scalar":
        return self * _coerce(other).inv()

    def __rtruediv__(self, other) -> "Scalar":
        return _coerce(other) * self.inv()

    def __pow__(self, e: int) -> "Scalar":
        if e < 0:
            return self.inv() ** (-e)
        if e == 0:
            return ONE
        return Scalar(
            self.num ** e,
            self.dc ** e,
            self.dm * e,
            {f: k * e for f, k in self.df.items()},
        )

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- substitution and evaluation ----------------------------------------

    def subst(self, bindings: Mapping[str, object]) -> "Scalar":
        """Simultaneous substitution of indeterminates by Scalars.

        Raises PoleError when the denominator becomes identically zero and the
        singularity cannot be removed by cancelling a linear factor.
        """
        vals = {INDEX[canonical_name(k)]: _coerce(v) for k, v in bindings.items()}
        used = self.num.indices()
        for f in self.df:
            used |= f.indices()
        used |= set(i for i, e in enumerate(unpack(self.dm)) if e)
        vals = {i: v for i, v in vals.items() if i in used}
        if not vals:
            return self
        try:
            return self._subst(vals)
        except PoleError:
            if all(v.is_const() for v in vals.values()):
                return self._subst_const_cancelling(vals)
            raise

    def _subst(self, vals: Dict[int, "Scalar"]) -> "Scalar":
        out = _subst_poly(self.num, vals)
        dens = []
        if self.dm:
            dens.append((_subst_poly(Poly.mono(self.dm), vals), 1))
        for f, e in self.df.items():
            dens.append((_subst_poly(f, vals), e))
        for d, e in dens:
            if not d.num.terms:
                raise PoleError("denominator vanishes identically under substitution")
        if not out.num.terms:
            return ZERO
        for d, e in dens:
            out = out * d.inv() ** e
        if self.dc != 1:
            out = out * Scalar(Poly.const(1), self.dc)
        return out

    def _subst_const_cancelling(self, vals: Dict[int, "Scalar"]) -> "Scalar":
        cur = self
        for idx, v in sorted(vals.items()):
            value = v.const_value()
            p, q = value.numerator, value.denominator
            num = cur.num
            df: dict = {}
            dm = cur.dm
            mult = 0
            if p == 0:
                k = mono_exp(dm, idx)
                dm -= k << (BITS * idx)
                mult += k
            for f, e in cur.df.items():
                k = 0
                g = f
                while True:
                    h = g.divide_linear(idx, p, q)
                    if h is None:
                        break
                    g, k = h, k + 1
                if not g.is_const():
                    df[g] = df.get(g, 0) + e
                elif g.const_value() != 1:
                    raise ArithmeticError("unexpected constant factor")
                mult += k * e
            for _ in range(mult):
                h = num.divide_linear(idx, p, q)
                if h is None:
                    raise PoleError(f"pole at {NAMES[idx]} = {value}")
                num = h
            # dividing by (q x - p)^mult on both sides leaves no extra constants
            cur = Scalar._make(num, cur.dc, dm, df)._subst({idx: v})
        return cur

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        """Exact value at a point binding every occurring indeterminate."""
        vals = {INDEX[canonical_name(k)]: Fraction(v) for k, v in point.items()}
        den = Fraction(self.dc)
        if self.dm:
            den *= Poly.mono(self.dm).evaluate(vals)
        for f, e in self.df.items():
            den *= f.evaluate(vals) ** e
        if den == 0:
            raise PoleError("denominator vanishes at the sample point")
        return self.num.evaluate(vals) / den

    # -- printing -----------------------------------------------------------

    def _den_parts(self) -> list:
        parts = []
        if self.dc != 1:
            parts.append(str(self.dc))
        if self.dm:
            parts.append(mono_str(self.dm))
        fs = []
        for f, e in self.df.items():
            s = f"({f})"
            fs.append(s if e == 1 else f"{s}^{e}")
        parts.extend(sorted(fs))
        return parts

    def den_str(self) -> str:
        return "*".join(self._den_parts())

    def __str__(self) -> str:
        if self.has_trivial_den():
            return str(self.num)
        num = str(self.num)
        if len(self.num.terms) > 1:
            num = f"({num})"
        parts = self._den_parts()
        den = "*".join(parts)
        if len(parts) > 1 or "*" in den or "^" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"Scalar({self})"


def _cancel_factors(num: Poly, df: dict):
    """Cancel denominator factors that divide the numerator exactly."""
    # only cheap attempts: factors of small size relative to num
    changed = False
    out = dict(df)
    for f in list(out):
        if len(f.terms) > len(num.terms):
            continue
        while out.get(f):
            try:
                q = num.divexact(f)
            except ArithmeticError:
                break
            num = q
            out[f] -= 1
            if not out[f]:
                del out[f]
            changed = True
    return num, (out if changed else df)


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar.of(x)


def _subst_poly(p: Poly, vals: Dict[int, Scalar]) -> Scalar:
    """Substitute Scalars for the indexed indeterminates of a polynomial."""
    bound = [i for i in sorted(vals) if p.degree_in(i) > 0]
    if not bound:
        return Scalar(p)
    shifts = [BITS * i for i in bound]
    groups: dict = {}
    for m, c in p.terms.items():
        key = []
        rest = m
        for sh in shifts:
            e = (m >> sh) & FIELD
            key.append(e)
            rest -= e << sh
        groups.setdefault(tuple(key), {})[rest] = c
    degs = [max(k[j] for k in groups) for j in range(len(bound))]
    nums = [vals[i].num for i in bound]
    dens = [vals[i].den for i in bound]
    npow = [[Poly.const(1)] for _ in bound]
    dpow = [[Poly.const(1)] for _ in bound]

    def power(cache, base, e):
        while len(cache) <= e:
            cache.append(cache[-1] * base)
        return cache[e]

    total = Poly()
    for key, free in groups.items():
        factor = Poly(free)
        for j, e in enumerate(key):
            if e:
                factor = factor * power(npow[j], nums[j], e)
            if degs[j] - e:
                factor = factor * power(dpow[j], dens[j], degs[j] - e)
        total = total + factor
    dc, dm, df = 1, 0, {}
    for j, i in enumerate(bound):
        v = vals[i]
        d = degs[j]
        dc *= v.dc ** d
        dm += v.dm * d
        for f, e in v.df.items():
            df[f] = df.get(f, 0) + e * d
    return Scalar._make(total, dc, dm, df)


ZERO = Scalar(Poly())
ONE = Scalar(Poly.const(1))


def var(name: str) -> Scalar:
    return Scalar.var(name)


def const(x: Number) -> Scalar:
    return Scalar.of(Fraction(x) if not isinstance(x, int) else x)


def total(items: Iterable[Scalar]) -> Scalar:
    acc = ZERO
    for x in items:
        acc = acc + x
    return acc
