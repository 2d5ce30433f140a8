"""Class labels and explicit solution matrices of the reflection equations.

Three label types cover the canonical solutions:

* :class:`SymClass` ``(N, l, r)`` for the symmetric family,
* :class:`TriClass` ``(N, m, sigma, eps)`` for the triangular family,
* :class:`TwistedClass` ``(N, kind)`` for the charge-conjugated twisted equation.

Involutions are stored as image tuples ``(sigma(1), ..., sigma(N))``.
Off-diagonal selections ``eps`` are stored as the set of positions
``(row, col)`` whose coefficient is 1.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from reflectk.linalg import Mat
from reflectk.rmatrix import S, bar, charge_conjugation, charge_conjugation_inv, tq
from reflectk.scalar import ONE, ZERO, Scalar

U = Scalar.var("u")
LAM = Scalar.var("lambda")
MU = Scalar.var("mu")
ALPHA = Scalar.var("alpha")
Q = -S * S


class InvalidLabel(ValueError):
    """A class label or index tuple violates its defining inequalities."""


def c(i: int) -> Scalar:
    return Scalar.var(f"c_{i}")


def theta() -> Scalar:
    """``(u - 1/u) / (1/(lambda mu) + 1/u)``."""
    return (U - U.inv()) / ((LAM * MU).inv() + U.inv())


def chi() -> Scalar:
    """``1 / (lambda - mu u)``."""
    return (LAM - MU * U).inv()


def _acc(out: Dict[Tuple[int, int], Scalar], i: int, j: int, x: Scalar) -> None:
    out[(i, j)] = out.get((i, j), ZERO) + x


def identity_tuple(N: int) -> tuple:
    return tuple(range(1, N + 1))


def is_involution(sigma: Sequence[int]) -> bool:
    N = len(sigma)
    if sorted(sigma) != list(range(1, N + 1)):
        return False
    return all(sigma[sigma[i] - 1] == i + 1 for i in range(N))


def transpositions(sigma: Sequence[int]) -> List[Tuple[int, int]]:
    return [(i, sigma[i - 1]) for i in range(1, len(sigma) + 1) if i < sigma[i - 1]]


def involution_from_pairs(N: int, pairs: Iterable[Tuple[int, int]]) -> tuple:
    img = list(range(1, N + 1))
    for a, b in pairs:
        img[a - 1], img[b - 1] = b, a
    out = tuple(img)
    if not is_involution(out):
        raise InvalidLabel(f"pairs {list(pairs)} do not form an involution")
    return out


# ---------------------------------------------------------------------------
# symmetric family


@dataclass(frozen=True)
class SymClass:
    N: int
    l: int
    r: int

    def __post_init__(self):
        N, l, r = self.N, self.l, self.r
        if N < 2:
            raise InvalidLabel("N >= 2 violated")
        if not 0 <= l:
            raise InvalidLabel(f"0 <= l violated (l={l})")
        if not l < r:
            raise InvalidLabel(f"l < r violated (l={l}, r={r})")
        if not 2 * r <= N + l:
            raise InvalidLabel(f"r <= (N+l)/2 violated (N={N}, l={l}, r={r})")

    def sigma_of(self, i: int) -> int:
        if self.l < i <= self.r:
            return self.N + self.l - i + 1
        if self.N + self.l - self.r < i <= self.N:
            return self.N + self.l - i + 1
        return i

    @property
    def sigma(self) -> tuple:
        return tuple(self.sigma_of(i) for i in range(1, self.N + 1))

    def to_json(self) -> dict:
        return {"family": "sym", "N": self.N, "l": self.l, "r": self.r}


def enum_sym_classes(N: int) -> List[SymClass]:
    """All ``(l, r)`` with ``0 <= l < r <= (N + l)/2``, ordered by ``l`` then ``r``."""
    out = []
    for l in range(0, N + 1):
        for r in range(l + 1, N + 1):
            if 2 * r <= N + l:
                out.append(SymClass(N, l, r))
    return out


def build_KS(cls: SymClass) -> Mat:
    N, l, r = cls.N, cls.l, cls.r
    th, ch = theta(), chi()
    tc = th * ch
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, N + 1):
        _acc(out, i, i, ONE)
    for i in range(1, l + 1):
        _acc(out, i, i, th)
    for i in range(l + 1, r + 1):
        s = cls.sigma_of(i)
        _acc(out, i, i, tc * LAM)
        _acc(out, s, s, tc * LAM.inv())
        _acc(out, i, s, -tc)
        _acc(out, s, i, -tc)
    return Mat(N, out)


def build_KP(cls: SymClass) -> Mat:
    """The ``lambda = mu = 1`` specialisation written out directly."""
    N, l, r = cls.N, cls.l, cls.r
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, l + 1):
        out[(i, i)] = U
    for i in range(l + 1, r + 1):
        s = cls.sigma_of(i)
        out[(i, s)] = ONE
        out[(s, i)] = ONE
    for i in range(r + 1, N + l - r + 1):
        out[(i, i)] = ONE
    return Mat(N, out)


# ---------------------------------------------------------------------------
# triangular family


@dataclass(frozen=True)
class TriClass:
    N: int
    m: int
    sigma: tuple
    eps: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "eps", frozenset(tuple(p) for p in self.eps))
        problem = tri_violation(self.N, self.m, self.sigma, self.eps)
        if problem:
            raise InvalidLabel(problem)

    def to_json(self) -> dict:
        return {
            "family": "tri",
            "N": self.N,
            "m": self.m,
            "sigma": list(self.sigma),
            "eps": [list(p) for p in sorted(self.eps)],
        }


def tri_sigma_violation(N: int, m: int, sigma: Sequence[int]) -> Optional[str]:
    """Why ``(m, sigma)`` is outside the triangular index set, or None."""
    if N < 2:
        return "N >= 2 violated"
    if not 2 * m >= N:
        return f"N/2 <= m violated (N={N}, m={m})"
    if not m <= N:
        return f"m <= N violated (N={N}, m={m})"
    if len(sigma) != N or not is_involution(sigma):
        return f"sigma={list(sigma)} is not an involution of 1..{N}"
    moved = [i for i in range(m + 1, N + 1) if sigma[i - 1] != i]
    for i in range(1, m + 1):
        if sigma[i - 1] != i and sigma[i - 1] <= m:
            return f"sigma({i})={sigma[i - 1]} pairs two points <= m={m}"
    for i in moved:
        if not 0 < sigma[i - 1] <= m:
            return f"0 < sigma({i}) <= m violated (m={m})"
    for a, b in itertools.combinations(moved, 2):
        if not sigma[b - 1] <= sigma[a - 1]:
            return f"sigma({b}) <= sigma({a}) violated for m < {a} < {b}"
    return None


def tri_violation(N: int, m: int, sigma: Sequence[int], eps) -> Optional[str]:
    problem = tri_sigma_violation(N, m, sigma)
    if problem:
        return problem
    pairs = transpositions(sigma)
    allowed = {p for a, b in pairs for p in ((a, b), (b, a))}
    for p in eps:
        if p not in allowed:
            return f"eps entry {tuple(p)} is not an off-diagonal pair of sigma"
    for a, b in pairs:
        if ((a, b) in eps) + ((b, a) in eps) != 1:
            return f"eps_{a}{b} + eps_{b}{a} = 1 violated"
    if pairs:
        j, sj = pairs[0]
        if (j, sj) not in eps:
            return f"eps_{j}{sj} = 1 violated for the smallest moved index j={j}"
    return None


def _related(N: int, sigma: Sequence[int]) -> tuple:
    """Conjugate by the half-shift ``i <-> i + N/2``."""
    h = N // 2
    rho = lambda i: i + h if i <= h else i - h
    img = [0] * N
    for i in range(1, N + 1):
        img[rho(i) - 1] = rho(sigma[i - 1])
    return tuple(img)


def _rep_key(sigma: Sequence[int]):
    return sorted(transpositions(sigma))


def enum_tri_sigmas(N: int, m: int) -> List[tuple]:
    """Involutions allowed at level ``m`` before any quotient."""
    out = []
    tail = list(range(m + 1, N + 1))
    # choose which points above m move, then an order-reversing injection into 1..m
    for k in range(0, len(tail) + 1):
        for moved in itertools.combinations(tail, k):
            for targets in itertools.combinations(range(1, m + 1), k):
                pairs = list(zip(moved, reversed(targets)))
                out.append(involution_from_pairs(N, pairs))
    return sorted(set(out), key=_rep_key)


def enum_tri_classes(N: int) -> List[TriClass]:
    """All triangular labels with the related-involution quotient applied.

    Order: ``m`` descending, then by sorted transposition list, then by ``eps``.
    Within a related pair the involution with the lexicographically smaller
    sorted transposition list is kept.
    """
    out = []
    for m in range(N, (N + 1) // 2 - 1, -1):
        if 2 * m < N:
            continue
        sigmas = enum_tri_sigmas(N, m)
        if N % 2 == 0 and 2 * m == N:
            kept = []
            for sg in sigmas:
                other = _related(N, sg)
                if other != sg and tri_sigma_violation(N, m, other) is None:
                    if _rep_key(other) < _rep_key(sg):
                        continue
                kept.append(sg)
            sigmas = kept
        for sg in sigmas:
            pairs = transpositions(sg)
            free = pairs[1:]
            head = [pairs[0]] if pairs else []
            for bits in itertools.product((0, 1), repeat=len(free)):
                eps = set(head)
                for (a, b), bit in zip(free, bits):
                    eps.add((a, b) if bit == 0 else (b, a))
                out.append(TriClass(N, m, sg, frozenset(eps)))
    return out


def build_KT(cls: TriClass) -> Mat:
    N, m = cls.N, cls.m
    b = (U - U.inv()) / (ALPHA - U)
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, N + 1):
        _acc(out, i, i, ONE)
    for i in range(m + 1, N + 1):
        s = cls.sigma[i - 1]
        _acc(out, i, i, b)
        if s != i:
            if (i, s) in cls.eps:
                _acc(out, i, s, b)
            if (s, i) in cls.eps:
                _acc(out, s, i, b)
    return Mat(N, out)


def build_noninvertible_tri(N: int, m: int, sigma: Sequence[int], eps) -> Mat:
    """The constant sum of the selected off-diagonal units above level ``m``."""
    problem = tri_violation(N, m, tuple(sigma), frozenset(tuple(p) for p in eps))
    if problem:
        raise InvalidLabel(problem)
    out = {}
    for i in range(m + 1, N + 1):
        s = sigma[i - 1]
        for p in ((i, s), (s, i)):
            if s != i and p in eps:
                out[p] = ONE
    return Mat(N, out)


# ---------------------------------------------------------------------------
# orbit families


def sym1_violation(N: int, l: int, r: int, t: int) -> Optional[str]:
    if not 0 <= l < r:
        return f"0 <= l < r violated (l={l}, r={r})"
    if not 2 <= t <= N:
        return f"2 <= t <= N violated (t={t})"
    if not 2 * r <= l + t:
        return f"r <= (l+t)/2 violated (l={l}, r={r}, t={t})"
    return None


def build_orbit_KS1(N: int, l: int, r: int, t: int, g: Scalar = ONE, cs: Dict[int, Scalar] | None = None) -> Mat:
    """The first symmetric orbit family; ``sigma(i) = t + l - i + 1`` on ``(l, r]``."""
    problem = sym1_violation(N, l, r, t)
    if problem:
        raise InvalidLabel(problem)
    th, ch = theta(), chi()
    cs = cs or {}
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, N + 1):
        _acc(out, i, i, ONE)
    for i in range(1, l + 1):
        _acc(out, i, i, th)
    for i in range(t + 1, N + 1):
        _acc(out, i, i, -th / (LAM * MU * U))
    for i in range(l + 1, r + 1):
        s = t + l - i + 1
        ci = cs.get(i, c(i))
        f = th * ch
        _acc(out, i, i, f * LAM)
        _acc(out, s, s, f * LAM.inv())
        _acc(out, i, s, -f * ci)
        _acc(out, s, i, -f * ci.inv())
    return Mat(N, out).scale(g)


def sym2_violation(N: int, l: int, m: int, r: int) -> Optional[str]:
    if not 1 <= l:
        return f"1 <= l violated (l={l})"
    if not 2 * l <= m:
        return f"2l <= m violated (l={l}, m={m})"
    if not m <= r:
        return f"m <= r violated (m={m}, r={r})"
    if not 2 * r <= m + N:
        return f"r <= (m+N)/2 violated (m={m}, r={r}, N={N})"
    return None


def build_orbit_KS2(N: int, l: int, m: int, r: int, g: Scalar = ONE, cs: Dict[int, Scalar] | None = None) -> Mat:
    """The second symmetric orbit family.

    ``sigma(i) = m - i + 1`` for ``i <= m`` and ``N + m - i + 1`` above.  The
    final summand uses the transposed unit for the ``1/c_i`` coefficient,
    which is what makes the matrix a solution.
    """
    problem = sym2_violation(N, l, m, r)
    if problem:
        raise InvalidLabel(problem)
    th, ch = theta(), chi()
    cs = cs or {}
    sg = lambda i: m - i + 1 if i <= m else N + m - i + 1
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, N + 1):
        _acc(out, i, i, ONE)
    for i in range(1, m - l + 1):
        _acc(out, i, i, th)
    f = th * ch
    for i in range(1, l + 1):
        s = sg(i)
        ci = cs.get(i, c(i))
        _acc(out, i, i, f * MU.inv() * U)
        _acc(out, s, s, f * LAM)
        _acc(out, i, s, -f * ci * U)
        _acc(out, s, i, -f * ci.inv() * U)
    for i in range(m + 1, r + 1):
        s = sg(i)
        ci = cs.get(i, c(i))
        _acc(out, i, i, f * LAM)
        _acc(out, s, s, f * LAM.inv())
        _acc(out, i, s, -f * ci)
        _acc(out, s, i, -f * ci.inv())
    return Mat(N, out).scale(g)


def tri1_violation(N: int, l: int, m: int, r: int, sigma: Sequence[int]) -> Optional[str]:
    if not 0 <= l <= m <= r <= N:
        return f"0 <= l <= m <= r <= N violated (l={l}, m={m}, r={r}, N={N})"
    if len(sigma) != N or not is_involution(sigma):
        return f"sigma={list(sigma)} is not an involution of 1..{N}"
    lower = [i for i in range(l + 1, m + 1) if sigma[i - 1] != i]
    upper = [i for i in range(m + 1, r + 1) if sigma[i - 1] != i]
    for i in lower:
        if not 0 < sigma[i - 1] <= l:
            return f"0 < sigma({i}) <= l violated"
    for i in upper:
        if not r < sigma[i - 1] <= N:
            return f"r < sigma({i}) <= N violated"
    for block in (lower, upper):
        for a, b in itertools.combinations(block, 2):
            if not sigma[b - 1] <= sigma[a - 1]:
                return f"sigma({b}) <= sigma({a}) violated"
    moved = set(lower) | set(upper)
    moved |= {sigma[i - 1] for i in moved}
    for i in range(1, N + 1):
        if sigma[i - 1] != i and i not in moved:
            return f"sigma moves {i}, which no constraint allows"
    return None


def build_orbit_KT1(
    N: int,
    l: int,
    m: int,
    r: int,
    sigma: Sequence[int],
    upper: Iterable[Tuple[int, int]] = (),
    g: Scalar = ONE,
    alpha: Scalar = ALPHA,
) -> Mat:
    """The triangular orbit family.

    For each moved pair exactly one of the two coefficients is nonzero; the
    nonzero one is the symbol ``c_k`` with ``k`` the smaller index, placed at
    the positions listed in ``upper`` (default: the upper triangular one).
    """
    sigma = tuple(sigma)
    problem = tri1_violation(N, l, m, r, sigma)
    if problem:
        raise InvalidLabel(problem)
    chosen = set(tuple(p) for p in upper)
    den = alpha * U - 1
    out: Dict[Tuple[int, int], Scalar] = {}
    for i in range(1, l + 1):
        _acc(out, i, i, U)
    for i in range(l + 1, r + 1):
        _acc(out, i, i, (alpha - U) / den)
    for i in range(r + 1, N + 1):
        _acc(out, i, i, U.inv())
    for i in range(l + 1, r + 1):
        s = sigma[i - 1]
        if s == i:
            continue
        w = (U if i <= m else ONE) * (U - U.inv()) / den
        a, b = (i, s), (s, i)
        k = min(i, s)
        if a in chosen or (b not in chosen and i < s):
            _acc(out, i, s, w * c(k))
        else:
            _acc(out, s, i, w * c(k))
    return Mat(N, out).scale(g)


# ---------------------------------------------------------------------------
# constant matrices and affinization


@dataclass(frozen=True)
class ConstPair:
    G: Mat
    Q: Mat
    l: int

    def check(self) -> bool:
        """The idempotent relations for ``Q`` (only meaningful when ``l > 0``)."""
        lam = LAM
        I = Mat.identity(self.G.n)
        if self.Q.is_zero():
            return True
        return (
            self.Q @ self.Q == self.Q
            and (self.G @ self.Q).is_zero()
            and (self.Q @ self.G).is_zero()
            and self.Q == I + self.G.scale(lam - lam.inv()) - self.G @ self.G
        )


def build_const_GQ(cls: SymClass) -> ConstPair:
    N, l, r = cls.N, cls.l, cls.r
    sr = cls.sigma_of(r)
    G: Dict[Tuple[int, int], Scalar] = {}
    for i in range(r + 1, sr):
        _acc(G, i, i, LAM)
    for i in range(l + 1, r + 1):
        s = cls.sigma_of(i)
        _acc(G, i, s, ONE)
        _acc(G, s, i, ONE)
        _acc(G, s, s, LAM - LAM.inv())
    Qm = {(i, i): ONE for i in range(1, l + 1)}
    return ConstPair(Mat(N, G), Mat(N, Qm), l)


def affinize_sym(p: ConstPair) -> Mat:
    if not p.check():
        raise InvalidLabel("constant pair violates the idempotent relations")
    N = p.G.n
    I = Mat.identity(N)
    coef = (U - U.inv()) / (((LAM * MU).inv() + U.inv()) * (LAM - MU * U))
    inner = I.scale(LAM) - p.Q.scale(MU * U) - p.G
    return I + inner.scale(coef)


def affinize_tri(Qm: Mat) -> Mat:
    if not Qm @ Qm == Qm:
        raise InvalidLabel("Q is not idempotent")
    I = Mat.identity(Qm.n)
    return I + Qm.scale((U - U.inv()) / (ALPHA - U))


# ---------------------------------------------------------------------------
# twisted family


class TwistedKind(str, enum.Enum):
    QONSAGER = "q-onsager"
    ANTIDIAG = "anti-diag"
    PAIRSWAP = "pair-swap"
    HALFSHIFT = "half-shift"

    @property
    def needs_even(self) -> bool:
        return self in (TwistedKind.PAIRSWAP, TwistedKind.HALFSHIFT)


@dataclass(frozen=True)
class TwistedClass:
    N: int
    kind: TwistedKind

    def __post_init__(self):
        try:
            kind = TwistedKind(self.kind)
        except ValueError:
            raise InvalidLabel(f"unknown twisted kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if self.N < 2:
            raise InvalidLabel("N >= 2 violated")
        if kind.needs_even and self.N % 2:
            raise InvalidLabel(f"{kind.value} requires N even (N={self.N})")

    def to_json(self) -> dict:
        return {"family": "twisted", "N": self.N, "kind": self.kind.value}


def enum_twisted_classes(N: int) -> List[TwistedClass]:
    return [TwistedClass(N, k) for k in TwistedKind if not (k.needs_even and N % 2)]


def _qons(N: int, sign: int = 1, cs: Dict[int, Scalar] | None = None) -> Mat:
    t = tq(N)
    out: Dict[Tuple[int, int], Scalar] = {}
    cval = (lambda i: cs.get(i, c(i))) if cs is not None else (lambda i: ONE)
    for i in range(1, N + 1):
        _acc(out, i, bar(i, N), cval(bar(i, N)) ** 2)
    f = (1 + Q) / (t + Q * U * sign)
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            cc = cval(bar(i, N)) * cval(bar(j, N)) * f
            _acc(out, i, bar(j, N), cc * sign * S ** (j - i) * U)
            _acc(out, j, bar(i, N), cc * S ** (i - j) * t)
    return Mat(N, out)


def build_twisted(cls: TwistedClass) -> Mat:
    N = cls.N
    k = cls.kind
    if k is TwistedKind.QONSAGER:
        return _qons(N)
    if k is TwistedKind.ANTIDIAG:
        return Mat(N, {(i, bar(i, N)): ONE for i in range(1, N + 1)})
    h = N // 2
    if k is TwistedKind.PAIRSWAP:
        out = {}
        for i in range(1, h + 1):
            out[(2 * i - 1, bar(2 * i, N))] = ONE
            out[(2 * i, bar(2 * i, N) + 1)] = ONE
        return Mat(N, out)
    out = {}
    for i in range(1, h + 1):
        out[(i, bar(i, N) - h)] = U
        out[(i + h, bar(i, N))] = ONE
    return Mat(N, out)


class TwistedOrbit(str, enum.Enum):
    QONSAGER = "q-onsager"
    A1 = "a1"
    A2A = "a2a"
    A2B = "a2b"
    A4 = "a4"


def build_twisted_orbit(N: int, family: str, sign: int = 1, g: Scalar = ONE,
                        cs: Dict[int, Scalar] | None = None) -> Mat:
    """Orbit families of the twisted canonical solutions; ``c_i`` default to symbols."""
    fam = TwistedOrbit(family)
    if sign not in (1, -1):
        raise InvalidLabel("sign must be +1 or -1")
    cs = dict(cs or {})
    cv = lambda i: cs.get(i, c(i))
    h = N // 2
    if fam in (TwistedOrbit.A2A, TwistedOrbit.A2B, TwistedOrbit.A4) and N % 2:
        raise InvalidLabel(f"{fam.value} requires N even (N={N})")
    out: Dict[Tuple[int, int], Scalar] = {}
    if fam is TwistedOrbit.QONSAGER:
        return _qons(N, sign, {i: cv(i) for i in range(1, N + 1)}).scale(g)
    if fam is TwistedOrbit.A1:
        for i in range(1, N + 1):
            out[(i, bar(i, N))] = cv(bar(i, N))
    elif fam is TwistedOrbit.A2A:
        for i in range(1, h + 1):
            out[(2 * i - 1, bar(2 * i, N))] = cv(i)
            out[(2 * i, bar(2 * i, N) + 1)] = cv(i)
    elif fam is TwistedOrbit.A2B:
        out[(1, 1)] = cv(1) * U
        out[(N, N)] = cv(1) * U.inv()
        for i in range(2, h + 1):
            out[(2 * i - 1, bar(2 * i, N) + 2)] = cv(i)
            out[(2 * i - 2, bar(2 * i, N) + 1)] = cv(i)
    else:
        for i in range(1, h + 1):
            out[(i, bar(i, N) - h)] = cv(i) * U * sign
            out[(i + h, bar(i, N))] = cv(i)
    return Mat(N, out).scale(g)


def twisted_JL(N: int) -> Tuple[Mat, Mat]:
    """The antidiagonal unit sum ``J`` and the strictly-below part ``L``."""
    J = Mat(N, {(i, bar(i, N)): ONE for i in range(1, N + 1)})
    L = {}
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            L[(j, bar(i, N))] = (1 + Q) * S ** (i - j)
    return J, Mat(N, L)


def halfshift_G(N: int) -> Mat:
    if N % 2:
        raise InvalidLabel(f"half-shift pattern requires N even (N={N})")
    h = N // 2
    return Mat(N, {(i + h, bar(i, N)): ONE for i in range(1, h + 1)})


def affinize_twisted_const(G: Mat, check: bool = True) -> Mat:
    """Turn a constant solution of the braided twisted equation into a spectral one.

    Entries strictly above the main antidiagonal have ``row + col < N + 1``.
    If there are none, the result is ``(1 + q u / tq) J + L + (u / tq) C^-1 L^t C^t``
    with ``J`` the antidiagonal part of ``G`` and ``L = G - J``.  Otherwise
    ``G`` itself is returned.
    """
    N = G.n
    if check:
        from reflectk.verify import check_const_twisted

        rep = check_const_twisted(G)
        if not rep.passed:
            raise InvalidLabel("G does not solve the constant braided twisted equation")
    above = any(i + j < N + 1 for (i, j) in G.entries)
    if above:
        return G
    J = Mat(N, {ij: x for ij, x in G.entries.items() if sum(ij) == N + 1})
    L = G - J
    t_inv = tq(N).inv()
    C, Ci = charge_conjugation(N), charge_conjugation_inv(N)
    return J.scale(1 + t_inv * Q * U) + L + (Ci @ L.transpose() @ C.transpose()).scale(t_inv * U)


# ---------------------------------------------------------------------------
# label serialization


def label_from_json(doc) -> object:
    if not isinstance(doc, dict) or "family" not in doc:
        raise InvalidLabel("label must be an object with a 'family' key")
    fam = doc["family"]
    try:
        if fam == "sym":
            return SymClass(int(doc["N"]), int(doc["l"]), int(doc["r"]))
        if fam == "tri":
            return TriClass(int(doc["N"]), int(doc["m"]), tuple(doc["sigma"]),
                            frozenset(tuple(p) for p in doc.get("eps", [])))
        if fam == "twisted":
            return TwistedClass(int(doc["N"]), doc["kind"])
    except KeyError as exc:
        raise InvalidLabel(f"label is missing field {exc}") from None
    raise InvalidLabel(f"unknown family {fam!r}")


def build(label) -> Mat:
    if isinstance(label, SymClass):
        return build_KS(label)
    if isinstance(label, TriClass):
        return build_KT(label)
    if isinstance(label, TwistedClass):
        return build_twisted(label)
    raise TypeError(f"not a class label: {label!r}")


def enumerate_all(N: int) -> Dict[str, list]:
    return {
        "sym": enum_sym_classes(N),
        "tri": enum_tri_classes(N),
        "twisted": enum_twisted_classes(N),
    }
