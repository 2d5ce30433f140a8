"""Sparse square matrices over exact rings, plus the tensor-leg bookkeeping.

Indices are 1-based throughout.  A pair index ``(i, k)`` of ``V (x) V`` with
``dim V = N`` is flattened to ``(i - 1) * N + k``; triples follow the same
row-major rule.  Entries may be :class:`Scalar`, :class:`Poly` or
``Fraction``; anything with ``+``, ``*``, unary ``-`` and truthiness works.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

from reflectk.expr import ExpressionError, parse
from reflectk.scalar import ONE, ZERO, Poly, PoleError, Scalar

Index = Tuple[int, int]


class MatrixFormatError(ValueError):
    """A matrix document did not match the expected shape."""


class SingularMatrixError(ArithmeticError):
    """Raised when inverting a matrix whose determinant vanishes."""

    def __init__(self, message: str, det=None):
        super().__init__(message)
        self.det = det


class Mat:
    """An ``n x n`` matrix stored as ``{(row, col): value}`` without zeros."""

    __slots__ = ("n", "entries", "zero")

    def __init__(self, n: int, entries: Mapping[Index, object] | None = None, zero=ZERO):
        self.n = n
        self.zero = zero
        self.entries: Dict[Index, object] = {}
        if entries:
            for (i, j), x in entries.items():
                if not (1 <= i <= n and 1 <= j <= n):
                    raise IndexError(f"entry ({i}, {j}) outside a {n}x{n} matrix")
                if x:
                    self.entries[(i, j)] = x

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n: int, one=ONE) -> "Mat":
        return cls(n, {(i, i): one for i in range(1, n + 1)})

    @classmethod
    def unit(cls, n: int, i: int, j: int, value=ONE) -> "Mat":
        return cls(n, {(i, j): value})

    @classmethod
    def diag(cls, values: Sequence) -> "Mat":
        return cls(len(values), {(i + 1, i + 1): Scalar.of(v) for i, v in enumerate(values)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Mat":
        n = len(rows)
        out = {}
        for i, row in enumerate(rows, 1):
            if len(row) != n:
                raise ValueError("rows must form a square matrix")
            for j, x in enumerate(row, 1):
                out[(i, j)] = Scalar.of(x)
        return cls(n, out)

    # -- access -------------------------------------------------------------

    def __getitem__(self, ij: Index):
        return self.entries.get(ij, self.zero)

    def items(self):
        return self.entries.items()

    def rows(self) -> Dict[int, Dict[int, object]]:
        out: Dict[int, Dict[int, object]] = {}
        for (i, j), x in self.entries.items():
            out.setdefault(i, {})[j] = x
        return out

    def to_rows(self) -> list:
        return [[self[(i, j)] for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def nnz(self) -> int:
        return len(self.entries)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Mat") -> None:
        if not isinstance(other, Mat):
            raise TypeError("expected a Mat")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        brows = other.rows()
        acc: Dict[Index, list] = {}
        for (i, k), a in self.entries.items():
            row = brows.get(k)
            if not row:
                continue
            for j, b in row.items():
                acc.setdefault((i, j), []).append(a * b)
        out = {}
        for ij, terms in acc.items():
            s = terms[0]
            for t in terms[1:]:
                s = s + t
            out[ij] = s
        return Mat(self.n, out, self.zero)

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        out = dict(self.entries)
        for ij, x in other.entries.items():
            out[ij] = out[ij] + x if ij in out else x
        return Mat(self.n, out, self.zero)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return Mat(self.n, {ij: -x for ij, x in self.entries.items()}, self.zero)

    def scale(self, c) -> "Mat":
        if not isinstance(c, (Poly, Fraction)):
            c = Scalar.of(c)
        return Mat(self.n, {ij: c * x for ij, x in self.entries.items()}, self.zero)

    def __rmul__(self, c) -> "Mat":
        return self.scale(c)

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            return inverse(self) ** (-e)
        out = Mat.identity(self.n)
        for _ in range(e):
            out = out @ self
        return out

    def is_zero(self) -> bool:
        return not any(self.entries.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat) or other.n != self.n:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def map(self, fn: Callable, zero=None) -> "Mat":
        return Mat(self.n, {ij: fn(x) for ij, x in self.entries.items()},
                   self.zero if zero is None else zero)

    def subst(self, bindings: Mapping[str, object]) -> "Mat":
        return self.map(lambda x: x.subst(bindings))

    def evaluate(self, point: Mapping[str, object]) -> "Mat":
        return self.map(lambda x: x.evaluate(point), zero=Fraction(0))

    def transpose(self) -> "Mat":
        return Mat(self.n, {(j, i): x for (i, j), x in self.entries.items()}, self.zero)

    @property
    def T(self) -> "Mat":
        return self.transpose()

    def transpose_w(self) -> "Mat":
        """The antidiagonal transpose ``M -> J M^t J``: entry ``(i, j)`` reads ``M[j', i']``."""
        n = self.n
        return Mat(n, {(n + 1 - j, n + 1 - i): x for (i, j), x in self.entries.items()}, self.zero)

    def names(self) -> set:
        out = set()
        for x in self.entries.values():
            out |= x.names()
        return out

    def __repr__(self) -> str:
        return f"Mat({self.n}, {{{', '.join(f'{k}: {v}' for k, v in sorted(self.entries.items()))}}})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.n,
            "entries": [
                {"row": i, "col": j, "value": str(x)}
                for (i, j), x in sorted(self.entries.items())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc) -> "Mat":
        if not isinstance(doc, dict):
            raise MatrixFormatError("matrix document must be a JSON object")
        if "dim" not in doc or "entries" not in doc:
            raise MatrixFormatError("matrix document needs 'dim' and 'entries'")
        n = doc["dim"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise MatrixFormatError(f"'dim' must be a positive integer, got {n!r}")
        if not isinstance(doc["entries"], list):
            raise MatrixFormatError("'entries' must be a list")
        out = {}
        for k, e in enumerate(doc["entries"]):
            if not isinstance(e, dict) or not {"row", "col", "value"} <= set(e):
                raise MatrixFormatError(f"entry {k} needs 'row', 'col' and 'value'")
            i, j, v = e["row"], e["col"], e["value"]
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in (i, j)):
                raise MatrixFormatError(f"entry {k}: row and col must be integers")
            if not (1 <= i <= n and 1 <= j <= n):
                raise MatrixFormatError(f"entry {k}: ({i}, {j}) outside a {n}x{n} matrix")
            if (i, j) in out:
                raise MatrixFormatError(f"entry {k}: duplicate position ({i}, {j})")
            if isinstance(v, int) and not isinstance(v, bool):
                v = str(v)
            if not isinstance(v, str):
                raise MatrixFormatError(f"entry {k}: value must be a string")
            try:
                out[(i, j)] = parse(v)
            except ExpressionError as exc:
                raise MatrixFormatError(f"entry {k} at ({i}, {j}): {exc}") from exc
        return cls(n, out)

    @classmethod
    def loads(cls, text: str) -> "Mat":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_json(doc)


# ---------------------------------------------------------------------------
# tensor legs


def kron(a: Mat, b: Mat) -> Mat:
    m = b.n
    out = {}
    for (i, j), x in a.entries.items():
        for (k, l), y in b.entries.items():
            out[((i - 1) * m + k, (j - 1) * m + l)] = x * y
    return Mat(a.n * m, out, a.zero)


def split(index: int, N: int, legs: int) -> tuple:
    """Inverse of the flattening: ``(i - 1) * N + k -> (i, k)`` generalised."""
    out = []
    index -= 1
    for _ in range(legs):
        out.append(index % N + 1)
        index //= N
    return tuple(reversed(out))


def flat(idx: Sequence[int], N: int) -> int:
    out = 0
    for i in idx:
        out = out * N + (i - 1)
    return out + 1


def embed(x: Mat, legs: Sequence[int], N: int, total: int = 3) -> Mat:
    """Place an operator acting on ``len(legs)`` factors into ``total`` factors.

    ``legs`` lists, in order, the tensor factors the operator's own legs act
    on; for example ``embed(R, (2, 1), N)`` is ``R21`` acting on ``V^(x)3``.
    """
    k = len(legs)
    if x.n != N ** k:
        raise ValueError(f"operator of size {x.n} does not act on {k} legs of dim {N}")
    others = [t for t in range(1, total + 1) if t not in legs]
    pos = {leg: p for p, leg in enumerate(legs)}
    out = {}
    from itertools import product

    for (r, c), val in x.entries.items():
        ri, ci = split(r, N, k), split(c, N, k)
        for spect in product(range(1, N + 1), repeat=len(others)):
            row = [0] * total
            col = [0] * total
            for leg in legs:
                row[leg - 1] = ri[pos[leg]]
                col[leg - 1] = ci[pos[leg]]
            for leg, s in zip(others, spect):
                row[leg - 1] = s
                col[leg - 1] = s
            out[(flat(row, N), flat(col, N))] = val
    return Mat(N ** total, out, x.zero)


def on_leg(k: Mat, leg: int, total: int = 2) -> Mat:
    return embed(k, (leg,), k.n, total)


def _remap2(x: Mat, N: int, fn) -> Mat:
    out = {}
    for (r, c), val in x.entries.items():
        i, k = split(r, N, 2)
        j, l = split(c, N, 2)
        (a, b), (cc, d) = fn(i, k, j, l)
        out[(flat((a, b), N), flat((cc, d), N))] = val
    return Mat(x.n, out, x.zero)


def dim_root(x: Mat) -> int:
    N = round(x.n ** 0.5)
    if N * N != x.n:
        raise ValueError(f"{x.n} is not a square dimension")
    return N


def flip(x: Mat) -> Mat:
    """``X21 = P X P``."""
    N = dim_root(x)
    return _remap2(x, N, lambda i, k, j, l: ((k, i), (l, j)))


def transpose_t1(x: Mat) -> Mat:
    """Partial transpose in the first tensor factor."""
    N = dim_root(x)
    return _remap2(x, N, lambda i, k, j, l: ((j, k), (i, l)))


def transpose_t2(x: Mat) -> Mat:
    N = dim_root(x)
    return _remap2(x, N, lambda i, k, j, l: ((i, l), (j, k)))


def w_tensor_w(x: Mat) -> Mat:
    """Apply the antidiagonal transpose in both factors at once."""
    N = dim_root(x)
    b = lambda i: N + 1 - i
    return _remap2(x, N, lambda i, k, j, l: ((b(j), b(l)), (b(i), b(k))))


def permutation_P(N: int) -> Mat:
    return Mat(N * N, {(flat((i, j), N), flat((j, i), N)): ONE
                       for i in range(1, N + 1) for j in range(1, N + 1)})


# ---------------------------------------------------------------------------
# determinant and inverse over the fraction field


def _pivot_cost(x) -> int:
    if isinstance(x, Scalar):
        return len(x.num.terms) + sum(len(f.terms) for f in x.df)
    return 0


def inverse(a: Mat) -> Mat:
    """Gauss-Jordan inverse; raises SingularMatrixError with the determinant (zero)."""
    n = a.n
    rows = [dict() for _ in range(n)]
    for (i, j), x in a.entries.items():
        rows[i - 1][j] = x
    inv = [{i + 1: ONE} for i in range(n)]
    for col in range(1, n + 1):
        cands = [r for r in range(col - 1, n) if rows[r].get(col)]
        if not cands:
            raise SingularMatrixError("matrix is singular", det=ZERO)
        p = min(cands, key=lambda r: _pivot_cost(rows[r][col]))
        rows[col - 1], rows[p] = rows[p], rows[col - 1]
        inv[col - 1], inv[p] = inv[p], inv[col - 1]
        piv = rows[col - 1][col].inv() if isinstance(rows[col - 1][col], Scalar) else 1 / rows[col - 1][col]
        rows[col - 1] = {j: x * piv for j, x in rows[col - 1].items()}
        inv[col - 1] = {j: x * piv for j, x in inv[col - 1].items()}
        for r in range(n):
            if r == col - 1:
                continue
            f = rows[r].get(col)
            if not f:
                continue
            for src, dst in ((rows[col - 1], rows[r]), (inv[col - 1], inv[r])):
                for j, x in src.items():
                    v = dst.get(j, a.zero) - f * x
                    if v:
                        dst[j] = v
                    else:
                        dst.pop(j, None)
    out = {}
    for i, row in enumerate(inv, 1):
        for j, x in row.items():
            out[(i, j)] = x
    return Mat(n, out, a.zero)


def det(a: Mat):
    """Determinant by fraction-field elimination."""
    n = a.n
    rows = [dict() for _ in range(n)]
    for (i, j), x in a.entries.items():
        rows[i - 1][j] = x
    result = ONE if isinstance(a.zero, Scalar) else Fraction(1)
    for col in range(1, n + 1):
        cands = [r for r in range(col - 1, n) if rows[r].get(col)]
        if not cands:
            return a.zero
        p = min(cands, key=lambda r: _pivot_cost(rows[r][col]))
        if p != col - 1:
            rows[col - 1], rows[p] = rows[p], rows[col - 1]
            result = -result
        pv = rows[col - 1][col]
        result = result * pv
        pinv = pv.inv() if isinstance(pv, Scalar) else 1 / pv
        for r in range(col, n):
            f = rows[r].get(col)
            if not f:
                continue
            f = f * pinv
            for j, x in rows[col - 1].items():
                v = rows[r].get(j, a.zero) - f * x
                if v:
                    rows[r][j] = v
                else:
                    rows[r].pop(j, None)
    return result


def clear_denominators(a: Mat) -> tuple:
    """Return ``(c, P)`` with ``P`` a polynomial matrix and ``a == P / c``.

    ``c`` is a Scalar with trivial numerator part, built from the least common
    multiple of the factored entry denominators.
    """
    from math import lcm

    from reflectk.scalar import mono_lcm

    dc, dm, df = 1, 0, {}
    for x in a.entries.values():
        dc = lcm(dc, x.dc)
        dm = mono_lcm(dm, x.dm)
        for f, e in x.df.items():
            if df.get(f, 0) < e:
                df[f] = e
    out = {}
    for ij, x in a.entries.items():
        p = x.num.shift(dm - x.dm, dc // x.dc)
        for f, e in df.items():
            k = e - x.df.get(f, 0)
            if k:
                p = p * (f ** k)
        out[ij] = p
    c = Scalar(Poly.mono(dm, dc))
    for f, e in df.items():
        c = c * Scalar(f ** e)
    return c, Mat(a.n, out, Poly())


__all__ = [
    "Mat",
    "MatrixFormatError",
    "SingularMatrixError",
    "kron",
    "embed",
    "on_leg",
    "flip",
    "transpose_t1",
    "transpose_t2",
    "w_tensor_w",
    "permutation_P",
    "inverse",
    "det",
    "clear_denominators",
    "split",
    "flat",
    "PoleError",
]
