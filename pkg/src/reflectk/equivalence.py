"""Solution-preserving moves on K-matrices and the charge-conjugation bridge.

A move maps solutions of one reflection equation to solutions of the same
equation.  ``flavor`` is ``"re"`` for the untwisted equation and ``"ctre"``
for the charge-conjugated twisted one.

Symmetry words for :class:`Conjugate` are products separated by ``*`` of

* ``zrho`` or ``zrho^k`` (``k`` may be negative): the cyclic shift,
* ``diag``: the diagonal matrix of free symbols ``d_1 ... d_N``,
* ``diag(a,b,...)``: a constant diagonal matrix.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from reflectk.expr import parse
from reflectk.linalg import Mat, inverse
from reflectk.rmatrix import S, charge_conjugation, charge_conjugation_inv, is_symmetry, tq, zrho
from reflectk.scalar import ONE, Scalar

U = Scalar.var("u")
FLAVORS = ("re", "ctre")


class MoveError(ValueError):
    """A move is malformed or cannot be applied."""


def _flavor(f: str) -> str:
    if f not in FLAVORS:
        raise MoveError(f"flavor must be one of {FLAVORS}, got {f!r}")
    return f


_WORD = re.compile(r"^(zrho(?:\^(-?\d+))?|diag(?:\(([^()]*)\))?)$")


def symmetry_from_word(word: str, N: int) -> Mat:
    """Build ``Z(u)`` from a word; the spectral slot is the indeterminate ``u``."""
    Z = Mat.identity(N)
    for part in word.replace(" ", "").split("*"):
        m = _WORD.match(part)
        if not m:
            raise MoveError(f"unknown symmetry factor {part!r}")
        if part.startswith("zrho"):
            k = int(m.group(2)) if m.group(2) else 1
            base = zrho(N)
            factor = base ** k if k >= 0 else inverse(base) ** (-k)
        elif m.group(3) is None:
            factor = Mat(N, {(i, i): Scalar.var(f"d_{i}") for i in range(1, N + 1)})
        else:
            vals = [parse(x) for x in m.group(3).split(",")]
            if len(vals) != N:
                raise MoveError(f"diag needs {N} entries, got {len(vals)}")
            if any(not v.is_const() or v.is_zero() for v in vals):
                raise MoveError("diag entries must be nonzero constants")
            factor = Mat.diag(vals)
        Z = Z @ factor
    return Z


@dataclass(frozen=True)
class Negate:
    """``K(u) -> K(-u)``."""

    def apply(self, K: Mat) -> Mat:
        return K.subst({"u": -U})

    def to_json(self) -> dict:
        return {"move": "negate"}


@dataclass(frozen=True)
class Scale:
    """``K(u) -> g(u) K(u)``."""

    g: str

    def __post_init__(self):
        if parse(self.g).is_zero():
            raise MoveError("scale factor must be nonzero")

    def apply(self, K: Mat) -> Mat:
        return K.scale(parse(self.g))

    def to_json(self) -> dict:
        return {"move": "scale", "g": self.g}


@dataclass(frozen=True)
class Conjugate:
    """``K(u) -> phi(Z(eta/u)) K(u) Z(eta u)``.

    ``phi`` is matrix inversion for ``re`` and the antidiagonal transpose for
    ``ctre``.  ``z`` is either a symmetry word or an explicit matrix in ``u``,
    in which case it must pass the symmetry test.
    """

    z: Union[str, Mat]
    eta: str = "1"
    flavor: str = "re"

    def __post_init__(self):
        _flavor(self.flavor)
        if parse(self.eta).is_zero():
            raise MoveError("eta must be nonzero")

    def matrix(self, N: int) -> Mat:
        if isinstance(self.z, Mat):
            if self.z.n != N:
                raise MoveError(f"symmetry has dimension {self.z.n}, expected {N}")
            if not is_symmetry(N, self.z):
                raise MoveError("the supplied matrix is not a symmetry of R")
            return self.z
        return symmetry_from_word(self.z, N)

    def apply(self, K: Mat) -> Mat:
        Z = self.matrix(K.n)
        eta = parse(self.eta)
        left = Z.subst({"u": eta / U})
        right = Z.subst({"u": eta * U})
        if self.flavor == "re":
            left = inverse(left)
        else:
            left = left.transpose_w()
        return left @ K @ right

    def to_json(self) -> dict:
        z = self.z.to_json() if isinstance(self.z, Mat) else self.z
        return {"move": "conjugate", "z": z, "eta": self.eta, "flavor": self.flavor}


@dataclass(frozen=True)
class Dualize:
    """Transpose for ``re``; antidiagonal transpose with ``u -> 1/u``, ``s -> 1/s`` for ``ctre``."""

    flavor: str = "re"

    def __post_init__(self):
        _flavor(self.flavor)

    def apply(self, K: Mat) -> Mat:
        if self.flavor == "re":
            return K.transpose()
        return K.transpose_w().subst({"u": U.inv(), "s": S.inv()})

    def to_json(self) -> dict:
        return {"move": "dualize", "flavor": self.flavor}


Move = Union[Negate, Scale, Conjugate, Dualize]


def apply_move(K: Mat, move: Move) -> Mat:
    return move.apply(K)


def apply_moves(K: Mat, moves: Sequence[Move]) -> Mat:
    for mv in moves:
        K = mv.apply(K)
    return K


def move_from_json(doc) -> Move:
    if not isinstance(doc, dict) or "move" not in doc:
        raise MoveError("a move must be an object with a 'move' key")
    kind = doc["move"]
    try:
        if kind == "negate":
            return Negate()
        if kind == "scale":
            return Scale(str(doc["g"]))
        if kind == "conjugate":
            z = doc["z"]
            if isinstance(z, dict):
                z = Mat.from_json(z)
            return Conjugate(z, str(doc.get("eta", "1")), doc.get("flavor", "re"))
        if kind == "dualize":
            return Dualize(doc.get("flavor", "re"))
    except KeyError as exc:
        raise MoveError(f"move {kind!r} is missing field {exc}") from None
    raise MoveError(f"unknown move {kind!r}")


# ---------------------------------------------------------------------------
# charge conjugation


def cross_conjugate(Kt: Mat) -> Mat:
    """``K(u) = C^-1 Kt(u / tq)``: a twisted solution becomes a CtRE solution."""
    N = Kt.n
    return charge_conjugation_inv(N) @ Kt.subst({"u": U / tq(N)})


def cross_conjugate_inv(K: Mat) -> Mat:
    """``Kt(u) = C K(tq u)``."""
    N = K.n
    return charge_conjugation(N) @ K.subst({"u": tq(N) * U})


# ---------------------------------------------------------------------------
# random orbits


_SCALES = ("2", "-3", "u", "1/u", "u+1", "(u-2)/3", "u^2+5")
_ETAS = ("1", "2", "-1", "1/3", "-5/2")


def random_move(N: int, flavor: str, rng: random.Random) -> Move:
    _flavor(flavor)
    kind = rng.choice(("negate", "scale", "conjugate", "conjugate", "dualize"))
    if kind == "negate":
        return Negate()
    if kind == "scale":
        return Scale(rng.choice(_SCALES))
    if kind == "dualize":
        return Dualize(flavor)
    shape = rng.choice(("zrho", "diag", "both"))
    k = rng.choice((-1, 1, 2))
    diag = "diag(" + ",".join(str(rng.choice((1, 2, -1, 3))) for _ in range(N)) + ")"
    rho = f"zrho^{k}"
    word = {"zrho": rho, "diag": diag, "both": f"{rho}*{diag}"}[shape]
    return Conjugate(word, rng.choice(_ETAS), flavor)


def random_moves(N: int, flavor: str, depth: int, seed: int) -> List[Move]:
    rng = random.Random(seed)
    return [random_move(N, flavor, rng) for _ in range(depth)]


def random_orbit_probe(K: Mat, flavor: str, depth: int, seed: int) -> Tuple[Mat, List[Move]]:
    """Apply ``depth`` seeded random moves; returns the image and the moves used."""
    moves = random_moves(K.n, flavor, depth, seed)
    return apply_moves(K, moves), moves


__all__ = [
    "Negate",
    "Scale",
    "Conjugate",
    "Dualize",
    "Move",
    "MoveError",
    "apply_move",
    "apply_moves",
    "move_from_json",
    "cross_conjugate",
    "cross_conjugate_inv",
    "random_moves",
    "random_orbit_probe",
    "symmetry_from_word",
]
