"""The trigonometric R-matrix of type A and its charge-conjugated partner.

Conventions: ``q = -s^2`` so that every half-integer power of ``-q`` is an
integer power of ``s``; in particular ``(-q)^(1/2) = s`` and the twist
parameter ``tq = (-q)^(N/2) = s^N``.  Inverting ``q`` is the substitution
``s -> 1/s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from reflectk.linalg import (
    Mat,
    flat,
    flip,
    inverse,
    kron,
    on_leg,
    permutation_P,
    transpose_t1,
    w_tensor_w,
)
from reflectk.scalar import ONE, Scalar

S = Scalar.var("s")
U = Scalar.var("u")
V = Scalar.var("v")
Q = -S * S
QI = Q.inv()
S_INV = S.inv()


def bar(i: int, N: int) -> int:
    return N + 1 - i


def tq(N: int) -> Scalar:
    return S ** N


def f_q(x: Scalar, inverse_q: bool = False) -> Scalar:
    """``1 / (q - q^-1 x)``, or the same with ``q`` inverted."""
    a, b = (QI, Q) if inverse_q else (Q, QI)
    return (a - b * x).inv()


def constant_R(N: int, inverse_q: bool = False) -> Mat:
    """The finite-type R-matrix ``R_q`` (or ``R_{q^-1}``)."""
    q = QI if inverse_q else Q
    qi = Q if inverse_q else QI
    out = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            out[(flat((i, j), N), flat((i, j), N))] = q if i == j else ONE
            if i < j:
                out[(flat((i, j), N), flat((j, i), N))] = q - qi
    return Mat(N * N, out)


def charge_conjugation(N: int) -> Mat:
    """``C = sum_i (-q)^i E_{N-i+1, i}``."""
    return Mat(N, {(bar(i, N), i): S ** (2 * i) for i in range(1, N + 1)})


def charge_conjugation_inv(N: int) -> Mat:
    return Mat(N, {(i, bar(i, N)): S ** (-2 * i) for i in range(1, N + 1)})


def constant_RC(N: int, inverse_q: bool = False) -> Mat:
    """The finite part of the charge-conjugated R-matrix."""
    q = QI if inverse_q else Q
    qi = Q if inverse_q else QI
    mq = S_INV ** 2 if inverse_q else S ** 2  # -q
    out = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            key = (flat((i, bar(j, N)), N), flat((i, bar(j, N)), N))
            out[key] = q if i == j else ONE
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            key = (flat((j, bar(j, N)), N), flat((i, bar(i, N)), N))
            out[key] = out.get(key, Scalar.of(0)) + mq ** (j - i) * (q - qi)
    return Mat(N * N, out)


def _affine(x: Scalar, a: Mat, b: Mat) -> Mat:
    return a.scale(f_q(x)) + b.scale(f_q(x.inv(), inverse_q=True))


@dataclass(frozen=True)
class RBundle:
    """Every R-matrix flavour for one rank, built once and reused."""

    N: int
    P: Mat
    R_q: Mat
    R: Mat
    Rcheck: Mat
    C: Mat
    C_inv: Mat
    RC_q: Mat
    RC: Mat
    RCcheck: Mat

    def R_at(self, x) -> Mat:
        return self.R.subst({"u": x})

    def RC_at(self, x) -> Mat:
        return self.RC.subst({"u": x})

    @property
    def Rcheck_q(self) -> Mat:
        return self.P @ self.R_q

    @property
    def RCcheck_q(self) -> Mat:
        return self.P @ self.RC_q


@lru_cache(maxsize=None)
def build(N: int) -> RBundle:
    if N < 2:
        raise ValueError("rank N must be at least 2")
    P = permutation_P(N)
    Rq = constant_R(N)
    Rqi = constant_R(N, inverse_q=True)
    R = _affine(U, Rq, P @ Rqi @ P)
    RCq = constant_RC(N)
    RCqi = constant_RC(N, inverse_q=True)
    t2 = tq(N) ** 2
    RC = RCq.scale(f_q(t2 / U)) + (P @ RCqi @ P).scale(f_q(U / t2, inverse_q=True))
    return RBundle(
        N=N,
        P=P,
        R_q=Rq,
        R=R,
        Rcheck=P @ R,
        C=charge_conjugation(N),
        C_inv=charge_conjugation_inv(N),
        RC_q=RCq,
        RC=RC,
        RCcheck=P @ RC,
    )


def R_matrix(N: int, x=None) -> Mat:
    b = build(N)
    return b.R if x is None else b.R_at(x)


def RC_matrix(N: int, x=None) -> Mat:
    b = build(N)
    return b.RC if x is None else b.RC_at(x)


def RC_from_definition(N: int) -> Mat:
    """``C2^-1 R^{t1}(tq^2 / u) C2``, built directly from the R-matrix."""
    b = build(N)
    I = Mat.identity(N)
    Rt1 = transpose_t1(b.R_at(tq(N) ** 2 / U))
    return kron(I, b.C_inv) @ Rt1 @ kron(I, b.C)


def invert_q(m: Mat) -> Mat:
    return m.subst({"s": S_INV})


# ---------------------------------------------------------------------------
# structural properties


def check_R21(N: int) -> bool:
    """Conjugating by any invertible antidiagonal ``J (x) J`` yields ``R21 = R^t``."""
    J = Mat(N, {(i, bar(i, N)): Scalar.var(f"d_{i}") for i in range(1, N + 1)})
    JJ = kron(J, J)
    R = build(N).R
    lhs = JJ @ R @ inverse(JJ)
    return lhs == flip(R) and flip(R) == R.transpose()


def check_Rbar(N: int) -> bool:
    R = build(N).R
    return invert_q(R.subst({"u": U.inv()})) == flip(R)


def check_wR(N: int) -> bool:
    R = build(N).R
    return w_tensor_w(invert_q(R.subst({"u": U.inv()}))) == flip(R)


def check_wRC(N: int) -> bool:
    RC = build(N).RC
    return w_tensor_w(invert_q(flip(RC).subst({"u": U.inv()}))) == RC


def check_hecke(N: int) -> bool:
    """``(Rc_q - q)(Rc_q + q^-1) = 0`` for ``Rc_q = P R_q``."""
    b = build(N)
    Rc = b.Rcheck_q
    I = Mat.identity(N * N)
    return ((Rc - I.scale(Q)) @ (Rc + I.scale(QI))).is_zero()


def check_baxterisation(N: int) -> bool:
    """``Rc(u) = f_q(u) ((1 - u) Rc_q + (q - q^-1) u I)``."""
    b = build(N)
    I = Mat.identity(N * N)
    rhs = (b.Rcheck_q.scale(1 - U) + I.scale((Q - QI) * U)).scale(f_q(U))
    return rhs == b.Rcheck


def zrho(N: int, var: str = "u") -> Mat:
    """The cyclic shift symmetry ``sum E_{i,i+1} + u E_{N,1}``; its N-th power is ``u I``."""
    out = {(i, i + 1): ONE for i in range(1, N)}
    out[(N, 1)] = Scalar.var(var)
    return Mat(N, out)


def is_symmetry(N: int, Z: Mat) -> bool:
    """Whether ``[R(u/v), Z(u) (x) Z(v)] = 0`` with ``Z`` written in ``u``."""
    R = build(N).R_at(U / V)
    ZZ = kron(Z, Z.subst({"u": V}))
    return R @ ZZ == ZZ @ R


def leg(K: Mat, which: int) -> Mat:
    return on_leg(K, which, 2)


__all__ = [
    "RBundle",
    "build",
    "R_matrix",
    "RC_matrix",
    "RC_from_definition",
    "constant_R",
    "constant_RC",
    "charge_conjugation",
    "charge_conjugation_inv",
    "zrho",
    "is_symmetry",
    "tq",
    "bar",
    "f_q",
    "invert_q",
    "check_R21",
    "check_Rbar",
    "check_wR",
    "check_wRC",
    "check_hecke",
    "check_baxterisation",
    "S",
    "U",
    "V",
    "Q",
    "QI",
]
