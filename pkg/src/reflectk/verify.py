"""Checks of the Yang-Baxter, reflection and twisted reflection equations.

Every equation checked here has the shape ``A1 A2 ... = B1 B2 ...`` where both
sides are products of the same multiset of factor matrices.  Rescaling a
factor by a nonzero scalar therefore rescales both sides equally, so in
symbolic mode each factor is replaced by a polynomial multiple of itself and
the products are formed over the polynomial ring.  Sampled mode evaluates the
factors at seeded rational points instead.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence

from reflectk.linalg import Mat, SingularMatrixError, clear_denominators, embed, flip, inverse, on_leg, transpose_t1
from reflectk.rmatrix import QI, Q, S, U, V, build
from reflectk.scalar import ONE, PoleError, Poly, Scalar

MODES = ("symbolic", "sampled")


@dataclass
class Witness:
    row: int
    col: int
    residual: str
    point: Optional[Dict[str, str]] = None

    def to_json(self) -> dict:
        out = {"row": self.row, "col": self.col, "residual": self.residual}
        if self.point is not None:
            out["point"] = self.point
        return out


@dataclass
class VerifyReport:
    equation: str
    mode: str
    passed: bool
    witness: Optional[Witness] = None
    details: Dict[str, object] = field(default_factory=dict)
    rejected_points: List[Dict[str, str]] = field(default_factory=list)
    seed: Optional[int] = None
    samples: Optional[int] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        out = {"equation": self.equation, "mode": self.mode, "pass": self.passed}
        out["witness"] = self.witness.to_json() if self.witness else None
        if self.details:
            out["details"] = {
                k: (v.to_json() if isinstance(v, VerifyReport) else v) for k, v in self.details.items()
            }
        if self.mode == "sampled":
            out["seed"] = self.seed
            out["samples"] = self.samples
            out["rejected_points"] = self.rejected_points
        return out


# ---------------------------------------------------------------------------
# the two comparison engines


def first_difference(lhs: Mat, rhs: Mat):
    """Lexicographically first ``(row, col, residual)`` where the sides differ."""
    keys = sorted(set(lhs.entries) | set(rhs.entries))
    for ij in keys:
        d = lhs[ij] - rhs[ij]
        if d:
            return ij[0], ij[1], d
    return None


def _prod(mats: Sequence[Mat]) -> Mat:
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def _poly_matrix(m: Mat) -> Mat:
    if m.entries and all(isinstance(x, Scalar) and x.has_trivial_den() for x in m.entries.values()):
        return Mat(m.n, {ij: x.num for ij, x in m.entries.items()}, Poly())
    return clear_denominators(m)[1]


def _symbolic(equation: str, factors: Dict[str, Mat], lhs: Sequence[str], rhs: Sequence[str]) -> VerifyReport:
    poly = {k: _poly_matrix(m) for k, m in factors.items()}
    L = _prod([poly[k] for k in lhs])
    R = _prod([poly[k] for k in rhs])
    diff = first_difference(L, R)
    if diff is None:
        return VerifyReport(equation, "symbolic", True)
    i, j, d = diff
    return VerifyReport(equation, "symbolic", False, Witness(i, j, str(d)))


# Sample values avoid 0 and +-1 for s and u-like variables, so that q is not a
# root of unity and spectral parameters are generic.
_SAMPLE_NUMS = [2, 3, 5, 7, 11, 13, -2, -3, -5, -7]
_SAMPLE_DENS = [1, 1, 1, 2, 3, 5]


def _draw(rng: random.Random) -> Fraction:
    while True:
        x = Fraction(rng.choice(_SAMPLE_NUMS), rng.choice(_SAMPLE_DENS))
        if abs(x) != 1:
            return x


def sample_points(names: Sequence[str], k: int, seed: int, fixed: Mapping[str, Fraction] | None = None):
    rng = random.Random(seed)
    while True:
        pt = {n: _draw(rng) for n in sorted(names)}
        if fixed:
            pt.update(fixed)
        yield pt


def _fmt_point(pt) -> Dict[str, str]:
    return {k: str(v) for k, v in sorted(pt.items())}


def _sampled(
    equation: str,
    factors: Dict[str, Mat],
    lhs: Sequence[str],
    rhs: Sequence[str],
    samples: int,
    seed: int,
    max_rejects: int = 200,
) -> VerifyReport:
    names = set()
    for m in factors.values():
        names |= m.names()
    rep = VerifyReport(equation, "sampled", True, seed=seed, samples=samples)
    points = sample_points(sorted(names), samples, seed)
    done = 0
    while done < samples:
        pt = next(points)
        try:
            vals = {k: m.evaluate(pt) for k, m in factors.items()}
        except PoleError:
            rep.rejected_points.append(_fmt_point(pt))
            if len(rep.rejected_points) > max_rejects:
                raise RuntimeError("too many sample points hit poles")
            continue
        done += 1
        diff = first_difference(_prod([vals[k] for k in lhs]), _prod([vals[k] for k in rhs]))
        if diff is not None:
            i, j, d = diff
            rep.passed = False
            rep.witness = Witness(i, j, str(d), _fmt_point(pt))
            return rep
    return rep


def run(
    equation: str,
    factors: Dict[str, Mat],
    lhs: Sequence[str],
    rhs: Sequence[str],
    mode: str = "symbolic",
    samples: int = 8,
    seed: int = 0,
) -> VerifyReport:
    """Compare ``prod(lhs)`` against ``prod(rhs)`` of named factor matrices."""
    if mode == "symbolic":
        return _symbolic(equation, factors, lhs, rhs)
    if mode == "sampled":
        if samples < 1:
            raise ValueError("sampled mode needs at least one sample")
        return _sampled(equation, factors, lhs, rhs, samples, seed)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def _combine(equation: str, mode: str, parts: Dict[str, VerifyReport]) -> VerifyReport:
    ok = all(p.passed for p in parts.values())
    rep = VerifyReport(equation, mode, ok, details=dict(parts))
    for p in parts.values():
        if not p.passed:
            rep.witness = p.witness
            break
    first = next(iter(parts.values()))
    rep.seed, rep.samples = first.seed, first.samples
    for p in parts.values():
        rep.rejected_points.extend(p.rejected_points)
    return rep


# ---------------------------------------------------------------------------
# equations


def _check_K(K: Mat, N: int) -> None:
    if K.n != N:
        raise ValueError(f"K has dimension {K.n}, expected {N}")
    if "v" in K.names():
        raise ValueError("K must not depend on the second spectral indeterminate v")


def check_YBE(N: int, mode: str = "symbolic", samples: int = 8, seed: int = 0) -> VerifyReport:
    """``R12(u) R13(uv) R23(v) = R23(v) R13(uv) R12(u)``."""
    b = build(N)
    factors = {
        "R12": embed(b.R_at(U), (1, 2), N),
        "R13": embed(b.R_at(U * V), (1, 3), N),
        "R23": embed(b.R_at(V), (2, 3), N),
    }
    return run("ybe", factors, ["R12", "R13", "R23"], ["R23", "R13", "R12"], mode, samples, seed)


def _K_at(K: Mat, x: Scalar) -> Mat:
    return K.subst({"u": x})


def check_RE(K: Mat, mode: str = "symbolic", samples: int = 8, seed: int = 0,
             braided: bool | None = None) -> VerifyReport:
    """The untwisted reflection equation, in its plain and braided forms.

    Plain: ``R21(u/v) K1(u) R(uv) K2(v) = K2(v) R21(uv) K1(u) R(u/v)``.
    Braided: ``Rc(u/v) K2(u) Rc(uv) K2(v) = K2(v) Rc(uv) K2(u) Rc(u/v)``.
    """
    N = K.n
    _check_K(K, N)
    b = build(N)
    Ku, Kv = _K_at(K, U), _K_at(K, V)
    parts = {}
    if braided in (None, False):
        R_uv, R_ratio = b.R_at(U * V), b.R_at(U / V)
        f = {
            "R21r": flip(R_ratio), "K1u": on_leg(Ku, 1), "Ruv": R_uv, "K2v": on_leg(Kv, 2),
            "R21uv": flip(R_uv), "Rr": R_ratio,
        }
        parts["plain"] = run("re", f, ["R21r", "K1u", "Ruv", "K2v"], ["K2v", "R21uv", "K1u", "Rr"],
                             mode, samples, seed)
    if braided in (None, True):
        P = b.P
        f = {
            "Rcr": P @ b.R_at(U / V), "K2u": on_leg(Ku, 2), "Rcuv": P @ b.R_at(U * V), "K2v": on_leg(Kv, 2),
        }
        parts["braided"] = run("re", f, ["Rcr", "K2u", "Rcuv", "K2v"], ["K2v", "Rcuv", "K2u", "Rcr"],
                               mode, samples, seed)
    return _combine("re", mode, parts)


def check_tRE(K: Mat, mode: str = "symbolic", samples: int = 8, seed: int = 0) -> VerifyReport:
    """``R(u/v) K1(u) R^{t1}(1/(uv)) K2(v) = K2(v) R^{t1}(1/(uv)) K1(u) R(u/v)``."""
    N = K.n
    _check_K(K, N)
    b = build(N)
    Rt = transpose_t1(b.R_at((U * V).inv()))
    f = {
        "Rr": b.R_at(U / V), "K1u": on_leg(_K_at(K, U), 1), "Rt": Rt, "K2v": on_leg(_K_at(K, V), 2),
    }
    rep = run("tre", f, ["Rr", "K1u", "Rt", "K2v"], ["K2v", "Rt", "K1u", "Rr"], mode, samples, seed)
    return rep


def check_CtRE(K: Mat, mode: str = "symbolic", samples: int = 8, seed: int = 0,
               braided: bool | None = None) -> VerifyReport:
    """The cross-conjugated twisted reflection equation, plain and braided.

    Plain: ``R21(u/v) K1(u) Rv(uv) K2(v) = K2(v) Rv21(uv) K1(u) R(u/v)``.
    Braided: ``Rc(u/v) K2(u) Rvc(uv) K2(v) = K2(v) Rvc(uv) K2(u) Rc(u/v)``.
    """
    N = K.n
    _check_K(K, N)
    b = build(N)
    Ku, Kv = _K_at(K, U), _K_at(K, V)
    parts = {}
    if braided in (None, False):
        RC_uv, R_ratio = b.RC_at(U * V), b.R_at(U / V)
        f = {
            "R21r": flip(R_ratio), "K1u": on_leg(Ku, 1), "RCuv": RC_uv, "K2v": on_leg(Kv, 2),
            "RC21uv": flip(RC_uv), "Rr": R_ratio,
        }
        parts["plain"] = run("ctre", f, ["R21r", "K1u", "RCuv", "K2v"], ["K2v", "RC21uv", "K1u", "Rr"],
                             mode, samples, seed)
    if braided in (None, True):
        P = b.P
        f = {
            "Rcr": P @ b.R_at(U / V), "K2u": on_leg(Ku, 2), "RCcuv": P @ b.RC_at(U * V), "K2v": on_leg(Kv, 2),
        }
        parts["braided"] = run("ctre", f, ["Rcr", "K2u", "RCcuv", "K2v"], ["K2v", "RCcuv", "K2u", "Rcr"],
                               mode, samples, seed)
    return _combine("ctre", mode, parts)


# ---------------------------------------------------------------------------
# constant-matrix identities


def _report(equation: str, lhs: Mat, rhs: Mat) -> VerifyReport:
    diff = first_difference(lhs, rhs)
    if diff is None:
        return VerifyReport(equation, "symbolic", True)
    i, j, d = diff
    return VerifyReport(equation, "symbolic", False, Witness(i, j, str(d)))


def check_const_identities(G: Mat, Qm: Mat, l: int | None = None) -> VerifyReport:
    """The quadratic/cubic relations for ``(G, Q)`` and the four constant braid relations."""
    N = G.n
    lam = Scalar.var("lambda")
    I = Mat.identity(N)
    Z = Mat(N)
    has_q = not Qm.is_zero() if l is None else l > 0
    parts: Dict[str, VerifyReport] = {}
    quad = (G - I.scale(lam)) @ (G + I.scale(lam.inv()))
    if not has_q:
        parts["quadratic"] = _report("quadratic", quad, Z)
    else:
        parts["cubic"] = _report("cubic", quad @ G, Z)
        parts["Q-idempotent"] = _report("Q-idempotent", Qm @ Qm, Qm)
        parts["GQ-zero"] = _report("GQ-zero", G @ Qm, Z)
        parts["QG-zero"] = _report("QG-zero", Qm @ G, Z)
        parts["Q-from-G"] = _report("Q-from-G", Qm, I + G.scale(lam - lam.inv()) - G @ G)
    b = build(N)
    Rc = b.Rcheck_q
    G2 = on_leg(G, 2)
    Q2 = on_leg(Qm, 2)
    qq = Q - QI
    parts["braid-GG"] = _report("braid-GG", Rc @ G2 @ Rc @ G2, G2 @ Rc @ G2 @ Rc)
    parts["braid-GQ"] = _report("braid-GQ", Rc @ G2 @ Rc @ Q2, Q2 @ Rc @ G2 @ Rc)
    parts["braid-QQ"] = _report("braid-QQ", Rc @ Q2 @ Rc @ Q2 - Q2 @ Rc @ Q2 @ Rc, (Rc @ Q2 - Q2 @ Rc).scale(qq))
    parts["braid-QG"] = _report("braid-QG", Rc @ Q2 @ Rc @ G2 - G2 @ Rc @ Q2 @ Rc, (Q2 @ Rc @ G2 - G2 @ Rc @ Q2).scale(qq))
    return _combine("const", "symbolic", parts)


def check_const_twisted(G: Mat) -> VerifyReport:
    """``Rc_q G2 (Rvc_q)^-1 G2 = G2 (Rvc_q)^-1 G2 Rc_q``."""
    b = build(G.n)
    Rc = b.Rcheck_q
    RCi = inverse(b.RCcheck_q)
    G2 = on_leg(G, 2)
    rep = _report("const-ctre", Rc @ G2 @ RCi @ G2, G2 @ RCi @ G2 @ Rc)
    return rep


# ---------------------------------------------------------------------------
# unitarity and regularity


def check_unitary(K: Mat) -> VerifyReport:
    """``K(u) K(1/u) = I``."""
    lhs = K @ K.subst({"u": U.inv()})
    return _report("unitary", lhs, Mat.identity(K.n))


def _pass_witness(lhs: Mat, rhs: Mat):
    diff = first_difference(lhs, rhs)
    if diff is None:
        return True, None
    i, j, d = diff
    return False, Witness(i, j, str(d))


def check_regular(K: Mat) -> VerifyReport:
    """``K(1) = I`` or ``K(-1) = I``, removing singularities where possible."""
    I = Mat.identity(K.n)
    details: Dict[str, object] = {}
    witness = None
    for label, val in (("u=1", 1), ("u=-1", -1)):
        try:
            Kv = K.subst({"u": val})
        except PoleError as exc:
            details[label] = f"pole: {exc}"
            continue
        ok, w = _pass_witness(Kv, I)
        details[label] = "identity" if ok else "not identity"
        if ok:
            return VerifyReport("regular", "symbolic", True, details=details)
        witness = witness or w
    return VerifyReport("regular", "symbolic", False, witness, details=details)


def check(K: Mat, equation: str, mode: str = "symbolic", samples: int = 8, seed: int = 0) -> VerifyReport:
    """Dispatch by equation name."""
    if equation == "re":
        return check_RE(K, mode, samples, seed)
    if equation == "tre":
        return check_tRE(K, mode, samples, seed)
    if equation == "ctre":
        return check_CtRE(K, mode, samples, seed)
    if equation == "unitary":
        return check_unitary(K)
    if equation == "regular":
        return check_regular(K)
    if equation == "const-ctre":
        return check_const_twisted(K)
    raise ValueError(f"unknown equation {equation!r}")


EQUATIONS = ("re", "tre", "ctre", "unitary", "regular", "const-ctre")
