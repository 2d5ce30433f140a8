import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectk import families as F
from reflectk.equivalence import (
    Conjugate,
    Dualize,
    MoveError,
    Negate,
    Scale,
    apply_moves,
    cross_conjugate,
    cross_conjugate_inv,
    move_from_json,
    random_moves,
    random_orbit_probe,
    symmetry_from_word,
)
from reflectk.linalg import Mat
from reflectk.rmatrix import zrho
from reflectk.scalar import ONE, Scalar
from reflectk.verify import check_CtRE, check_RE, check_tRE

U = Scalar.var("u")


def proportional(a: Mat, b: Mat):
    """Return the scalar g with a == g b, or None."""
    for ij, x in b.entries.items():
        g = a[ij] / x
        return g if a == b.scale(g) else None
    return ONE if a.is_zero() else None


@pytest.mark.parametrize("c", F.enum_sym_classes(3) + F.enum_sym_classes(4), ids=str)
def test_negate_is_mu_sign(c):
    K = F.build_KS(c)
    assert Negate().apply(K) == K.subst({"mu": -Scalar.var("mu")})


@pytest.mark.parametrize("c", F.enum_sym_classes(4), ids=str)
def test_negate_then_sign_conjugate_is_lambda_sign(c):
    K = F.build_KS(c)
    d = ",".join("-1" if i <= c.r else "1" for i in range(1, c.N + 1))
    out = apply_moves(K, [Negate(), Conjugate(f"diag({d})")])
    assert out == K.subst({"lambda": -Scalar.var("lambda")})


@pytest.mark.parametrize("c", F.enum_sym_classes(4), ids=str)
def test_transpose_fixes_KS(c):
    K = F.build_KS(c)
    assert Dualize("re").apply(K) == K


@pytest.mark.parametrize("c", F.enum_sym_classes(4), ids=str)
def test_diagonal_conjugation_gives_first_orbit_family(c):
    K = F.build_KS(c)
    out = Conjugate("diag").apply(K)
    d = lambda i: Scalar.var(f"d_{i}")
    cs = {i: d(i).inv() * d(c.sigma_of(i)) for i in range(c.l + 1, c.r + 1)}
    assert out == F.build_orbit_KS1(c.N, c.l, c.r, c.N, cs=cs)


@pytest.mark.parametrize("N", [3, 4])
def test_zrho_power_returns_multiple(N):
    K = F.build_KS(F.SymClass(N, 0, 1))
    out = apply_moves(K, [Conjugate("zrho")] * N)
    assert proportional(out, K) is not None


def test_zrho_word_powers():
    Z = symmetry_from_word("zrho^-1*zrho", 3)
    assert Z == Mat.identity(3)
    assert symmetry_from_word("zrho^3", 3) == Mat.identity(3).scale(U)
    assert symmetry_from_word("zrho^2", 4) == zrho(4) @ zrho(4)


@pytest.mark.parametrize("word", ["zrho", "zrho^-1", "diag", "diag(2,-1,3)", "zrho^2*diag(1,2,3)"])
def test_single_conjugations_preserve_re(word):
    K = F.build_KS(F.SymClass(3, 0, 1))
    for eta in ("1", "2", "-1/3"):
        assert check_RE(Conjugate(word, eta).apply(K), "sampled", 2, 5).passed


def test_conjugation_by_explicit_matrix():
    Z = zrho(3)
    K = F.build_KT(F.TriClass(3, 2, (3, 2, 1), {(1, 3)}))
    out = Conjugate(Z).apply(K)
    assert out == Conjugate("zrho").apply(K)
    with pytest.raises(MoveError, match="not a symmetry"):
        Conjugate(Mat.unit(3, 1, 2) + Mat.unit(3, 2, 1) + Mat.unit(3, 3, 3)).apply(K)
    with pytest.raises(MoveError, match="dimension"):
        Conjugate(zrho(4)).apply(K)


@pytest.mark.parametrize("kind", [k.value for k in F.TwistedKind])
def test_ctre_moves_preserve(kind):
    K = F.build_twisted(F.TwistedClass(4, kind))
    for mv in (Negate(), Scale("u+1"), Conjugate("zrho", "2", "ctre"), Conjugate("diag(1,2,3,5)", "1", "ctre"), Dualize("ctre")):
        assert check_CtRE(mv.apply(K), "sampled", 2, 3).passed, mv


@pytest.mark.parametrize("kind", ["q-onsager", "anti-diag", "pair-swap"])
def test_ctre_dualize_fixes(kind):
    K = F.build_twisted(F.TwistedClass(4, kind))
    assert Dualize("ctre").apply(K) == K


def test_ctre_dualize_half_shift_up_to_scalar():
    K = F.build_twisted(F.TwistedClass(4, "half-shift"))
    out = Dualize("ctre").apply(K)
    assert out == K.scale(U.inv())


@pytest.mark.parametrize("kind", [k.value for k in F.TwistedKind])
def test_cross_conjugation_bridge(kind):
    K = F.build_twisted(F.TwistedClass(4, kind))
    Kt = cross_conjugate_inv(K)
    assert cross_conjugate(Kt) == K
    assert check_tRE(Kt).passed and check_CtRE(K).passed
    for extra in (Mat.unit(4, 1, 1), Mat.unit(4, 1, 2, U)):
        other = Kt + extra
        assert check_tRE(other, "sampled", 2).passed == check_CtRE(cross_conjugate(other), "sampled", 2).passed
    bad = Kt + Mat.unit(4, 1, 2, U)
    assert not check_tRE(bad, "sampled", 2).passed


def test_cross_conjugate_of_block_swap():
    N, h = 4, 2
    Kt = Mat(N, {**{(i + h, i): U for i in range(1, h + 1)}, **{(i, i + h): ONE for i in range(1, h + 1)}})
    K = cross_conjugate(Kt)
    assert check_tRE(Kt).passed
    assert check_CtRE(K).passed
    # lands in the half-shift orbit family with specific constants
    s = Scalar.var("s")
    fam = F.build_twisted_orbit(N, "a4", 1, cs={1: s ** -6, 2: s ** -8})
    assert K == fam


def test_scale_and_errors():
    K = Mat.identity(2)
    assert Scale("u^2").apply(K) == K.scale(U * U)
    with pytest.raises(MoveError):
        Scale("0")
    with pytest.raises(MoveError):
        Conjugate("zrho", "0")
    with pytest.raises(MoveError):
        Dualize("sideways")
    with pytest.raises(MoveError, match="unknown symmetry"):
        symmetry_from_word("rot", 3)
    with pytest.raises(MoveError, match="needs 3"):
        symmetry_from_word("diag(1,2)", 3)
    with pytest.raises(MoveError, match="nonzero constants"):
        symmetry_from_word("diag(1,u,2)", 3)


@pytest.mark.parametrize(
    "doc, fragment",
    [({}, "'move' key"), ({"move": "spin"}, "unknown move"), ({"move": "scale"}, "missing field")],
)
def test_move_json_errors(doc, fragment):
    with pytest.raises(MoveError, match=fragment):
        move_from_json(doc)


@given(st.integers(3, 4), st.sampled_from(["re", "ctre"]), st.integers(0, 4), st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_move_json_roundtrip(N, flavor, depth, seed):
    moves = random_moves(N, flavor, depth, seed)
    assert [move_from_json(m.to_json()) for m in moves] == moves


def test_probe_depth_zero_is_identity():
    K = F.build_KS(F.SymClass(3, 0, 1))
    out, moves = random_orbit_probe(K, "re", 0, 1)
    assert out == K and moves == []


@given(st.integers(0, 10 ** 6))
@settings(max_examples=6, deadline=None)
def test_random_probe_re(seed):
    K = F.build_KS(F.SymClass(3, 0, 1))
    out, _ = random_orbit_probe(K, "re", 3, seed)
    assert check_RE(out, "sampled", 2, seed).passed


@given(st.integers(0, 10 ** 6))
@settings(max_examples=6, deadline=None)
def test_random_probe_ctre(seed):
    K = F.build_twisted(F.TwistedClass(4, "anti-diag"))
    out, _ = random_orbit_probe(K, "ctre", 3, seed)
    assert check_CtRE(out, "sampled", 2, seed).passed
