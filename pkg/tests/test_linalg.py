import json

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sympy_zero, to_sympy
from reflectk.linalg import (
    Mat,
    MatrixFormatError,
    SingularMatrixError,
    clear_denominators,
    det,
    embed,
    flip,
    inverse,
    kron,
    permutation_P,
    split,
    flat,
    transpose_t1,
    transpose_t2,
    w_tensor_w,
)
from reflectk.scalar import ONE, Scalar

u, s = Scalar.var("u"), Scalar.var("s")


def small_mats(n):
    entry = st.one_of(st.integers(-3, 3).map(Scalar.of), st.sampled_from([u, s, u + 1, s * u - 2, ONE / u]))
    return st.lists(entry, min_size=n * n, max_size=n * n).map(
        lambda xs: Mat(n, {(i // n + 1, i % n + 1): x for i, x in enumerate(xs)})
    )


def to_sp(m: Mat) -> sp.Matrix:
    return sp.Matrix(m.n, m.n, lambda i, j: to_sympy(m[(i + 1, j + 1)]))


def test_basic_algebra():
    a = Mat.from_rows([[1, u], [0, 2]])
    b = Mat.unit(2, 2, 1, s)
    assert (a @ b)[(1, 1)] == u * s
    assert (a + b)[(2, 1)] == s
    assert (a - a).is_zero()
    assert a @ Mat.identity(2) == a
    assert a ** 0 == Mat.identity(2)
    assert a ** -1 @ a == Mat.identity(2)


def test_inverse_of_cycle():
    m = Mat.unit(3, 1, 2) + Mat.unit(3, 2, 3) + Mat.unit(3, 3, 1, u)
    inv = inverse(m)
    assert m @ inv == Mat.identity(3)
    assert inv[(1, 3)] == ONE / u


def test_singular():
    m = Mat.from_rows([[1, u], [2, 2 * u]])
    with pytest.raises(SingularMatrixError):
        inverse(m)
    assert det(m).is_zero()


@given(small_mats(3))
@settings(max_examples=25, deadline=None)
def test_det_against_sympy(m):
    assert sympy_zero(to_sympy(det(m)) - to_sp(m).det())


@given(small_mats(3))
@settings(max_examples=20, deadline=None)
def test_inverse_property(m):
    if det(m).is_zero():
        return
    assert inverse(m) @ m == Mat.identity(3)


@given(small_mats(2), small_mats(2), small_mats(2), small_mats(2))
@settings(max_examples=15, deadline=None)
def test_kron_mixed_product(a, b, c, d):
    assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


@given(small_mats(4))
@settings(max_examples=20, deadline=None)
def test_partial_transposes_are_involutions(x):
    assert transpose_t1(transpose_t1(x)) == x
    assert transpose_t2(transpose_t2(x)) == x
    assert transpose_t2(transpose_t1(x)) == x.transpose()
    assert flip(flip(x)) == x
    assert w_tensor_w(w_tensor_w(x)) == x


@given(small_mats(2), small_mats(2))
@settings(max_examples=15, deadline=None)
def test_flip_swaps_factors(a, b):
    P = permutation_P(2)
    assert flip(kron(a, b)) == kron(b, a)
    assert P @ kron(a, b) @ P == kron(b, a)


def test_embed_braid_of_P():
    N = 2
    P = permutation_P(N)
    P12, P23, P13 = embed(P, (1, 2), N), embed(P, (2, 3), N), embed(P, (1, 3), N)
    assert P12 @ P23 @ P12 == P23 @ P12 @ P23
    assert P12 @ P23 @ P12 == P13
    assert embed(P, (2, 1), N) == P12


def test_embed_places_leg():
    a = Mat.from_rows([[1, u], [s, 2]])
    I = Mat.identity(2)
    assert embed(a, (1,), 2) == kron(kron(a, I), I)
    assert embed(a, (3,), 2) == kron(kron(I, I), a)


def test_split_flat_roundtrip():
    for idx in range(1, 28):
        assert flat(split(idx, 3, 3), 3) == idx


def test_transpose_w():
    m = Mat.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    w = m.transpose_w()
    assert w[(1, 1)] == Scalar.of(9)
    assert w[(1, 3)] == Scalar.of(3)
    assert w[(1, 2)] == Scalar.of(6)
    assert w.transpose_w() == m


def test_clear_denominators():
    m = Mat.from_rows([[ONE / u, s / (u + 1)], [2, (u - s) / (3 * u)]])
    c, P = clear_denominators(m)
    back = Mat(2, {ij: Scalar(p) / c for ij, p in P.entries.items()})
    assert back == m


class TestJson:
    def test_roundtrip(self):
        m = Mat.from_rows([[ONE / (s - u), 0], [u ** 2, Scalar.var("lambda")]])
        assert Mat.loads(m.dumps()) == m

    def test_integer_values_allowed(self):
        m = Mat.from_json({"dim": 1, "entries": [{"row": 1, "col": 1, "value": 3}]})
        assert m[(1, 1)] == Scalar.of(3)

    @pytest.mark.parametrize(
        "doc, fragment",
        [
            ([], "JSON object"),
            ({"dim": 2}, "'dim' and 'entries'"),
            ({"dim": 0, "entries": []}, "positive integer"),
            ({"dim": 2, "entries": [{"row": 3, "col": 1, "value": "1"}]}, "entry 0"),
            ({"dim": 2, "entries": [{"row": 1, "col": 1, "value": "1"}, {"row": 1, "col": 1, "value": "2"}]}, "entry 1: duplicate"),
            ({"dim": 2, "entries": [{"row": 1, "col": 1, "value": "u +"}]}, "entry 0 at (1, 1)"),
            ({"dim": 2, "entries": [{"row": 1, "col": 1}]}, "needs"),
        ],
    )
    def test_errors(self, doc, fragment):
        with pytest.raises(MatrixFormatError) as info:
            Mat.from_json(doc)
        assert fragment in str(info.value)

    def test_bad_text(self):
        with pytest.raises(MatrixFormatError):
            Mat.loads("{not json")

    def test_stable_order(self):
        m = Mat.from_rows([[0, 1], [u, 0]])
        doc = json.loads(m.dumps())
        assert [(e["row"], e["col"]) for e in doc["entries"]] == [(1, 2), (2, 1)]
