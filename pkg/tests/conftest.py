import sympy as sp
from hypothesis import strategies as st

from reflectk.scalar import Scalar

SYMS = {name: sp.Symbol(name.replace("lambda", "lam")) for name in ("s", "u", "v", "lambda", "mu", "alpha")}


def to_sympy(x: Scalar):
    """Independent reading of a Scalar: print it, then let sympy parse the text."""
    text = str(x).replace("^", "**").replace("lambda", "lam")
    local = {str(v): v for v in SYMS.values()}
    return sp.sympify(text, locals=local)


def sympy_zero(expr) -> bool:
    return sp.simplify(sp.together(expr)) == 0


# Small random rational functions over a few indeterminates.
_names = ("s", "u", "v")


@st.composite
def monomials(draw):
    exps = {n: draw(st.integers(0, 2)) for n in _names}
    coeff = draw(st.integers(-4, 4).filter(bool))
    out = Scalar.of(coeff)
    for n, e in exps.items():
        out = out * Scalar.var(n) ** e
    return out


@st.composite
def polys(draw, max_terms=3):
    terms = draw(st.lists(monomials(), min_size=1, max_size=max_terms))
    acc = Scalar.of(0)
    for t in terms:
        acc = acc + t
    return acc


@st.composite
def scalars(draw):
    num = draw(polys())
    den = draw(polys().filter(lambda p: not p.is_zero()))
    return num / den


nonzero_scalars = scalars().filter(lambda x: not x.is_zero())


# One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE = {}


def record(number: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
