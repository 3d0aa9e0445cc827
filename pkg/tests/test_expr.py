import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bosefock import ParseError, TruncatedBasis
from bosefock.bargmann import weyl_operator
from bosefock.expr import (
    Annihilate,
    Create,
    DGamma,
    Identity,
    Product,
    Scalar,
    Weyl,
    eval_expr,
    parse_expr,
    references,
    to_text,
)
from bosefock.fock import annihilation_matrix, creation_matrix, number_operator
from bosefock.quantization import d_gamma


@pytest.mark.parametrize(
    "text, ast",
    [
        ("I", Identity()),
        ("dGamma", DGamma()),
        ("adag(f1) adag(f2) a(g1) a(g2)",
         Product((Create("f1"), Create("f2"), Annihilate("g1"), Annihilate("g2")))),
        ("W(x)", Weyl("x")),
        ("2* a(f)", Product((Scalar(2 + 0j), Annihilate("f")))),
        ("(1+2i)*W(f)", Product((Scalar(1 + 2j), Weyl("f")))),
        ("-1.5e-3-2.5i * I", Product((Scalar(-1.5e-3 - 2.5j), Identity()))),
        ("i* I", Product((Scalar(1j), Identity()))),
        ("-2i*I", Product((Scalar(-2j), Identity()))),
        ("  adag( f )\n a(g)", Product((Create("f"), Annihilate("g")))),
    ],
)
def test_parse(text, ast):
    assert parse_expr(text) == ast


@pytest.mark.parametrize(
    "text, line, column, message",
    [
        ("adag(f", 1, 7, "unbalanced"),
        ("", 1, 1, "empty"),
        ("   ", 1, 4, "empty"),
        ("adag(f) foo(g)", 1, 9, "unknown term"),
        ("adag(f)\n  b(g)", 2, 3, "unknown term"),
        ("2 a(f)", 1, 1, "followed by '*'"),
        ("a(f]", 1, 4, "expected ')'"),
        ("a(1)", 1, 3, "vector name"),
        ("W f", 1, 3, "expected '('"),
        ("a(f) $", 1, 6, "unexpected character"),
    ],
)
def test_parse_errors(text, line, column, message):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert message in str(info.value)
    assert f"line {line}, column {column}" in str(info.value)


def test_references():
    assert references(parse_expr("adag(f) W(g) I a(f)")) == ["f", "g", "f"]


def test_eval_identity_and_number():
    basis = TruncatedBasis(2, 4)
    assert np.allclose(eval_expr(parse_expr("I"), basis, {}).toarray(), np.eye(basis.dim))
    n0 = eval_expr(parse_expr("adag(f) a(f)"), basis, {"f": np.array([1.0, 0.0])})
    want = (creation_matrix(basis, 0) @ annihilation_matrix(basis, 0)).toarray()
    assert np.allclose(n0.toarray(), want)


def test_eval_delegation(rng):
    basis = TruncatedBasis(2, 6)
    f = np.array([0.3, 0.2j])
    h = np.array([[1.0, 0.5j], [-0.5j, 2.0]])
    assert np.allclose(eval_expr(parse_expr("W(f)"), basis, {"f": f}).toarray(),
                       weyl_operator(basis, f).toarray())
    assert np.allclose(eval_expr(parse_expr("dGamma"), basis, {}, h).toarray(),
                       d_gamma(basis, h).toarray())
    assert np.allclose(eval_expr(parse_expr("(2-1i)*I"), basis, {}).toarray(),
                       (2 - 1j) * np.eye(basis.dim))


def test_eval_product_order():
    # leftmost factor acts last: "a(f) adag(f)" differs from "adag(f) a(f)" by I below the edge
    basis = TruncatedBasis(1, 6)
    v = {"f": np.array([1.0])}
    aa = eval_expr(parse_expr("a(f) adag(f)"), basis, v).toarray()
    na = eval_expr(parse_expr("adag(f) a(f)"), basis, v).toarray()
    assert np.allclose((aa - na)[:6, :6], np.eye(6))
    assert np.allclose(na, number_operator(basis).toarray())


def test_eval_is_multiplicative(rng):
    basis = TruncatedBasis(2, 5)
    v = {"f": rng.standard_normal(2) + 1j * rng.standard_normal(2), "g": rng.standard_normal(2)}
    h = np.diag([1.0, 3.0])
    a = parse_expr("adag(f) W(g)")
    b = parse_expr("dGamma a(g)")
    ab = parse_expr("adag(f) W(g) dGamma a(g)")
    lhs = eval_expr(ab, basis, v, h).toarray()
    rhs = eval_expr(a, basis, v, h).toarray() @ eval_expr(b, basis, v, h).toarray()
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_eval_errors():
    basis = TruncatedBasis(1, 3)
    with pytest.raises(KeyError, match="unknown vector 'g'"):
        eval_expr(parse_expr("a(g)"), basis, {})
    with pytest.raises(ValueError, match="Hamiltonian"):
        eval_expr(parse_expr("dGamma"), basis, {})
    with pytest.raises(ValueError):
        eval_expr(parse_expr("a(f)"), basis, {"f": np.ones(2)})


names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,5}", fullmatch=True)
finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
terms = st.one_of(
    st.just(Identity()),
    st.just(DGamma()),
    names.map(Create),
    names.map(Annihilate),
    names.map(Weyl),
    st.builds(lambda re, im: Scalar(complex(re, im)), finite, finite),
)


@given(st.lists(terms, min_size=1, max_size=6))
def test_round_trip(factors):
    ast = factors[0] if len(factors) == 1 else Product(tuple(factors))
    assert parse_expr(to_text(ast)) == ast


@given(st.lists(terms, min_size=1, max_size=4), st.sampled_from([" ", "  ", "\n", "\t "]))
def test_round_trip_whitespace(factors, sep):
    text = sep.join(to_text(f) for f in factors)
    ast = parse_expr(text)
    assert parse_expr(to_text(ast)) == ast
