"""Operator-expression language.

Grammar::

    expr    := term (term)*
    term    := "adag(" id ")" | "a(" id ")" | "W(" id ")" | "dGamma" | "I"
             | literal "*"
    literal := complex number such as 2, -1.5, 2i, 1+2i, 1e-3-2.5i, or one
               of these in parentheses

Juxtaposed terms multiply as written: ``A B`` applies ``B`` first, so the
leftmost factor acts last. ``dGamma`` is the second quantization of the
configured one-body Hamiltonian.
"""

import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .bargmann import weyl_operator
from .errors import ParseError
from .fock import annihilation_smeared, creation_smeared
from .quantization import d_gamma


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class DGamma:
    pass


@dataclass(frozen=True)
class Scalar:
    value: complex


@dataclass(frozen=True)
class Create:
    ref: str


@dataclass(frozen=True)
class Annihilate:
    ref: str


@dataclass(frozen=True)
class Weyl:
    ref: str


@dataclass(frozen=True)
class Product:
    factors: tuple


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_LITERAL = re.compile(
    rf"(?P<re>[+-]?{_NUM})(?:(?P<im>[+-](?:{_NUM})?)i)?(?![\w.])"
    rf"|(?P<pure>[+-]?(?:{_NUM})?)i(?![\w.])"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_LADDER = {"adag": Create, "a": Annihilate, "W": Weyl}


def _literal_value(m):
    if m.group("pure") is not None:
        text = m.group("pure")
        mag = 1.0 if text in ("", "+", "-") else abs(float(text))
        return complex(0.0, -mag if text.startswith("-") else mag)
    re_part = float(m.group("re"))
    im = m.group("im")
    if im is None:
        return complex(re_part, 0.0)
    im_part = float(im + "1") if im in ("+", "-") else float(im)
    return complex(re_part, im_part)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message, pos=None):
        line, col = self.where(pos)
        return ParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, char):
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error(f"expected '{char}' but input ended")
        if self.text[self.pos] != char:
            raise self.error(f"expected '{char}', found '{self.text[self.pos]}'")
        self.pos += 1

    def literal(self):
        start = self.pos
        paren = self.text[self.pos] == "("
        if paren:
            self.pos += 1
            self.skip_ws()
        m = _LITERAL.match(self.text, self.pos)
        if not m:
            raise self.error("expected a complex literal", self.pos)
        self.pos = m.end()
        if paren:
            self.expect(")")
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != "*":
            raise self.error("a scalar literal must be followed by '*'", start)
        self.pos += 1
        return Scalar(_literal_value(m))

    def term(self):
        start = self.pos
        ch = self.text[self.pos]
        if ch.isdigit() or ch in "+-.(":
            return self.literal()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"unexpected character '{ch}'")
        name = m.group()
        if name == "i":
            return self.literal()
        self.pos = m.end()
        if name == "I":
            return Identity()
        if name == "dGamma":
            return DGamma()
        if name in _LADDER:
            self.expect("(")
            self.skip_ws()
            ref = _IDENT.match(self.text, self.pos)
            if not ref:
                if self.pos >= len(self.text):
                    raise self.error(f"unbalanced '(' after '{name}': input ended")
                raise self.error("expected a vector name")
            self.pos = ref.end()
            self.skip_ws()
            if self.pos >= len(self.text):
                raise self.error(f"unbalanced '(' after '{name}': expected ')'")
            self.expect(")")
            return _LADDER[name](ref.group())
        raise self.error(f"unknown term '{name}'", start)

    def parse(self):
        factors = []
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("empty expression")
        while self.pos < len(self.text):
            factors.append(self.term())
            self.skip_ws()
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors))


def parse_expr(text):
    """Parse an operator expression into an AST.

    Raises
    ------
    ParseError
        With the 1-based line and column of the offending position.
    """
    return _Parser(text).parse()


def _format_complex(z):
    z = complex(z)
    sign = "-" if np.signbit(z.imag) else "+"
    return f"({z.real!r}{sign}{abs(z.imag)!r}i)"


def to_text(ast):
    """Print an AST in the grammar above; floats use ``repr`` so values round-trip."""
    if isinstance(ast, Product):
        return " ".join(to_text(f) for f in ast.factors)
    if isinstance(ast, Identity):
        return "I"
    if isinstance(ast, DGamma):
        return "dGamma"
    if isinstance(ast, Scalar):
        return _format_complex(ast.value) + "*"
    if isinstance(ast, Create):
        return f"adag({ast.ref})"
    if isinstance(ast, Annihilate):
        return f"a({ast.ref})"
    if isinstance(ast, Weyl):
        return f"W({ast.ref})"
    raise TypeError(f"not an expression node: {ast!r}")


def factors(ast):
    return ast.factors if isinstance(ast, Product) else (ast,)


def references(ast):
    """Vector names used by the expression, in order of appearance."""
    return [f.ref for f in factors(ast) if isinstance(f, (Create, Annihilate, Weyl))]


def eval_expr(ast, basis, vectors, hamiltonian=None):
    """Sparse matrix of an expression on ``basis``.

    Parameters
    ----------
    vectors : mapping
        Name to mode vector.
    hamiltonian : array_like, optional
        One-body matrix used by ``dGamma``.
    """
    def lookup(ref):
        try:
            return vectors[ref]
        except KeyError:
            raise KeyError(f"unknown vector '{ref}'") from None

    out = sp.identity(basis.dim, dtype=np.complex128, format="csr")
    for f in factors(ast):
        if isinstance(f, Identity):
            continue
        if isinstance(f, Scalar):
            out = f.value * out
        elif isinstance(f, Create):
            out = out @ creation_smeared(basis, lookup(f.ref))
        elif isinstance(f, Annihilate):
            out = out @ annihilation_smeared(basis, lookup(f.ref))
        elif isinstance(f, Weyl):
            out = out @ weyl_operator(basis, lookup(f.ref))
        elif isinstance(f, DGamma):
            if hamiltonian is None:
                raise ValueError("dGamma needs a one-body Hamiltonian")
            out = out @ d_gamma(basis, hamiltonian)
        else:
            raise TypeError(f"not an expression node: {f!r}")
    return out.tocsr()
