"""Exact arithmetic in the fraction field Q(x_1..x_{n-1}, x_0, x_inf).

The variables are the exponentials x_j = e^{2*pi*i*c_j} of the local
exponents; x_n is never a generator, it is the derived monomial
(x_1 ... x_{n-1})^{-1}, which makes the constraint c_1 + ... + c_n = 0 hold
identically.  Elements are kept in reduced canonical form (gcd cancelled),
so equality is plain structural comparison; cross-multiplication tests
agree with it and are used by the independent checkers in the tests.

Backed by sympy's sparse polynomial fields; this module owns the Laurent
handling (involution x -> 1/x, parameter shifts) and numeric specialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import QQ
from sympy.polys.fields import field as _sympy_field

from .errors import (DenominatorVanishes, DivisionByZero, IndexOutOfRange,
                     SingularMatrix)

#: relative threshold below which a specialized denominator counts as zero
EVAL_TOL = 1e-10


class SymContext:
    """Field context for a fixed number of punctures n (>= 2)."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        self.var_names = [f"x{j}" for j in range(1, n)] + ["x0", "xinf"]
        created = _sympy_field(" ".join(self.var_names), QQ)
        self.field = created[0]
        self._gens = list(created[1:])
        self.ring = self.field.ring
        self.nvars = n + 1

    # --- element constructors ------------------------------------------

    def _wrap(self, frac) -> "SymRat":
        return SymRat(self, frac)

    @property
    def zero(self) -> "SymRat":
        return self._wrap(self.field.zero)

    @property
    def one(self) -> "SymRat":
        return self._wrap(self.field.one)

    def from_fraction(self, q) -> "SymRat":
        q = Fraction(q)
        return self._wrap(self.field.ground_new(QQ(q.numerator, q.denominator)))

    def x(self, j: int) -> "SymRat":
        """x_j for j = 1..n; x_n expands to (x_1...x_{n-1})^{-1}."""
        if not 1 <= j <= self.n:
            raise IndexOutOfRange(f"x index {j} outside 1..{self.n}")
        if j < self.n:
            return self._wrap(self._gens[j - 1])
        prod = self.field.one
        for g in self._gens[: self.n - 1]:
            prod = prod * g
        return self._wrap(1 / prod)

    def x0(self) -> "SymRat":
        return self._wrap(self._gens[self.n - 1])

    def xinf(self) -> "SymRat":
        return self._wrap(self._gens[self.n])

    def x_partial(self, j: int) -> "SymRat":
        """X_j = x_1 x_2 ... x_j (empty product for j = 0)."""
        if not 0 <= j <= self.n:
            raise IndexOutOfRange(f"partial-product index {j} outside 0..{self.n}")
        out = self.one
        for i in range(1, j + 1):
            out = out * self.x(i)
        return out

    def monomial(self, exponents) -> "SymRat":
        """Monomial with integer (possibly negative) exponent vector."""
        if len(exponents) != self.nvars:
            raise ValueError("exponent vector has wrong length")
        out = self.field.one
        for g, e in zip(self._gens, exponents):
            if e >= 0:
                out = out * g ** e
            else:
                out = out / g ** (-e)
        return self._wrap(out)


_CONTEXTS: dict[int, SymContext] = {}


def get_context(n: int) -> SymContext:
    if n not in _CONTEXTS:
        _CONTEXTS[n] = SymContext(n)
    return _CONTEXTS[n]


def _recip_terms(terms, nvars):
    """Terms of p(1/x) * x^D as (shifted monomial, coeff) plus the shift D."""
    if not terms:
        return [], (0,) * nvars
    maxdeg = [0] * nvars
    for mono, _ in terms:
        for i, e in enumerate(mono):
            maxdeg[i] = max(maxdeg[i], e)
    shifted = [(tuple(maxdeg[i] - mono[i] for i in range(nvars)), coeff)
               for mono, coeff in terms]
    return shifted, tuple(maxdeg)


class SymRat:
    """Exact rational function in the exponential variables."""

    __slots__ = ("ctx", "frac")

    def __init__(self, ctx: SymContext, frac):
        self.ctx = ctx
        self.frac = frac

    # --- ring operations -------------------------------------------------

    def _coerce(self, other) -> "SymRat":
        if isinstance(other, SymRat):
            if other.ctx is not self.ctx:
                raise ValueError("operands from different field contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return SymRat(self.ctx, self.frac + other.frac)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return SymRat(self.ctx, self.frac - other.frac)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return SymRat(self.ctx, other.frac - self.frac)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return SymRat(self.ctx, self.frac * other.frac)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.frac:
            raise DivisionByZero("division by the zero rational function")
        return SymRat(self.ctx, self.frac / other.frac)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.frac:
            raise DivisionByZero("division by the zero rational function")
        return SymRat(self.ctx, other.frac / self.frac)

    def __neg__(self):
        return SymRat(self.ctx, -self.frac)

    def __pow__(self, k: int):
        if k < 0:
            if not self.frac:
                raise DivisionByZero("negative power of zero")
            return SymRat(self.ctx, self.frac ** k)
        return SymRat(self.ctx, self.frac ** k)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # canonical reduced forms make cross-multiplication and structural
        # comparison coincide
        return self.frac == other.frac

    def __hash__(self):
        return hash((id(self.ctx), self.frac))

    @property
    def is_zero(self) -> bool:
        return not self.frac

    # --- field symmetries -------------------------------------------------

    def involution(self) -> "SymRat":
        """Send every variable x to x^{-1} (all exponents c -> -c)."""
        nv = self.ctx.nvars
        num_terms, dnum = _recip_terms(list(self.frac.numer.terms()), nv)
        den_terms, dden = _recip_terms(list(self.frac.denom.terms()), nv)
        ring = self.ctx.ring
        num = ring.from_dict(dict(num_terms))
        den = ring.from_dict(dict(den_terms))
        # f(1/x) = (num~ / x^Dnum) / (den~ / x^Dden) = num~ x^Dden / (den~ x^Dnum)
        mono_num = ring.from_dict({dden: QQ(1)})
        mono_den = ring.from_dict({dnum: QQ(1)})
        return SymRat(self.ctx, self.ctx.field.new(num * mono_num, den * mono_den))

    def _subst_multiply(self, source: int, target_exps: dict[int, int]) -> "SymRat":
        """Substitute x_source -> x_source * prod x_i^{e_i} termwise."""

        def remap(terms):
            out = {}
            for mono, coeff in terms:
                k = mono[source]
                new = list(mono)
                for i, e in target_exps.items():
                    new[i] += k * e
                out[tuple(new)] = out.get(tuple(new), QQ(0)) + coeff
            return out

        ring = self.ctx.ring
        num = ring.from_dict(remap(self.frac.numer.terms()))
        den = ring.from_dict(remap(self.frac.denom.terms()))
        # negative target exponents cannot occur: k >= 0 and e in {-1, +1}
        # with e = -1 only via the x_n expansion, handled by the caller
        return SymRat(self.ctx, self.ctx.field.new(num, den))

    def _shift_by_xp(self, var_index: int, p: int) -> "SymRat":
        ctx = self.ctx
        if not 1 <= p <= ctx.n:
            raise IndexOutOfRange(f"shift index {p} outside 1..{ctx.n}")
        if p < ctx.n:
            return self._subst_multiply(var_index, {p - 1: 1})
        # x_n = (x_1...x_{n-1})^{-1}: multiply through instead of remapping,
        # to avoid negative exponents in the polynomial layer
        xn = ctx.x(ctx.n)
        var = SymRat(ctx, ctx._gens[var_index])
        return self.substitute(var_index, var * xn)

    def substitute(self, var_index: int, value: "SymRat") -> "SymRat":
        """Substitute generator var_index -> value (a SymRat)."""
        ctx = self.ctx

        def apply(poly):
            out = ctx.field.zero
            for mono, coeff in poly.terms():
                term = ctx.field.ground_new(coeff)
                for i, e in enumerate(mono):
                    if e == 0:
                        continue
                    base = value.frac if i == var_index else ctx._gens[i]
                    term = term * base ** e
                out = out + term
            return out

        num = apply(self.frac.numer)
        den = apply(self.frac.denom)
        if not den:
            raise DivisionByZero("substitution annihilated the denominator")
        return SymRat(ctx, num / den)

    def shift_p0(self, p: int) -> "SymRat":
        """Parameter shift c_inf -> c_inf + c_p, i.e. x_inf -> x_inf * x_p."""
        return self._shift_by_xp(self.ctx.nvars - 1, p)

    def shift_pinf(self, p: int) -> "SymRat":
        """Parameter shift c_0 -> c_0 + c_p, i.e. x_0 -> x_0 * x_p."""
        return self._shift_by_xp(self.ctx.nvars - 2, p)

    def shift_subst(self, kind: str, p: int) -> "SymRat":
        if kind == "p0":
            return self.shift_p0(p)
        if kind == "pinf":
            return self.shift_pinf(p)
        raise ValueError(f"unknown shift kind {kind!r}")

    def subs_one(self, var_names) -> "SymRat":
        """Specialize the named variables to 1 (e.g. c_0 = c_inf = 0)."""
        idx = [self.ctx.var_names.index(v) for v in var_names]

        def collapse(poly):
            out = {}
            for mono, coeff in poly.terms():
                new = list(mono)
                for i in idx:
                    new[i] = 0
                key = tuple(new)
                out[key] = out.get(key, QQ(0)) + coeff
            return self.ctx.ring.from_dict(out)

        num = collapse(self.frac.numer)
        den = collapse(self.frac.denom)
        if not den:
            raise DivisionByZero("specialization annihilated the denominator")
        return SymRat(self.ctx, self.ctx.field.new(num, den))

    # --- numeric specialization -------------------------------------------

    def evaluate(self, values) -> complex:
        """Evaluate at complex variable values.

        values: mapping from variable name to complex, or an object with an
        exp_values() method producing one (ModuliConfig qualifies).
        """
        if hasattr(values, "exp_values"):
            values = values.exp_values()
        vals = [complex(values[name]) for name in self.ctx.var_names]

        def poly_value(poly):
            total = 0.0 + 0.0j
            scale = 0.0
            for mono, coeff in poly.terms():
                term = complex(Fraction(coeff.numerator) / Fraction(coeff.denominator))
                for v, e in zip(vals, mono):
                    if e:
                        term *= v ** e
                total += term
                scale = max(scale, abs(term))
            return total, scale

        num_val, _ = poly_value(self.frac.numer)
        den_val, den_scale = poly_value(self.frac.denom)
        if abs(den_val) <= EVAL_TOL * max(1.0, den_scale):
            raise DenominatorVanishes(
                "denominator vanishes at this configuration "
                "(parameters on the excluded locus)")
        return num_val / den_val

    # --- serialization ------------------------------------------------------

    def _poly_text(self, poly) -> str:
        terms = sorted(poly.terms(), key=lambda t: t[0], reverse=True)
        if not terms:
            return "0"
        parts = []
        for mono, coeff in terms:
            q = Fraction(coeff.numerator) / Fraction(coeff.denominator)
            factors = [f"{name}^{e}" for name, e in zip(self.ctx.var_names, mono) if e]
            body = " * ".join(factors) if factors else "1"
            if q == 1 and factors:
                parts.append(body)
            elif q == -1 and factors:
                parts.append(f"-{body}")
            elif factors:
                parts.append(f"{q} * {body}")
            else:
                parts.append(str(q))
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def to_text(self) -> str:
        """Canonical `num / den` text with stable monomial ordering."""
        num, den = self.frac.numer, self.frac.denom
        ntxt = self._poly_text(num)
        if den == self.ctx.ring.one:
            return ntxt
        dtxt = self._poly_text(den)
        if len(num.terms()) > 1:
            ntxt = f"({ntxt})"
        if len(den.terms()) > 1:
            dtxt = f"({dtxt})"
        return f"{ntxt} / {dtxt}"

    def __repr__(self):
        return f"SymRat({self.to_text()})"


@dataclass
class SymMatrix:
    """Rectangular matrix of SymRat entries."""

    ctx: SymContext
    entries: list

    def __post_init__(self):
        if self.entries:
            w = len(self.entries[0])
            if any(len(r) != w for r in self.entries):
                raise ValueError("ragged rows")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, ctx: SymContext, size: int) -> "SymMatrix":
        return cls(ctx, [[ctx.one if i == j else ctx.zero for j in range(size)]
                         for i in range(size)])

    @classmethod
    def diagonal(cls, ctx: SymContext, diag) -> "SymMatrix":
        diag = list(diag)
        size = len(diag)
        return cls(ctx, [[diag[i] if i == j else ctx.zero for j in range(size)]
                         for i in range(size)])

    def transpose(self) -> "SymMatrix":
        return SymMatrix(self.ctx, [list(col) for col in zip(*self.entries)])

    def map(self, fn) -> "SymMatrix":
        return SymMatrix(self.ctx, [[fn(e) for e in row] for row in self.entries])

    def involution(self) -> "SymMatrix":
        return self.map(lambda e: e.involution())

    def shift_p0(self, p: int) -> "SymMatrix":
        return self.map(lambda e: e.shift_p0(p))

    def shift_pinf(self, p: int) -> "SymMatrix":
        return self.map(lambda e: e.shift_pinf(p))

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                    for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                    for r1, r2 in zip(self.entries, other.entries)])

    def __matmul__(self, other: "SymMatrix") -> "SymMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.ctx.zero
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return SymMatrix(self.ctx, out)

    def scale(self, s: SymRat) -> "SymMatrix":
        return self.map(lambda e: s * e)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(a == b for r1, r2 in zip(self.entries, other.entries)
                   for a, b in zip(r1, r2))

    def evaluate(self, values) -> np.ndarray:
        return np.array([[e.evaluate(values) for e in row] for row in self.entries])

    def to_text(self) -> list:
        return [[e.to_text() for e in row] for row in self.entries]


def linear_solve(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    """Exact solve A X = B by Gaussian elimination over the fraction field.

    Pivoting uses the symbolic zero test (canonical form comparison with 0).
    """
    if a.rows != a.cols:
        raise SingularMatrix("matrix is not square")
    if a.rows != b.rows:
        raise ValueError("dimension mismatch")
    n, m = a.rows, b.cols
    ctx = a.ctx
    aug = [[a.entries[i][j] for j in range(n)]
           + [b.entries[i][j] for j in range(m)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over the field")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        inv = ctx.one / aug[col][col]
        aug[col] = [inv * e for e in aug[col]]
        for r in range(n):
            if r == col or aug[r][col].is_zero:
                continue
            f = aug[r][col]
            aug[r] = [er - f * ec for er, ec in zip(aug[r], aug[col])]
    return SymMatrix(ctx, [row[n:] for row in aug])


def inverse(a: SymMatrix) -> SymMatrix:
    return linear_solve(a, SymMatrix.identity(a.ctx, a.rows))


def det(a: SymMatrix) -> SymRat:
    """Exact determinant via elimination with symbolic zero tests."""
    if a.rows != a.cols:
        raise SingularMatrix("determinant of a non-square matrix")
    n = a.rows
    ctx = a.ctx
    m = [list(row) for row in a.entries]
    result = ctx.one
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero), None)
        if piv is None:
            return ctx.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            result = -result
        result = result * m[col][col]
        inv = ctx.one / m[col][col]
        for r in range(col + 1, n):
            if m[r][col].is_zero:
                continue
            f = m[r][col] * inv
            m[r] = [er - f * ec for er, ec in zip(m[r], m[col])]
    return result
