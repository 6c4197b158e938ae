"""Exact coefficient arithmetic.

This module is the computational kernel of the package: arbitrary-precision
rationals (stdlib ``fractions.Fraction``), multivariate polynomials over a
declared variable table, optionally with adjoined square-root symbols, exact
polynomial fractions, and scalars carrying rational power factors such as
``g(x)^(-5/2)``.

Representation invariants:

* ``Polynomial`` stores a canonical, sorted term tuple; no zero coefficients,
  every adjoined-root exponent reduced to 0 or 1 via ``s^2 -> square(s)``.
  Structural equality therefore coincides with mathematical equality.
* ``PolyFraction`` (a ratio of polynomials) is normalized by cancelling the
  common monomial content, clearing root symbols out of the denominator,
  cancelling the denominator into the numerator when it divides exactly, and
  scaling the denominator monic.  Equality is decided by cross-multiplication.
* ``ScaledFraction`` is a fraction times a product of rational powers of
  polynomial bases.  Integer exponent parts are folded into the fraction, so
  surviving power factors always have exponents strictly between 0 and 1.

All values are immutable after construction and safe to share between
threads; every operation is a pure function.
"""

from __future__ import annotations

import math
from fractions import Fraction as Q
from typing import Iterable, Mapping, Optional, Sequence, Union

Scalar = Union[int, Q]
Value = Union["Polynomial", "PolyFraction", "ScaledFraction"]


class UsageError(ValueError):
    """An operation was invoked outside its contract (caller error)."""


class EvaluationError(ArithmeticError):
    """Base class for failures while evaluating at a point."""


class SingularEvaluationError(EvaluationError):
    """A denominator (or a base with negative exponent) vanished at the point."""


class DomainEvaluationError(EvaluationError):
    """A square root or fractional power of a negative value was requested."""


def _q(c: Scalar) -> Q:
    if isinstance(c, Q):
        return c
    if isinstance(c, int):
        return Q(c)
    raise UsageError(f"expected an exact rational coefficient, got {type(c).__name__}")


def _grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class Radical:
    """An adjoined square-root symbol together with its defining square.

    The defining ``square`` is a polynomial over the base variables only
    (roots never nest), stored over the owning table.
    """

    __slots__ = ("symbol", "square")

    def __init__(self, symbol: str, square: Optional["Polynomial"] = None):
        self.symbol = symbol
        self.square = square

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Radical({self.symbol}, {self.square})"


class VarTable:
    """Ordered table of base variables, time variables, and adjoined roots.

    Exponent vectors of polynomials over this table have one slot per base
    variable followed by one slot per adjoined root symbol.  Time variables
    never appear inside polynomials (systems are autonomous); they are kept
    only so reports can name the independent variables of a total or partial
    system.
    """

    __slots__ = ("base_vars", "time_vars", "radicals")

    def __init__(self, base_vars: Sequence[str], time_vars: Sequence[str] = ()):
        base_vars = tuple(base_vars)
        time_vars = tuple(time_vars)
        if not base_vars:
            raise UsageError("at least one base variable is required")
        names = base_vars + time_vars
        if len(set(names)) != len(names):
            raise UsageError("variable names must be unique")
        self.base_vars = base_vars
        self.time_vars = time_vars
        self.radicals: tuple[Radical, ...] = ()

    # -- structure ---------------------------------------------------------

    @property
    def nbase(self) -> int:
        return len(self.base_vars)

    @property
    def ncols(self) -> int:
        return len(self.base_vars) + len(self.radicals)

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.base_vars + tuple(r.symbol for r in self.radicals)

    def base_index(self, name: str) -> int:
        try:
            return self.base_vars.index(name)
        except ValueError:
            raise UsageError(f"unknown base variable {name!r}") from None

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise UsageError(f"unknown variable or root symbol {name!r}") from None

    def adjoin_radical(self, symbol: str, square: "Polynomial") -> "VarTable":
        """Return a new table with one more adjoined root ``symbol``.

        ``square`` must be a nonzero, root-free polynomial over this table.
        """
        if symbol in self.column_names or symbol in self.time_vars:
            raise UsageError(f"root symbol {symbol!r} collides with an existing name")
        if square.vt is not self and square.vt != self:
            raise UsageError("defining square belongs to a different variable table")
        if square.is_zero:
            raise UsageError("defining square of a root must be nonzero")
        if any(any(e[self.nbase:]) for e, _ in square.terms):
            raise UsageError("roots must not nest: the defining square may use base variables only")
        new = VarTable(self.base_vars, self.time_vars)
        new.radicals = self.radicals + (Radical(symbol),)
        lifted = {e + (0,): c for e, c in square.terms}
        new.radicals[-1].square = Polynomial(new, lifted)
        # re-anchor the earlier roots' squares onto the widened table
        widened = []
        for rad in new.radicals[:-1]:
            sq = Polynomial(new, {e + (0,): c for e, c in rad.square.terms})
            widened.append(Radical(rad.symbol, sq))
        new.radicals = tuple(widened) + (new.radicals[-1],)
        return new

    def _signature(self) -> tuple:
        return (
            self.base_vars,
            self.time_vars,
            tuple((r.symbol, r.square.terms if r.square is not None else None) for r in self.radicals),
        )

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, VarTable):
            return NotImplemented
        return self._signature() == other._signature()

    def __hash__(self) -> int:
        return hash(self._signature())

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        rads = "".join(f", {r.symbol}" for r in self.radicals)
        return f"VarTable({', '.join(self.base_vars)}{rads})"


def _check_same_table(a: "Polynomial", b: "Polynomial") -> None:
    if a.vt is not b.vt and a.vt != b.vt:
        raise UsageError("operands use different variable tables")


def _raw_mul(d1: Mapping[tuple, Q], d2: Mapping[tuple, Q]) -> dict:
    out: dict = {}
    for e1, c1 in d1.items():
        for e2, c2 in d2.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            c = out.get(e)
            out[e] = c1 * c2 if c is None else c + c1 * c2
    return out


class Polynomial:
    """A multivariate polynomial in canonical sparse form.

    Terms map exponent vectors (one slot per base variable and per adjoined
    root) to nonzero rationals, kept sorted in descending graded-lexicographic
    order.  Root exponents are reduced modulo the defining relation, so every
    stored root exponent is 0 or 1.
    """

    __slots__ = ("vt", "terms")

    def __init__(self, vt: VarTable, terms: Mapping[tuple, Scalar]):
        reduced = self._reduce(vt, terms)
        self.vt = vt
        self.terms = tuple(
            sorted(reduced.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)
        )

    # -- construction --------------------------------------------------

    @staticmethod
    def _reduce(vt: VarTable, raw: Mapping[tuple, Scalar]) -> dict:
        nbase = vt.nbase
        out: dict = {}
        stack = [(e, _q(c)) for e, c in raw.items()]
        while stack:
            exps, c = stack.pop()
            if not c:
                continue
            if len(exps) != vt.ncols:
                raise UsageError("exponent vector width does not match the variable table")
            for k, rad in enumerate(vt.radicals):
                col = nbase + k
                if exps[col] >= 2:
                    half, rem = divmod(exps[col], 2)
                    base = exps[:col] + (rem,) + exps[col + 1:]
                    acc: dict = {base: c}
                    sq = dict(rad.square.terms)
                    for _ in range(half):
                        acc = _raw_mul(acc, sq)
                    stack.extend(acc.items())
                    break
            else:
                prev = out.get(exps)
                total = c if prev is None else prev + c
                if total:
                    out[exps] = total
                elif prev is not None:
                    del out[exps]
        return out

    @staticmethod
    def zero(vt: VarTable) -> "Polynomial":
        return Polynomial(vt, {})

    @staticmethod
    def constant(vt: VarTable, c: Scalar) -> "Polynomial":
        return Polynomial(vt, {(0,) * vt.ncols: _q(c)})

    @staticmethod
    def one(vt: VarTable) -> "Polynomial":
        return Polynomial.constant(vt, 1)

    @staticmethod
    def atom(vt: VarTable, name: str) -> "Polynomial":
        """The polynomial consisting of a single variable or root symbol."""
        i = vt.column_index(name)
        exps = tuple(1 if j == i else 0 for j in range(vt.ncols))
        return Polynomial(vt, {exps: Q(1)})

    # -- predicates -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_value(self) -> Q:
        if self.is_zero:
            return Q(0)
        if not self.is_constant:
            raise UsageError("polynomial is not constant")
        return self.terms[0][1]

    @property
    def uses_radicals(self) -> bool:
        nbase = self.vt.nbase
        return any(any(e[nbase:]) for e, _ in self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return sum(self.terms[0][0])

    def leading(self) -> tuple[tuple, Q]:
        if self.is_zero:
            raise UsageError("zero polynomial has no leading term")
        return self.terms[0]

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            _check_same_table(self, other)
            return other
        if isinstance(other, (int, Q)):
            return Polynomial.constant(self.vt, other)
        return None

    def __add__(self, other):
        if isinstance(other, (PolyFraction, ScaledFraction)):
            return other.__radd__(self)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = dict(self.terms)
        for e, c in o.terms:
            prev = d.get(e)
            total = c if prev is None else prev + c
            if total:
                d[e] = total
            elif prev is not None:
                del d[e]
        return Polynomial(self.vt, d)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vt, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        if isinstance(other, (PolyFraction, ScaledFraction)):
            return (-other).__radd__(self)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (PolyFraction, ScaledFraction)):
            return other.__rmul__(self)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(self.vt, _raw_mul(dict(self.terms), dict(o.terms)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return make_fraction(Polynomial.one(self.vt), self ** (-n))
        out = Polynomial.one(self.vt)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other):
        return _divide(self, other)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _divide(o, self)

    def scale(self, c: Scalar) -> "Polynomial":
        c = _q(c)
        return Polynomial(self.vt, {e: k * c for e, k in self.terms})

    # -- equality ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vt == other.vt and self.terms == other.terms
        if isinstance(other, (int, Q)):
            return self.is_constant and self.constant_value() == _q(other)
        if isinstance(other, (PolyFraction, ScaledFraction)):
            return values_equal(self, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vt._signature(), self.terms))

    # -- calculus -----------------------------------------------------------

    def partial(self, i: int):
        """Exact partial derivative with respect to base variable index ``i``.

        Returns a ``Polynomial`` unless the chain rule through an adjoined
        root forces a denominator, in which case a ``PolyFraction`` (or the
        simplest equivalent) is returned.
        """
        vt = self.vt
        if not 0 <= i < vt.nbase:
            raise UsageError("derivative index must name a base variable")
        nbase = vt.nbase
        plain: dict = {}
        chain = Polynomial.zero(vt)
        for e, c in self.terms:
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                prev = plain.get(e2)
                total = c * e[i] if prev is None else prev + c * e[i]
                if total:
                    plain[e2] = total
                elif prev is not None:
                    del plain[e2]
        result: Value = Polynomial(vt, plain)
        for k, rad in enumerate(vt.radicals):
            col = nbase + k
            with_s = {e: c for e, c in self.terms if e[col]}
            if not with_s:
                continue
            dsq = rad.square.partial(i)
            if isinstance(dsq, Polynomial) and dsq.is_zero:
                continue
            # d(u * s)/dx_i, the s-dependence part: u * dsq * s / (2 * square)
            part = Polynomial(vt, with_s)  # still carries the factor s
            contrib = _divide(part * dsq, rad.square.scale(2))
            result = result + contrib
        return result

    def conjugate(self, k: int) -> "Polynomial":
        """Flip the sign of the ``k``-th adjoined root (s -> -s)."""
        col = self.vt.nbase + k
        return Polynomial(
            self.vt, {e: (-c if e[col] % 2 else c) for e, c in self.terms}
        )

    def radical_components(self) -> dict:
        """Split into root-free components keyed by the root exponent pattern."""
        nbase = self.vt.nbase
        out: dict = {}
        for e, c in self.terms:
            pat = e[nbase:]
            base = e[:nbase] + (0,) * len(pat)
            out.setdefault(pat, {})[base] = c
        return {pat: Polynomial(self.vt, d) for pat, d in out.items()}

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Mapping[str, Scalar]):
        """Evaluate at a rational point; exact unless adjoined roots appear."""
        vt = self.vt
        vals = []
        for name in vt.base_vars:
            if name not in point:
                raise UsageError(f"point does not assign variable {name!r}")
            vals.append(_q(point[name]))
        if not self.uses_radicals:
            total = Q(0)
            for e, c in self.terms:
                term = c
                for v, k in zip(vals, e):
                    if k:
                        term *= v ** k
                total += term
            return total
        fvals = [float(v) for v in vals]
        rvals = []
        for rad in self.vt.radicals:
            sq = rad.square.evaluate(point)
            if sq < 0:
                raise DomainEvaluationError(
                    f"square of root {rad.symbol!r} is negative at the point"
                )
            rvals.append(math.sqrt(float(sq)))
        total_f = 0.0
        nbase = vt.nbase
        for e, c in self.terms:
            term = float(c)
            for v, k in zip(fvals, e[:nbase]):
                if k:
                    term *= v ** k
            for v, k in zip(rvals, e[nbase:]):
                if k:
                    term *= v ** k
            total_f += term
        return total_f

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        return render_polynomial(self)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Polynomial({self})"


def _monomial_divides(a: tuple, b: tuple) -> bool:
    return all(x >= y for x, y in zip(a, b))


def _plain_exact_divide(a: Polynomial, b: Polynomial) -> Optional[Polynomial]:
    """Division for root-free divisor and dividend, abort on failure."""
    vt = a.vt
    if a.is_zero:
        return Polynomial.zero(vt)
    q: dict = {}
    r = a
    be, bc = b.leading()
    while not r.is_zero:
        re, rc = r.leading()
        if not _monomial_divides(re, be):
            return None
        e = tuple(x - y for x, y in zip(re, be))
        c = rc / bc
        q[e] = q.get(e, Q(0)) + c
        r = r - Polynomial(vt, {e: c}) * b
    return Polynomial(vt, q)


def exact_divide(a: Polynomial, b: Polynomial) -> Optional[Polynomial]:
    """Return ``q`` with ``a == q * b`` when such a polynomial exists.

    Works in the adjoined-root ring as well: the divisor is first cleared of
    root symbols by conjugate multiplication, then each root component of the
    dividend is divided by the root-free norm.  Returns ``None`` when no
    polynomial quotient exists.
    """
    if not isinstance(a, Polynomial) or not isinstance(b, Polynomial):
        raise UsageError("exact_divide expects polynomials")
    _check_same_table(a, b)
    if b.is_zero:
        raise UsageError("division by the zero polynomial")
    vt = a.vt
    nbase = vt.nbase
    for k in range(len(vt.radicals)):
        col = nbase + k
        if any(e[col] for e, _ in b.terms):
            conj = b.conjugate(k)
            a = a * conj
            b = b * conj
            if b.is_zero:
                return None
    comps = a.radical_components()
    out = Polynomial.zero(vt)
    for pat, comp in comps.items():
        qc = _plain_exact_divide(comp, b)
        if qc is None:
            return None
        mono = Polynomial(vt, {(0,) * nbase + pat: Q(1)})
        out = out + qc * mono
    return out


class PolyFraction:
    """An exact ratio of two polynomials over a shared variable table.

    Construct through :func:`make_fraction`, which normalizes and may return
    a plain ``Polynomial`` when the denominator cancels completely.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        self.num = num
        self.den = den

    @property
    def vt(self) -> VarTable:
        return self.num.vt

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Q:
        return self.num.constant_value() / self.den.constant_value()

    def __add__(self, other):
        if isinstance(other, ScaledFraction):
            return other.__radd__(self)
        o = _as_fraction_pair(other, self.vt)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return make_fraction(self.num * d2 + n2 * self.den, self.den * d2)

    __radd__ = __add__

    def __neg__(self):
        return PolyFraction(-self.num, self.den)

    def __sub__(self, other):
        if isinstance(other, ScaledFraction):
            return (-other).__radd__(self)
        o = _as_fraction_pair(other, self.vt)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return make_fraction(self.num * d2 - n2 * self.den, self.den * d2)

    def __rsub__(self, other):
        o = _as_fraction_pair(other, self.vt)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return make_fraction(n2 * self.den - self.num * d2, self.den * d2)

    def __mul__(self, other):
        if isinstance(other, ScaledFraction):
            return other.__rmul__(self)
        o = _as_fraction_pair(other, self.vt)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return make_fraction(self.num * n2, self.den * d2)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return make_fraction(self.den, self.num) ** (-n)
        return make_fraction(self.num ** n, self.den ** n)

    def __truediv__(self, other):
        return _divide(self, other)

    def __rtruediv__(self, other):
        o = _as_fraction_pair(other, self.vt)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return make_fraction(n2 * self.den, d2 * self.num)

    def __eq__(self, other):
        if isinstance(other, (Polynomial, PolyFraction, ScaledFraction, int, Q)):
            return values_equal(self, other)
        return NotImplemented

    __hash__ = None  # equality is by cross-multiplication

    def partial(self, i: int):
        dn = self.num.partial(i)
        dd = self.den.partial(i)
        return _divide(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, Scalar]):
        den = self.den.evaluate(point)
        if den == 0:
            raise SingularEvaluationError("denominator vanishes at the point")
        num = self.num.evaluate(point)
        if isinstance(num, Q) and isinstance(den, Q):
            return num / den
        return float(num) / float(den)

    def __str__(self) -> str:
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PolyFraction({self})"


def _as_fraction_pair(v, vt: VarTable):
    """Coerce to (num, den) polynomials over ``vt``; None when impossible."""
    if isinstance(v, Polynomial):
        if v.vt is not vt and v.vt != vt:
            raise UsageError("operands use different variable tables")
        return v, Polynomial.one(vt)
    if isinstance(v, PolyFraction):
        return v.num, v.den
    if isinstance(v, (int, Q)):
        return Polynomial.constant(vt, v), Polynomial.one(vt)
    return None


def make_fraction(num: Polynomial, den: Polynomial):
    """Build a normalized fraction, collapsing to ``Polynomial`` when possible."""
    _check_same_table(num, den)
    vt = num.vt
    if den.is_zero:
        raise UsageError("fraction denominator must be nonzero")
    if num.is_zero:
        return Polynomial.zero(vt)
    # cancel common monomial content
    cols = vt.ncols
    low_n = [min(e[j] for e, _ in num.terms) for j in range(cols)]
    low_d = [min(e[j] for e, _ in den.terms) for j in range(cols)]
    common = tuple(min(a, b) for a, b in zip(low_n, low_d))
    if any(common):
        num = Polynomial(vt, {tuple(x - y for x, y in zip(e, common)): c for e, c in num.terms})
        den = Polynomial(vt, {tuple(x - y for x, y in zip(e, common)): c for e, c in den.terms})
    # clear adjoined roots out of the denominator
    for k in range(len(vt.radicals)):
        col = vt.nbase + k
        if any(e[col] for e, _ in den.terms):
            conj = den.conjugate(k)
            num = num * conj
            den = den * conj
    # cancel the denominator when it divides exactly (either way)
    if not den.is_constant:
        q = exact_divide(num, den)
        if q is not None:
            return q
        q = exact_divide(den, num)
        if q is not None and not q.uses_radicals:
            num, den = Polynomial.one(vt), q
    lc = den.leading()[1]
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    if den.is_constant:
        return num.scale(1 / den.constant_value())
    return PolyFraction(num, den)


def _divide(a, b):
    """True division of ring values, producing the simplest exact type."""
    if isinstance(a, (int, Q)):
        if isinstance(b, (Polynomial, PolyFraction, ScaledFraction)):
            a = Polynomial.constant(b.vt, a)
        else:
            raise UsageError("cannot divide scalars outside a variable table")
    if isinstance(b, (int, Q)):
        b = Polynomial.constant(a.vt, b)
    if isinstance(a, ScaledFraction) or isinstance(b, ScaledFraction):
        sa = as_scaled(a)
        sb = as_scaled(b)
        if sa is None or sb is None:
            raise UsageError("unsupported operands for division")
        return sa * sb.reciprocal()
    pa = _as_fraction_pair(a, a.vt)
    pb = _as_fraction_pair(b, a.vt)
    if pa is None or pb is None:
        raise UsageError("unsupported operands for division")
    na, da = pa
    nb, db = pb
    if nb.is_zero:
        raise UsageError("division by zero")
    return make_fraction(na * db, da * nb)


class ScaledFraction:
    """A fraction multiplied by rational powers of designated polynomial bases.

    Power factors keep exponents strictly in (0, 1); integer parts live in
    the fraction.  Construct through :func:`make_scaled`.
    """

    __slots__ = ("frac", "powers")

    def __init__(self, frac: PolyFraction, powers: tuple):
        self.frac = frac
        self.powers = powers

    @property
    def vt(self) -> VarTable:
        return self.frac.vt

    @property
    def is_zero(self) -> bool:
        return self.frac.is_zero

    def _frac_value(self):
        f = self.frac
        if isinstance(f, PolyFraction) and f.den.is_constant and f.den.constant_value() == 1:
            return f.num
        return f

    def __add__(self, other):
        o = as_scaled(other, self.vt)
        if o is None:
            return NotImplemented
        if self.is_zero:
            return _downgrade_scaled(o)
        if o.is_zero:
            return _downgrade_scaled(self)
        if not _powers_match(self.powers, o.powers):
            raise UsageError(
                "cannot add values with incompatible fractional power factors"
            )
        return make_scaled(_frac_of(self) + _frac_of(o), self.powers)

    __radd__ = __add__

    def __neg__(self):
        return ScaledFraction(-self.frac, self.powers)

    def __sub__(self, other):
        o = as_scaled(other, self.vt)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = as_scaled(other, self.vt)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = as_scaled(other, self.vt)
        if o is None:
            return NotImplemented
        return make_scaled(_frac_of(self) * _frac_of(o), self.powers + o.powers)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _divide(self, other)

    def __rtruediv__(self, other):
        o = as_scaled(other, self.vt)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        out: Value = Polynomial.one(self.vt)
        for _ in range(n):
            out = out * self
        return out

    def reciprocal(self):
        if self.is_zero:
            raise UsageError("division by zero")
        inv = _divide(Polynomial.one(self.vt), _frac_of(self))
        return make_scaled(inv, tuple((b, -q) for b, q in self.powers))

    def __eq__(self, other):
        if isinstance(other, (Polynomial, PolyFraction, ScaledFraction, int, Q)):
            return values_equal(self, other)
        return NotImplemented

    __hash__ = None

    def partial(self, i: int):
        # d(F * prod p_k^q_k) = (dF + F * sum q_k dp_k / p_k) * prod p_k^q_k
        f = _frac_of(self)
        df = f.partial(i) if not isinstance(f, (int, Q)) else 0
        extra = Polynomial.zero(self.vt)
        for base, expo in self.powers:
            db = base.partial(i)
            if isinstance(db, Polynomial) and db.is_zero:
                continue
            extra = extra + _divide(db * expo, base)
        new_frac = df + f * extra
        return make_scaled(new_frac, self.powers)

    def evaluate(self, point: Mapping[str, Scalar]):
        base_val = self.frac.evaluate(point) if not isinstance(self.frac, (int, Q)) else self.frac
        total = float(base_val)
        for base, expo in self.powers:
            bv = base.evaluate(point)
            bvf = float(bv)
            if bvf < 0:
                raise DomainEvaluationError("fractional power of a negative base")
            if bvf == 0 and expo < 0:
                raise SingularEvaluationError("negative power of a vanishing base")
            total *= bvf ** float(expo)
        return total

    def __str__(self) -> str:
        parts = []
        f = self._frac_value()
        parts.append(str(f) if isinstance(f, PolyFraction) else f"({f})")
        for base, expo in self.powers:
            parts.append(f"({base})^({expo})")
        return "*".join(parts)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ScaledFraction({self})"


def _frac_of(s: ScaledFraction):
    return s._frac_value()


def _powers_match(p1: tuple, p2: tuple) -> bool:
    if len(p1) != len(p2):
        return False
    return all(b1 == b2 and q1 == q2 for (b1, q1), (b2, q2) in zip(p1, p2))


def _downgrade_scaled(s: ScaledFraction):
    if not s.powers or s.is_zero:
        return s._frac_value()
    return s


def make_scaled(frac, powers: Iterable[tuple]):
    """Build a canonical power-factored value from a fraction and factors.

    Equal bases are merged by adding exponents; integer exponent parts are
    folded into the fraction (negative parts into the denominator); zero
    exponents disappear.  Collapses to a fraction or polynomial when no
    genuine fractional power survives.
    """
    if isinstance(frac, (int, Q)):
        raise UsageError("power factors require a variable table context")
    vt = frac.vt
    merged: list = []
    for base, expo in powers:
        expo = expo if isinstance(expo, Q) else Q(expo)
        if not isinstance(base, Polynomial):
            raise UsageError("power-factor bases must be polynomials")
        if base.is_zero:
            raise UsageError("power-factor bases must be nonzero")
        for j, (b2, q2) in enumerate(merged):
            if b2 == base:
                merged[j] = (b2, q2 + expo)
                break
        else:
            merged.append((base, expo))
    value = frac
    kept: list = []
    for base, expo in merged:
        if expo == 0:
            continue
        whole = math.floor(expo)
        rest = expo - whole
        if whole:
            value = value * base ** whole if whole > 0 else _divide(value, base ** (-whole))
        if rest:
            kept.append((base, rest))
    if isinstance(value, ScaledFraction):  # can arise via base ** negative folding
        kept.extend(value.powers)
        value = _frac_of(value)
    if (isinstance(value, (Polynomial, PolyFraction)) and getattr(value, "is_zero", False)) or not kept:
        return value
    kept.sort(key=lambda bq: (bq[0].terms, bq[1]))
    n, d = _as_fraction_pair(value, vt)
    return ScaledFraction(PolyFraction(n, d), tuple(kept))


def as_scaled(v, vt: Optional[VarTable] = None) -> Optional[ScaledFraction]:
    """View any ring value as a ScaledFraction (no normalization applied)."""
    if isinstance(v, ScaledFraction):
        return v
    if isinstance(v, (int, Q)):
        if vt is None:
            return None
        v = Polynomial.constant(vt, v)
    if isinstance(v, Polynomial):
        return ScaledFraction(PolyFraction(v, Polynomial.one(v.vt)), ())
    if isinstance(v, PolyFraction):
        return ScaledFraction(v, ())
    return None


def values_equal(a, b) -> bool:
    """Mathematical equality across the value tower.

    Power factors must agree structurally; the fraction parts are compared by
    cross-multiplication, which is exact.
    """
    if isinstance(a, (int, Q)) and isinstance(b, (int, Q)):
        return _q(a) == _q(b)
    vt = None
    for v in (a, b):
        if isinstance(v, (Polynomial, PolyFraction, ScaledFraction)):
            vt = v.vt
            break
    if vt is None:
        return False
    sa = as_scaled(a, vt)
    sb = as_scaled(b, vt)
    if sa is None or sb is None:
        return False
    if sa.vt != sb.vt:
        return False
    if not _powers_match(sa.powers, sb.powers):
        return False
    return sa.frac.num * sb.frac.den == sb.frac.num * sa.frac.den


def partial_derivative(value: Value, var: str):
    """Exact partial derivative of any ring value with respect to a base variable."""
    if not isinstance(value, (Polynomial, PolyFraction, ScaledFraction)):
        raise UsageError("cannot differentiate a bare scalar without a variable table")
    i = value.vt.base_index(var)
    return value.partial(i)


def evaluate(value, point: Mapping[str, Scalar]):
    """Evaluate any ring value at a point (exact when no roots/powers appear)."""
    if isinstance(value, (int, Q)):
        return _q(value)
    return value.evaluate(point)


# -- rendering --------------------------------------------------------------


def _render_coeff(c: Q) -> str:
    return str(c)


def render_polynomial(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    names = p.vt.column_names
    chunks: list = []
    for e, c in p.terms:
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        mono = "*".join(factors)
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = _render_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_render_coeff(mag)}*{mono}"
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(chunks)


def render_value(v) -> str:
    """Canonical text for any ring value; reparsing yields the same value."""
    if isinstance(v, (int, Q)):
        return str(v)
    return str(v)
