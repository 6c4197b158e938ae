"""Exterior differential calculus over exact ring coefficients.

Differential k-forms with ``ScaledFraction``-tower coefficients, wedge
products, exterior derivatives, restriction along a substitution plan,
vector fields and first-order differential operators, divergences (full and
partial over an index sample), Lie brackets, and closed-1-form potentials.

Index tuples in form coefficients are 0-based positions into the base
variables of the owning table, kept strictly increasing.
"""

from __future__ import annotations

from fractions import Fraction as Q
from typing import Iterable, Mapping, Optional, Sequence

from .ring import (
    Polynomial,
    PolyFraction,
    ScaledFraction,
    UsageError,
    Value,
    VarTable,
    values_equal,
)


def _is_ring_value(v) -> bool:
    return isinstance(v, (Polynomial, PolyFraction, ScaledFraction, int, Q))


def _is_zero_value(v) -> bool:
    if isinstance(v, (int, Q)):
        return v == 0
    return v.is_zero


def _merge_indices(a: tuple, b: tuple) -> Optional[tuple[tuple, int]]:
    """Merge two strictly increasing index tuples; None when an index repeats.

    Returns the merged tuple together with the permutation sign of moving the
    concatenation a+b into sorted order.
    """
    if set(a) & set(b):
        return None
    merged = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            merged.append(a[i])
            i += 1
        else:
            merged.append(b[j])
            # b[j] jumps over the remaining entries of a
            if (len(a) - i) % 2:
                sign = -sign
            j += 1
    merged.extend(a[i:])
    merged.extend(b[j:])
    return tuple(merged), sign


class KForm:
    """A differential form of fixed degree with exact coefficients."""

    __slots__ = ("vt", "degree", "coeffs")

    def __init__(self, vt: VarTable, degree: int, coeffs: Mapping[tuple, object]):
        n = vt.nbase
        if degree < 0:
            raise UsageError("form degree must be nonnegative")
        clean = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise UsageError("index tuple length must equal the form degree")
            if any(not 0 <= i < n for i in idx):
                raise UsageError("form index out of range")
            if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                raise UsageError("form indices must be strictly increasing")
            if _is_zero_value(c):
                continue
            if isinstance(c, (int, Q)):
                c = Polynomial.constant(vt, c)
            clean[idx] = c
        if degree > n and clean:
            raise UsageError("a nonzero form cannot exceed the ambient degree")
        self.vt = vt
        self.degree = degree
        self.coeffs = dict(sorted(clean.items()))

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(vt: VarTable, degree: int) -> "KForm":
        return KForm(vt, degree, {})

    @staticmethod
    def scalar(vt: VarTable, value) -> "KForm":
        return KForm(vt, 0, {(): value})

    @staticmethod
    def dx(vt: VarTable, i: int) -> "KForm":
        return KForm(vt, 1, {(i,): Polynomial.one(vt)})

    @staticmethod
    def one_form(vt: VarTable, components: Sequence) -> "KForm":
        return KForm(vt, 1, {(i,): c for i, c in enumerate(components)})

    # -- basics ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, idx: Sequence[int]):
        c = self.coeffs.get(tuple(idx))
        if c is None:
            return Polynomial.zero(self.vt)
        return c

    def components(self) -> tuple:
        """For 1-forms: the coefficient vector over all base variables."""
        if self.degree != 1:
            raise UsageError("components() applies to 1-forms only")
        return tuple(self.coefficient((i,)) for i in range(self.vt.nbase))

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        if self.vt != other.vt:
            return False
        if self.is_zero and other.is_zero:
            return True
        if self.degree != other.degree or set(self.coeffs) != set(other.coeffs):
            return False
        return all(values_equal(c, other.coeffs[i]) for i, c in self.coeffs.items())

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        if self.vt != other.vt:
            raise UsageError("forms use different variable tables")
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise UsageError("cannot add forms of different degrees")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            if idx in out:
                out[idx] = out[idx] + c
            else:
                out[idx] = c
        return KForm(self.vt, self.degree, out)

    def __neg__(self):
        return KForm(self.vt, self.degree, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, KForm):
            return wedge(self, scalar)
        if not _is_ring_value(scalar):
            return NotImplemented
        return KForm(self.vt, self.degree, {i: c * scalar for i, c in self.coeffs.items()})

    def __rmul__(self, scalar):
        if not _is_ring_value(scalar):
            return NotImplemented
        return self * scalar

    def __truediv__(self, scalar):
        if not _is_ring_value(scalar):
            return NotImplemented
        return KForm(self.vt, self.degree, {i: c / scalar for i, c in self.coeffs.items()})

    def __str__(self) -> str:
        return render_form(self)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"KForm({self})"


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product; repeated differentials annihilate."""
    if a.vt != b.vt:
        raise UsageError("forms use different variable tables")
    degree = a.degree + b.degree
    if degree > a.vt.nbase:
        return KForm.zero(a.vt, degree)
    out: dict = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            merged = _merge_indices(ia, ib)
            if merged is None:
                continue
            idx, sign = merged
            term = ca * cb if sign > 0 else -(ca * cb)
            if idx in out:
                out[idx] = out[idx] + term
            else:
                out[idx] = term
    return KForm(a.vt, degree, out)


def wedge_all(forms: Iterable[KForm]) -> KForm:
    forms = list(forms)
    if not forms:
        raise UsageError("empty wedge product")
    acc = forms[0]
    for f in forms[1:]:
        acc = wedge(acc, f)
    return acc


def exterior_derivative(a: KForm) -> KForm:
    """The exterior differential; a degree-n input yields the zero marker."""
    vt = a.vt
    n = vt.nbase
    out: dict = {}
    for idx, c in a.coeffs.items():
        for i in range(n):
            if i in idx:
                continue
            dc = c.partial(i) if not isinstance(c, (int, Q)) else 0
            if _is_zero_value(dc):
                continue
            merged = _merge_indices((i,), idx)
            if merged is None:
                continue
            key, sign = merged
            term = dc if sign > 0 else -dc
            if key in out:
                out[key] = out[key] + term
            else:
                out[key] = term
    return KForm(vt, a.degree + 1, out)


def restrict(a: KForm, subst: Mapping[int, KForm]) -> KForm:
    """Replace each ``dx_i`` with ``i`` in ``subst`` by the given 1-form.

    The elimination plan must be acyclic: no substituted differential may
    appear on any right-hand side.
    """
    vt = a.vt
    for i, w in subst.items():
        if w.degree != 1:
            raise UsageError("substitution right-hand sides must be 1-forms")
        if w.vt != vt:
            raise UsageError("substitution form uses a different variable table")
        for idx in w.coeffs:
            if idx[0] in subst:
                raise UsageError(
                    "cyclic substitution: eliminated differentials may not appear "
                    "on a right-hand side"
                )
    if not subst:
        return a
    out = KForm.zero(vt, a.degree)
    for idx, c in a.coeffs.items():
        factors = []
        for i in idx:
            factors.append(subst.get(i, KForm.dx(vt, i)))
        if a.degree == 0:
            piece = KForm.scalar(vt, c)
        else:
            piece = wedge_all(factors) * c
        out = out + piece
    return out


def volume_coefficient(a: KForm):
    """The single coefficient of a degree-n form (0 for the zero form)."""
    n = a.vt.nbase
    if a.degree != n and not a.is_zero:
        raise UsageError("volume coefficient requires a top-degree form")
    if a.is_zero:
        return Polynomial.zero(a.vt)
    return a.coefficient(tuple(range(n)))


class VectorField:
    """A vector field with one exact component per base variable."""

    __slots__ = ("vt", "components")

    def __init__(self, vt: VarTable, components: Sequence):
        comps = []
        for c in components:
            if isinstance(c, (int, Q)):
                c = Polynomial.constant(vt, c)
            if not isinstance(c, (Polynomial, PolyFraction, ScaledFraction)):
                raise UsageError("vector field components must be ring values")
            comps.append(c)
        if len(comps) != vt.nbase:
            raise UsageError("component count must match the number of base variables")
        self.vt = vt
        self.components = tuple(comps)

    @property
    def is_zero(self) -> bool:
        return all(_is_zero_value(c) for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.vt == other.vt and all(
            values_equal(a, b) for a, b in zip(self.components, other.components)
        )

    __hash__ = None

    def scale(self, factor) -> "VectorField":
        return VectorField(self.vt, [factor * c for c in self.components])

    def dot(self, other: "VectorField"):
        if self.vt != other.vt:
            raise UsageError("vector fields use different variable tables")
        total = Polynomial.zero(self.vt)
        for a, b in zip(self.components, other.components):
            total = total + a * b
        return total

    def mask(self, keep: Sequence[int]) -> "VectorField":
        """Zero every component whose index is not in ``keep``."""
        keep = set(keep)
        zero = Polynomial.zero(self.vt)
        return VectorField(
            self.vt,
            [c if i in keep else zero for i, c in enumerate(self.components)],
        )

    def as_one_form(self) -> KForm:
        return KForm.one_form(self.vt, self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"VectorField{self}"


def divergence(f: VectorField):
    """Sum of the diagonal partial derivatives."""
    total = Polynomial.zero(f.vt)
    for i, c in enumerate(f.components):
        total = total + c.partial(i)
    return total


def partial_divergence(f: VectorField, sample: Sequence[int]):
    """Divergence over an index sample: sum of d f_xi / d x_xi for xi in the sample."""
    n = f.vt.nbase
    sample = tuple(sample)
    if not sample:
        raise UsageError("sample must be nonempty")
    if len(set(sample)) != len(sample) or any(not 0 <= i < n for i in sample):
        raise UsageError("sample must be a set of distinct base-variable indices")
    total = Polynomial.zero(f.vt)
    for i in sample:
        total = total + f.components[i].partial(i)
    return total


class DiffOperator:
    """A first-order linear differential operator sum_i X_i d/dx_i."""

    __slots__ = ("field",)

    def __init__(self, field: VectorField):
        self.field = field

    @property
    def vt(self) -> VarTable:
        return self.field.vt

    @property
    def is_null(self) -> bool:
        return self.field.is_zero

    def apply(self, w):
        """Apply the operator to a scalar ring value."""
        if isinstance(w, (int, Q)):
            return Polynomial.zero(self.vt)
        if not isinstance(w, (Polynomial, PolyFraction, ScaledFraction)):
            raise UsageError("operators apply to scalar ring values")
        if w.vt != self.vt:
            raise UsageError("operand uses a different variable table")
        total = Polynomial.zero(self.vt)
        for i, c in enumerate(self.field.components):
            dw = w.partial(i)
            if _is_zero_value(dw):
                continue
            total = total + c * dw
        return total

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.field == other.field

    __hash__ = None

    def __str__(self) -> str:
        names = self.vt.base_vars
        parts = []
        for name, c in zip(names, self.field.components):
            if _is_zero_value(c):
                continue
            parts.append(f"({c})*d/d{name}")
        return " + ".join(parts) if parts else "0"


def apply_operator(x: DiffOperator, w):
    return x.apply(w)


def lie_bracket(x: DiffOperator, y: DiffOperator) -> DiffOperator:
    """Commutator [X, Y], componentwise X(Y_i) - Y(X_i)."""
    if x.vt != y.vt:
        raise UsageError("operators use different variable tables")
    comps = []
    for xi, yi in zip(x.field.components, y.field.components):
        comps.append(x.apply(yi) - y.apply(xi))
    return DiffOperator(VectorField(x.vt, comps))


def boundary_form(f: VectorField) -> KForm:
    """The (n-1)-form sum_i (-1)^(i+1) f_i dx_1^...^(omit i)^...^dx_n.

    Its exterior derivative equals divergence(f) times the volume form.
    """
    vt = f.vt
    n = vt.nbase
    out: dict = {}
    for i, c in enumerate(f.components):
        if _is_zero_value(c):
            continue
        idx = tuple(j for j in range(n) if j != i)
        out[idx] = c if i % 2 == 0 else -c
    return KForm(vt, n - 1, out)


def potential(w: KForm) -> Polynomial:
    """A polynomial F with dF = w and F(0) = 0, for closed polynomial 1-forms.

    Uses the straight-line homotopy from the origin, integrated term by term.
    """
    vt = w.vt
    if w.degree != 1:
        raise UsageError("potential requires a 1-form")
    for c in w.coeffs.values():
        if not isinstance(c, Polynomial) or c.uses_radicals:
            raise UsageError("potential requires polynomial coefficients")
    dw = exterior_derivative(w)
    if not dw.is_zero:
        raise UsageError("potential requires a closed form (d w = 0)")
    ncols = vt.ncols
    total = Polynomial.zero(vt)
    for (i,), c in w.coeffs.items():
        for e, k in c.terms:
            deg = sum(e)
            e2 = list(e)
            e2[i] += 1
            total = total + Polynomial(vt, {tuple(e2): k / (deg + 1)})
    return total


def form_from_field_and_sample(mult, f: VectorField, sample: Sequence[int]) -> VectorField:
    """The sampled multiplier field: mult * f with off-sample components zeroed."""
    return f.scale(mult).mask(sample)


def render_form(a: KForm) -> str:
    if a.is_zero:
        return "0"
    names = a.vt.base_vars
    parts = []
    for idx, c in a.coeffs.items():
        dxs = "*".join(f"d{names[i]}" for i in idx)
        if a.degree == 0:
            parts.append(f"({c})")
        else:
            parts.append(f"({c})*{dxs}")
    return " + ".join(parts)
