"""The five differential-system classes and the constructions between them.

Ordinary systems, total-differential systems, linear homogeneous partial
systems, Pfaff systems, and exterior systems all share one variable table;
total and partial systems additionally carry the induced ordinary systems
obtained by keeping a single time direction (or single operator), which is
how every multi-time test is reduced to an ordinary one.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q
from typing import Optional, Sequence

from .forms import (
    DiffOperator,
    KForm,
    VectorField,
    exterior_derivative,
    lie_bracket,
    wedge,
)
from .ring import Polynomial, UsageError, VarTable, evaluate


def _require_polynomial_components(field: VectorField, what: str) -> None:
    for c in field.components:
        if not isinstance(c, Polynomial):
            raise UsageError(f"{what} must have polynomial components")


class OdeSystem:
    """An autonomous ordinary differential system dx/dt = f(x)."""

    __slots__ = ("vt", "f")

    def __init__(self, vt: VarTable, f: VectorField):
        if f.vt != vt:
            raise UsageError("field uses a different variable table")
        _require_polynomial_components(f, "an ordinary system")
        self.vt = vt
        self.f = f

    @property
    def n(self) -> int:
        return self.vt.nbase

    def operator(self) -> DiffOperator:
        return DiffOperator(self.f)

    def operators(self) -> tuple[DiffOperator, ...]:
        return (self.operator(),)


class TotalSystem:
    """An autonomous total differential system dx = X(x) dt, t in R^m."""

    __slots__ = ("vt", "columns")

    def __init__(self, vt: VarTable, columns: Sequence[VectorField]):
        columns = tuple(columns)
        if not columns:
            raise UsageError("a total system needs at least one time direction")
        if len(columns) >= vt.nbase:
            raise UsageError("a total system requires m < n")
        for col in columns:
            if col.vt != vt:
                raise UsageError("column uses a different variable table")
            _require_polynomial_components(col, "a total system")
        self.vt = vt
        self.columns = columns

    @property
    def n(self) -> int:
        return self.vt.nbase

    @property
    def m(self) -> int:
        return len(self.columns)

    def operators(self) -> tuple[DiffOperator, ...]:
        return tuple(DiffOperator(c) for c in self.columns)

    def time_name(self, j: int) -> str:
        if j < len(self.vt.time_vars):
            return self.vt.time_vars[j]
        return f"t{j + 1}"


class PartialSystem:
    """A linear homogeneous system of first-order partial equations X_j y = 0."""

    __slots__ = ("vt", "coefficient_fields")

    def __init__(self, vt: VarTable, coefficient_fields: Sequence[VectorField]):
        fields = tuple(coefficient_fields)
        if not fields:
            raise UsageError("a partial system needs at least one operator")
        if len(fields) >= vt.nbase:
            raise UsageError("a partial system requires m < n")
        for fld in fields:
            if fld.vt != vt:
                raise UsageError("operator uses a different variable table")
            _require_polynomial_components(fld, "a partial system")
        self.vt = vt
        self.coefficient_fields = fields

    @property
    def n(self) -> int:
        return self.vt.nbase

    @property
    def m(self) -> int:
        return len(self.coefficient_fields)

    def operators(self) -> tuple[DiffOperator, ...]:
        return tuple(DiffOperator(f) for f in self.coefficient_fields)


class PfaffSystem:
    """A Pfaff system omega_j(x) = 0 of 1-forms."""

    __slots__ = ("vt", "forms")

    def __init__(self, vt: VarTable, forms: Sequence[KForm]):
        forms = tuple(forms)
        if not forms:
            raise UsageError("a Pfaff system needs at least one equation")
        for w in forms:
            if w.vt != vt:
                raise UsageError("form uses a different variable table")
            if w.degree != 1 and not w.is_zero:
                raise UsageError("Pfaff equations must be 1-forms")
        self.vt = vt
        self.forms = forms

    @property
    def n(self) -> int:
        return self.vt.nbase

    @property
    def m(self) -> int:
        return len(self.forms)

    def coefficient_fields(self) -> tuple[VectorField, ...]:
        return tuple(VectorField(self.vt, w.components()) for w in self.forms)


class ExteriorSystem:
    """A system of exterior equations zeta_j(x) = 0 with degrees 1..n-1."""

    __slots__ = ("vt", "zetas")

    def __init__(self, vt: VarTable, zetas: Sequence[KForm]):
        zetas = tuple(zetas)
        if not zetas:
            raise UsageError("an exterior system needs at least one equation")
        for z in zetas:
            if z.vt != vt:
                raise UsageError("form uses a different variable table")
            if not z.is_zero and not 1 <= z.degree <= vt.nbase - 1:
                raise UsageError("exterior equations must have degree between 1 and n-1")
        self.vt = vt
        self.zetas = zetas

    @property
    def n(self) -> int:
        return self.vt.nbase

    @property
    def m(self) -> int:
        return len(self.zetas)


class LinearTotalSystem:
    """A linear homogeneous total system dx = A(x) dt given by m square matrices.

    Matrix ``j`` holds the row-by-column coefficients of the linear components
    of the j-th column of the system.
    """

    __slots__ = ("matrices",)

    def __init__(self, matrices: Sequence[Sequence[Sequence[Q]]]):
        mats = []
        size: Optional[int] = None
        for a in matrices:
            rows = tuple(tuple(Q(x) for x in row) for row in a)
            if size is None:
                size = len(rows)
            if len(rows) != size or any(len(r) != size for r in rows):
                raise UsageError("matrices must be square and of equal size")
            mats.append(rows)
        if not mats:
            raise UsageError("at least one matrix is required")
        self.matrices = tuple(mats)

    @property
    def n(self) -> int:
        return len(self.matrices[0])

    @property
    def m(self) -> int:
        return len(self.matrices)


# -- induced constructions ----------------------------------------------------


def induced_ode(system, j: int) -> OdeSystem:
    """The ordinary system obtained by keeping time direction / operator ``j`` (0-based)."""
    if isinstance(system, OdeSystem):
        if j != 0:
            raise UsageError("an ordinary system induces only itself (j = 0)")
        return system
    if isinstance(system, TotalSystem):
        cols = system.columns
    elif isinstance(system, PartialSystem):
        cols = system.coefficient_fields
    else:
        raise UsageError("induced systems exist for total and partial systems only")
    if not 0 <= j < len(cols):
        raise UsageError(f"induced index {j + 1} out of range 1..{len(cols)}")
    return OdeSystem(system.vt, cols[j])


def pfaff_from_ode(system: OdeSystem) -> PfaffSystem:
    """All pairwise forms f_q dx_h - f_h dx_q, ordered lexicographically by (q, h)."""
    vt = system.vt
    n = vt.nbase
    if n < 2:
        raise UsageError("pairwise forms need at least two variables")
    f = system.f.components
    forms = []
    for q in range(n):
        for h in range(q + 1, n):
            forms.append(KForm(vt, 1, {(h,): f[q], (q,): -f[h]}))
    return PfaffSystem(vt, forms)


def pair_index(n: int, q: int, h: int) -> int:
    """Position of the (q, h) pairwise form, 0-based, q < h 0-based indices."""
    if not 0 <= q < h < n:
        raise UsageError("pair indices must satisfy q < h within range")
    return sum(n - 1 - k for k in range(q)) + (h - q - 1)


def orthogonal_basis_fields(w: KForm) -> list[VectorField]:
    """The n-1 canonical fields orthogonal to the coefficient field of a 1-form.

    Field tau has component a_n in slot tau, -a_tau in slot n, zeros elsewhere.
    """
    if w.degree != 1:
        raise UsageError("orthogonal basis fields require a 1-form")
    vt = w.vt
    n = vt.nbase
    a = w.components()
    zero = Polynomial.zero(vt)
    out = []
    for tau in range(n - 1):
        comps = [zero] * n
        comps[tau] = a[n - 1]
        comps[n - 1] = -a[tau]
        out.append(VectorField(vt, comps))
    return out


class FrobeniusReport:
    """Outcome of the pairwise-commutator complete-solvability check."""

    __slots__ = ("solvable", "failing_pair", "witness")

    def __init__(self, solvable: bool, failing_pair=None, witness=None):
        self.solvable = solvable
        self.failing_pair = failing_pair
        self.witness = witness


def frobenius_total(system) -> FrobeniusReport:
    """Check that all induced operators commute pairwise."""
    ops = system.operators()
    for j, l in itertools.combinations(range(len(ops)), 2):
        b = lie_bracket(ops[j], ops[l])
        if not b.is_null:
            return FrobeniusReport(False, (j, l), b)
    return FrobeniusReport(True)


class IntegrabilityReport:
    """Outcome of the single-equation integrability check d w ^ w = 0."""

    __slots__ = ("integrable", "residual")

    def __init__(self, integrable: bool, residual: KForm):
        self.integrable = integrable
        self.residual = residual


def frobenius_pfaffian(w: KForm) -> IntegrabilityReport:
    if w.degree != 1:
        raise UsageError("integrability check requires a 1-form")
    residual = wedge(exterior_derivative(w), w)
    return IntegrabilityReport(residual.is_zero, residual)


class CommutingReport:
    __slots__ = ("commuting", "failing_pair")

    def __init__(self, commuting: bool, failing_pair=None):
        self.commuting = commuting
        self.failing_pair = failing_pair


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def linear_commuting(system: LinearTotalSystem) -> CommutingReport:
    mats = system.matrices
    for j, l in itertools.combinations(range(len(mats)), 2):
        if _mat_mul(mats[j], mats[l]) != _mat_mul(mats[l], mats[j]):
            return CommutingReport(False, (j, l))
    return CommutingReport(True)


def sampled_independence_rank(fields: Sequence[VectorField], seed: int = 42, trials: int = 20):
    """Advisory: largest coefficient-matrix rank seen at random rational points.

    Returns (best_rank, m).  The result is reported as advice only; a rank
    below m at every sampled point suggests the equations may be linearly
    bound on the domain.
    """
    if not fields:
        return 0, 0
    vt = fields[0].vt
    m = len(fields)
    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        point = {v: Q(rng.randint(-10, 10), rng.randint(1, 16)) for v in vt.base_vars}
        try:
            rows = [[evaluate(c, point) for c in f.components] for f in fields]
        except ArithmeticError:
            continue
        if any(isinstance(x, float) for row in rows for x in row):
            rank = _float_rank([[float(x) for x in row] for row in rows])
        else:
            rank = _exact_rank(rows)
        best = max(best, rank)
        if best == m:
            break
    return best, m


def _exact_rank(rows) -> int:
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / pr[col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], pr)]
        rank += 1
    return rank


def _float_rank(rows, tol: float = 1e-9) -> int:
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        pivot = None
        best = tol
        for r in range(rank, len(rows)):
            if abs(rows[r][col]) > best:
                best = abs(rows[r][col])
                pivot = r
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and abs(rows[r][col]) > tol:
                factor = rows[r][col] / pr[col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], pr)]
        rank += 1
    return rank
