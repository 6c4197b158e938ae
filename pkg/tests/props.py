"""Randomized structural property checks shared by module and acceptance tests.

Every function takes an explicit case count and seed so the acceptance suite
can pin the advertised numbers while module tests may use smaller ones.
All assertions are structural (exact arithmetic); a single failure raises.
"""

import random
from fractions import Fraction as Q

from cyclebound.forms import (
    DiffOperator,
    KForm,
    VectorField,
    boundary_form,
    divergence,
    exterior_derivative,
    lie_bracket,
    potential,
    restrict,
    wedge,
)
from cyclebound.ring import Polynomial, VarTable, evaluate, exact_divide


def _random_poly(vt, rng, degree=3, nterms=4):
    terms = {}
    for _ in range(rng.randint(1, nterms)):
        e = [0] * vt.ncols
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(vt.nbase)] += 1
        terms[tuple(e)] = Q(rng.randint(-9, 9))
    return Polynomial(vt, terms)


def _random_form(vt, rng, degree, coeff_degree=3):
    import itertools

    n = vt.nbase
    coeffs = {}
    keys = list(itertools.combinations(range(n), degree))
    rng.shuffle(keys)
    for idx in keys[: rng.randint(1, min(3, len(keys)))]:
        coeffs[idx] = _random_poly(vt, rng, degree=coeff_degree)
    return KForm(vt, degree, coeffs)


def _random_table(rng, max_n=5, min_n=2):
    n = rng.randint(min_n, max_n)
    return VarTable([f"x{i+1}" for i in range(n)])


def check_d_squared_zero(cases=100, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng, min_n=3)
        deg = rng.randint(0, vt.nbase - 2)
        a = _random_form(vt, rng, deg)
        dd = exterior_derivative(exterior_derivative(a))
        assert dd.is_zero, f"d(d a) != 0 for {a}"


def check_graded_anticommutativity(cases=100, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng)
        p = rng.randint(0, vt.nbase)
        q = rng.randint(0, vt.nbase)
        a = _random_form(vt, rng, p) if p <= vt.nbase else KForm.zero(vt, p)
        b = _random_form(vt, rng, q)
        lhs = wedge(a, b)
        rhs = wedge(b, a)
        if (p * q) % 2:
            rhs = -rhs
        assert lhs == rhs, "wedge graded anticommutativity failed"


def check_leibniz(cases=100, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng, min_n=3)
        p = rng.randint(0, vt.nbase - 1)
        q = rng.randint(0, vt.nbase - 1 - min(p, vt.nbase - 1))
        a = _random_form(vt, rng, p)
        b = _random_form(vt, rng, q)
        lhs = exterior_derivative(wedge(a, b))
        rhs = wedge(exterior_derivative(a), b)
        term2 = wedge(a, exterior_derivative(b))
        rhs = rhs + (term2 if p % 2 == 0 else -term2)
        assert lhs == rhs, "Leibniz rule for d over wedge failed"


def check_divergence_boundary_identity(cases=100, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng)
        f = VectorField(vt, [_random_poly(vt, rng) for _ in range(vt.nbase)])
        lhs = exterior_derivative(boundary_form(f))
        n = vt.nbase
        vol_idx = tuple(range(n))
        coeff = lhs.coefficient(vol_idx)
        assert coeff == divergence(f), "boundary-form divergence identity failed"


def check_bracket_antisymmetry_jacobi(cases=50, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng, max_n=3)
        ops = [
            DiffOperator(
                VectorField(vt, [_random_poly(vt, rng, degree=2, nterms=3) for _ in range(vt.nbase)])
            )
            for _ in range(3)
        ]
        x, y, z = ops
        assert lie_bracket(x, y).field == lie_bracket(y, x).field.scale(-1)
        jac = (
            lie_bracket(x, lie_bracket(y, z)).field.as_one_form()
            + lie_bracket(y, lie_bracket(z, x)).field.as_one_form()
            + lie_bracket(z, lie_bracket(x, y)).field.as_one_form()
        )
        assert jac.is_zero, "Jacobi identity failed"


def check_potential_inverts_d(cases=100, seed=42):
    rng = random.Random(seed)
    for _ in range(cases):
        vt = _random_table(rng)
        F = _random_poly(vt, rng, degree=4, nterms=5)
        w = exterior_derivative(KForm.scalar(vt, F))
        G = potential(w)
        assert exterior_derivative(KForm.scalar(vt, G)) == w, "d(potential(w)) != w"


def check_restrict_evaluation_commutes(cases=100, seed=42):
    rng = random.Random(seed)
    for case in range(cases):
        vt = _random_table(rng, min_n=3)
        n = vt.nbase
        deg = rng.randint(1, min(2, n - 1))
        a = _random_form(vt, rng, deg, coeff_degree=2)
        elim = rng.sample(range(n), rng.randint(1, n - deg if n - deg >= 1 else 1))
        subst = {}
        for i in elim:
            comps = []
            for j in range(n):
                comps.append(
                    Polynomial.zero(vt) if j in elim else _random_poly(vt, rng, degree=2, nterms=2)
                )
            subst[i] = KForm.one_form(vt, comps)
        restricted = restrict(a, subst)
        point = {v: Q(rng.randint(-5, 5), rng.randint(1, 4)) for v in vt.base_vars}
        # evaluate all coefficients first, then restrict in the constant algebra
        a_const = KForm(
            vt, a.degree, {i: Polynomial.constant(vt, evaluate(c, point)) for i, c in a.coeffs.items()}
        )
        subst_const = {
            i: KForm(
                vt, 1, {k: Polynomial.constant(vt, evaluate(c, point)) for k, c in w.coeffs.items()}
            )
            for i, w in subst.items()
        }
        expected = restrict(a_const, subst_const)
        for idx in set(restricted.coeffs) | set(expected.coeffs):
            lhs = evaluate(restricted.coefficient(idx), point)
            rhs = evaluate(expected.coefficient(idx), point)
            assert lhs == rhs, f"restrict/evaluate mismatch at {idx} (case {case})"


def check_exact_divide_roundtrip(cases=200, seed=42):
    rng = random.Random(seed)
    done = 0
    while done < cases:
        vt = _random_table(rng)
        a = _random_poly(vt, rng, degree=4, nterms=6)
        b = _random_poly(vt, rng, degree=4, nterms=6)
        if b.is_zero:
            continue
        assert a + b - b == a
        assert exact_divide(a * b, b) == a
        done += 1
