"""Tests for the domain model and sign-verdict engine."""

import random
from fractions import Fraction as Q

import pytest

from sample_systems import sum_of_squares, var
from cyclebound.ring import Polynomial, VarTable, evaluate, make_scaled
from cyclebound.sign import (
    Domain,
    SignKind,
    homotopy_rank,
    monomial_locus_dimension,
    sign_of,
    zero_set_within,
)


def origin(vt):
    return {v: Q(0) for v in vt.base_vars}


class TestHomotopyRank:
    def test_punctured_space_automatic(self):
        vt = VarTable(["x1", "x2", "x3", "x4"])
        d = Domain(vt, excluded_points=[origin(vt)])
        assert homotopy_rank(d, 4) == 1

    def test_full_space_zero(self):
        vt = VarTable(["x1", "x2", "x3"])
        assert homotopy_rank(Domain(vt), 3) == 0

    def test_off_center_puncture(self):
        vt = VarTable(["x1", "x2", "x3"])
        d = Domain(vt, excluded_points=[{"x1": Q(2), "x2": Q(0), "x3": Q(0)}])
        assert homotopy_rank(d, 3) == 1

    def test_declared_rank_wins(self):
        vt = VarTable(["x1", "x2", "x3", "x4", "x5"])
        d = Domain(vt, declared_ranks={4: 1})
        assert homotopy_rank(d, 4) == 1
        assert homotopy_rank(d, 3) is None


class TestSignCertificates:
    def test_negative_definite_with_constant(self):
        vt = VarTable(["x1", "x2", "x3", "x4", "x5"])
        x4 = var(vt, "x4")
        p = -(Polynomial.constant(vt, 3) + x4 * x4 * 2)
        v = sign_of(p, Domain(vt))
        assert v.kind is SignKind.NEGATIVE_DEFINITE

    def test_const_sign_not_definite(self):
        vt = VarTable(["x1", "x2", "x3", "x4"])
        x1 = var(vt, "x1")
        d = Domain(vt, excluded_points=[origin(vt)])
        v = sign_of(-(x1 * x1 * 3), d)
        assert v.kind is SignKind.NEGATIVE_CONST_SIGN

    def test_indefinite_with_witnesses(self):
        vt = VarTable(["x1", "x2"])
        x1, x2 = var(vt, "x1"), var(vt, "x2")
        p = x1 * x1 - x2 * x2
        v = sign_of(p, Domain(vt))
        assert v.kind is SignKind.INDEFINITE
        w_pos, w_neg = v.witnesses
        assert evaluate(p, w_pos) > 0
        assert evaluate(p, w_neg) < 0

    def test_sum_of_squares_definite_off_origin(self):
        vt = VarTable(["x1", "x2", "x3", "x4"])
        g = sum_of_squares(vt, ["x1", "x2", "x3", "x4"])
        d = Domain(vt, excluded_points=[origin(vt)])
        assert sign_of(g, d).kind is SignKind.POSITIVE_DEFINITE
        # without the puncture it only has constant sign
        assert sign_of(g, Domain(vt)).kind is SignKind.POSITIVE_CONST_SIGN

    def test_positive_base_extraction(self):
        # g is declared positive; 2/g^3 must come out positive definite even
        # though the excluded set is not a single point
        vt = VarTable(["x1", "x2", "x3", "x4", "x5"])
        g = sum_of_squares(vt, ["x1", "x2", "x3", "x4"])
        d = Domain(vt, positive_bases=[g], declared_ranks={4: 1})
        frac = Polynomial.constant(vt, 2) / g ** 3
        assert sign_of(frac, d).kind is SignKind.POSITIVE_DEFINITE

    def test_scaled_power_requires_declaration(self):
        vt = VarTable(["x1", "x2", "x3"])
        g = sum_of_squares(vt, ["x1", "x2", "x3"])
        v = make_scaled(Polynomial.constant(vt, 2), [(g, Q(-5, 2))])
        bare = Domain(vt, excluded_points=[origin(vt)])
        declared = Domain(vt, excluded_points=[origin(vt)], positive_bases=[g])
        assert sign_of(v, bare).kind is SignKind.UNKNOWN
        assert sign_of(v, declared).kind is SignKind.POSITIVE_DEFINITE

    def test_identically_zero(self):
        vt = VarTable(["x1"])
        assert sign_of(Polynomial.zero(vt), Domain(vt)).kind is SignKind.IDENTICALLY_ZERO

    def test_positive_scaling_invariance(self):
        rng = random.Random(17)
        vt = VarTable(["x1", "x2"])
        import props

        for _ in range(50):
            p = props._random_poly(vt, rng)
            c = Q(rng.randint(1, 9), rng.randint(1, 9))
            d = Domain(vt)
            assert sign_of(p.scale(c), d).kind is sign_of(p, d).kind


class TestSamplingSoundness:
    def test_definite_never_contradicted(self):
        rng = random.Random(99)
        vt = VarTable(["x1", "x2", "x3"])
        g = sum_of_squares(vt, ["x1", "x2", "x3"])
        p = g + Polynomial.one(vt)
        d = Domain(vt)
        assert sign_of(p, d).kind is SignKind.POSITIVE_DEFINITE
        from cyclebound.sign import sample_points

        for pt in sample_points(d, rng, 1000):
            assert evaluate(p, pt) > 0

    def test_const_sign_never_strictly_opposite(self):
        rng = random.Random(98)
        vt = VarTable(["x1", "x2"])
        p = var(vt, "x1") ** 2
        d = Domain(vt)
        assert sign_of(p, d).kind is SignKind.POSITIVE_CONST_SIGN
        from cyclebound.sign import sample_points

        for pt in sample_points(d, rng, 1000):
            assert evaluate(p, pt) >= 0


class TestZeroSet:
    def test_sum_of_squares_at_origin(self):
        vt = VarTable(["x1", "x2", "x3", "x4"])
        g = sum_of_squares(vt, ["x1", "x2", "x3", "x4"])
        d = Domain(vt, excluded_points=[origin(vt)])
        assert zero_set_within(g, d) == "yes"

    def test_hyperplane_zero_set(self):
        vt = VarTable(["x1", "x2"])
        d = Domain(vt, excluded_points=[origin(vt)])
        assert zero_set_within(var(vt, "x1") ** 2, d) == "no"

    def test_mixed_polynomial_unknown(self):
        vt = VarTable(["x1", "x2"])
        p = var(vt, "x1") * var(vt, "x2") + Polynomial.one(vt)
        assert zero_set_within(p, Domain(vt)) == "unknown"

    def test_locus_dimension(self):
        vt = VarTable(["x", "y", "z"])
        x, y, z = (var(vt, n) for n in "xyz")
        # |A|^2 for A = (yz, 2xz, 3xy): vanishes on the three axes (dimension 1)
        p = (y * z) ** 2 + (x * z) ** 2 * 4 + (x * y) ** 2 * 9
        assert monomial_locus_dimension(p, 3) == 1
        g = sum_of_squares(vt, ["x", "y", "z"])
        assert monomial_locus_dimension(g, 3) == 0
        assert monomial_locus_dimension(g + Polynomial.one(vt), 3) == -1
