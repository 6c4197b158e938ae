"""Domain model and the sign-verdict engine.

The domain is an ambient space with finitely many excluded rational points,
user-declared homotopy ranks, and a list of polynomial bases asserted
positive on the domain.  Sign analysis is a sound-but-incomplete certificate
system: a syntactic certificate (same-signed even-exponent monomials, with
declared positive bases stripped first) decides constant sign and
definiteness; when no certificate applies, random sampling can only
demonstrate indefiniteness with two explicit witness points or give up with
``UNKNOWN``.  A sampling result never certifies a sign.
"""

from __future__ import annotations

import enum
import itertools
import random
from fractions import Fraction as Q
from typing import Mapping, Optional, Sequence

from .ring import (
    EvaluationError,
    Polynomial,
    PolyFraction,
    ScaledFraction,
    UsageError,
    VarTable,
    evaluate,
    exact_divide,
)

DEFAULT_SEED = 42
SAMPLE_BOX = 10
SAMPLE_MAX_DEN = 16
SAMPLE_COUNT = 1000


class SignKind(enum.Enum):
    POSITIVE_DEFINITE = "positive-definite"
    NEGATIVE_DEFINITE = "negative-definite"
    POSITIVE_CONST_SIGN = "positive-constant-sign"
    NEGATIVE_CONST_SIGN = "negative-constant-sign"
    IDENTICALLY_ZERO = "identically-zero"
    INDEFINITE = "indefinite"
    UNKNOWN = "unknown"


class SignVerdict:
    """A sign conclusion; indefinite verdicts carry two witness points."""

    __slots__ = ("kind", "witnesses")

    def __init__(self, kind: SignKind, witnesses: tuple = ()):
        if kind is SignKind.INDEFINITE and len(witnesses) != 2:
            raise UsageError("an indefinite verdict requires two witness points")
        self.kind = kind
        self.witnesses = witnesses

    @property
    def is_definite(self) -> bool:
        return self.kind in (SignKind.POSITIVE_DEFINITE, SignKind.NEGATIVE_DEFINITE)

    @property
    def is_const_sign(self) -> bool:
        """Definite or constant sign (vanishing allowed on a null set only)."""
        return self.is_definite or self.kind in (
            SignKind.POSITIVE_CONST_SIGN,
            SignKind.NEGATIVE_CONST_SIGN,
        )

    @property
    def sign(self) -> Optional[int]:
        if self.kind in (SignKind.POSITIVE_DEFINITE, SignKind.POSITIVE_CONST_SIGN):
            return 1
        if self.kind in (SignKind.NEGATIVE_DEFINITE, SignKind.NEGATIVE_CONST_SIGN):
            return -1
        if self.kind is SignKind.IDENTICALLY_ZERO:
            return 0
        return None

    def __eq__(self, other):
        if not isinstance(other, SignVerdict):
            return NotImplemented
        return self.kind == other.kind

    def __str__(self) -> str:
        return self.kind.value

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SignVerdict({self.kind.value})"


def _verdict_from(sign: int, definite: bool) -> SignVerdict:
    if sign > 0:
        return SignVerdict(SignKind.POSITIVE_DEFINITE if definite else SignKind.POSITIVE_CONST_SIGN)
    return SignVerdict(SignKind.NEGATIVE_DEFINITE if definite else SignKind.NEGATIVE_CONST_SIGN)


class Domain:
    """Ambient space R^n minus finitely many points, with declared structure."""

    __slots__ = ("vt", "excluded_points", "declared_ranks", "positive_bases", "label")

    def __init__(
        self,
        vt: VarTable,
        excluded_points: Sequence[Mapping[str, Q]] = (),
        declared_ranks: Optional[Mapping[int, int]] = None,
        positive_bases: Sequence[Polynomial] = (),
        label: str = "",
    ):
        pts = []
        for p in excluded_points:
            pt = {}
            for name in vt.base_vars:
                if name not in p:
                    raise UsageError(f"excluded point does not assign {name!r}")
                pt[name] = Q(p[name])
            pts.append(pt)
        seen = [tuple(p[v] for v in vt.base_vars) for p in pts]
        if len(set(seen)) != len(seen):
            raise UsageError("excluded points must be distinct")
        ranks = dict(declared_ranks or {})
        for nu, r in ranks.items():
            if r < 0:
                raise UsageError("declared homotopy ranks must be nonnegative")
        for b in positive_bases:
            if not isinstance(b, Polynomial) or b.is_zero:
                raise UsageError("positive bases must be nonzero polynomials")
        self.vt = vt
        self.excluded_points = tuple(pts)
        self.declared_ranks = ranks
        self.positive_bases = tuple(positive_bases)
        self.label = label

    @property
    def n(self) -> int:
        return self.vt.nbase

    def describe(self) -> str:
        if self.label:
            return self.label
        if not self.excluded_points:
            return f"R^{self.n}"
        pts = "; ".join(
            "(" + ", ".join(str(p[v]) for v in self.vt.base_vars) + ")"
            for p in self.excluded_points
        )
        return f"R^{self.n} minus {{{pts}}}"

    def contains(self, point: Mapping[str, Q]) -> bool:
        key = tuple(Q(point[v]) for v in self.vt.base_vars)
        return all(
            key != tuple(p[v] for v in self.vt.base_vars) for p in self.excluded_points
        )


def homotopy_rank(domain: Domain, nu: int) -> Optional[int]:
    """Rank of pi_(nu-1) of the domain: declared, or automatic for punctured space."""
    if nu in domain.declared_ranks:
        return domain.declared_ranks[nu]
    if nu == domain.n:
        return len(domain.excluded_points)
    return None


# -- syntactic certificates ---------------------------------------------------


def _even_monomial_sign(p: Polynomial) -> Optional[int]:
    """+1/-1 when every monomial has even exponents and one coefficient sign."""
    sign = 0
    for e, c in p.terms:
        if any(k % 2 for k in e):
            return None
        s = 1 if c > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return None
    return sign or None


def _monomial_supports(p: Polynomial) -> list[frozenset]:
    return [frozenset(i for i, k in enumerate(e) if k) for e, _ in p.terms]


def monomial_locus_dimension(p: Polynomial, ambient: int) -> Optional[int]:
    """Dimension of the common zero set of a same-signed even-monomial polynomial.

    The zero set of such a polynomial is the simultaneous vanishing locus of
    its monomials, a union of coordinate subspaces.  Returns the largest
    subspace dimension, -1 for an empty locus (a constant term is present),
    or None when the certificate does not apply.
    """
    if p.is_zero:
        return ambient
    if _even_monomial_sign(p) is None:
        return None
    supports = _monomial_supports(p)
    if any(not s for s in supports):
        return -1  # constant monomial never vanishes
    # the locus is the union over minimal hitting sets S of {x_S = 0};
    # its dimension is ambient - (minimum hitting set size).
    universe = sorted(set().union(*supports))
    best = None
    for size in range(1, len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            s = set(combo)
            if all(s & sup for sup in supports):
                best = size
                break
        if best is not None:
            break
    if best is None:
        best = len(universe)
    return ambient - best


def zero_set_within(p: Polynomial, domain: Domain) -> str:
    """'yes' when the zero set certificate confines vanishing to excluded points.

    Applies to same-signed even-monomial polynomials only; everything else is
    'unknown'.  'yes' means the simultaneous-vanishing locus of the monomials
    is finite and contained in the excluded points (in practice: empty, or
    exactly the origin with the origin excluded).
    """
    if not isinstance(p, Polynomial):
        return "unknown"
    if p.is_zero:
        return "no"
    dim = monomial_locus_dimension(p, domain.n)
    if dim is None:
        return "unknown"
    if dim < 0:
        return "yes"
    if dim > 0:
        return "no"
    origin = {v: Q(0) for v in domain.vt.base_vars}
    return "yes" if not domain.contains(origin) else "no"


def _strip_positive_bases(p: Polynomial, domain: Domain) -> tuple[Polynomial, int]:
    """Divide out declared positive bases as often as they divide exactly."""
    stripped = 0
    changed = True
    while changed and not p.is_constant:
        changed = False
        for b in domain.positive_bases:
            if b.is_constant:
                continue
            q = exact_divide(p, b)
            if q is not None and not q.is_zero:
                p = q
                stripped += 1
                changed = True
    return p, stripped


def _polynomial_verdict(p: Polynomial, domain: Domain) -> SignVerdict:
    if p.is_zero:
        return SignVerdict(SignKind.IDENTICALLY_ZERO)
    if p.uses_radicals:
        return SignVerdict(SignKind.UNKNOWN)
    residual, _ = _strip_positive_bases(p, domain)
    sign = _even_monomial_sign(residual)
    if sign is None:
        return SignVerdict(SignKind.UNKNOWN)
    dim = monomial_locus_dimension(residual, domain.n)
    if dim is None:  # pragma: no cover - guarded by the sign certificate
        return SignVerdict(SignKind.UNKNOWN)
    if dim < 0:
        return _verdict_from(sign, definite=True)
    if dim == 0:
        origin = {v: Q(0) for v in domain.vt.base_vars}
        return _verdict_from(sign, definite=not domain.contains(origin))
    return _verdict_from(sign, definite=False)


def _certificate_verdict(value, domain: Domain) -> SignVerdict:
    if isinstance(value, Polynomial):
        return _polynomial_verdict(value, domain)
    if isinstance(value, PolyFraction):
        vn = _polynomial_verdict(value.num, domain)
        vd = _polynomial_verdict(value.den, domain)
        if vn.kind is SignKind.IDENTICALLY_ZERO:
            return vn
        if vn.is_const_sign and vd.is_const_sign:
            return _verdict_from(
                vn.sign * vd.sign, definite=vn.is_definite and vd.is_definite
            )
        return SignVerdict(SignKind.UNKNOWN)
    if isinstance(value, ScaledFraction):
        if value.is_zero:
            return SignVerdict(SignKind.IDENTICALLY_ZERO)
        for base, _ in value.powers:
            if not any(base == b for b in domain.positive_bases):
                return SignVerdict(SignKind.UNKNOWN)
        return _certificate_verdict(value.frac, domain)
    raise UsageError("sign analysis applies to ring values")


def sample_points(domain: Domain, rng: random.Random, count: int):
    """Random rational points with denominators <= 16 in the sampling box."""
    names = domain.vt.base_vars
    produced = 0
    attempts = 0
    while produced < count and attempts < count * 4:
        attempts += 1
        pt = {}
        for v in names:
            den = rng.randint(1, SAMPLE_MAX_DEN)
            num = rng.randint(-SAMPLE_BOX * den, SAMPLE_BOX * den)
            pt[v] = Q(num, den)
        if not domain.contains(pt):
            continue
        produced += 1
        yield pt


def _format_point(domain: Domain, pt: Mapping[str, Q]) -> str:
    return "(" + ", ".join(str(pt[v]) for v in domain.vt.base_vars) + ")"


def sign_of(
    value,
    domain: Domain,
    seed: int = DEFAULT_SEED,
    samples: int = SAMPLE_COUNT,
) -> SignVerdict:
    """Sign verdict for a ring value on the domain.

    Tries the syntactic certificate first; if none applies, samples the
    domain looking for two strict opposite signs (an ``INDEFINITE`` witness
    pair).  Sampling alone never upgrades to a constant-sign verdict.
    """
    if isinstance(value, (int, Q)):
        q = Q(value)
        if q == 0:
            return SignVerdict(SignKind.IDENTICALLY_ZERO)
        return _verdict_from(1 if q > 0 else -1, definite=True)
    verdict = _certificate_verdict(value, domain)
    if verdict.kind is not SignKind.UNKNOWN:
        return verdict
    rng = random.Random(seed)
    pos = neg = None
    for pt in sample_points(domain, rng, samples):
        try:
            v = evaluate(value, pt)
        except EvaluationError:
            continue
        if isinstance(v, float):
            if abs(v) <= 1e-9:
                continue
            s = 1 if v > 0 else -1
        else:
            if v == 0:
                continue
            s = 1 if v > 0 else -1
        if s > 0 and pos is None:
            pos = pt
        if s < 0 and neg is None:
            neg = pt
        if pos is not None and neg is not None:
            return SignVerdict(SignKind.INDEFINITE, witnesses=(pos, neg))
    return SignVerdict(SignKind.UNKNOWN)
