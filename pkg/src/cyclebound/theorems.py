"""One checker per boundedness/absence test.

Each checker audits every hypothesis of its test symbolically, echoes its
inputs, and emits a :class:`CheckReport`.  Checkers certify hypotheses, not
the theorems themselves: when all premises pass, the report states the
test's consequence verbatim (a bound tied to the homotopy rank of the
domain, an absence statement, or a classification).  A report never carries
a bound or absence conclusion while any hypothesis is failing or unknown.

Checker identifiers follow the package's test catalog (T0.1 through T2.18
with corollaries C1.1 through C2.6, the D-suffixed variants acting on an
ordinary system through its pairwise Pfaff equations, and PI for partial
integral certificates).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Mapping, Optional, Sequence

from .forms import (
    DiffOperator,
    KForm,
    VectorField,
    apply_operator,
    divergence,
    exterior_derivative,
    partial_divergence,
    potential,
    restrict,
    volume_coefficient,
    wedge,
)
from .ring import (
    Polynomial,
    PolyFraction,
    ScaledFraction,
    UsageError,
    values_equal,
)
from .sign import (
    DEFAULT_SEED,
    Domain,
    SignKind,
    SignVerdict,
    homotopy_rank,
    monomial_locus_dimension,
    sign_of,
)
from .systems import (
    ExteriorSystem,
    LinearTotalSystem,
    OdeSystem,
    PartialSystem,
    PfaffSystem,
    TotalSystem,
    frobenius_pfaffian,
    frobenius_total,
    induced_ode,
    linear_commuting,
    orthogonal_basis_fields,
    pfaff_from_ode,
    sampled_independence_rank,
)
from .linalg import eigen_pair_sum_resultant

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"
ASSUMED = "assumed"
ADVISORY = "advisory"

KIND_HYPERSURFACES = "compact integral hypersurfaces"
KIND_ORBITS = "compact regular orbits"
KIND_LIMIT_CYCLES = "limit cycles"
KIND_LEAVES = "compact leaves"
KIND_CLOSED_TRAJECTORIES = "closed trajectories"
KIND_CLOSED_CURVES = "simple closed curves made from trajectories"
KIND_ISOLATED_HYPERSURFACES = "isolated compact regular integral hypersurfaces"


def kind_manifolds(nu: int) -> str:
    return f"compact regular integral manifolds of dimension {nu - 1}"


@dataclass
class Hypothesis:
    description: str
    verdict: str
    witness: str = ""

    @property
    def gating(self) -> bool:
        """True when this hypothesis blocks a bound/absence conclusion."""
        return self.verdict in (FAIL, UNKNOWN)


@dataclass
class Conclusion:
    kind: str  # "bound" | "absence" | "not-applicable" | "classification"
    text: str
    bound: Optional[int] = None


@dataclass
class CheckReport:
    theorem_id: str
    object_kind: str
    hypotheses: list
    conclusion: Conclusion
    inputs_echo: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.conclusion.kind in ("bound", "absence", "classification")


@dataclass
class InvariantCertificate:
    """A candidate w with cofactors Phi_j satisfying X_j w = Phi_j * w."""

    w: Polynomial
    cofactors: list


def _blocked(hypotheses) -> Optional[Hypothesis]:
    for h in hypotheses:
        if h.gating:
            return h
    return None


def _sign_witness(verdict: SignVerdict, value) -> str:
    text = f"{value} is {verdict}"
    if verdict.kind is SignKind.INDEFINITE:
        pos, neg = verdict.witnesses
        fmt = lambda p: "(" + ", ".join(f"{k}={v}" for k, v in p.items()) + ")"
        text += f"; positive at {fmt(pos)}, negative at {fmt(neg)}"
    return text


def _conclude_bound(
    theorem_id, object_kind, hypotheses, domain, nu, inputs, details=None, rider=""
) -> CheckReport:
    """Emit a bound conclusion gated on the hypotheses and the homotopy rank."""
    blocker = _blocked(hypotheses)
    if blocker is not None:
        return CheckReport(
            theorem_id,
            object_kind,
            hypotheses,
            Conclusion("not-applicable", f"hypothesis not established: {blocker.description}"),
            inputs,
            details or {},
        )
    rank = homotopy_rank(domain, nu)
    if rank is None:
        hypotheses.append(
            Hypothesis(
                f"homotopy rank of dimension {nu - 1} spheres in the domain is known",
                FAIL,
                "declare the rank in the domain block",
            )
        )
        return CheckReport(
            theorem_id,
            object_kind,
            hypotheses,
            Conclusion("not-applicable", "homotopy rank unknown: declare it on the domain"),
            inputs,
            details or {},
        )
    text = f"at most {rank} {object_kind} in {domain.describe()}"
    if rider:
        text += f"; {rider}"
    return CheckReport(
        theorem_id,
        object_kind,
        hypotheses,
        Conclusion("bound", text, bound=rank),
        inputs,
        details or {},
    )


def _conclude_absence(theorem_id, object_kind, hypotheses, domain, inputs, details=None) -> CheckReport:
    blocker = _blocked(hypotheses)
    if blocker is not None:
        return CheckReport(
            theorem_id,
            object_kind,
            hypotheses,
            Conclusion("not-applicable", f"hypothesis not established: {blocker.description}"),
            inputs,
            details or {},
        )
    where = domain.describe() if domain is not None else "the whole space"
    return CheckReport(
        theorem_id,
        object_kind,
        hypotheses,
        Conclusion("absence", f"no {object_kind} in {where}"),
        inputs,
        details or {},
    )


def _nonzero_system_hypothesis(field_or_forms) -> Hypothesis:
    if isinstance(field_or_forms, VectorField):
        zero = field_or_forms.is_zero
    else:
        zero = all(getattr(f, "is_zero", False) for f in field_or_forms)
    return Hypothesis(
        "the system is not identically zero",
        FAIL if zero else PASS,
        "degenerate zero system" if zero else "",
    )


def _independence_advisory(fields, seed) -> Hypothesis:
    rank, m = sampled_independence_rank(fields, seed=seed)
    if rank == m:
        return Hypothesis(
            "equations not linearly bound (sampled rank)",
            ADVISORY,
            f"coefficient matrix reaches full rank {m} at a sample point",
        )
    return Hypothesis(
        "equations not linearly bound (sampled rank)",
        ADVISORY,
        f"sampled rank never exceeded {rank} of {m}; equations may be linearly bound",
    )


# -- ordinary systems ---------------------------------------------------------


def check_tkachev_absence(system: OdeSystem, n_func, domain: Domain, seed: int = DEFAULT_SEED) -> CheckReport:
    """T0.2: a function with definite derivative along the flow forbids closed trajectories."""
    h = apply_operator(system.operator(), n_func)
    verdict = sign_of(h, domain, seed=seed)
    hyps = [
        _nonzero_system_hypothesis(system.f),
        Hypothesis(
            "the derivative H = X(N) along the system is definite on the domain",
            PASS if verdict.is_definite else FAIL,
            _sign_witness(verdict, h),
        ),
    ]
    inputs = {"N": str(n_func), "H": str(h)}
    return _conclude_absence("T0.2", KIND_CLOSED_TRAJECTORIES, hyps, domain, inputs, {"H": h, "verdict": verdict})


def check_dulac_bound(
    system: OdeSystem,
    phi,
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theorem_id: Optional[str] = None,
    object_kind: Optional[str] = None,
    note: str = "",
) -> CheckReport:
    """T2.9 (n >= 3) / T0.1 (planar): constant-sign divergence of phi*f bounds the count.

    The planar test also accepts an identically zero divergence and requires
    the multiplier itself to have constant sign; the n-dimensional test
    requires strictly constant sign of the divergence.
    """
    n = system.n
    planar = n == 2
    tid = theorem_id or ("T0.1" if planar else "T2.9")
    kind = object_kind or (KIND_LIMIT_CYCLES if planar else KIND_HYPERSURFACES)
    scaled = system.f.scale(phi)
    div = divergence(scaled)
    verdict = sign_of(div, domain, seed=seed)
    hyps = [_nonzero_system_hypothesis(system.f)]
    if planar:
        mu_verdict = sign_of(phi, domain, seed=seed)
        hyps.append(
            Hypothesis(
                "the multiplier has constant sign on the domain",
                PASS if mu_verdict.is_const_sign else FAIL,
                _sign_witness(mu_verdict, phi),
            )
        )
        ok = verdict.is_const_sign or verdict.kind is SignKind.IDENTICALLY_ZERO
        desc = "div(mu*f) has constant sign or vanishes identically on the domain"
    else:
        ok = verdict.is_const_sign
        desc = "div(phi*f) has constant sign on the domain"
    hyps.append(Hypothesis(desc, PASS if ok else FAIL, _sign_witness(verdict, div)))
    inputs = {"multiplier": str(phi), "divergence": str(div)}
    if note:
        inputs["note"] = note
    return _conclude_bound(tid, kind, hyps, domain, n, inputs, {"divergence": div, "verdict": verdict})


def check_partial_div_bound(
    system: OdeSystem,
    nu: int,
    multipliers: Mapping[tuple, object],
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theorem_id: str = "T1.1",
    note: str = "",
) -> CheckReport:
    """T1.1: nu-constant-sign sampled divergences bound (nu-1)-dimensional manifolds.

    ``multipliers`` maps each 0-based index sample (or the wildcard key
    ``"default"``) to its scalar multiplier.  Every one of the C(n, nu)
    samples must be covered.
    """
    n = system.n
    if not 3 <= nu <= n:
        raise UsageError("the sample dimension must satisfy 3 <= nu <= n")
    default = multipliers.get("default")
    hyps = [_nonzero_system_hypothesis(system.f)]
    divergences = {}
    for sample in itertools.combinations(range(n), nu):
        mu = multipliers.get(sample, default)
        if mu is None:
            raise UsageError(
                "missing multiplier for sample ("
                + ",".join(str(i + 1) for i in sample)
                + ")"
            )
        masked = system.f.scale(mu).mask(sample)
        div = partial_divergence(masked, sample)
        divergences[sample] = div
        verdict = sign_of(div, domain, seed=seed)
        label = "".join(str(i + 1) for i in sample)
        hyps.append(
            Hypothesis(
                f"sampled divergence over {label} is {nu}-constant-sign",
                PASS if verdict.is_const_sign else FAIL,
                _sign_witness(verdict, div),
            )
        )
    inputs = {
        "nu": str(nu),
        "multipliers": "; ".join(
            ("default" if key == "default" else "".join(str(i + 1) for i in key)) + ": " + str(val)
            for key, val in multipliers.items()
        ),
    }
    if note:
        inputs["note"] = note
    rider = f"no nonisolated {kind_manifolds(nu)} (corollary rider)"
    return _conclude_bound(
        theorem_id,
        kind_manifolds(nu),
        hyps,
        domain,
        nu,
        inputs,
        {"divergences": divergences},
        rider=rider,
    )


def check_td_partial_div_bound(
    system: TotalSystem,
    j: int,
    nu: int,
    multipliers: Mapping[tuple, object],
    domain: Domain,
    seed: int = DEFAULT_SEED,
) -> CheckReport:
    """T1.2: the T1.1 test applied to one induced ordinary system of a total system."""
    ode = induced_ode(system, j)
    report = check_partial_div_bound(
        ode,
        nu,
        multipliers,
        domain,
        seed=seed,
        theorem_id="T1.2",
        note=f"evidence from the induced ordinary system in time direction {system.time_name(j)}",
    )
    return report


# -- total differential systems: orbit absence --------------------------------


def check_orbit_absence_fn(
    system: TotalSystem, n_func, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T1.3: some derivative X_j(N) definite on a completely solvable system."""
    frob = frobenius_total(system)
    hyps = [
        Hypothesis(
            "the induced operators commute pairwise (completely solvable)",
            PASS if frob.solvable else FAIL,
            ""
            if frob.solvable
            else f"bracket of operators {frob.failing_pair[0] + 1} and {frob.failing_pair[1] + 1} is {frob.witness.field}",
        ),
        Hypothesis(
            "solutions continue to the entire time space",
            ASSUMED,
            "complete-solvability continuation premise, recorded as assumed",
        ),
    ]
    derivatives = [apply_operator(op, n_func) for op in system.operators()]
    definite_at = None
    verdicts = []
    for k, h in enumerate(derivatives):
        v = sign_of(h, domain, seed=seed)
        verdicts.append(v)
        if v.is_definite and definite_at is None:
            definite_at = k
    hyps.append(
        Hypothesis(
            "some derivative H_k = X_k(N) is definite on the domain",
            PASS if definite_at is not None else FAIL,
            "; ".join(
                f"H_{k + 1} = {h}: {v}" for k, (h, v) in enumerate(zip(derivatives, verdicts))
            ),
        )
    )
    inputs = {"N": str(n_func)}
    details = {"derivatives": derivatives}
    if not frob.solvable:
        return CheckReport(
            "T1.3",
            KIND_ORBITS,
            hyps,
            Conclusion("not-applicable", "the system is not completely solvable"),
            inputs,
            details,
        )
    return _conclude_absence("T1.3", KIND_ORBITS, hyps, domain, inputs, details)


def check_orbit_absence_form(
    system: TotalSystem, w: KForm, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T1.4: a closed 1-form whose pairing with some column is definite."""
    if w.degree != 1 and not w.is_zero:
        raise UsageError("the test requires a 1-form")
    dw = exterior_derivative(w)
    hyps = [
        Hypothesis(
            "the 1-form is closed (d w = 0)",
            PASS if dw.is_zero else FAIL,
            "" if dw.is_zero else f"d w = {dw}",
        ),
        Hypothesis(
            "the domain is simply connected, so the closed form is exact",
            ASSUMED,
            "user assertion recorded with the report",
        ),
        Hypothesis(
            "the system is completely solvable",
            ASSUMED,
            "premise of the orbit notion, recorded as assumed",
        ),
    ]
    comps = w.components() if not w.is_zero else tuple([Polynomial.zero(system.vt)] * system.n)
    sums = []
    definite_at = None
    verdicts = []
    for jcol, col in enumerate(system.columns):
        total = Polynomial.zero(system.vt)
        for wi, xi in zip(comps, col.components):
            total = total + wi * xi
        sums.append(total)
        v = sign_of(total, domain, seed=seed)
        verdicts.append(v)
        if v.is_definite and definite_at is None:
            definite_at = jcol
    hyps.append(
        Hypothesis(
            "the pairing sum_i w_i X_ij is definite for some time direction j",
            PASS if definite_at is not None else FAIL,
            "; ".join(f"j={k + 1}: {s} is {v}" for k, (s, v) in enumerate(zip(sums, verdicts))),
        )
    )
    inputs = {"w": str(w)}
    if not dw.is_zero:
        return CheckReport(
            "T1.4",
            KIND_ORBITS,
            hyps,
            Conclusion("not-applicable", "form not closed"),
            inputs,
            {"sums": sums},
        )
    return _conclude_absence("T1.4", KIND_ORBITS, hyps, domain, inputs, {"sums": sums})


def check_linear_td_eigen(system: LinearTotalSystem) -> CheckReport:
    """T1.5: no eigenvalue pair of some coefficient matrix sums to zero."""
    commuting = linear_commuting(system)
    hyps = [
        Hypothesis(
            "the coefficient matrices commute pairwise (completely solvable)",
            PASS if commuting.commuting else FAIL,
            ""
            if commuting.commuting
            else f"matrices {commuting.failing_pair[0] + 1} and {commuting.failing_pair[1] + 1} do not commute",
        )
    ]
    resultants = [eigen_pair_sum_resultant(a) for a in system.matrices]
    witness = "; ".join(f"Res_{j + 1} = {r}" for j, r in enumerate(resultants))
    ok = any(r != 0 for r in resultants)
    hyps.append(
        Hypothesis(
            "some matrix has no eigenvalue pair summing to zero (nonzero resultant)",
            PASS if ok else FAIL,
            witness,
        )
    )
    inputs = {
        "matrices": "; ".join(
            "[" + "; ".join(",".join(str(x) for x in row) for row in a) + "]"
            for a in system.matrices
        )
    }
    return _conclude_absence("T1.5", KIND_ORBITS, hyps, None, inputs, {"resultants": resultants})


# -- exterior and Pfaff systems ------------------------------------------------


def solve_elimination_plan(equations: Sequence[KForm], plan: Mapping[int, int]) -> dict:
    """Turn {variable index: equation index} into a substitution for restrict.

    Each referenced equation must be a 1-form whose pivot coefficient does
    not vanish identically; the differential of the plan variable is solved
    from it.  Consistency of the plan (acyclicity) is enforced by restrict.
    """
    subst = {}
    for v, eq in plan.items():
        if not 0 <= eq < len(equations):
            raise UsageError(f"elimination plan references equation {eq + 1} out of range")
        z = equations[eq]
        if z.degree != 1:
            raise UsageError("elimination can only solve 1-form equations")
        comps = z.components()
        pivot = comps[v]
        if getattr(pivot, "is_zero", False):
            raise UsageError(
                "elimination pivot vanishes identically; the plan is inconsistent"
            )
        vt = z.vt
        rhs = [Polynomial.zero(vt)] * len(comps)
        for i, c in enumerate(comps):
            if i == v or getattr(c, "is_zero", False):
                continue
            rhs[i] = -(c / pivot)
        subst[v] = KForm.one_form(vt, rhs)
    return subst


def _bound_pipeline(
    equations: Sequence[KForm],
    alpha: KForm,
    auxes: Sequence[KForm],
    plan: Mapping[int, int],
    domain: Domain,
    hyps: list,
    seed: int,
):
    """The exterior-differential bound pipeline shared by the first tests.

    Returns (restricted d(alpha), B, verdict) and appends the constant-sign
    hypothesis for the volume coefficient B.
    """
    vt = equations[0].vt
    n = vt.nbase
    subst = solve_elimination_plan(equations, plan)
    theta = restrict(exterior_derivative(alpha), subst)
    if theta.is_zero:
        theta = KForm.zero(vt, n - 1)
    for z, aux in zip(equations, auxes):
        if aux is None or aux.is_zero:
            continue
        prod = wedge(z, aux)
        if prod.degree != n - 1 and not prod.is_zero:
            raise UsageError("auxiliary form degree mismatch: products must have degree n-1")
        theta = theta + prod
    result = exterior_derivative(theta)
    b = volume_coefficient(result)
    verdict = sign_of(b, domain, seed=seed)
    hyps.append(
        Hypothesis(
            "the volume coefficient B has constant sign on the domain",
            PASS if verdict.is_const_sign else FAIL,
            _sign_witness(verdict, b),
        )
    )
    return theta, b, verdict


def check_ed_bound(
    system: ExteriorSystem,
    alpha: KForm,
    gammas: Sequence[KForm],
    plan: Mapping[int, int],
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theorem_id: str = "T2.1",
    extra_hyps: Optional[list] = None,
    rider: str = "",
) -> CheckReport:
    """T2.1: first boundedness test for a system of exterior equations."""
    vt = system.vt
    n = vt.nbase
    if len(gammas) != system.m:
        raise UsageError("one auxiliary form per equation is required")
    if not alpha.is_zero and alpha.degree != n - 2:
        raise UsageError("alpha must be an (n-2)-form")
    for z, g in zip(system.zetas, gammas):
        if g is None or g.is_zero or z.is_zero:
            continue
        if z.degree + g.degree != n - 1:
            raise UsageError("auxiliary form degree mismatch")
    hyps = [_nonzero_system_hypothesis(system.zetas)]
    hyps.append(
        _independence_advisory(
            [VectorField(vt, z.components()) for z in system.zetas if z.degree == 1],
            seed,
        )
    )
    if extra_hyps:
        hyps.extend(extra_hyps)
    theta, b, verdict = _bound_pipeline(system.zetas, alpha, gammas, plan, domain, hyps, seed)
    inputs = {
        "alpha": str(alpha),
        "auxiliary": "; ".join(str(g) for g in gammas),
        "B": str(b),
    }
    return _conclude_bound(
        theorem_id,
        KIND_HYPERSURFACES,
        hyps,
        domain,
        n,
        inputs,
        {"theta": theta, "B": b, "verdict": verdict},
        rider=rider,
    )


def check_form_invariance(
    system, theta: KForm, etas: Sequence[KForm]
) -> tuple[Hypothesis, KForm]:
    """The invariance premise d(theta) = sum zeta_j ^ eta_j, checked structurally."""
    if isinstance(system, PfaffSystem):
        equations = system.forms
    elif isinstance(system, ExteriorSystem):
        equations = system.zetas
    else:
        raise UsageError("form invariance applies to Pfaff and exterior systems")
    if len(etas) != len(equations):
        raise UsageError("one eta form per equation is required")
    residual = exterior_derivative(theta)
    for z, e in zip(equations, etas):
        if e is None or e.is_zero or z.is_zero:
            continue
        residual = residual - wedge(z, e)
    ok = residual.is_zero
    hyp = Hypothesis(
        "the auxiliary form theta is invariant: d(theta) = sum zeta_j ^ eta_j",
        PASS if ok else FAIL,
        "" if ok else f"residual {residual}",
    )
    return hyp, residual


INDEX_ASSERTION = (
    "any set of gaps of the domain surrounded by a compact integral "
    "hypersurface has the zero total index with respect to the (n-1)-form d(theta)"
)


def check_ed_bound_with_invariant(
    system: ExteriorSystem,
    alpha: KForm,
    gammas: Sequence[KForm],
    theta: KForm,
    etas: Sequence[KForm],
    plan: Mapping[int, int],
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theorem_id: str = "T2.2",
) -> CheckReport:
    """T2.2: the T2.1 bound plus the zero-total-index assertion for gaps."""
    inv_hyp, _ = check_form_invariance(system, theta, etas)
    report = check_ed_bound(
        system,
        alpha,
        gammas,
        plan,
        domain,
        seed=seed,
        theorem_id=theorem_id,
        extra_hyps=[inv_hyp],
        rider=INDEX_ASSERTION,
    )
    report.inputs_echo["theta"] = str(theta)
    return report


def _pfaff_equations_and_note(system, j: Optional[int] = None):
    """Resolve the working Pfaff equations for the first boundedness tests."""
    if isinstance(system, PfaffSystem):
        return system, None
    if isinstance(system, OdeSystem):
        return pfaff_from_ode(system), "pairwise equations induced by the ordinary system"
    raise UsageError("expected a Pfaff system or an ordinary system")


def check_pfaff_bound(
    system,
    alpha: KForm,
    ells: Sequence[KForm],
    plan: Mapping[int, int],
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theorem_id: Optional[str] = None,
    theta: Optional[KForm] = None,
    etas: Optional[Sequence[KForm]] = None,
    note: str = "",
    rider: str = "",
) -> CheckReport:
    """T2.3 / T2.3D (and T2.4 / T2.4D with an invariant form supplied).

    For an ordinary system the pairwise Pfaff equations are formed first;
    ``ells`` must then be indexed like those equations.
    """
    ps, auto_note = _pfaff_equations_and_note(system)
    vt = ps.vt
    n = vt.nbase
    if len(ells) != ps.m:
        raise UsageError("one auxiliary (n-2)-form per Pfaff equation is required")
    tid = theorem_id
    if tid is None:
        tid = "T2.3D" if isinstance(system, OdeSystem) else "T2.3"
    hyps = [_nonzero_system_hypothesis(ps.forms)]
    hyps.append(_independence_advisory(list(ps.coefficient_fields()), seed))
    the_rider = rider
    if theta is not None:
        inv_hyp, _ = check_form_invariance(ps, theta, etas or [None] * ps.m)
        hyps.append(inv_hyp)
        if not the_rider:
            the_rider = INDEX_ASSERTION
    alpha_form = alpha if alpha is not None else KForm.zero(vt, n - 2)
    if not alpha_form.is_zero and alpha_form.degree != n - 2:
        raise UsageError("alpha must be an (n-2)-form")
    for ell in ells:
        if ell is not None and not ell.is_zero and ell.degree != n - 2:
            raise UsageError("auxiliary forms must have degree n-2")
    theta_sum, b, verdict = _bound_pipeline(ps.forms, alpha_form, ells, plan, domain, hyps, seed)
    inputs = {
        "alpha": str(alpha_form),
        "auxiliary": "; ".join(str(e) for e in ells),
        "B": str(b),
    }
    notes = "; ".join(x for x in (auto_note, note) if x)
    if notes:
        inputs["note"] = notes
    if theta is not None:
        inputs["theta"] = str(theta)
    return _conclude_bound(
        tid,
        KIND_HYPERSURFACES,
        hyps,
        domain,
        n,
        inputs,
        {"theta": theta_sum, "B": b, "verdict": verdict, "equations": ps},
        rider=the_rider,
    )


def classify_linear_pfaff(system: PfaffSystem, seed: int = DEFAULT_SEED) -> CheckReport:
    """T2.5 with corollaries: a linear Pfaff system has no isolated compact
    integral hypersurfaces; a non-closed equation rules all of them out."""
    for w in system.forms:
        for c in w.components():
            if not isinstance(c, Polynomial) or c.degree() > 1 or c.uses_radicals:
                raise UsageError("the linear classification requires degree <= 1 coefficients")
    hyps = [_nonzero_system_hypothesis(system.forms)]
    inputs = {"forms": "; ".join(str(w) for w in system.forms)}
    for k, w in enumerate(system.forms):
        dw = exterior_derivative(w)
        if not dw.is_zero:
            hyps.append(
                Hypothesis(
                    f"equation {k + 1} is not closed: d(omega_{k + 1}) is a nonzero constant 2-form",
                    PASS,
                    f"d(omega_{k + 1}) = {dw}",
                )
            )
            report = _conclude_absence(
                "C2.1", KIND_HYPERSURFACES, hyps, None, inputs, {"witness": dw}
            )
            return report
    potentials = [potential(w) for w in system.forms]
    hyps.append(
        Hypothesis(
            "every equation is closed, hence a total differential with a degree <= 2 potential",
            PASS,
            "; ".join(f"F_{k + 1} = {p}" for k, p in enumerate(potentials)),
        )
    )
    text = (
        "no isolated compact integral hypersurfaces; any compact integral "
        "hypersurface is a second-order algebraic hypersurface (level set of "
        + ", ".join(f"F_{k + 1} = {p}" for k, p in enumerate(potentials))
        + ")"
    )
    return CheckReport(
        "T2.5",
        KIND_HYPERSURFACES,
        hyps,
        Conclusion("classification", text),
        inputs,
        {"potentials": potentials},
    )


def check_orthogonal_field_bound(
    system: PfaffSystem,
    v_field: Optional[VectorField] = None,
    g_scalars: Optional[Sequence] = None,
    domain: Domain = None,
    seed: int = DEFAULT_SEED,
) -> CheckReport:
    """T2.6 (field given) / T2.7 (field built from the canonical orthogonal basis).

    For a single completely integrable equation the bounded objects are the
    compact leaves of its foliation (corollary path); otherwise compact
    integral hypersurfaces.
    """
    vt = system.vt
    n = vt.nbase
    tid = "T2.6"
    if g_scalars is not None:
        if system.m != 1:
            raise UsageError("the basis construction applies to a single equation")
        if len(g_scalars) != n - 1:
            raise UsageError("exactly n-1 scalar functions are required")
        basis = orthogonal_basis_fields(system.forms[0])
        comps = [Polynomial.zero(vt)] * n
        for g, phi in zip(g_scalars, basis):
            for i, c in enumerate(phi.components):
                comps[i] = comps[i] + g * c
        v_field = VectorField(vt, comps)
        tid = "T2.7"
    if v_field is None:
        raise UsageError("either the field or the scalar functions must be given")
    hyps = [_nonzero_system_hypothesis(system.forms)]
    hyps.append(_independence_advisory(list(system.coefficient_fields()), seed))
    for jf, w in enumerate(system.forms):
        dot = Polynomial.zero(vt)
        for vi, wi in zip(v_field.components, w.components()):
            dot = dot + vi * wi
        ok = getattr(dot, "is_zero", False)
        hyps.append(
            Hypothesis(
                f"the field is orthogonal to the coefficient field of equation {jf + 1}",
                PASS if ok else FAIL,
                "" if ok else f"residual inner product {dot}",
            )
        )
    kind = KIND_HYPERSURFACES
    if system.m == 1:
        integ = frobenius_pfaffian(system.forms[0])
        if tid == "T2.7":
            hyps.append(
                Hypothesis(
                    "the single equation is completely integrable (d w ^ w = 0)",
                    PASS if integ.integrable else FAIL,
                    "" if integ.integrable else f"residual {integ.residual}",
                )
            )
            kind = KIND_LEAVES
        elif integ.integrable:
            hyps.append(
                Hypothesis(
                    "the single equation is completely integrable (d w ^ w = 0)",
                    PASS,
                    "",
                )
            )
            kind = KIND_LEAVES
            tid = "C2.3"
    div = divergence(v_field)
    verdict = sign_of(div, domain, seed=seed)
    hyps.append(
        Hypothesis(
            "div V has constant sign on the domain",
            PASS if verdict.is_const_sign else FAIL,
            _sign_witness(verdict, div),
        )
    )
    inputs = {"V": str(v_field), "div": str(div)}
    if g_scalars is not None:
        inputs["g"] = "; ".join(str(g) for g in g_scalars)
    return _conclude_bound(
        tid, kind, hyps, domain, n, inputs, {"divergence": div, "field": v_field}
    )


def check_solenoidal_absence(
    w: KForm, mu, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T2.8 / C2.4: an integrable equation with a solenoidal, thinly vanishing
    coefficient field has no compact leaves in a domain with trivial top group."""
    if w.degree != 1:
        raise UsageError("the test applies to a single Pfaffian equation")
    vt = w.vt
    n = vt.nbase
    a_field = VectorField(vt, w.components())
    scaled = a_field.scale(mu)
    integ = frobenius_pfaffian(w)
    div = divergence(scaled)
    div_zero = getattr(div, "is_zero", False)
    hyps = [
        _nonzero_system_hypothesis(a_field),
        Hypothesis(
            "the equation is completely integrable (d w ^ w = 0)",
            PASS if integ.integrable else FAIL,
            "" if integ.integrable else f"residual {integ.residual}",
        ),
        Hypothesis(
            "the scaled field is solenoidal: div(mu*A) = 0 identically",
            PASS if div_zero else FAIL,
            "" if div_zero else f"div = {div}",
        ),
    ]
    # vanishing condition: the zero set of the scaled field must not contain
    # any piece of a hypersurface, certified when it is a union of coordinate
    # subspaces of dimension at most n-2
    comps = scaled.components if all(isinstance(c, Polynomial) for c in scaled.components) else a_field.components
    norm = Polynomial.zero(vt)
    for c in comps:
        norm = norm + c * c
    dim = monomial_locus_dimension(norm, n)
    if dim is None:
        hyps.append(
            Hypothesis(
                "the field vanishes only on a set of dimension at most n-2",
                UNKNOWN,
                "no syntactic certificate for the squared-norm zero set",
            )
        )
    else:
        thin = dim <= n - 2
        hyps.append(
            Hypothesis(
                "the field vanishes only on a set of dimension at most n-2",
                PASS if thin else FAIL,
                f"zero-set dimension {max(dim, 0) if dim >= 0 else 'empty'}"
                if dim >= 0
                else "the field never vanishes",
            )
        )
    rank = homotopy_rank(domain, n)
    trivial = rank == 0
    hyps.append(
        Hypothesis(
            "the domain has trivial top homotopy group (rank 0)",
            PASS if trivial else FAIL,
            f"rank {rank}" if rank is not None else "rank unknown",
        )
    )
    mu_is_one = values_equal(mu, Polynomial.one(vt)) if not isinstance(mu, (int, Q)) else Q(mu) == 1
    tid = "C2.4" if mu_is_one else "T2.8"
    inputs = {"mu": str(mu), "div": str(div)}
    return _conclude_absence(tid, KIND_LEAVES, hyps, domain, inputs, {"divergence": div})


# -- ordinary systems: hypersurface tests --------------------------------------


def check_planar_alpha_beta(
    system: OdeSystem,
    alpha,
    beta,
    branch: int,
    domain: Domain,
    seed: int = DEFAULT_SEED,
) -> CheckReport:
    """T2.10: the planar alpha/beta refinement of the divergence test."""
    if system.n != 2:
        raise UsageError("the alpha/beta test is planar")
    if branch not in (1, 2):
        raise UsageError("branch must be 1 or 2")
    p_comp, q_comp = system.f.components
    da_x = alpha.partial(0) if not isinstance(alpha, (int, Q)) else 0
    da_y = alpha.partial(1) if not isinstance(alpha, (int, Q)) else 0
    a_field = VectorField(system.vt, [beta * p_comp, beta * q_comp])
    div_a = divergence(a_field)
    if branch == 1:
        p1 = (p_comp / q_comp) * da_x
        q_expr = (p1 + da_y).partial(0) + div_a
    else:
        p2 = (q_comp / p_comp) * da_y
        q_expr = -((da_x + p2).partial(1)) + div_a
    verdict = sign_of(q_expr, domain, seed=seed)
    hyps = [
        _nonzero_system_hypothesis(system.f),
        Hypothesis(
            f"the branch-{branch} expression has constant sign on the domain",
            PASS if verdict.is_const_sign else FAIL,
            _sign_witness(verdict, q_expr),
        ),
    ]
    inputs = {"alpha": str(alpha), "beta": str(beta), "q": str(q_expr), "branch": str(branch)}
    return _conclude_bound(
        "T2.10", KIND_CLOSED_CURVES, hyps, domain, 2, inputs, {"q": q_expr, "verdict": verdict}
    )


def _is_linear_homogeneous(field_: VectorField) -> bool:
    for c in field_.components:
        if not isinstance(c, Polynomial):
            return False
        if c.uses_radicals or c.degree() > 1:
            return False
        if any(sum(e) == 0 for e, _ in c.terms):
            return False
    return True


def check_isolated_regular_bound(
    system: OdeSystem, g, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T2.11 / C2.5: a definite multiplier making the field solenoidal."""
    verdict = sign_of(g, domain, seed=seed)
    scaled = system.f.scale(g)
    div = divergence(scaled)
    div_zero = getattr(div, "is_zero", False)
    hyps = [
        _nonzero_system_hypothesis(system.f),
        Hypothesis(
            "the multiplier g is definite on the domain",
            PASS if verdict.is_definite else FAIL,
            _sign_witness(verdict, g),
        ),
        Hypothesis(
            "the scaled field is solenoidal: div(g*f) = 0 identically",
            PASS if div_zero else FAIL,
            "" if div_zero else f"div = {div}",
        ),
    ]
    rider = ""
    g_is_one = values_equal(g, Polynomial.one(system.vt)) if not isinstance(g, (int, Q)) else Q(g) == 1
    if g_is_one and _is_linear_homogeneous(system.f):
        rider = "linear traceless case: no isolated compact regular integral hypersurfaces anywhere (corollary rider)"
    inputs = {"g": str(g), "div": str(div)}
    return _conclude_bound(
        "T2.11",
        KIND_ISOLATED_HYPERSURFACES,
        hyps,
        domain,
        system.n,
        inputs,
        {"divergence": div},
        rider=rider,
    )


# -- total and partial systems: hypersurface tests ------------------------------


def _induced_note(system, j: int) -> str:
    if isinstance(system, TotalSystem):
        return f"applied to the ordinary system induced by time direction {system.time_name(j)}"
    return f"applied to the characteristic system of operator {j + 1}"


def check_td_first_bound(
    system,
    j: int,
    alpha: KForm,
    ells: Sequence[KForm],
    plan: Mapping[int, int],
    domain: Domain,
    seed: int = DEFAULT_SEED,
    theta: Optional[KForm] = None,
    etas: Optional[Sequence[KForm]] = None,
) -> CheckReport:
    """T2.12/T2.13 (total) and T2.16/T2.17 (partial): first test on an induced system."""
    if isinstance(system, TotalSystem):
        tid = "T2.12" if theta is None else "T2.13"
    elif isinstance(system, PartialSystem):
        tid = "T2.16" if theta is None else "T2.17"
    else:
        raise UsageError("expected a total or partial system")
    ode = induced_ode(system, j)
    return check_pfaff_bound(
        ode,
        alpha,
        ells,
        plan,
        domain,
        seed=seed,
        theorem_id=tid,
        theta=theta,
        etas=etas,
        note=_induced_note(system, j),
    )


def check_td_second_bound(
    system, j: int, phi, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T2.14 (total) and T2.18 (partial): divergence test on an induced system."""
    if isinstance(system, TotalSystem):
        tid = "T2.14"
    elif isinstance(system, PartialSystem):
        tid = "T2.18"
    else:
        raise UsageError("expected a total or partial system")
    ode = induced_ode(system, j)
    return check_dulac_bound(
        ode,
        phi,
        domain,
        seed=seed,
        theorem_id=tid,
        object_kind=KIND_HYPERSURFACES,
        note=_induced_note(system, j),
    )


def check_td_solenoidal_bound(
    system: TotalSystem, g_scalars: Sequence, domain: Domain, seed: int = DEFAULT_SEED
) -> CheckReport:
    """T2.15 / C2.6: every induced field made solenoidal by a definite multiplier."""
    if len(g_scalars) != system.m:
        raise UsageError("one multiplier per time direction is required")
    frob = frobenius_total(system)
    hyps = [
        Hypothesis(
            "the induced operators commute pairwise (completely solvable)",
            PASS if frob.solvable else FAIL,
            ""
            if frob.solvable
            else f"bracket of operators {frob.failing_pair[0] + 1} and {frob.failing_pair[1] + 1} is {frob.witness.field}",
        )
    ]
    all_linear = True
    for j, (g, col) in enumerate(zip(g_scalars, system.columns)):
        verdict = sign_of(g, domain, seed=seed)
        hyps.append(
            Hypothesis(
                f"multiplier g_{j + 1} is definite on the domain",
                PASS if verdict.is_definite else FAIL,
                _sign_witness(verdict, g),
            )
        )
        div = divergence(col.scale(g))
        div_zero = getattr(div, "is_zero", False)
        hyps.append(
            Hypothesis(
                f"div(g_{j + 1} * X^{j + 1}) = 0 identically",
                PASS if div_zero else FAIL,
                "" if div_zero else f"div = {div}",
            )
        )
        if not _is_linear_homogeneous(col):
            all_linear = False
    rider = ""
    if all_linear:
        rider = "linear completely solvable case: no isolated compact regular integral hypersurfaces (corollary rider)"
    inputs = {"g": "; ".join(str(g) for g in g_scalars)}
    return _conclude_bound(
        "T2.15",
        KIND_ISOLATED_HYPERSURFACES,
        hyps,
        domain,
        system.n,
        inputs,
        {},
        rider=rider,
    )


# -- partial integrals ----------------------------------------------------------


def verify_partial_integral(system, w: Polynomial, seed: int = DEFAULT_SEED) -> CheckReport:
    """PI: certify X_j(w) = Phi_j * w for every induced operator, by exact division."""
    if not isinstance(w, Polynomial) or w.is_zero:
        raise UsageError("the candidate must be a nonzero polynomial")
    if isinstance(system, OdeSystem):
        ops = [system.operator()]
        labels = ["X"]
    elif isinstance(system, (TotalSystem, PartialSystem)):
        ops = list(system.operators())
        if isinstance(system, TotalSystem):
            labels = [f"X^{system.time_name(j)}" for j in range(system.m)]
        else:
            labels = [f"X_{j + 1}" for j in range(system.m)]
    else:
        raise UsageError("partial integrals are certified for ordinary, total, and partial systems")
    from .ring import exact_divide

    hyps = []
    cofactors = []
    all_ok = True
    for label, op in zip(labels, ops):
        h = op.apply(w)
        if isinstance(h, Polynomial):
            q = exact_divide(h, w)
        else:
            q = None
        if q is None:
            all_ok = False
            hyps.append(
                Hypothesis(
                    f"{label}(w) is divisible by w",
                    FAIL,
                    f"{label}(w) = {h} leaves a nonzero residue modulo w",
                )
            )
            cofactors.append(None)
        else:
            hyps.append(
                Hypothesis(
                    f"{label}(w) is divisible by w",
                    PASS,
                    f"{label}(w) = ({q}) * w",
                )
            )
            cofactors.append(q)
    inputs = {"w": str(w)}
    if not all_ok:
        return CheckReport(
            "PI",
            "invariant hypersurface w = 0",
            hyps,
            Conclusion("not-applicable", "w = 0 is not invariant: some derivative is not divisible by w"),
            inputs,
            {"cofactors": cofactors},
        )
    cert = InvariantCertificate(w, cofactors)
    text = "w = 0 is an invariant hypersurface; cofactors " + "; ".join(
        f"{label}: {q}" for label, q in zip(labels, cofactors)
    )
    return CheckReport(
        "PI",
        "invariant hypersurface w = 0",
        hyps,
        Conclusion("classification", text),
        inputs,
        {"certificate": cert, "cofactors": cofactors},
    )


def check_pfaff_invariant_surface(
    system: PfaffSystem, w: Polynomial, factor, form_index: int
) -> CheckReport:
    """PI-PF: certify d(w) = factor * omega_j on the surface w = 0.

    Every coefficient of d(w) - factor * omega_j must vanish on w = 0; with
    exact data this is realized as divisibility of the (root-cleared)
    numerators by w.
    """
    if not 0 <= form_index < system.m:
        raise UsageError("form index out of range")
    if not isinstance(w, Polynomial) or w.is_zero:
        raise UsageError("the candidate must be a nonzero polynomial")
    from .ring import exact_divide, make_fraction, _as_fraction_pair

    vt = system.vt
    dw = exterior_derivative(KForm.scalar(vt, w))
    residual = dw - system.forms[form_index] * factor
    hyps = []
    cofactors = {}
    all_ok = True
    for i in range(vt.nbase):
        c = residual.coefficient((i,))
        if isinstance(c, ScaledFraction):
            all_ok = False
            hyps.append(
                Hypothesis(
                    f"coefficient of d{vt.base_vars[i]} vanishes on w = 0",
                    UNKNOWN,
                    "power-factored coefficient not handled by the divisibility certificate",
                )
            )
            continue
        pair = _as_fraction_pair(c, vt)
        num, den = pair
        q = exact_divide(num, w)
        if q is None:
            all_ok = False
            hyps.append(
                Hypothesis(
                    f"coefficient of d{vt.base_vars[i]} vanishes on w = 0",
                    FAIL,
                    f"residual coefficient {c} is not divisible by w",
                )
            )
        else:
            cofactors[i] = make_fraction(q, den) if not den.is_constant else q
            hyps.append(
                Hypothesis(
                    f"coefficient of d{vt.base_vars[i]} vanishes on w = 0",
                    PASS,
                    f"coefficient = ({cofactors[i]}) * w",
                )
            )
    inputs = {"w": str(w), "factor": str(factor), "equation": str(form_index + 1)}
    if not all_ok:
        return CheckReport(
            "PI-PF",
            "integral hypersurface w = 0",
            hyps,
            Conclusion("not-applicable", "the surface identity does not hold"),
            inputs,
            {},
        )
    text = (
        f"w = 0 is an integral hypersurface of equation {form_index + 1}: "
        "d(w) = factor * omega on w = 0"
    )
    return CheckReport(
        "PI-PF",
        "integral hypersurface w = 0",
        hyps,
        Conclusion("classification", text),
        inputs,
        {"cofactors": cofactors},
    )
