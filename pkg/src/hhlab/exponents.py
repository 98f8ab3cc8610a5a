"""Exponent arithmetic for the Hardy-Henon parabolic equation.

Everything here is pure bookkeeping over the model parameters
(d, gamma, alpha, a): critical exponents, criticality classification of
weighted Lorentz indices, admissibility of auxiliary-norm index pairs, and
the feasibility intervals for the interpolation parameter theta used by the
asymptotic estimates.

All comparisons are done in exact rational arithmetic whenever the inputs
are rational (ints, Fractions, and exact binary floats are converted to
`fractions.Fraction`), so that a classification can never flip on rounding.
Infinite Lebesgue exponents are handled through their inverses, with
1/inf == Fraction(0) exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Real = Union[int, float, Fraction]

#: Comparison slack used only when two exact rationals are not literally
#: equal; guards classifications computed from irrational float inputs.
FLOAT_TOL = Fraction(1, 10**12)


def exact(x: Real) -> Fraction:
    """Convert a finite real to an exact Fraction (binary floats exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            raise ValueError(f"cannot make a Fraction out of {x}")
        return Fraction(x)
    raise TypeError(f"unsupported numeric type {type(x)!r}")


def inv(q: Real) -> Fraction:
    """Exact 1/q for q in [1, inf]; inf maps to 0."""
    if isinstance(q, float) and math.isinf(q):
        return Fraction(0)
    qx = exact(q)
    if qx <= 0:
        raise ValueError(f"exponent must be positive or inf, got {q}")
    return 1 / qx


def _eq(a: Fraction, b: Fraction) -> bool:
    return a == b or abs(a - b) <= FLOAT_TOL * max(1, abs(a), abs(b))


def _lt(a: Fraction, b: Fraction) -> bool:
    return a < b and not _eq(a, b)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of du/dt - Lap(u) = a |x|^gamma |u|^(alpha-1) u."""

    d: int
    gamma: Real
    alpha: Real
    a: int = -1

    def __post_init__(self) -> None:
        if self.d < 1 or int(self.d) != self.d:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if not exact(self.alpha) > 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if self.a not in (-1, 0, 1):
            # a = 0 is allowed as the linear-equation consistency case.
            raise ValueError(f"a must be -1, 0 or +1, got {self.a}")

    @property
    def gamma_x(self) -> Fraction:
        return exact(self.gamma)

    @property
    def alpha_x(self) -> Fraction:
        return exact(self.alpha)

    def require_wellposed_range(self) -> None:
        """gamma > -min(2, d), needed by every well-posedness routine."""
        if not self.gamma_x > -min(2, self.d):
            raise ValueError(
                f"gamma={self.gamma} not above -min(2, d)={-min(2, self.d)}"
            )


@dataclass(frozen=True)
class SpaceIndex:
    """Label (s, q, r) of the weighted Lorentz space with weight |x|^s.

    r is forced to 1 when q = 1 and to inf when q = inf; those are the only
    nontrivial members of the scale at the endpoints.
    """

    s: Real
    q: Real
    r: Real = math.inf

    def __post_init__(self) -> None:
        iq = inv(self.q)  # validates q
        ir = inv(self.r)
        if iq == 0 and ir != 0:
            object.__setattr__(self, "r", math.inf)
        elif iq == 1 and ir != 1:
            object.__setattr__(self, "r", 1)

    @property
    def s_x(self) -> Fraction:
        return exact(self.s)

    @property
    def inv_q(self) -> Fraction:
        return inv(self.q)

    @property
    def inv_r(self) -> Fraction:
        return inv(self.r)

    def scaling_sum(self, d: int) -> Fraction:
        """s/d + 1/q, the quantity criticality is read off from."""
        return self.s_x / d + self.inv_q

    def label(self) -> str:
        def fmt(v):
            return "inf" if isinstance(v, float) and math.isinf(v) else str(v)

        return f"L^({fmt(self.q)},{fmt(self.r)})_{fmt(self.s)}"


@dataclass(frozen=True)
class CriticalityReport:
    q_c: float
    alpha_F: float
    scaling_sum: float
    klass: str  # "subcritical" | "critical" | "supercritical"


@dataclass
class AdmissibilityReport:
    ok: bool
    violated: list[str] = field(default_factory=list)
    boundary: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class ThetaInterval:
    lower: float
    upper: float
    nonempty: bool
    binding_constraints: list[str] = field(default_factory=list)
    #: exact endpoints when the inputs were rational
    lower_exact: Fraction | None = None
    upper_exact: Fraction | None = None
    #: hypothesis (theta-independent) constraints that failed, if any
    failed_hypotheses: list[str] = field(default_factory=list)

    def contains(self, theta: Real) -> bool:
        if not self.nonempty:
            return False
        t = exact(theta)
        lo = self.lower_exact if self.lower_exact is not None else exact(self.lower)
        hi = self.upper_exact if self.upper_exact is not None else exact(self.upper)
        return lo < t < hi


def fujita_exponent(params: ModelParams) -> Fraction:
    """1 + (2+gamma)/d, the threshold for global existence of small data."""
    return 1 + (2 + params.gamma_x) / params.d


def inv_critical_q(params: ModelParams) -> Fraction:
    """Exact 1/q_c = (2+gamma)/(d*(alpha-1))."""
    if not params.alpha_x > 1:
        raise ValueError("alpha must exceed 1")
    if not 2 + params.gamma_x > 0:
        raise ValueError("needs 2 + gamma > 0")
    return (2 + params.gamma_x) / (params.d * (params.alpha_x - 1))


def critical_q(params: ModelParams) -> Fraction:
    """Scale-critical Lebesgue exponent q_c."""
    return 1 / inv_critical_q(params)


def classify_pair(params: ModelParams, idx: SpaceIndex) -> CriticalityReport:
    """Classify (l, q) against the scale-critical line l/d + 1/q = 1/q_c."""
    iqc = inv_critical_q(params)
    ssum = idx.scaling_sum(params.d)
    if _eq(ssum, iqc):
        klass = "critical"
    elif ssum < iqc:
        klass = "subcritical"
    else:
        klass = "supercritical"
    return CriticalityReport(
        q_c=float(1 / iqc) if iqc != 0 else math.inf,
        alpha_F=float(fujita_exponent(params)),
        scaling_sum=float(ssum),
        klass=klass,
    )


def _check(
    report: AdmissibilityReport, label: str, lhs: Fraction, rhs: Fraction, strict: bool
) -> None:
    """Record lhs <(=) rhs into the report under `label`."""
    if _eq(lhs, rhs):
        if strict:
            report.boundary.append(label)
            report.ok = False
        return
    if lhs > rhs:
        report.violated.append(label)
        report.ok = False


def admissible_wellposed_pair(
    params: ModelParams, lq: SpaceIndex, kp: SpaceIndex
) -> AdmissibilityReport:
    """Check the full index conditions for critical local well-posedness.

    Strictness mirrors the statement exactly; equality in a strict
    inequality is reported under `boundary` rather than `violated`.
    """
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    iqc = inv_critical_q(params)
    l, ivq = lq.s_x, lq.inv_q
    k, ivp = kp.s_x, kp.inv_q
    kp_sum = k / d + ivp

    rep = AdmissibilityReport(ok=True)
    _check(rep, "l-lower-bound", g / (al - 1), l, strict=False)
    # p > alpha is checked through the inverses: 1/p < 1/alpha
    _check(rep, "p-above-alpha", ivp, 1 / al, strict=True)
    _check(rep, "k-lower-bound", (l + g) / al, k, strict=False)
    _check(rep, "k-upper-bound", k, l, strict=False)
    _check(rep, "kp-nonnegative", Fraction(0), kp_sum, strict=False)
    _check(rep, "kp-above-duhamel-floor", (2 + g * al) / (d * al * (al - 1)), kp_sum, strict=True)
    _check(rep, "kp-below-critical", kp_sum, iqc, strict=True)
    _check(rep, "kp-below-weight-cap", kp_sum, (d + g) / (d * al), strict=True)
    return rep


def kato_pair_admissible(params: ModelParams, kp: SpaceIndex) -> AdmissibilityReport:
    """The (k, p) conditions alone (no data-space weight l involved)."""
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    iqc = inv_critical_q(params)
    k, ivp = kp.s_x, kp.inv_q
    kp_sum = k / d + ivp

    rep = AdmissibilityReport(ok=True)
    _check(rep, "k-lower-bound", g / (al - 1), k, strict=False)
    _check(rep, "p-above-alpha", ivp, 1 / al, strict=True)
    _check(rep, "kp-nonnegative", Fraction(0), kp_sum, strict=False)
    _check(rep, "kp-above-duhamel-floor", (2 + g * al) / (d * al * (al - 1)), kp_sum, strict=True)
    _check(rep, "kp-below-critical", kp_sum, iqc, strict=True)
    _check(rep, "kp-below-weight-cap", kp_sum, (d + g) / (d * al), strict=True)
    return rep


def aux_pair_admissible(
    params: ModelParams, lq: SpaceIndex, kp: SpaceIndex
) -> AdmissibilityReport:
    """Conditions for (k, p) to define the auxiliary norm under (l, q)."""
    d = params.d
    rep = AdmissibilityReport(ok=True)
    _check(rep, "aux-k-below-l", kp.s_x, lq.s_x, strict=False)
    _check(rep, "aux-kp-nonnegative", Fraction(0), kp.scaling_sum(d), strict=False)
    _check(rep, "aux-kp-below-lq", kp.scaling_sum(d), lq.scaling_sum(d), strict=False)
    return rep


def secondary_pair_admissible(
    params: ModelParams, kp: SpaceIndex, k0p0: SpaceIndex, sigma: Real
) -> AdmissibilityReport:
    """Conditions tying a secondary pair (k0, p0) and decay sigma to (k, p).

    These are the hypotheses under which all theta feasibility intervals
    below are guaranteed nonempty.
    """
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    sig = exact(sigma)
    kp_sum = kp.scaling_sum(d)
    k0p0_sum = k0p0.scaling_sum(d)
    mixed = (al - 1) * kp_sum + k0p0_sum - g / d

    rep = AdmissibilityReport(ok=True)
    _check(rep, "p0-mix-nonnegative", Fraction(0), (al - 1) * kp.inv_q + k0p0.inv_q, strict=False)
    _check(rep, "p0-mix-below-one", (al - 1) * kp.inv_q + k0p0.inv_q, Fraction(1), strict=True)
    _check(rep, "sigma-below-mixed-sum", sig / d, mixed, strict=True)
    _check(rep, "mixed-sum-below-one", mixed, Fraction(1), strict=True)
    return rep


def sigma_in_linear_range(params: ModelParams, sigma: Real) -> bool:
    """d/q_c < sigma < d, the window for linear asymptotic behavior."""
    sig = exact(sigma)
    return params.d * inv_critical_q(params) < sig < params.d


# ---------------------------------------------------------------------------
# theta feasibility: every constraint is affine in theta, so the interval is
# the intersection of half-lines.  Constraints are kept in raw form.
# ---------------------------------------------------------------------------


@dataclass
class _Affine:
    """Constraint coef*theta + off OP 0 with OP in {'>=', '>'}."""

    label: str
    coef: Fraction
    off: Fraction
    strict: bool


def _intersect(constraints: list[_Affine]) -> ThetaInterval:
    lo, hi = Fraction(-10**9), Fraction(10**9)
    lo_strict = hi_strict = False
    lo_label = hi_label = ""
    failed: list[str] = []
    for c in constraints:
        if c.coef == 0:
            bad = (c.off < 0) or (c.strict and c.off == 0)
            if bad:
                failed.append(c.label)
            continue
        bound = -c.off / c.coef
        if c.coef > 0:  # theta >(=) bound
            if bound > lo or (bound == lo and c.strict and not lo_strict):
                lo, lo_strict, lo_label = bound, c.strict, c.label
        else:  # theta <(=) bound
            if bound < hi or (bound == hi and c.strict and not hi_strict):
                hi, hi_strict, hi_label = bound, c.strict, c.label
    nonempty = not failed and (lo < hi or (lo == hi and not (lo_strict or hi_strict)))
    binding = [lab for lab in (lo_label, hi_label) if lab]
    return ThetaInterval(
        lower=float(lo),
        upper=float(hi),
        nonempty=nonempty,
        binding_constraints=binding + failed,
        lower_exact=lo,
        upper_exact=hi,
        failed_hypotheses=failed,
    )


def _theta_constraints_linear(
    params: ModelParams, kp: SpaceIndex, k0p0: SpaceIndex, sigma: Real
) -> list[_Affine]:
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    iqc = inv_critical_q(params)
    sig = exact(sigma)
    k, ivp = kp.s_x, kp.inv_q
    k0, ivp0 = k0p0.s_x, k0p0.inv_q
    A = k / d + ivp
    A0 = k0 / d + ivp0
    return [
        # 0 <= theta < 1 - 1/alpha keeps the excess decay rate positive
        _Affine("theta-nonneg", Fraction(1), Fraction(0), strict=False),
        _Affine("theta-below-contraction-cap", Fraction(-1), 1 - 1 / al, strict=True),
        # kernel weight stays integrable in the space variable
        _Affine("weight-transfer", al * (k - k0), -(g - (al - 1) * k0), strict=False),
        _Affine("holder-split", -(ivp - ivp0), 1 / al - ivp0, strict=True),
        _Affine("k0p0-nonneg", Fraction(0), A0, strict=False),
        _Affine("smoothing-floor", al * (A - A0), -(g / d - (al - 1) * A0), strict=False),
        _Affine("smoothing-cap", -al * (A - A0), 1 + g / d - al * A0, strict=True),
        # both endpoint powers of the time integral must be integrable
        _Affine("time-integral-first", -al * (A - A0), (al - 1) * (iqc - A0), strict=True),
        _Affine(
            "time-integral-second",
            sig / d - A0 - (iqc - A),
            2 / (Fraction(d) * al) - sig / d + A0,
            strict=True,
        ),
    ]


def theta_interval_linear(
    params: ModelParams, kp: SpaceIndex, k0p0: SpaceIndex, sigma: Real
) -> ThetaInterval:
    """Feasible theta for splitting the Duhamel bound in the linear regime.

    The interval is guaranteed nonempty when both the primary pair (k, p)
    and the secondary pair (k0, p0) are admissible; failed hypotheses are
    recorded on the result either way.
    """
    if not sigma_in_linear_range(params, sigma):
        raise ValueError(
            f"sigma={sigma} outside the open window (d/q_c, d) = "
            f"({float(params.d * inv_critical_q(params))}, {params.d})"
        )
    interval = _intersect(_theta_constraints_linear(params, kp, k0p0, sigma))
    pk = kato_pair_admissible(params, kp)
    sec = secondary_pair_admissible(params, kp, k0p0, sigma)
    interval.failed_hypotheses += [f"kp:{v}" for v in pk.violated + pk.boundary]
    interval.failed_hypotheses += [f"k0p0:{v}" for v in sec.violated + sec.boundary]
    return interval


def _theta_constraints_complex(
    params: ModelParams,
    kp: SpaceIndex,
    k0p0: SpaceIndex,
    sigma2: Real,
    which: str,
) -> list[_Affine]:
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    iqc = inv_critical_q(params)
    sig = exact(sigma2)
    k, ivp = kp.s_x, kp.inv_q
    k0, ivp0 = k0p0.s_x, k0p0.inv_q
    A = k / d + ivp
    A0 = k0 / d + ivp0

    if which == "theta11":
        return [
            _Affine("theta-nonneg", Fraction(1), Fraction(0), strict=False),
            _Affine("theta-below-one", Fraction(-1), Fraction(1), strict=True),
            _Affine("weight-transfer", 2 * (k - k0), (al - 3) * k + 2 * k0 - g, strict=False),
            _Affine("holder-split", -2 * (ivp - ivp0), 1 - (al - 2) * ivp - 2 * ivp0, strict=True),
            _Affine(
                "smoothing-floor",
                2 * (A - A0),
                (al - 2) * A + 2 * A0 - g / d - A,
                strict=False,
            ),
            _Affine(
                "smoothing-cap",
                -2 * (A - A0),
                1 - ((al - 2) * A + 2 * A0 - g / d),
                strict=True,
            ),
            _Affine(
                "time-integral-first",
                -2 * (A - A0),
                (2 + g) / d - ((al - 3) * A + 2 * A0),
                strict=True,
            ),
            _Affine(
                "time-integral-second",
                -2 * ((iqc - A) - (sig / d - A0)),
                2 / Fraction(d) - ((al - 2) * (iqc - A) + 2 * (sig / d - A0)),
                strict=True,
            ),
        ]
    if which == "theta12":
        return [
            _Affine("theta-nonneg", Fraction(1), Fraction(0), strict=False),
            _Affine("theta-below-one", Fraction(-1), Fraction(1), strict=True),
            _Affine("weight-transfer", (k - k0), k0 - g / (al - 1), strict=False),
            _Affine(
                "holder-split",
                -(ivp - ivp0),
                (1 - ivp) / (al - 1) - ivp0,
                strict=True,
            ),
            _Affine(
                "smoothing-floor",
                (al - 1) * (A - A0),
                (al - 1) * A0 - g / d,
                strict=False,
            ),
            _Affine(
                "smoothing-cap",
                -(al - 1) * (A - A0),
                1 - A - ((al - 1) * A0 - g / d),
                strict=True,
            ),
            _Affine("time-integral-first", -(A - A0), iqc - A0, strict=True),
            _Affine(
                "time-integral-second",
                -(al - 1) * ((iqc - A) - (sig / d - A0)),
                2 / Fraction(d) - ((iqc - A) + (al - 1) * (sig / d - A0)),
                strict=True,
            ),
        ]
    if which == "theta21":
        return [
            _Affine("theta-nonneg", Fraction(1), Fraction(0), strict=False),
            _Affine("theta-below-two-thirds", Fraction(-1), Fraction(2, 3), strict=True),
            _Affine("weight-transfer", 3 * (k - k0), (al - 3) * k + 2 * k0 - g, strict=False),
            _Affine(
                "holder-split",
                -3 * (ivp - ivp0),
                1 - (al - 3) * ivp - 3 * ivp0,
                strict=True,
            ),
            _Affine(
                "smoothing-floor",
                3 * (A - A0),
                (al - 3) * A + 3 * A0 - g / d - A0,
                strict=False,
            ),
            _Affine(
                "smoothing-cap",
                -3 * (A - A0),
                1 - ((al - 3) * A + 3 * A0 - g / d),
                strict=True,
            ),
            _Affine(
                "time-integral-first",
                -3 * (A - A0),
                (2 + g) / Fraction(d) - ((al - 3) * A + 2 * A0),
                strict=True,
            ),
            _Affine(
                "time-integral-second",
                -3 * ((iqc - A) - (sig / d - A0)),
                2 / Fraction(d) - ((al - 3) * (iqc - A) + 3 * (sig / d - A0)),
                strict=True,
            ),
        ]
    raise ValueError(f"unknown theta family {which!r}")


def theta_interval_complex(
    params: ModelParams,
    kp: SpaceIndex,
    k0p0: SpaceIndex,
    sigma2: Real,
    which: str,
) -> ThetaInterval:
    """Feasible theta for the mixed-power bounds in the complex-data case.

    `which` selects the term being interpolated: "theta11" and "theta12"
    are the coupling terms of the first component (caps at 1), "theta21"
    the cubic-type term of the second component (caps at 2/3).
    """
    hyp_fail: list[str] = []
    pk = kato_pair_admissible(params, kp)
    if not pk.ok:
        hyp_fail += [f"kp:{v}" for v in pk.violated + pk.boundary]
    sec = secondary_pair_admissible(params, kp, k0p0, sigma2)
    if not sec.ok:
        hyp_fail += [f"k0p0:{v}" for v in sec.violated + sec.boundary]
    if which == "theta11":
        d = params.d
        al = params.alpha_x
        if al > 3 and kp.scaling_sum(d) < k0p0.scaling_sum(d):
            lhs = (al - 2) * kp.scaling_sum(d) + k0p0.scaling_sum(d)
            if not _lt(lhs, (2 + params.gamma_x) / d):
                hyp_fail.append("k0p0:coupling-weight-cap")

    interval = _intersect(_theta_constraints_complex(params, kp, k0p0, sigma2, which))
    interval.failed_hypotheses += hyp_fail
    if hyp_fail:
        interval.nonempty = interval.nonempty and False
        interval.binding_constraints += hyp_fail
    return interval


def theta_constraints_hold(
    params: ModelParams,
    kp: SpaceIndex,
    k0p0: SpaceIndex,
    sigma: Real,
    theta: Real,
    which: str = "linear",
) -> bool:
    """Evaluate the raw constraint system at a single theta (scan oracle)."""
    if which == "linear":
        cons = _theta_constraints_linear(params, kp, k0p0, sigma)
    else:
        cons = _theta_constraints_complex(params, kp, k0p0, sigma, which)
    t = exact(theta)
    for c in cons:
        v = c.coef * t + c.off
        if v < 0 or (c.strict and v == 0):
            return False
    return True


def theta_feasible_mask(
    params: ModelParams,
    kp: SpaceIndex,
    k0p0: SpaceIndex,
    sigma: Real,
    thetas,
    which: str = "linear",
):
    """Vectorized raw-constraint scan over a theta grid (float arithmetic).

    The brute-force counterpart of the closed-form interval; grid points
    landing exactly on a strict boundary count as infeasible.
    """
    import numpy as np

    if which == "linear":
        cons = _theta_constraints_linear(params, kp, k0p0, sigma)
    else:
        cons = _theta_constraints_complex(params, kp, k0p0, sigma, which)
    t = np.asarray(thetas, dtype=float)
    ok = np.ones(t.shape, dtype=bool)
    for c in cons:
        v = float(c.coef) * t + float(c.off)
        ok &= (v > 0) if c.strict else (v >= 0)
    return ok


# ---------------------------------------------------------------------------
# Beta function and the contraction-estimate bookkeeping
# ---------------------------------------------------------------------------


def beta_function(x: float, y: float) -> float:
    """Euler Beta via log-gamma; rejects nonpositive arguments.

    Nonpositive arguments signal a divergent Duhamel time integral, so they
    are an error here rather than a NaN.
    """
    if not (x > 0 and y > 0):
        raise ValueError(f"beta_function needs positive arguments, got ({x}, {y})")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def contraction_beta_args(
    params: ModelParams, lq: SpaceIndex, kp: SpaceIndex
) -> tuple[Fraction, Fraction]:
    """Arguments of the Beta factor in the contraction bound for the map N.

    Both are positive exactly when (k, p) is admissible; the Beta value then
    bounds the contraction constant up to the harmless operator constants.
    """
    d = params.d
    al = params.alpha_x
    iqc = inv_critical_q(params)
    first = Fraction(d, 1) * (al - 1) / 2 * (iqc - kp.inv_q - kp.s_x / d)
    second = Fraction(d, 1) * al / 2 * (
        kp.s_x / d + kp.inv_q + 2 / (Fraction(d) * al) - lq.s_x / d - lq.inv_q
    )
    return first, second


def kato_time_weight(params: ModelParams, kp: SpaceIndex) -> float:
    """(d/2)(1/q_c - k/d - 1/p), the time weight of the auxiliary norm."""
    iqc = inv_critical_q(params)
    return float(Fraction(params.d, 2) * (iqc - kp.scaling_sum(params.d)))


def sigma_time_weight(d: int, sigma: Real, kp: SpaceIndex) -> float:
    """(d/2)(sigma/d - k/d - 1/p), time weight at data decay sigma."""
    return float(Fraction(d, 2) * (exact(sigma) / d - kp.scaling_sum(d)))


def aux_time_weight(params: ModelParams, lq: SpaceIndex, kp: SpaceIndex) -> float:
    """(d/2)(l/d + 1/q - k/d - 1/p), general auxiliary-norm time weight."""
    d = params.d
    return float(Fraction(d, 2) * (lq.scaling_sum(d) - kp.scaling_sum(d)))


def bootstrap_pair_admissible(
    params: ModelParams, kp1: SpaceIndex, kp2: SpaceIndex
) -> AdmissibilityReport:
    """Conditions for upgrading boundedness from (k1, p1) to (k2, p2)."""
    d = params.d
    g = params.gamma_x
    al = params.alpha_x
    k1, ivp1 = kp1.s_x, kp1.inv_q
    k2, ivp2 = kp2.s_x, kp2.inv_q
    s1 = k1 / d + ivp1
    s2 = k2 / d + ivp2

    rep = AdmissibilityReport(ok=True)
    _check(rep, "strap-k2-below-k1", k2, k1, strict=False)
    _check(rep, "strap-k2-below-mapped-k1", k2, al * k1 - g, strict=False)
    _check(rep, "strap-p1-at-least-alpha", ivp1, 1 / al, strict=False)
    _check(rep, "strap-sum2-nonneg", Fraction(0), s2, strict=False)
    _check(rep, "strap-sum2-below-sum1", s2, s1, strict=False)
    _check(rep, "strap-sum2-below-mapped-sum1", s2, al * s1 - g / d, strict=False)
    _check(rep, "strap-sum1-below-one", s1, Fraction(1), strict=False)
    _check(rep, "strap-mapped-sum1-below-one", al * s1 - g / d, Fraction(1), strict=False)
    _check(rep, "strap-duhamel-floor", al * s1 - (2 + g) / d, s2, strict=True)
    return rep


def smoothing_exponent(d: int, idx1: SpaceIndex, idx2: SpaceIndex) -> float:
    """Time exponent of || e^{t Lap} ||: L^(q1,r1)_l1 -> L^(q2,r2)_l2."""
    return float(
        -Fraction(d, 2) * (idx1.inv_q - idx2.inv_q) - (idx1.s_x - idx2.s_x) / 2
    )


def smoothing_pair_admissible(d: int, idx1: SpaceIndex, idx2: SpaceIndex) -> AdmissibilityReport:
    """Hypotheses of the weighted smoothing estimate for the heat flow."""
    rep = AdmissibilityReport(ok=True)
    s1 = idx1.scaling_sum(d)
    s2 = idx2.scaling_sum(d)
    _check(rep, "smooth-l2-below-l1", idx2.s_x, idx1.s_x, strict=False)
    _check(rep, "smooth-sum2-nonneg", Fraction(0), s2, strict=False)
    _check(rep, "smooth-sum2-below-sum1", s2, s1, strict=False)
    _check(rep, "smooth-sum1-below-one", s1, Fraction(1), strict=False)
    if (s1 == 1 or idx1.inv_q == 1) and idx1.inv_r != 1:
        rep.ok = False
        rep.violated.append("smooth-r1-must-be-one")
    if s2 == 0 and idx2.inv_r != 0:
        rep.ok = False
        rep.violated.append("smooth-r2-must-be-inf")
    if s1 == s2 and idx1.inv_r < idx2.inv_r:
        rep.ok = False
        rep.violated.append("smooth-r1-below-r2-at-equal-scaling")
    return rep


def nonexistence_kappa_window(
    params: ModelParams, lq: SpaceIndex
) -> tuple[Fraction, Fraction]:
    """Admissible kappa window for the supercritical nonexistence data."""
    d = params.d
    iqc = inv_critical_q(params)
    l, ivq = lq.s_x, lq.inv_q
    lo = max(Fraction(0), l + d * ivq - d)
    hi = d * (l / d + ivq - iqc)
    return lo, hi


def nonexistence_exponent(
    params: ModelParams, lq: SpaceIndex, kappa: Real
) -> Fraction:
    """(d/2)(l/d + 1/q - 1/q_c) - kappa/2; positive inside the window."""
    d = params.d
    iqc = inv_critical_q(params)
    return Fraction(d, 2) * (lq.scaling_sum(d) - iqc) - exact(kappa) / 2
