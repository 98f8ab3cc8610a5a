"""Exponent arithmetic: critical exponents, admissibility, theta windows."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hhlab.exponents import (
    ModelParams,
    SpaceIndex,
    admissible_wellposed_pair,
    beta_function,
    bootstrap_pair_admissible,
    classify_pair,
    contraction_beta_args,
    critical_q,
    fujita_exponent,
    inv_critical_q,
    kato_pair_admissible,
    kato_time_weight,
    nonexistence_exponent,
    nonexistence_kappa_window,
    secondary_pair_admissible,
    theta_constraints_hold,
    theta_interval_complex,
    theta_interval_linear,
)

P333 = ModelParams(d=3, gamma=0, alpha=3, a=-1)


def test_fujita_exponent_values():
    assert fujita_exponent(ModelParams(1, 0, 2)) == 3
    assert fujita_exponent(ModelParams(3, 0, 2)) == Fraction(5, 3)
    assert fujita_exponent(ModelParams(3, -1, 2)) == Fraction(4, 3)


def test_critical_q_values():
    assert critical_q(P333) == 3
    assert critical_q(ModelParams(1, 0, 4)) == Fraction(3, 2)
    assert critical_q(ModelParams(3, 1, 2)) == 1


def test_critical_q_rejects_bad_alpha():
    with pytest.raises(ValueError):
        ModelParams(3, 0, 1)
    with pytest.raises(ValueError):
        inv_critical_q(ModelParams(3, -2.5, 2))


def test_classify_pair():
    assert classify_pair(P333, SpaceIndex(0, 3)).klass == "critical"
    assert classify_pair(P333, SpaceIndex(0, 6)).klass == "subcritical"
    assert classify_pair(ModelParams(1, 0, 4), SpaceIndex(0, 1)).klass == "supercritical"


def test_classify_pair_scale_consistent():
    # moving along l/d + 1/q = const cannot change the class
    base = SpaceIndex(0, 3)
    for l in (Fraction(-1, 2), Fraction(1, 4), Fraction(3, 4)):
        q = 1 / (base.scaling_sum(3) - Fraction(l) / 3)
        idx = SpaceIndex(l, q)
        assert classify_pair(P333, idx).klass == "critical"
    # the endpoint with the whole scaling budget in the weight
    assert classify_pair(P333, SpaceIndex(1, math.inf)).klass == "critical"


def test_admissible_pair_true_case():
    rep = admissible_wellposed_pair(P333, SpaceIndex(0, 3), SpaceIndex(0, 6))
    assert rep.ok
    assert rep.violated == [] and rep.boundary == []


def test_admissible_pair_p_equals_alpha_is_boundary():
    rep = admissible_wellposed_pair(P333, SpaceIndex(0, 3), SpaceIndex(0, 3))
    assert not rep.ok
    assert "p-above-alpha" in rep.boundary


def test_admissible_pair_below_duhamel_floor():
    # 1/12 < 1/9 violates the strict lower bound
    rep = admissible_wellposed_pair(P333, SpaceIndex(0, 3), SpaceIndex(0, 12))
    assert not rep.ok
    assert "kp-above-duhamel-floor" in rep.violated


def test_beta_function_identities():
    assert beta_function(1, 1) == 1.0
    assert math.isclose(beta_function(0.5, 0.5), math.pi, rel_tol=1e-12)
    # gamma-recursion oracle: B(2,3) = 1! 2! / 4! = 1/12
    assert math.isclose(beta_function(2, 3), 1.0 / 12.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        beta_function(0.0, 1.0)
    with pytest.raises(ValueError):
        beta_function(1.0, -2.0)


def test_beta_symmetry_random():
    rng = np.random.default_rng(7)
    for _ in range(25):
        x, y = rng.uniform(0.05, 8.0, 2)
        assert math.isclose(beta_function(x, y), beta_function(y, x), rel_tol=1e-12)


def test_contraction_beta_args_positive_on_admissible():
    lq = SpaceIndex(0, 3)
    for p in (4, 5, 6, 8, 11):
        kp = SpaceIndex(0, p)
        if kato_pair_admissible(P333, kp).ok:
            a, b = contraction_beta_args(P333, lq, kp)
            assert a > 0 and b > 0
            beta_function(float(a), float(b))  # must not raise


def test_kato_time_weight():
    assert kato_time_weight(P333, SpaceIndex(0, 6)) == 0.25


# --- theta feasibility ------------------------------------------------------


def test_theta_linear_worked_example():
    iv = theta_interval_linear(P333, SpaceIndex(0, 6), SpaceIndex(0, 6), Fraction(6, 5))
    assert iv.nonempty
    assert iv.lower_exact == Fraction(1, 6)
    assert iv.upper_exact == Fraction(2, 3)


def test_theta_linear_sigma_two_is_empty():
    iv = theta_interval_linear(P333, SpaceIndex(0, 6), SpaceIndex(0, 6), 2)
    assert not iv.nonempty
    assert any("sigma-below-mixed-sum" in h for h in iv.failed_hypotheses)


def test_theta_linear_sigma_out_of_range():
    with pytest.raises(ValueError):
        theta_interval_linear(P333, SpaceIndex(0, 6), SpaceIndex(0, 6), 0.5)


def test_theta_linear_lower_tends_to_closed_form_limit():
    # as sigma decreases toward d/q_c the closed-form lower endpoint passes
    # below 0 and the nonnegativity clamp binds
    iv = theta_interval_linear(P333, SpaceIndex(0, 6), SpaceIndex(0, 6), Fraction(101, 100))
    assert iv.nonempty
    assert iv.lower_exact == 0
    assert "theta-nonneg" in iv.binding_constraints


def _brute_scan(params, kp, k0p0, sigma, which, step=1e-4):
    thetas = np.arange(0.0, 1.0 + step, step)
    feas = [th for th in thetas if theta_constraints_hold(params, kp, k0p0, sigma, float(th), which)]
    if not feas:
        return None
    return (feas[0], feas[-1])


@pytest.mark.parametrize("which", ["linear", "theta11", "theta12", "theta21"])
def test_theta_brute_force_oracle_equal_pair(which):
    kp = k0p0 = SpaceIndex(0, 6)
    sigma = Fraction(6, 5)
    if which == "linear":
        iv = theta_interval_linear(P333, kp, k0p0, sigma)
    else:
        iv = theta_interval_complex(P333, kp, k0p0, sigma, which)
    scan = _brute_scan(P333, kp, k0p0, sigma, which)
    assert iv.nonempty == (scan is not None)
    if scan:
        assert abs(scan[0] - iv.lower) <= 2e-4
        assert abs(scan[1] - iv.upper) <= 2e-4


def test_theta21_alpha3_drops_cubic_terms():
    # with alpha = 3 the interval only depends on the secondary data
    iv_a = theta_interval_complex(P333, SpaceIndex(0, 6), SpaceIndex(0, 6), Fraction(6, 5), "theta21")
    iv_b = theta_interval_complex(P333, SpaceIndex(0, 5), SpaceIndex(0, 6), Fraction(6, 5), "theta21")
    assert iv_a.nonempty and iv_b.nonempty
    assert math.isclose(iv_a.upper, 2.0 / 3.0)
    assert math.isclose(iv_b.upper, 2.0 / 3.0)


def test_theta_complex_inadmissible_secondary_reported():
    # p0 = 6/5 pushes (alpha-1)/p + 1/p0 = 1/3 + 5/6 past 1: named failure
    iv = theta_interval_complex(
        P333, SpaceIndex(0, 6), SpaceIndex(0, Fraction(6, 5)), Fraction(6, 5), "theta12"
    )
    assert not iv.nonempty
    assert any(h.startswith("k0p0:") for h in iv.failed_hypotheses)


def test_theta_random_tuples_match_scan():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 12:
        kp = SpaceIndex(float(rng.uniform(-0.1, 0.3)), float(rng.uniform(3.2, 12.0)))
        k0p0 = SpaceIndex(float(rng.uniform(-0.1, 0.3)), float(rng.uniform(3.2, 12.0)))
        sigma = float(rng.uniform(1.05, 2.6))
        if not kato_pair_admissible(P333, kp).ok:
            continue
        if not secondary_pair_admissible(P333, kp, k0p0, sigma).ok:
            continue
        which = ["linear", "theta11", "theta12", "theta21"][checked % 4]
        if which == "linear":
            iv = theta_interval_linear(P333, kp, k0p0, sigma)
        else:
            iv = theta_interval_complex(P333, kp, k0p0, sigma, which)
        scan = _brute_scan(P333, kp, k0p0, sigma, which)
        assert iv.nonempty == (scan is not None)
        if scan:
            assert abs(scan[0] - iv.lower) <= 2e-4
            assert abs(scan[1] - iv.upper) <= 2e-4
        checked += 1


# --- nonexistence bookkeeping ----------------------------------------------


def test_kappa_window_and_exponent_exact():
    p = ModelParams(1, 0, 4, a=1)
    lo, hi = nonexistence_kappa_window(p, SpaceIndex(0, 1))
    assert (lo, hi) == (0, Fraction(1, 3))
    assert nonexistence_exponent(p, SpaceIndex(0, 1), Fraction(1, 6)) == Fraction(1, 12)
    # window edge gives exponent zero
    assert nonexistence_exponent(p, SpaceIndex(0, 1), hi) == 0


def test_bootstrap_pair_identity_is_admissible():
    kp = SpaceIndex(0, 6)
    assert bootstrap_pair_admissible(P333, kp, kp).ok


def test_space_index_endpoint_conventions():
    assert SpaceIndex(0, math.inf, 2).r == math.inf
    assert SpaceIndex(0, 1, 3).r == 1
