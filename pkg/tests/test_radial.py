import numpy as np
import pytest

from killing_graphs.radial import (VerticalSlopeError, boundedness_classify,
                                   penafiel_h, penafiel_slope,
                                   penafiel_slope_disk, radial_profile,
                                   radial_slope)


def arctan_closed_form(c, r):
    r = np.asarray(r, dtype=np.float64)
    return 0.5 * (np.arctan(np.sqrt(c * r ** 4 - 1.0))
                  - np.arctan(np.sqrt(c - 1.0)))


# -- slopes -----------------------------------------------------------------------

def test_slope_mu_r():
    assert radial_slope(1.0, np.sqrt(2.0), "r") == pytest.approx(1 / np.sqrt(6), rel=1e-14)


def test_slope_catenoid():
    assert radial_slope(1.0, 2.0, 1.0) == pytest.approx(1 / np.sqrt(3), rel=1e-14)


def test_vertical_slope_signal():
    with pytest.raises(VerticalSlopeError):
        radial_slope(1.0, 1.0, "r")


def test_c_below_one_rejected():
    with pytest.raises(ValueError):
        radial_profile(0.5, "r", 1.0, 2.0, 10)


# -- profiles vs closed forms -----------------------------------------------------

def test_profile_mu_r_c1():
    prof = radial_profile(1.0, "r", 1.0, 2.0, 50)
    assert prof.values[0] == 0.0
    assert prof.values[-1] == pytest.approx(0.5 * np.arctan(np.sqrt(15.0)), abs=1e-10)
    assert np.max(np.abs(prof.values - arctan_closed_form(1.0, prof.radii))) <= 1e-9


def test_profile_sup_estimates():
    # sup u = pi/4 - arctan(sqrt(c-1))/2
    for c in (1.0, 2.0, 5.0):
        prof = radial_profile(c, "r", 1.0, 3.0, 20)
        expect = np.pi / 4 - 0.5 * np.arctan(np.sqrt(c - 1.0))
        assert prof.sup_estimate == pytest.approx(expect, abs=1e-8)


def test_profile_mu_r_c2_infinity_value():
    # u(inf) for c = 2 equals pi/4 - arctan(1)/2 = pi/8
    prof = radial_profile(2.0, "r", 1.0, 2.0, 10)
    assert prof.sup_estimate == pytest.approx(np.pi / 8, abs=1e-8)


def test_profile_catenoid():
    prof = radial_profile(1.0, 1.0, 1.0, 2.0, 50)
    assert prof.values[-1] == pytest.approx(np.arccosh(2.0), abs=1e-9)
    assert np.isinf(prof.sup_estimate)


def test_profile_random_c_r_against_closed_form():
    rng = np.random.default_rng(123)
    for _ in range(100):
        c = rng.uniform(1.0, 10.0)
        r = rng.uniform(1.05, 20.0)
        prof = radial_profile(c, "r", 1.0, r, 5)
        assert abs(prof.values[-1] - arctan_closed_form(c, r)) <= 1e-9


def test_profiles_monotone_in_r_and_c():
    profs = [radial_profile(c, "r", 1.0, 5.0, 40) for c in (1.0, 1.5, 2.0, 4.0, 8.0)]
    for p in profs:
        assert np.all(np.diff(p.values) >= 0.0)
    for lo, hi in zip(profs[:-1], profs[1:]):
        assert np.all(hi.values <= lo.values + 1e-12)


# -- boundedness classification -----------------------------------------------------

def test_bounded_for_log_power_above_one():
    v = boundedness_classify("log(1+r)", 2.0, r_max=1e6)
    assert v.verdict == "bounded"


def test_unbounded_catenoid():
    assert boundedness_classify(1.0, 1.0, r_max=1e6).verdict == "unbounded"


def test_unbounded_iterated_log_mu():
    mu = lambda r: np.sqrt((r + 1.0) * np.log(r + 1.0) / r)
    assert boundedness_classify(mu, 1.0, r_max=1e6).verdict == "unbounded"


# -- rotational CMC profile -----------------------------------------------------------

def test_penafiel_zero_H():
    for tau in (0.0, 0.5, 2.0):
        for rho in (0.5, 1.0, 3.0):
            assert penafiel_slope(0.0, tau, rho).slope == 0.0


def test_penafiel_h_at_half():
    s = penafiel_slope(0.5, 0.0, 2.0)
    assert s.h_value == pytest.approx(np.sinh(1.0) ** 2, rel=1e-12)


def test_penafiel_consistency_two_routes():
    # rho-form versus disk-form times dr/drho = (1 - r^2)/2
    for H, tau, rho in [(0.25, 0.5, 1.0), (0.4, 1.0, 2.0), (0.5, 0.3, 0.7)]:
        direct = penafiel_slope(H, tau, rho).slope
        r = np.tanh(rho / 2.0)
        via_disk = penafiel_slope_disk(H, tau, r) * (1.0 - r ** 2) / 2.0
        assert direct == pytest.approx(via_disk, abs=1e-10)


def test_penafiel_h_branch_consistency():
    # the H = 1/2 analytic branch agrees with the generic formula where the
    # latter is still well conditioned
    for rho in (0.5, 1.0, 2.0):
        t2 = np.tanh(rho / 2) ** 2
        generic = 4 * (0.25 + 0.3 ** 2) * t2 / (1 - t2)
        assert penafiel_h(0.5, 0.3, rho) == pytest.approx(generic, rel=1e-12)


def test_penafiel_rejects_bad_H():
    with pytest.raises(ValueError):
        penafiel_slope(0.6, 0.0, 1.0)
