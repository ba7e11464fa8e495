import math

import pytest

import dnstrip


def test_transverse_threshold_value():
    assert dnstrip.transverse_nu(0.0) == pytest.approx(math.pi**2 / 4, abs=1e-9)


def test_profile_evaluation():
    p = dnstrip.profile("gaussian_dip:1,0,1", -6.0, 6.0, truncated=True)
    assert p.name == "gaussian_dip"
    assert p(0.0) == pytest.approx(-1.0)
    assert p.inf_kappa == pytest.approx(-1.0, abs=1e-6)


def test_straight_strip_eigenvalue():
    p = dnstrip.profile("zero", 0.0, 1.0)
    values = dnstrip.strip_eigenvalues(p, 0.1, 64, 8, m=1)
    assert values[0] == pytest.approx((math.pi / 0.2) ** 2 + math.pi**2, rel=5e-3)


def test_effective_and_oracle():
    p = dnstrip.profile("zero", 0.0, 1.0)
    values, errors = dnstrip.effective_eigenvalues(p, 0.1, m=2, ns=256)
    assert values[0] == pytest.approx(math.pi**2, rel=1e-8)
    assert len(errors) == 2
    assert dnstrip.bessel_j0_first_zero() == pytest.approx(2.404825557695773, abs=1e-9)
    annulus = dnstrip.annulus_eigenvalues(1.0, 0.1, math.pi)
    assert len(annulus) == 3
    assert annulus == sorted(annulus)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        dnstrip.profile("zero", 1.0, 0.0)
    p = dnstrip.profile("zero", 0.0, 1.0)
    with pytest.raises(ValueError, match="decreasing"):
        dnstrip.sweep(p, [0.1, 0.2])


def test_cli_entry_point():
    code, out, _ = dnstrip.run_cli(["transverse", "--c", "0"])
    assert code == 0
    assert "nu(0) = 2.4674011" in out
    code, _, err = dnstrip.run_cli(["sweep", "--eps", "0.1,0.2"])
    assert code == 2
    assert "eps_list must be decreasing" in err
