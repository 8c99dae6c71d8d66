import math

import numpy as np
import pytest

from gwising.degree_model import DegreeDistribution, mean_degree, second_moment
from gwising.thresholds import (
    BoundInapplicable,
    K_c,
    K_hat_c,
    K_of_c,
    fit_decay,
    lyons_K_crit,
    lyons_Tc,
    network_Tc,
    q_of_K,
    r2_budget,
    threshold_sheet,
)

TWO_THREE = DegreeDistribution.from_dict({2: 0.5, 3: 0.5})


def test_q_values():
    assert q_of_K(1e-12) == pytest.approx(4e-12, rel=1e-6)
    assert q_of_K(0.1) == pytest.approx(0.49182, abs=1e-5)
    edge = math.log(2) / 4
    assert edge == pytest.approx(0.17329, abs=1e-5)
    assert q_of_K(edge * 0.999) < 1 < q_of_K(edge * 1.001)


def test_q_rejects_nonpositive():
    with pytest.raises(ValueError):
        q_of_K(0.0)


def test_K_c():
    assert K_c(2.5) == pytest.approx(0.12771, abs=1e-5)
    for a in (2.01, 2.5, 3.7, 40.0):
        assert q_of_K(K_c(a)) == pytest.approx(1 / (a - 1), abs=1e-12)
    vals = [K_c(a) for a in (2.5, 5, 50, 5000)]
    assert all(x > y > 0 for x, y in zip(vals, vals[1:]))


def test_K_hat_c():
    assert K_hat_c(2, 0.5) == pytest.approx(0.05579, abs=1e-5)
    for s, alpha in [(2, 0.5), (3, 0.4), (5, 0.9)]:
        assert q_of_K(K_hat_c(s, alpha)) == pytest.approx(s ** (-1 / alpha), abs=1e-12)
    assert 0 < K_hat_c(2, 0.05) < 1e-5


def test_K_of_c():
    assert K_of_c(1.5) == pytest.approx(K_c(2.5), abs=1e-15)
    assert K_of_c(1.5) == pytest.approx(0.12771, abs=1e-5)
    assert K_of_c(2 ** (1 / 0.5)) == pytest.approx(K_hat_c(2, 0.5), abs=1e-15)


def test_lyons():
    assert lyons_K_crit(2) == pytest.approx(0.549306, abs=1e-6)
    assert lyons_Tc(1, 2) == pytest.approx(1.82048, abs=1e-5)
    assert lyons_Tc(1, 1.6) == pytest.approx(1.36394, abs=1e-5)
    assert lyons_Tc(1, 1 + 1e-9) < 0.1


def test_network():
    assert network_Tc(1, 2.5, 6.5) == pytest.approx(1.36394, abs=1e-5)
    with pytest.raises(ValueError, match="ordered at all temperatures regime"):
        network_Tc(1, 2.5, 5.0)


@pytest.mark.parametrize(
    "table",
    [{2: 0.5, 3: 0.5}, {2: 0.2, 5: 0.3, 9: 0.5}, {3: 0.9, 4: 0.1}],
)
def test_network_equals_lyons(table):
    d = DegreeDistribution.from_dict(table)
    k1, k2 = mean_degree(d), second_moment(d)
    for J in (0.5, 1.0, 2.0):
        assert network_Tc(J, k1, k2) == pytest.approx(lyons_Tc(J, k2 / k1 - 1), abs=1e-10)


def test_power_law_identity():
    d = DegreeDistribution.power_law(2.5, 1000)
    k1, k2 = mean_degree(d), second_moment(d)
    assert network_Tc(1, k1, k2) == pytest.approx(lyons_Tc(1, k2 / k1 - 1), abs=1e-10)


def test_r2_budget():
    assert r2_budget(0.1, 3, 0, 4) == pytest.approx(0.95172, abs=1e-4)
    vals = [r2_budget(0.1, n, 0, 4) for n in range(1, 40)]
    assert vals[-1] < 1e-10 and all(np.diff(vals) < 0)
    with pytest.raises(BoundInapplicable, match="bound inapplicable"):
        r2_budget(0.2, 3, 0, 4)


def test_fit_exact_geometric():
    n = np.arange(4, 10)
    fit = fit_decay(n, 0.7**n)
    assert fit.rate == pytest.approx(0.7, abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_degenerate():
    with pytest.warns(UserWarning):
        fit = fit_decay(np.arange(4, 10), np.zeros(6))
    assert fit.degenerate and math.isnan(fit.rate)


def test_sheet():
    sheet = threshold_sheet(TWO_THREE, s=2, alpha=0.5, beta=0.1)
    assert sheet.K_c == pytest.approx(0.12771, abs=1e-5)
    assert sheet.K_hat_c == pytest.approx(0.05579, abs=1e-5)
    assert sheet.K_of_c == pytest.approx(sheet.K_hat_c)
    assert sheet.decay_budget == pytest.approx(q_of_K(0.1) * 4)
    assert sheet.T_c_network == pytest.approx(1.36394, abs=1e-5)
    plain = threshold_sheet(TWO_THREE, beta=0.1)
    assert plain.K_hat_c is None
    assert plain.decay_budget == pytest.approx(0.7377, abs=1e-4)
