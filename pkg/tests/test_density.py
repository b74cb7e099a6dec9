import math

import numpy as np
import pytest

from rcprefactor.density import (build_density_table, competitor_spectrum,
                                 conditional_forward_spectrum, forward_spectrum,
                                 multiletter_density, reverse_spectrum, tilt, tilted_mgf,
                                 untilt)
from rcprefactor.errors import LengthMismatch, NormalizationFailure
from rcprefactor.exponents import e0, error_exponent, mutual_information
from rcprefactor.laws import law_moments

from oracles import info_density_scalar


def test_noiseless_ml_density(noiseless):
    t = build_density_table(noiseless, 1.0)
    assert t.i[0, 0] == pytest.approx(math.log(2))
    assert t.i[1, 1] == pytest.approx(math.log(2))
    assert t.i[0, 1] == -math.inf and t.i[1, 0] == -math.inf


def test_s_zero_density_vanishes(bsc, bec):
    for sc in (bsc, bec):
        t = build_density_table(sc, 0.0)
        for x, y in sc.support_cells:
            assert t.i[x, y] == 0.0


@pytest.mark.parametrize("s", [0.5, 1.0, 2.3])
def test_density_matches_scalar_recomputation(bsc, mism, s):
    for sc in (bsc, mism):
        t = build_density_table(sc, s)
        W, q, Q = sc.W.tolist(), sc.q.tolist(), sc.Q.tolist()
        for x in range(sc.nx):
            for y in range(sc.ny):
                assert t.i[x, y] == pytest.approx(info_density_scalar(W, q, Q, s, x, y),
                                                  abs=1e-12)


@pytest.mark.parametrize("s", [0.3, 1.0, 4.0])
def test_tilted_conditional_consistency(bsc, bec, mism, s):
    for sc in (bsc, bec, mism):
        t = build_density_table(sc, s)
        np.testing.assert_allclose(t.v.sum(axis=0), 1.0, atol=1e-12)
        m = (sc.Q[:, None] > 0) & (sc.q > 0)
        with np.errstate(divide="ignore"):
            logratio = np.log(t.v / sc.Q[:, None])
        np.testing.assert_allclose(t.i[m], logratio[m], atol=1e-12)


def test_multiletter_density(bsc):
    t = build_density_table(bsc, 0.7)
    assert multiletter_density(t, [], []) == 0.0
    assert multiletter_density(t, [1, 1, 1], [0, 0, 0]) == pytest.approx(3 * t.i[1, 0])
    rng = np.random.default_rng(4)
    x, y = rng.integers(0, 2, 5), rng.integers(0, 2, 5)
    expected = 0.0
    for a, b in zip(x, y):
        expected += t.i[a, b]
    assert multiletter_density(t, x, y) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(LengthMismatch):
        multiletter_density(t, [0, 1], [0])


def test_multiletter_density_neg_inf(noiseless):
    t = build_density_table(noiseless, 1.0)
    assert multiletter_density(t, [0, 1], [0, 0]) == -math.inf


def test_forward_spectrum_examples(noiseless, bsc):
    lw = forward_spectrum(build_density_table(noiseless, 1.0), noiseless)
    assert lw.atoms() == [(pytest.approx(math.log(2)), pytest.approx(1.0))]
    lw = forward_spectrum(build_density_table(bsc, 0.5), bsc)
    assert len(lw) == 2
    np.testing.assert_allclose(sorted(lw.probs), [0.11, 0.89], atol=1e-15)


def test_forward_spectrum_mean_is_mutual_information(bsc):
    lw = forward_spectrum(build_density_table(bsc, 1.0), bsc)
    h = -(0.11 * math.log(0.11) + 0.89 * math.log(0.89))
    assert law_moments(lw)[0] == pytest.approx(math.log(2) - h, abs=1e-12)
    assert law_moments(lw)[0] == pytest.approx(mutual_information(bsc), abs=1e-12)
    assert math.log(2) - h == pytest.approx(0.3466, abs=1e-4)


def test_forward_variance_matches_direct_sum(bsc):
    lw = forward_spectrum(build_density_table(bsc, 1.0), bsc)
    t = build_density_table(bsc, 1.0)
    vals = [t.i[x, y] for x, y in bsc.support_cells]
    ps = [bsc.joint[x, y] for x, y in bsc.support_cells]
    mu = sum(p * v for p, v in zip(ps, vals))
    var = sum(p * (v - mu) ** 2 for p, v in zip(ps, vals))
    assert law_moments(lw)[1] == pytest.approx(var, abs=1e-14)


def test_competitor_spectrum_examples(noiseless, bec, bsc):
    lw = competitor_spectrum(build_density_table(noiseless, 1.0), noiseless, 0)
    assert lw.neg_inf == pytest.approx(0.5)
    assert lw.values == pytest.approx([math.log(2)]) and lw.probs == pytest.approx([0.5])

    lw = competitor_spectrum(build_density_table(bec, 1.0), bec, 2)
    assert lw.atoms() == [(pytest.approx(0.0, abs=1e-15), pytest.approx(1.0))]

    t = build_density_table(bsc, 1.0)
    lw = competitor_spectrum(t, bsc, 0)
    assert lw.neg_inf == 0 and lw.probs == pytest.approx([0.5, 0.5])
    assert sorted(lw.values) == pytest.approx(sorted([t.i[0, 0], t.i[1, 0]]))


def test_reverse_spectrum(bsc, bec):
    t = build_density_table(bsc, 1.0)
    lw = reverse_spectrum(t, 0)
    # V_1(x|0) = Q(x)W(0|x)/P_Y(0) for ML at s = 1
    assert lw.prob(t.i[0, 0]) == pytest.approx(0.89, abs=1e-12)
    assert lw.prob(t.i[1, 0]) == pytest.approx(0.11, abs=1e-12)
    assert lw.neg_inf == 0
    tb = build_density_table(bec, 1.0)
    for y in range(3):
        assert reverse_spectrum(tb, y).neg_inf == 0
    # erasure column: all supported metrics equal, so the law is a point mass
    assert len(reverse_spectrum(tb, 2)) == 1
    assert law_moments(reverse_spectrum(tb, 2))[1] == 0.0


def test_conditional_forward_spectrum_mixes_to_forward(bsc):
    t = build_density_table(bsc, 0.8)
    mix = {}
    for y in range(2):
        lw = conditional_forward_spectrum(t, bsc, y)
        for v, p in lw.atoms():
            mix[round(v, 12)] = mix.get(round(v, 12), 0) + p * bsc.output_marginal[y]
    fwd = forward_spectrum(t, bsc)
    for v, p in fwd.atoms():
        assert mix[round(v, 12)] == pytest.approx(p, abs=1e-14)


# ---------------------------------------------------------------------------
# Tilting
# ---------------------------------------------------------------------------

def _base_law(sc, s):
    return forward_spectrum(build_density_table(sc, s), sc).negate_shift(sc.rate)


def test_tilt_identity_at_zero(bsc):
    base = _base_law(bsc, 0.6)
    tl = tilt(base, 0.0, 0.0)
    np.testing.assert_allclose(tl.z.probs, base.probs, rtol=1e-14)
    with pytest.raises(NormalizationFailure):
        tilt(base, 0.0, 0.1)


def test_tilt_below_critical_rate(bsc):
    sc = bsc.with_rate(0.05)
    rep = error_exponent(sc)
    assert rep.rho_hat == 1.0
    base = _base_law(sc, rep.s_star)
    scalar = sum(p * math.exp(t) for t, p in zip(base.values, base.probs))
    assert scalar == pytest.approx(math.exp(-rep.e_r), rel=1e-12)
    tl = tilt(base, 1.0, rep.e_r)
    assert tl.z.total_mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", ["bsc", "mism"])
def test_tilt_mean_zero_at_optimum(name, request):
    sc = request.getfixturevalue(name)
    rep = error_exponent(sc)
    assert 0 < rep.rho_hat < 1
    tl = tilt(_base_law(sc, rep.s_star), rep.rho_hat, rep.e_r)
    assert abs(tl.z.total_mass - 1) <= 1e-10
    assert abs(law_moments(tl.z)[0]) <= 1e-8
    atomwise = np.exp(rep.e_r + rep.rho_hat * tl.base.values) * tl.base.probs
    np.testing.assert_allclose(tl.z.probs, atomwise, atol=1e-10)


def test_tilt_rejects_wrong_normalizer(bsc):
    rep = error_exponent(bsc)
    with pytest.raises(NormalizationFailure):
        tilt(_base_law(bsc, rep.s_star), rep.rho_hat, rep.e_r + 1e-3)


def test_untilt_roundtrip(bsc, mism):
    for sc in (bsc, mism):
        rep = error_exponent(sc)
        tl = tilt(_base_law(sc, rep.s_star), rep.rho_hat, rep.e_r)
        back = untilt(tl)
        np.testing.assert_allclose(back.probs, tl.base.probs, atol=1e-9)
        np.testing.assert_array_equal(back.values, tl.base.values)


@pytest.mark.parametrize("tau", [-0.3, 0.1, 0.5])
def test_tilted_mgf_matches_e0_form(bsc, tau):
    rep = error_exponent(bsc)
    s, rho, R = rep.s_star, rep.rho_hat, bsc.rate
    tl = tilt(_base_law(bsc, s), rho, rep.e_r)
    expected = math.exp(e0(bsc, rho, s) - (e0(bsc, rho + tau, s) - tau * R))
    assert tilted_mgf(tl, tau) == pytest.approx(expected, rel=1e-10)


def test_tilted_variance_is_minus_second_derivative(bsc):
    from rcprefactor.exponents import e0_derivatives

    rep = error_exponent(bsc)
    tl = tilt(_base_law(bsc, rep.s_star), rep.rho_hat, rep.e_r)
    _, d2 = e0_derivatives(bsc, rep.rho_hat, rep.s_star)
    assert law_moments(tl.z)[1] == pytest.approx(-d2, rel=1e-10)
    assert -d2 > 0
