import numpy as np
import pytest

from eigencert.certify import (
    CampaignConfig,
    campaign_derivatives,
    campaign_envelope,
    campaign_gap,
    campaign_radius,
    campaign_taylor,
    continue_eigenvalue,
    emit_report,
    perron_certificate,
    random_direction,
    rank_one_probe,
    verify,
)
from eigencert.eigendata import analyze
from eigencert.envelopes import base_certificate
from eigencert.errors import InputError, ZeroC
from eigencert.gaps import short_form_certificates
from eigencert.numkernel import NormKind, eig_all, op_norm

from conftest import ALL_KINDS, ones

SMALL = CampaignConfig(samples=25, derivative_pairs=3)


def test_perron_pass_and_linked_certificate():
    r = np.random.default_rng(1)
    for n in (3, 4, 8):
        c = 1.5
        L = c * (1 + r.uniform(-1, 1, (n, n)) / 13)
        res = perron_certificate(L, c)
        assert res.passed
        d = res.as_dict()["linked_certificate"]
        assert d["radius_row_mean_deviation"] == pytest.approx(c / 12)
        assert d["radius_sup"] == pytest.approx(n * c / 12)
        # the eigenvalue near n c stays simple (independent oracle)
        vals = np.linalg.eigvals(L)
        k = np.argmin(abs(vals - n * c))
        assert abs(vals[k] - n * c) <= d["radius_sup"] * (1 + 1e-12)
        assert np.sort(abs(vals - vals[k]))[1] > 0


def test_perron_fail_lists_rows():
    L = np.ones((4, 4))
    L[2] = [1, 1, 1, 3]
    res = perron_certificate(L, 1.0)
    assert not res.passed
    d = res.as_dict()
    assert d["failing_rows"] == [2]
    assert "linked_certificate" not in d


def test_perron_zero_c():
    with pytest.raises(ZeroC):
        perron_certificate(np.zeros((3, 3)))
    with pytest.raises(ZeroC):
        perron_certificate(np.ones((3, 3)), 0.0)


def test_perron_default_c_is_mean():
    assert perron_certificate(2 * np.ones((3, 3))).c == pytest.approx(2.0)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_random_direction_unit_norm(kind):
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(60):
        label, M = random_direction(rng, 4, kind, complex_=True)
        seen.add(label)
        assert op_norm(M, kind) == pytest.approx(1.0, rel=1e-12)
    assert seen == {"gaussian", "sparse", "rank_one"}


def test_rank_one_probe_closed_form():
    # L0 + t u phi moves lambda0 to exactly lambda0 + t
    for L in (ones(5), np.diag([2.0, 1.0, 0.0]), np.array([[1.0, 2.0], [0.5, -1.0]])):
        d = analyze(L)
        M = rank_one_probe(d)
        assert op_norm(M, d.kind) == pytest.approx(1.0)
        t = 0.05
        tr = continue_eigenvalue(d.L, d.lam, t * M)
        assert tr.ok
        assert tr.lam == pytest.approx(d.lam + t / op_norm(np.outer(d.u, d.phi), d.kind), abs=1e-10)


def test_continue_eigenvalue_reports_loss():
    # a collision with a double eigenvalue at the endpoint
    L0 = np.diag([1.0, 0.0])
    tr = continue_eigenvalue(L0, 1.0, np.diag([-1.0, 0.0]))
    assert not tr.ok


def test_config_validation_and_rng():
    with pytest.raises(InputError):
        CampaignConfig(samples=0)
    a = CampaignConfig().rng("radius", 3).standard_normal(4)
    b = CampaignConfig().rng("radius", 3).standard_normal(4)
    c = CampaignConfig().rng("taylor", 3).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("L", [ones(5), np.diag([2.0, 1.0, 0.0])])
def test_small_campaigns_clean(L):
    d = analyze(L)
    cert = base_certificate(d)
    rad = campaign_radius(d, cert, SMALL)
    assert rad["violations"] == 0
    assert rad["samples"] == 75
    assert rad["rank_one_probe_ok"]
    tay = campaign_taylor(d, cert, SMALL)
    assert tay["violations"] == 0
    for o in "012":
        assert tay["worst_error_over_half_width"][o]["value"] <= 1
    env = campaign_envelope(d, cert, SMALL)
    assert env["violations"] == 0


def test_derivative_campaign_small():
    out = campaign_derivatives(SMALL)
    assert out["violations"] == 0
    assert out["closed_form_ok"]
    assert out["closed_form_d2lambda"] == pytest.approx(2.0)


def test_gap_campaign_small():
    d = analyze(ones(5))
    gc = short_form_certificates(d, 0.45, 0.9, pi0_norm=2.0)[0]
    out = campaign_gap(d, gc, SMALL)
    assert out["outcomes"]["certified"] == 25
    assert out["violations"] == 0


def test_verify_deterministic_and_seed_sensitive():
    d = analyze(ones(4))
    cfg = CampaignConfig(samples=8, derivative_pairs=2)
    a = emit_report("verify", verify(d, cfg))
    b = emit_report("verify", verify(d, cfg))
    assert a == b
    c = emit_report("verify", verify(d, CampaignConfig(seed=1, samples=8, derivative_pairs=2)))
    assert a != c
