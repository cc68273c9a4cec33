import numpy as np
import pytest

from oiasim import streams
from oiasim.channel import (
    Scenario,
    complex_gaussian,
    draw_channel_set,
    draw_reference_bases,
    haar_unitary,
)
from oiasim.codebook import gen_random_codebook
from oiasim.oia import run_cell_pipeline
from oiasim.receivers import (
    SingularChannelError,
    aligned_interference_instance,
    capacity_ic,
    effective_channel,
    evaluate_cell,
    gmi_itheta,
    gmi_med,
    gmi_sup,
    interference_covariance,
    logdet_pd,
    max_snr_beamformer,
    mc_gmi_estimate,
    med_decode,
    ml_decode,
    random_hermitian_pd,
    zf_equalizer,
    zf_rates,
)

QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2)


def _eff_instance(seed, n_cross=2, m=3, s=2):
    rng = streams.substream(seed, streams.PROBE, 0)
    u_full, r_ = np.linalg.qr(complex_gaussian(rng, (m, m)))
    u = u_full[:, :s]
    h_c = complex_gaussian(rng, (m, s))
    cross = complex_gaussian(rng, (n_cross, m), var=0.5)
    return h_c, u.conj().T @ h_c, cross, u, rng


# --- zero forcing ----------------------------------------------------------

def test_zf_equalizer_identity_and_diagonal():
    np.testing.assert_allclose(zf_equalizer(np.eye(2, dtype=complex)), np.eye(2))
    f = zf_equalizer(np.diag([2.0, 4.0]).astype(complex))
    np.testing.assert_allclose(f.conj().T, np.diag([0.5, 0.25]))


def test_zf_equalizer_inverts_random_channel():
    rng = streams.substream(1, streams.PROBE, 0)
    h = complex_gaussian(rng, (3, 3))
    f = zf_equalizer(h)
    assert np.linalg.norm(f.conj().T @ h - np.eye(3)) < 1e-8


def test_zf_equalizer_flags_singular():
    h = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]], dtype=complex)
    with pytest.raises(SingularChannelError):
        zf_equalizer(h)


def test_zf_rates_scalar_reduction():
    # S=1, no interference: rate = log2(1 + SNR |g|^2)
    g = 0.8 + 0.3j
    h = np.array([[g]], dtype=complex)
    u = np.array([[1.0], [0.0]], dtype=complex)
    cross = np.zeros((0, 2), dtype=complex)
    n0 = 0.1
    rate = zf_rates(h, cross, u, n0)
    assert rate[0] == pytest.approx(np.log2(1 + abs(g) ** 2 / n0), rel=1e-12)


def test_zf_rates_ignore_aligned_interference():
    # cross vectors inside span(Q) leave the post-nulling rates untouched
    rng = streams.substream(2, streams.PROBE, 0)
    m, s = 3, 2
    u_full, _ = np.linalg.qr(complex_gaussian(rng, (m, m)))
    u, q = u_full[:, :s], u_full[:, s:]
    h_c = complex_gaussian(rng, (m, s))
    h_t = u.conj().T @ h_c
    aligned = (complex_gaussian(rng, (4, m - s)) @ q.T)
    n0 = 0.05
    with_cross = zf_rates(h_t, aligned, u, n0)
    without = zf_rates(h_t, np.zeros((0, m), dtype=complex), u, n0)
    np.testing.assert_allclose(with_cross, without, rtol=1e-9)


def test_zf_rates_match_direct_formula():
    # independent evaluation straight from the raw channels
    scen = Scenario(K=2, M=3, N=5, L=2, S=2, seed=3)
    rng = streams.substream(3, streams.PROBE, 1)
    ch = draw_channel_set(scen, rng)
    bases = draw_reference_bases(scen, rng)
    cb = gen_random_codebook(2, 3, streams.substream(3, streams.CODEBOOK, 0, 3))
    sels = run_cell_pipeline(ch, bases, cb, scen)
    n0 = 0.2
    snr = 1.0 / n0
    for i in (1, 2):
        eff = effective_channel(ch, bases, sels, i)
        got = zf_rates(eff.h_tilde, eff.cross, eff.u, n0)
        u = bases.u_of(i)
        cols = [
            u.conj().T @ ch.mat(i, i, j) @ sels[i - 1].weights[t]
            for t, j in enumerate(sels[i - 1].selected)
        ]
        f = np.linalg.inv(np.stack(cols, axis=1)).conj().T
        for jj in range(scen.S):
            interf = 0.0
            for sel in sels:
                if sel.cell == i:
                    continue
                for t, mm in enumerate(sel.selected):
                    val = f[:, jj].conj() @ u.conj().T @ ch.mat(i, sel.cell, mm) @ sel.weights[t]
                    interf += abs(val) ** 2 * snr
            expect = np.log2(1 + snr / (np.linalg.norm(f[:, jj]) ** 2 + interf))
            assert got[jj] == pytest.approx(expect, rel=1e-10)


def test_zf_rates_invariant_to_weight_phases():
    h_c, h_t, cross, u, rng = _eff_instance(4)
    base = zf_rates(h_t, cross, u, 0.1)
    phases = np.exp(1j * rng.uniform(-np.pi, np.pi, size=2))
    np.testing.assert_allclose(zf_rates(h_t * phases, cross, u, 0.1), base, atol=1e-9)


# --- covariance and capacity ------------------------------------------------

def test_interference_covariance_no_cross():
    u = np.eye(3, dtype=complex)[:, :2]
    r = interference_covariance(np.zeros((0, 3), dtype=complex), u, 0.3)
    np.testing.assert_allclose(r, 0.3 * np.eye(2))


def test_interference_covariance_rank_one():
    u = np.eye(3, dtype=complex)[:, :2]
    v = np.array([[1.0, 0.0, 0.0]], dtype=complex)   # U^H v = e1
    r = interference_covariance(v, u, 0.5)
    expect = 0.5 * np.eye(2)
    expect[0, 0] += 1.0
    np.testing.assert_allclose(r, expect)


def test_interference_covariance_dominates_noise_floor():
    for seed in range(20):
        h_c, h_t, cross, u, _ = _eff_instance(seed + 10, n_cross=3)
        r = interference_covariance(cross, u, 0.01)
        assert np.linalg.eigvalsh(r)[0] >= 0.01 - 1e-10


def test_capacity_scalar_case():
    h = np.array([[1.0]], dtype=complex)
    assert capacity_ic(h, np.zeros((0, 1), dtype=complex), 1.0) == pytest.approx(1.0)


def test_capacity_no_cross_reduction():
    rng = streams.substream(5, streams.PROBE, 0)
    h_c = complex_gaussian(rng, (3, 2))
    n0 = 0.25
    got = capacity_ic(h_c, np.zeros((0, 3), dtype=complex), n0)
    expect = logdet_pd(np.eye(2, dtype=complex) + h_c.conj().T @ h_c / n0)
    assert got == pytest.approx(expect, rel=1e-10)


def test_capacity_rotation_invariance():
    h_c, h_t, cross, u, rng = _eff_instance(6, n_cross=3)
    v = haar_unitary(3, rng)
    a = capacity_ic(h_c, cross, 0.1)
    b = capacity_ic(v @ h_c, cross @ v.T, 0.1)
    assert b == pytest.approx(a, abs=1e-9)


# --- GMI ---------------------------------------------------------------------

def test_gmi_zero_channel_is_zero():
    rng = streams.substream(7, streams.PROBE, 0)
    r = random_hermitian_pd(rng, 2)
    r_hat = random_hermitian_pd(rng, 2)
    h0 = np.zeros((2, 2), dtype=complex)
    for theta in (0.0, 0.3, 1.0, 5.0):
        assert gmi_itheta(h0, r, r_hat, theta) == pytest.approx(0.0, abs=1e-12)
    assert gmi_sup(h0, r, r_hat)[1] == pytest.approx(0.0, abs=1e-12)


def test_gmi_matched_identity():
    for seed in range(10):
        rng = streams.substream(seed, streams.PROBE, 1)
        h = complex_gaussian(rng, (2, 2))
        r = random_hermitian_pd(rng, 2)
        val = gmi_itheta(h, r, r, 1.0)
        ref = logdet_pd(np.eye(2, dtype=complex) + h.conj().T @ np.linalg.solve(r, h))
        assert val == pytest.approx(ref, rel=1e-9)


def test_gmi_sup_matched_theta_is_one():
    rng = streams.substream(8, streams.PROBE, 0)
    h = complex_gaussian(rng, (2, 2))
    r = random_hermitian_pd(rng, 2)
    theta, gmi = gmi_sup(h, r, r)
    ref = gmi_itheta(h, r, r, 1.0)
    assert theta == pytest.approx(1.0, abs=1e-3)
    assert gmi == pytest.approx(ref, abs=1e-6)


def test_gmi_mismatch_never_beats_matched():
    for seed in range(30):
        rng = streams.substream(seed, streams.PROBE, 2)
        h = complex_gaussian(rng, (2, 2))
        r = random_hermitian_pd(rng, 2)
        n0 = 0.2
        _, gmi = gmi_med(h, r, n0)
        matched = gmi_itheta(h, r, r, 1.0)
        assert gmi <= matched + 1e-6


def test_gmi_med_perfect_alignment_reaches_nulled_capacity():
    rng = streams.substream(9, streams.PROBE, 0)
    h = complex_gaussian(rng, (2, 2))
    n0 = 0.05
    r = n0 * np.eye(2, dtype=complex)
    theta, gmi = gmi_med(h, r, n0)
    expect = logdet_pd(np.eye(2, dtype=complex) + h @ h.conj().T / n0)
    assert gmi == pytest.approx(expect, rel=1e-6)
    # inflated white noise strictly lowers the rate
    _, lower = gmi_med(h, 2 * n0 * np.eye(2, dtype=complex), n0)
    assert lower < gmi


def test_gmi_rejects_bad_inputs():
    h = np.eye(2, dtype=complex)
    good = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        gmi_itheta(h, -good, good, 1.0)
    with pytest.raises(ValueError):
        gmi_itheta(h, good, good, -1.0)
    bad = np.array([[1.0, 0.5], [0.1, 1.0]], dtype=complex)   # not Hermitian
    with pytest.raises(ValueError):
        gmi_itheta(h, bad, good, 1.0)


def test_gmi_closed_form_agrees_with_monte_carlo():
    rng = streams.substream(10, streams.PROBE, 0)
    for s in (1, 2, 3):
        for _ in range(3):
            h = complex_gaussian(rng, (s, s))
            r = random_hermitian_pd(rng, s)
            r_hat = random_hermitian_pd(rng, s)
            theta = float(rng.uniform(0.1, 1.5))
            est, se = mc_gmi_estimate(h, r, r_hat, theta, 40_000, rng)
            closed = gmi_itheta(h, r, r_hat, theta)
            assert abs(est - closed) <= 4 * se


def test_mc_estimate_trivial_case():
    rng = streams.substream(11, streams.PROBE, 0)
    eye = np.eye(2, dtype=complex)
    est, se = mc_gmi_estimate(np.zeros((2, 2), dtype=complex), eye, eye, 1.0, 5000, rng)
    assert abs(est) <= max(3 * se, 1e-9)


def test_mc_estimate_error_shrinks_with_samples():
    rng = streams.substream(12, streams.PROBE, 0)
    h = complex_gaussian(rng, (2, 2))
    r = random_hermitian_pd(rng, 2)
    r_hat = random_hermitian_pd(rng, 2)
    _, se1 = mc_gmi_estimate(h, r, r_hat, 0.8, 10_000, rng)
    _, se2 = mc_gmi_estimate(h, r, r_hat, 0.8, 40_000, rng)
    assert se2 == pytest.approx(se1 / 2, rel=0.2)


def test_mc_estimate_rejects_small_samples():
    eye = np.eye(1, dtype=complex)
    with pytest.raises(ValueError):
        mc_gmi_estimate(eye, eye, eye, 1.0, 100, streams.substream(1, 0))


# --- decoders ----------------------------------------------------------------

def test_med_decode_scalar():
    got = med_decode(np.array([0.9 + 0j]), np.array([[1.0 + 0j]]), np.array([1.0, -1.0]))
    assert got[0] == pytest.approx(1.0)


def test_med_decode_noiseless_recovers_symbols():
    rng = streams.substream(13, streams.PROBE, 0)
    h = complex_gaussian(rng, (2, 2))
    x = QPSK[[1, 3]]
    got = med_decode(h @ x, h, QPSK)
    np.testing.assert_allclose(got, x)


def test_med_decode_caps_search_space():
    with pytest.raises(ValueError):
        med_decode(np.zeros(7), np.eye(7, dtype=complex), QPSK)   # 4^7 > 4096


def test_ml_decode_whitening_identity():
    rng = streams.substream(14, streams.PROBE, 0)
    h = complex_gaussian(rng, (2, 2))
    y = complex_gaussian(rng, (2,))
    eye = np.eye(2, dtype=complex)
    np.testing.assert_allclose(ml_decode(y, h, eye, QPSK), med_decode(y, h, QPSK))


def test_ml_decode_noiseless():
    rng = streams.substream(15, streams.PROBE, 0)
    h = complex_gaussian(rng, (3, 2))
    r_c = random_hermitian_pd(rng, 3)
    x = QPSK[[0, 2]]
    np.testing.assert_allclose(ml_decode(h @ x, h, r_c, QPSK), x)


def test_ml_beats_med_on_colored_noise():
    # paired Monte Carlo at 10 dB: the whitened metric cannot lose
    rng = streams.substream(16, streams.PROBE, 0)
    n0 = 0.1
    err_ml = err_med = 0
    trials = 10_000
    for _ in range(trials):
        h = complex_gaussian(rng, (2, 2))
        cross = complex_gaussian(rng, (1, 2), var=1.0)
        r_c = cross.T @ cross.conj() + n0 * np.eye(2, dtype=complex)
        x = QPSK[rng.integers(0, 4, size=2)]
        noise = complex_gaussian(rng, (2,), var=n0)
        y = h @ x + cross[0] * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2) + noise
        if not np.allclose(ml_decode(y, h, r_c, QPSK), x):
            err_ml += 1
        if not np.allclose(med_decode(y, h, QPSK), x):
            err_med += 1
    assert err_ml <= err_med


def test_max_snr_beamformer():
    w = max_snr_beamformer(np.diag([2.0, 1.0]).astype(complex))
    assert abs(w[0]) == pytest.approx(1.0)
    rng = streams.substream(17, streams.PROBE, 0)
    h = complex_gaussian(rng, (3, 2))
    w = max_snr_beamformer(h)
    gain = np.linalg.norm(h @ w) ** 2
    for _ in range(1000):
        u = complex_gaussian(rng, (2,))
        u /= np.linalg.norm(u)
        assert np.linalg.norm(h @ u) ** 2 <= gain + 1e-12
    a, b = complex_gaussian(rng, (3,)), complex_gaussian(rng, (2,))
    w = max_snr_beamformer(np.outer(a, b.conj()))
    assert abs(abs(np.vdot(w, b / np.linalg.norm(b))) - 1.0) < 1e-9


# --- cell evaluation ----------------------------------------------------------

def test_evaluate_cell_outage_path():
    u = np.eye(3, dtype=complex)[:, :2]
    h_c = np.zeros((3, 2), dtype=complex)
    h_c[0, 0] = h_c[0, 1] = 1.0          # rank-1 nulled channel
    from oiasim.receivers import EffectiveChannel
    eff = EffectiveChannel(h_c=h_c, h_tilde=u.conj().T @ h_c,
                           cross=np.zeros((0, 3), dtype=complex), u=u)
    ev = evaluate_cell(eff, 0.1)
    assert ev.outage
    np.testing.assert_array_equal(ev.zf_rates, np.zeros(2))
    assert ev.capacity > 0


def test_evaluate_cell_gmi_orderings():
    rng = streams.substream(18, streams.PROBE, 0)
    from oiasim.receivers import EffectiveChannel
    for seed in range(10):
        h_c, h_t, cross, u, _ = _eff_instance(seed + 40)
        eff = EffectiveChannel(h_c=h_c, h_tilde=h_t, cross=cross, u=u)
        ev = evaluate_cell(eff, 0.1, want=("zf", "med_gmi", "capacity", "gmi_sup"))
        assert ev.med_rate <= ev.gmi + 1e-9      # face-value metric <= sup
        assert ev.gmi <= ev.capacity + 1e-6


def test_aligned_instance_gap_vanishes_at_high_snr():
    gaps = []
    for snr_db in (0.0, 40.0):
        n0 = 10 ** (-snr_db / 10)
        total = 0.0
        for t in range(50):
            rng = streams.substream(19, streams.PROBE, t)
            h_c, h_t, cross, u = aligned_interference_instance(rng, 3, 2, 2, cross_var=1.5)
            r = interference_covariance(cross, u, n0)
            _, gmi = gmi_med(h_t, r, n0)
            total += capacity_ic(h_c, cross, n0) - gmi
        gaps.append(total / 50)
    assert gaps[0] > gaps[1] > 0
    assert gaps[1] < 0.05
