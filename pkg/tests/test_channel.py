import numpy as np
import pytest

from oiasim import streams
from oiasim.channel import (
    Scenario,
    draw_channel_set,
    draw_reference_bases,
    haar_unitary,
)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(K=0, M=3, N=4, L=2, S=2)
    with pytest.raises(ValueError):
        Scenario(K=2, M=3, N=4, L=2, S=4)   # S > M
    with pytest.raises(ValueError):
        Scenario(K=2, M=3, N=1, L=2, S=2)   # N < S
    with pytest.raises(ValueError):
        Scenario(K=2, M=3, N=4, L=2, S=2, n_f=-1)
    with pytest.raises(ValueError):
        Scenario(K=2, M=3, N=4, L=2, S=2, codebook_kind="dft")
    with pytest.raises(ValueError):
        Scenario(K=2, M=3, N=4, L=2, S=2, snr_db=())


def test_scenario_warns_when_null_space_guaranteed():
    # (K-1)S < L: sigma_L = 0 almost surely
    with pytest.warns(UserWarning):
        Scenario(K=2, M=3, N=4, L=3, S=1)


def test_channel_set_dimensions():
    scen = Scenario(K=2, M=3, N=4, L=2, S=2)
    ch = draw_channel_set(scen, streams.substream(1, streams.CHANNEL, 0))
    assert ch.h.shape == (2, 2, 4, 3, 2)
    assert ch.h.size // (3 * 2) == 16          # 2*2*4 matrices, each 3x2
    assert ch.mat(1, 2, 3).shape == (3, 2)
    np.testing.assert_array_equal(ch.mat(2, 1, 4), ch.h[1, 0, 3])


def test_channel_entry_variance():
    # sample mean of |h|^2 over >= 1e6 entries must hit 1/L within 1%
    scen = Scenario(K=2, M=5, N=100, L=2, S=2)
    rng = streams.substream(7, streams.CHANNEL, 0)
    total, count = 0.0, 0
    while count < 1_000_000:
        h = draw_channel_set(scen, rng).h
        total += float(np.sum(np.abs(h) ** 2))
        count += h.size
    assert abs(total / count - 0.5) < 0.01


def test_same_seed_bit_identical():
    scen = Scenario(K=3, M=2, N=5, L=2, S=1)
    a = draw_channel_set(scen, streams.substream(99, streams.CHANNEL, 4, 2))
    b = draw_channel_set(scen, streams.substream(99, streams.CHANNEL, 4, 2))
    np.testing.assert_array_equal(a.h, b.h)
    c = draw_channel_set(scen, streams.substream(99, streams.CHANNEL, 4, 3))
    assert not np.array_equal(a.h, c.h)


def test_reference_basis_shapes_and_orthogonality():
    scen = Scenario(K=2, M=3, N=4, L=2, S=2)
    b = draw_reference_bases(scen, streams.substream(3, streams.BASES, 0))
    assert b.q[0].shape == (3, 1)
    assert b.u[0].shape == (3, 2)
    for k in range(2):
        u, q = b.u[k], b.q[k]
        assert np.linalg.norm(u.conj().T @ u - np.eye(2)) <= 1e-10
        assert np.linalg.norm(u.conj().T @ q) <= 1e-10


def test_reference_basis_full_selection():
    # S = M: no interference space, U is a full unitary
    scen = Scenario(K=2, M=2, N=4, L=2, S=2)
    b = draw_reference_bases(scen, streams.substream(3, streams.BASES, 1))
    assert b.q[0].shape == (2, 0)
    assert np.linalg.norm(b.u[0].conj().T @ b.u[0] - np.eye(2)) <= 1e-10


def test_haar_projection_is_uniform():
    # for M=2, S=1 the reference column q is Haar on the sphere, so
    # |q^H e1|^2 ~ Beta(1,1) = U(0,1)
    scen = Scenario(K=1, M=2, N=1, L=1, S=1)
    rng = streams.substream(11, streams.BASES, 0)
    vals = np.empty(10_000)
    for i in range(vals.size):
        q = draw_reference_bases(scen, rng).q[0][:, 0]
        vals[i] = abs(q[0]) ** 2
    emp = np.arange(1, vals.size + 1) / vals.size
    sup = np.max(np.abs(np.sort(vals) - emp))
    assert sup < 0.02


def test_rotation_invariance_moments():
    # Q and V Q agree in first/second moments of their coordinates
    scen = Scenario(K=1, M=3, N=2, L=1, S=2)
    rng = streams.substream(12, streams.BASES, 0)
    v = haar_unitary(3, streams.substream(12, streams.PROBE, 1))
    n = 10_000
    plain = np.empty((n, 3), dtype=complex)
    rotated = np.empty((n, 3), dtype=complex)
    for i in range(n):
        plain[i] = draw_reference_bases(scen, rng).q[0][:, 0]
        rotated[i] = v @ draw_reference_bases(scen, rng).q[0][:, 0]
    assert np.all(np.abs(plain.mean(axis=0) - rotated.mean(axis=0)) < 0.03)
    assert np.all(np.abs(
        np.mean(np.abs(plain) ** 2, axis=0) - np.mean(np.abs(rotated) ** 2, axis=0)
    ) < 0.03)


def test_haar_unitary_is_unitary():
    u = haar_unitary(4, streams.substream(5, streams.PROBE, 0))
    assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-12


def test_substream_paths_disjoint():
    a = streams.substream(1, 0, 1).standard_normal(4)
    b = streams.substream(1, 0, 2).standard_normal(4)
    assert not np.array_equal(a, b)
    with pytest.raises(ValueError):
        streams.substream(-1, 0)
