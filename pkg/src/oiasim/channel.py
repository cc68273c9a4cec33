"""Scenario parameters, channel matrices, and interference reference bases.

Conventions used throughout the package:

* ``h[k, i, j]`` is the M x L channel from user ``j`` of cell ``i`` to base
  station ``k`` (0-based array axes; the 1-based accessor :meth:`ChannelSet.mat`
  mirrors the usual math notation).
* Channel entries are i.i.d. circularly-symmetric complex Gaussian with
  variance ``1/L``, i.e. real and imaginary parts each N(0, 1/(2L)).
* The per-cell pair ``(U_k, Q_k)`` is a jointly orthonormal basis of C^M:
  ``Q_k`` (M x (M-S)) is the interference reference basis, ``U_k`` (M x S)
  spans its orthogonal complement and carries the data streams.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

CODEBOOK_KINDS = ("random", "grassmannian", "svd_exact")


@dataclass(frozen=True)
class Scenario:
    """Immutable experiment parameters."""

    K: int                      # cells
    M: int                      # BS antennas
    N: int                      # users per cell
    L: int                      # user antennas
    S: int                      # selected users per cell
    snr_db: tuple[float, ...] = (20.0,)   # SNR points, SNR = 1/N0
    codebook_kind: str = "random"         # random | grassmannian | svd_exact
    n_f: int = 4                # feedforward bits, codebook size 2**n_f
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.K < 1 or self.M < 1 or self.L < 1:
            raise ValueError("K, M, L must all be >= 1")
        if not 1 <= self.S <= self.M:
            raise ValueError(f"need 1 <= S <= M, got S={self.S}, M={self.M}")
        if self.N < self.S:
            raise ValueError(f"need N >= S, got N={self.N}, S={self.S}")
        if self.n_f < 0:
            raise ValueError("n_f must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.codebook_kind not in CODEBOOK_KINDS:
            raise ValueError(f"unknown codebook_kind {self.codebook_kind!r}")
        if len(self.snr_db) == 0:
            raise ValueError("snr_db must contain at least one point")
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        if self.K >= 2 and (self.K - 1) * self.S < self.L:
            warnings.warn(
                f"(K-1)*S = {(self.K - 1) * self.S} < L = {self.L}: the stacked "
                "interference matrix has a nontrivial null space, so perfect "
                "alignment (sigma_L = 0) holds almost surely",
                stacklevel=2,
            )

    @property
    def codebook_size(self) -> int:
        return 2 ** self.n_f

    def noise_power(self, snr_db: float) -> float:
        """N0 for a given SNR point (SNR = 1/N0)."""
        return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class ChannelSet:
    """All channel matrices of one trial: ``h[k, i, j]`` is M x L."""

    h: np.ndarray  # complex (K, K, N, M, L)

    @property
    def K(self) -> int:
        return self.h.shape[0]

    @property
    def N(self) -> int:
        return self.h.shape[2]

    def mat(self, k: int, i: int, j: int) -> np.ndarray:
        """Channel from user ``j`` of cell ``i`` to BS ``k`` (1-based ids)."""
        return self.h[k - 1, i - 1, j - 1]


@dataclass(frozen=True)
class ReferenceBasis:
    """Per-cell signal/interference bases: ``u[k]`` is M x S, ``q[k]`` is M x (M-S)."""

    u: np.ndarray  # complex (K, M, S)
    q: np.ndarray  # complex (K, M, M-S)

    def u_of(self, k: int) -> np.ndarray:
        return self.u[k - 1]

    def q_of(self, k: int) -> np.ndarray:
        return self.q[k - 1]


def complex_gaussian(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, var) samples; real/imag parts each N(0, var/2)."""
    scale = np.sqrt(var / 2.0)
    z = rng.standard_normal(tuple(shape) + (2,))
    return scale * (z[..., 0] + 1j * z[..., 1])


def draw_channel_set(scenario: Scenario, rng: np.random.Generator) -> ChannelSet:
    """Draw all K^2*N channel matrices with i.i.d. CN(0, 1/L) entries."""
    shape = (scenario.K, scenario.K, scenario.N, scenario.M, scenario.L)
    return ChannelSet(h=complex_gaussian(rng, shape, var=1.0 / scenario.L))


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed m x m unitary.

    QR of a complex Gaussian matrix with the R-diagonal phase correction;
    plain QR alone is not rotation invariant because LAPACK's sign
    convention biases the factor.
    """
    a = complex_gaussian(rng, (m, m))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    q = q * (d.conj() / np.abs(d))
    return q


def draw_reference_bases(scenario: Scenario, rng: np.random.Generator) -> ReferenceBasis:
    """Draw per-cell (Q_k, U_k) with Q_k Haar among M x (M-S) frames.

    The two blocks are disjoint column ranges of one Haar unitary, so
    ``[U_k, Q_k]`` is orthonormal by construction and U_k spans the exact
    orthogonal complement of Q_k.  For S = M, Q_k has zero columns.
    """
    m, s = scenario.M, scenario.S
    u = np.empty((scenario.K, m, s), dtype=complex)
    q = np.empty((scenario.K, m, m - s), dtype=complex)
    for k in range(scenario.K):
        w = haar_unitary(m, rng)
        q[k] = w[:, : m - s]
        u[k] = w[:, m - s:]
    return ReferenceBasis(u=u, q=q)
