"""Step-3 receivers: ZF rates, channel capacity, and mismatched-decoder GMI.

All rates are in bits (log2).  The per-cell quantities are built from an
:class:`EffectiveChannel`: the composite direct matrix ``h_c`` (M x S), its
interference-nulled version ``h_tilde = U_i^H h_c`` (S x S), and the list of
cross-interference vectors ``H_i^{[k,m]} w^{[k,m]}`` arriving from selected
users of other cells.

The minimum-Euclidean-distance receiver ignores the true effective-noise
covariance R and decodes with the white metric ``N0 I``.  Two rates are
derived from it: ``gmi_sup``/``gmi_med`` maximize I(theta) over the metric
temperature (this sup is invariant to the metric's noise scale, so it never
collapses), while the face-value I(theta=1) rate collapses once leaked
interference dominates N0, which is what produces the ZF/MED crossover in
the rate sweeps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, ReferenceBasis, complex_gaussian

LN2 = float(np.log(2.0))
_COND_LIMIT = 1e12


class SingularChannelError(Exception):
    """Effective channel too ill-conditioned to zero-force (outage)."""


@dataclass(frozen=True)
class EffectiveChannel:
    h_c: np.ndarray       # (M, S) composite direct matrix
    h_tilde: np.ndarray   # (S, S) after interference nulling
    cross: np.ndarray     # (n_cross, M) interfering vectors, possibly empty
    u: np.ndarray         # (M, S) signal basis of this cell


@dataclass(frozen=True)
class ReceiverEval:
    zf_rates: np.ndarray  # (S,) per-user ZF rates, zeros on outage
    capacity: float
    gmi: float            # sup over theta (NaN unless requested)
    theta_star: float
    med_rate: float       # the MED metric at face value, max(0, I(theta=1))
    r_cov: np.ndarray     # (S, S) effective-noise covariance
    n0: float
    outage: bool


def effective_channel(
    channels: ChannelSet,
    bases: ReferenceBasis,
    selections,
    cell: int,
) -> EffectiveChannel:
    """Assemble the per-cell receiver-side quantities from a selection round."""
    i0 = cell - 1
    own = selections[i0]
    u = bases.u[i0]
    cols = [
        channels.mat(cell, cell, j) @ own.weights[t]
        for t, j in enumerate(own.selected)
    ]
    h_c = np.stack(cols, axis=1)
    cross = [
        channels.mat(cell, sel.cell, j) @ sel.weights[t]
        for sel in selections
        if sel.cell != cell
        for t, j in enumerate(sel.selected)
    ]
    cross_arr = np.stack(cross, axis=0) if cross else np.zeros((0, u.shape[0]), dtype=complex)
    return EffectiveChannel(h_c=h_c, h_tilde=u.conj().T @ h_c, cross=cross_arr, u=u)


def zf_equalizer(h_tilde: np.ndarray) -> np.ndarray:
    """F with F^H h_tilde = I; raises SingularChannelError past cond 1e12."""
    h_tilde = np.asarray(h_tilde, dtype=complex)
    if h_tilde.ndim != 2 or h_tilde.shape[0] != h_tilde.shape[1]:
        raise ValueError("zero-forcing needs a square nulled channel")
    if np.linalg.cond(h_tilde) > _COND_LIMIT:
        raise SingularChannelError("effective channel condition number exceeds 1e12")
    return np.linalg.inv(h_tilde).conj().T


def zf_rates(h_tilde: np.ndarray, cross: np.ndarray, u: np.ndarray, n0: float) -> np.ndarray:
    """Per-user rates log2(1 + SNR / (||f_j||^2 + I_j)) with SNR = 1/n0.

    I_j sums |f_j^H U^H v|^2 * SNR over the cross vectors v.
    """
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    f = zf_equalizer(h_tilde)
    snr = 1.0 / n0
    norms_sq = np.sum(np.abs(f) ** 2, axis=0)
    if cross.shape[0]:
        proj = cross @ u.conj()                   # (n_cross, S) rows U^H v
        leak = np.abs(proj @ f.conj()) ** 2       # |f_j^H (U^H v)|^2
        interf = snr * leak.sum(axis=0)
    else:
        interf = np.zeros_like(norms_sq)
    return np.log2(1.0 + snr / (norms_sq + interf))


def interference_covariance(cross: np.ndarray, u: np.ndarray, n0: float) -> np.ndarray:
    """Effective-noise covariance after nulling: sum (U^H v)(U^H v)^H + n0 I."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    s = u.shape[1]
    r = n0 * np.eye(s, dtype=complex)
    if cross.shape[0]:
        proj = cross @ u.conj()           # rows are U^H v
        r = r + proj.T @ proj.conj()
    return r


def capacity_ic(h_c: np.ndarray, cross: np.ndarray, n0: float) -> float:
    """Channel capacity log2 det(R_c^{-1/2} h_c h_c^H R_c^{-1/2} + I)."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    m = h_c.shape[0]
    r_c = n0 * np.eye(m, dtype=complex)
    if cross.shape[0]:
        r_c = r_c + cross.T @ cross.conj()
    # det(I_M + R^-1/2 X X^H R^-1/2) = det(I_S + X^H R^-1 X), S-dim is stabler
    a = h_c.conj().T @ np.linalg.solve(r_c, h_c)
    return logdet_pd(np.eye(h_c.shape[1], dtype=complex) + a)


def logdet_pd(a: np.ndarray) -> float:
    """log2 det of a Hermitian positive-definite matrix, in log-space."""
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    if w[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return float(np.sum(np.log2(w)))


def _check_hpd(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square")
    if np.linalg.norm(a - a.conj().T) > 1e-8 * max(1.0, np.linalg.norm(a)):
        raise ValueError(f"{name} must be Hermitian")
    if np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0] <= 0:
        raise ValueError(f"{name} must be positive definite")
    return a


class _GmiContext:
    """Precomputed pieces of I(theta) so the theta search stays cheap."""

    def __init__(self, h_tilde: np.ndarray, r: np.ndarray, r_hat: np.ndarray):
        self.hh = np.asarray(h_tilde, dtype=complex) @ np.asarray(h_tilde, dtype=complex).conj().T
        self.r = r
        self.r_hat = r_hat
        self.hh_plus_r = self.hh + r
        self.tr_mismatch = float(np.trace(np.linalg.solve(r_hat, r)).real)
        self.logdet_rhat = logdet_pd(r_hat)

    def itheta(self, theta: float) -> float:
        b = theta * self.hh + self.r_hat       # = R_hat Omega, Hermitian PD
        t1 = -theta / LN2 * self.tr_mismatch
        t2 = theta / LN2 * float(np.trace(np.linalg.solve(b, self.hh_plus_r)).real)
        return t1 + t2 + logdet_pd(b) - self.logdet_rhat


def gmi_itheta(h_tilde: np.ndarray, r: np.ndarray, r_hat: np.ndarray, theta: float) -> float:
    """Closed-form GMI integrand I(theta) for the mismatched-covariance metric.

    I(theta) = -(theta/ln2) tr(R_hat^-1/2 R R_hat^-1/2)
               + (theta/ln2) tr(Omega^-1 R_hat^-1 (H H^H + R))
               + log2 det(Omega),   Omega = theta R_hat^-1 H H^H + I.
    """
    r = _check_hpd(r, "r")
    r_hat = _check_hpd(r_hat, "r_hat")
    if theta < 0:
        raise ValueError("theta must be >= 0")
    return _GmiContext(h_tilde, r, r_hat).itheta(theta)


def gmi_sup(h_tilde: np.ndarray, r: np.ndarray, r_hat: np.ndarray) -> tuple[float, float]:
    """Maximize I(theta) over theta >= 0: (theta_star, gmi).

    Doubling from theta = 1 brackets the peak (stop after two consecutive
    decreases), a 64-point log grid locates it, golden-section refines to a
    relative theta tolerance of 1e-6.
    """
    r = _check_hpd(r, "r")
    r_hat = _check_hpd(r_hat, "r_hat")
    f = _GmiContext(h_tilde, r, r_hat).itheta

    hi = 1.0
    prev = f(hi)
    drops = 0
    for _ in range(64):
        nxt = f(2.0 * hi)
        drops = drops + 1 if nxt < prev else 0
        hi *= 2.0
        prev = nxt
        if drops >= 2:
            break
    grid = np.concatenate([[0.0], np.geomspace(hi * 1e-6, hi, 63)])
    vals = np.array([f(t) for t in grid])
    k = int(np.argmax(vals))
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, len(grid) - 1)]
    theta, val = _golden_max(f, lo_b, hi_b)
    if vals[k] > val:
        theta, val = float(grid[k]), float(vals[k])
    if val <= 0.0:
        return 0.0, 0.0       # sup attained at theta -> 0
    return theta, val


def _golden_max(f, lo: float, hi: float, rel_tol: float = 1e-6) -> tuple[float, float]:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if (b - a) <= rel_tol * max(abs(a), abs(b), 1e-12):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return float(x), float(f(x))


def gmi_med(h_tilde: np.ndarray, r: np.ndarray, n0: float) -> tuple[float, float]:
    """GMI of the minimum-Euclidean-distance receiver (metric covariance N0 I)."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    s = h_tilde.shape[0]
    return gmi_sup(h_tilde, r, n0 * np.eye(s, dtype=complex))


def mc_gmi_estimate(
    h_tilde: np.ndarray,
    r: np.ndarray,
    r_hat: np.ndarray,
    theta: float,
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo estimate of the GMI definition (oracle for gmi_itheta).

    Samples x ~ CN(0, I), z ~ CN(0, R), y = H x + z and averages
    log2[ Q(y|x)^theta / E_x' Q(y|x')^theta ] using the closed-form Gaussian
    inner expectation exp(-theta y^H Omega^-1 R_hat^-1 y) det(Omega^-1).
    """
    if n_samples < 1000:
        raise ValueError("need at least 1e3 samples")
    r = _check_hpd(r, "r")
    r_hat = _check_hpd(r_hat, "r_hat")
    h_tilde = np.asarray(h_tilde, dtype=complex)
    s = h_tilde.shape[0]
    hh = h_tilde @ h_tilde.conj().T
    b_inv = np.linalg.inv(theta * hh + r_hat)      # Omega^-1 R_hat^-1, Hermitian
    rh_inv = np.linalg.inv(r_hat)
    log2_det_omega = logdet_pd(theta * hh + r_hat) - logdet_pd(r_hat)

    chol = np.linalg.cholesky(r)
    x = complex_gaussian(rng, (n_samples, s))
    z = complex_gaussian(rng, (n_samples, s)) @ chol.T
    y = x @ h_tilde.T + z
    quad_num = np.einsum("ij,jk,ik->i", z.conj(), rh_inv, z).real
    quad_den = np.einsum("ij,jk,ik->i", y.conj(), b_inv, y).real
    vals = (theta / LN2) * (quad_den - quad_num) + log2_det_omega
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(n_samples))
    return est, se


def _product_constellation(constellation, s: int) -> np.ndarray:
    pts = np.asarray(constellation, dtype=complex)
    if pts.ndim != 1 or pts.shape[0] == 0:
        raise ValueError("constellation must be a non-empty 1-D set of symbols")
    if pts.shape[0] ** s > 4096:
        raise ValueError("product constellation exceeds the brute-force cap of 4096")
    return np.array(list(itertools.product(pts, repeat=s)), dtype=complex)


def med_decode(y_tilde: np.ndarray, h_tilde: np.ndarray, constellation) -> np.ndarray:
    """Brute-force argmin ||y - H x|| over the product constellation.

    Ties resolve to the lowest lexicographic candidate.
    """
    cands = _product_constellation(constellation, h_tilde.shape[1])
    err = y_tilde[None, :] - cands @ h_tilde.T
    k = int(np.argmin(np.sum(np.abs(err) ** 2, axis=1)))
    return cands[k]


def ml_decode(y: np.ndarray, h_c: np.ndarray, r_c: np.ndarray, constellation) -> np.ndarray:
    """Brute-force argmin (y - H x)^H R_c^-1 (y - H x)."""
    r_c = _check_hpd(r_c, "r_c")
    cands = _product_constellation(constellation, h_c.shape[1])
    err = y[None, :] - cands @ h_c.T
    metric = np.einsum("ij,jk,ik->i", err.conj(), np.linalg.inv(r_c), err).real
    k = int(np.argmin(metric))
    return cands[k]


def max_snr_beamformer(h_direct: np.ndarray) -> np.ndarray:
    """Unit weight maximizing ||H w||^2: top right-singular vector, phase-fixed."""
    _, _, vh = np.linalg.svd(np.asarray(h_direct, dtype=complex), full_matrices=False)
    w = vh[0].conj()
    k = int(np.argmax(np.abs(w)))
    return w * (w[k] / abs(w[k])).conj()


def evaluate_cell(
    eff: EffectiveChannel,
    n0: float,
    want: tuple[str, ...] = ("zf", "med_gmi", "capacity"),
) -> ReceiverEval:
    """Compute the requested receiver metrics for one cell.

    ``med_gmi`` is the minimum-Euclidean-distance metric taken at face value
    (theta = 1): it collapses once the leaked interference dominates the
    noise the metric believes in, which is what produces the ZF/MED rate
    crossover at high SNR.  ``gmi_sup`` requests the theta-maximized GMI,
    which is invariant to the metric's noise scale and never collapses.
    """
    s = eff.h_tilde.shape[0]
    r_cov = interference_covariance(eff.cross, eff.u, n0)
    rates = np.zeros(s)
    outage = False
    if "zf" in want:
        try:
            rates = zf_rates(eff.h_tilde, eff.cross, eff.u, n0)
        except SingularChannelError:
            outage = True
    cap = capacity_ic(eff.h_c, eff.cross, n0) if "capacity" in want else float("nan")
    med_rate = float("nan")
    if "med_gmi" in want:
        med_rate = max(0.0, gmi_itheta(eff.h_tilde, r_cov, n0 * np.eye(s, dtype=complex), 1.0))
    if "gmi_sup" in want:
        theta_star, gmi = gmi_med(eff.h_tilde, r_cov, n0)
    else:
        theta_star, gmi = float("nan"), float("nan")
    return ReceiverEval(
        zf_rates=rates,
        capacity=cap,
        gmi=gmi,
        theta_star=theta_star,
        med_rate=med_rate,
        r_cov=r_cov,
        n0=n0,
        outage=outage,
    )


# ---------------------------------------------------------------------------
# synthetic constructions shared by the property suite and tests

def random_hermitian_pd(rng: np.random.Generator, dim: int, ridge: float = 0.1) -> np.ndarray:
    """Random Hermitian positive-definite matrix A A^H + ridge I."""
    a = complex_gaussian(rng, (dim, dim))
    return a @ a.conj().T + ridge * np.eye(dim, dtype=complex)


def aligned_interference_instance(
    rng: np.random.Generator,
    m: int,
    s: int,
    n_cross: int,
    cross_var: float = 1.0,
):
    """Instance whose cross vectors lie exactly in span(Q).

    Returns ``(h_c, h_tilde, cross, u)``: an M x S direct channel with
    isotropic complex Gaussian entries and ``n_cross`` interferers confined
    to the interference reference space, so the nulled covariance is exactly
    n0 I regardless of the interference strength.
    """
    if not 1 <= s < m:
        raise ValueError("need 1 <= S < M so the reference space is non-trivial")
    a = complex_gaussian(rng, (m, m))
    q_full, r_ = np.linalg.qr(a)
    q_full = q_full * (np.diagonal(r_).conj() / np.abs(np.diagonal(r_)))
    q = q_full[:, : m - s]
    u = q_full[:, m - s:]
    h_c = complex_gaussian(rng, (m, s), var=1.0)
    coeff = complex_gaussian(rng, (n_cross, m - s), var=cross_var)
    cross = coeff @ q.T
    return h_c, u.conj().T @ h_c, cross, u
