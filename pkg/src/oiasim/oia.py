"""Weight design and user selection (Steps 1-2 of the alignment pipeline).

Each user stacks the cross-cell projections ``U_k^H H_k`` (k != own cell)
into a matrix G, takes the right-singular vector of the smallest singular
value as its ideal weight, optionally quantizes it against a codebook, and
reports the leakage ``eta = ||G w||^2``.  Each base station then keeps the
S users with the smallest leakage.

Cell, user, and codeword identifiers are 1-based throughout the public
types; raw arrays are indexed ``id - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, ReferenceBasis, Scenario
from .codebook import Codebook, quantize_many


@dataclass(frozen=True)
class UserState:
    """Step-1 outcome for a single user."""

    cell: int                # 1-based
    user: int                # 1-based
    g: np.ndarray            # stacked interference matrix, (K-1)S x L
    sigma: np.ndarray        # singular values of g, non-increasing, length L
    v_last: np.ndarray       # right-singular vector of sigma[-1]
    w: np.ndarray            # applied weight (unit vector)
    cw_index: int | None     # 1-based codeword index, None in svd_exact mode
    d_sq: float              # residual squared distance 1 - |w^H v_last|^2
    eta: float               # leakage ||g w||^2


@dataclass(frozen=True)
class CellSelection:
    """Step-2 outcome for one cell: the S users with smallest leakage."""

    cell: int                        # 1-based
    selected: tuple[int, ...]        # 1-based user indices, leakage-ascending
    weights: np.ndarray              # (S, L) unit rows, same order
    lifs: np.ndarray                 # (S,) non-decreasing
    cw_indices: tuple[int, ...] | None   # feedforward payload, None in svd_exact mode


def stack_interference(channels: ChannelSet, bases: ReferenceBasis, cell: int, user: int) -> np.ndarray:
    """Stack U_k^H H_k^{[cell,user]} over k != cell in ascending k."""
    K = channels.K
    if K < 2:
        raise ValueError("stacked interference needs K >= 2")
    blocks = [
        bases.u_of(k).conj().T @ channels.mat(k, cell, user)
        for k in range(1, K + 1)
        if k != cell
    ]
    return np.vstack(blocks)


def svd_weight(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (v_last, sigma): the leakage-minimizing weight and all singular values.

    sigma is padded with zeros when g has fewer rows than columns (the
    guaranteed-null-space case).  v_last carries a fixed phase: its
    largest-magnitude entry is real positive.
    """
    g = np.asarray(g, dtype=complex)
    L = g.shape[1]
    _, s, vh = np.linalg.svd(g, full_matrices=True)
    sigma = np.zeros(L)
    sigma[: s.shape[0]] = s
    v_last = _fix_phase(vh[-1].conj())
    return v_last, sigma


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v * ph.conj()


def lif(g: np.ndarray, w: np.ndarray) -> float:
    """Leakage of interference ||g w||^2 for a unit weight w."""
    nrm = np.linalg.norm(w)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"weight must be a unit vector, got norm {nrm}")
    return float(np.linalg.norm(g @ w) ** 2)


def lemma1_bound(sigma_1: float, sigma_L: float, d_sq: float) -> float:
    """Quantized-leakage upper bound sigma_L^2 + d^2 sigma_1^2."""
    return sigma_L ** 2 + d_sq * sigma_1 ** 2


def eta_gc(sigma_1: float, sigma_L: float, nu_f_val: float, delta: float = 0.0) -> float:
    """Branchwise leakage bound for a distance-bounded codebook."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if sigma_L ** 2 <= (1.0 + delta) * nu_f_val * sigma_1 ** 2:
        return (2.0 + delta) * nu_f_val * sigma_1 ** 2
    return (1.0 + 1.0 / (1.0 + delta)) * sigma_L ** 2


def eta_rc(sigma_1: float, sigma_L: float, d_sq: float, delta_p: float = 0.0) -> float:
    """Branchwise leakage bound with the realized residual distance."""
    if delta_p < 0:
        raise ValueError("delta_p must be >= 0")
    if sigma_L ** 2 <= (1.0 + delta_p) * d_sq * sigma_1 ** 2:
        return (2.0 + delta_p) * d_sq * sigma_1 ** 2
    return (1.0 + 1.0 / (1.0 + delta_p)) * sigma_L ** 2


def select_users(lifs, s: int) -> list[int]:
    """1-based indices of the S smallest values, leakage-ascending, ties to the lowest index."""
    lifs = np.asarray(lifs, dtype=float)
    if lifs.ndim != 1:
        raise ValueError("lifs must be a 1-D sequence")
    if lifs.shape[0] < s:
        raise ValueError(f"cannot select {s} users from {lifs.shape[0]}")
    order = np.argsort(lifs, kind="stable")
    return [int(i) + 1 for i in order[:s]]


# ---------------------------------------------------------------------------
# batched per-cell pipeline

def _cell_stacked(channels: ChannelSet, bases: ReferenceBasis, cell0: int) -> np.ndarray:
    """G for every user of a cell at once: (N, (K-1)S, L)."""
    K = channels.K
    if K < 2:
        raise ValueError("stacked interference needs K >= 2")
    blocks = [
        np.einsum("ms,nml->nsl", bases.u[k].conj(), channels.h[k, cell0])
        for k in range(K)
        if k != cell0
    ]
    return np.concatenate(blocks, axis=1)


def _svd_weights_batch(g_all: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched svd_weight: returns (v_last (N,L), sigma (N,L))."""
    n, rows, L = g_all.shape
    _, s, vh = np.linalg.svd(g_all, full_matrices=True)
    sigma = np.zeros((n, L))
    sigma[:, : s.shape[1]] = s
    v_last = vh[:, -1, :].conj()
    k = np.argmax(np.abs(v_last), axis=1)
    lead = v_last[np.arange(n), k]
    v_last = v_last * (lead.conj() / np.abs(lead))[:, None]
    return v_last, sigma


def _leakages(g_all: np.ndarray, w_all: np.ndarray) -> np.ndarray:
    gw = np.einsum("nrl,nl->nr", g_all, w_all)
    return np.sum(np.abs(gw) ** 2, axis=1)


def cell_user_states(
    channels: ChannelSet,
    bases: ReferenceBasis,
    codebook: Codebook | None,
    cell: int,
) -> list[UserState]:
    """Materialize the Step-1 state of every user in a cell (diagnostics/tests)."""
    cell0 = cell - 1
    g_all = _cell_stacked(channels, bases, cell0)
    v_all, sig_all = _svd_weights_batch(g_all)
    if codebook is None:
        w_all, cw, d_sq = v_all, None, np.zeros(g_all.shape[0])
    else:
        cw, w_all, d_sq = quantize_many(v_all, codebook)
    eta = _leakages(g_all, w_all)
    return [
        UserState(
            cell=cell,
            user=j + 1,
            g=g_all[j],
            sigma=sig_all[j],
            v_last=v_all[j],
            w=w_all[j],
            cw_index=None if cw is None else int(cw[j]),
            d_sq=float(d_sq[j]),
            eta=float(eta[j]),
        )
        for j in range(g_all.shape[0])
    ]


def run_cell_pipeline(
    channels: ChannelSet,
    bases: ReferenceBasis,
    codebook: Codebook | None,
    scenario: Scenario,
) -> list[CellSelection]:
    """Steps 1-2 for every cell.  ``codebook=None`` selects svd_exact mode."""
    if scenario.K < 2:
        raise ValueError("the alignment pipeline needs K >= 2")
    out = []
    for cell0 in range(scenario.K):
        g_all = _cell_stacked(channels, bases, cell0)
        v_all, sig_all = _svd_weights_batch(g_all)
        if codebook is None:
            w_all, cw = v_all, None
        else:
            cw, w_all, _ = quantize_many(v_all, codebook)
        eta = _leakages(g_all, w_all)
        sel = select_users(eta, scenario.S)
        sel0 = [j - 1 for j in sel]
        out.append(
            CellSelection(
                cell=cell0 + 1,
                selected=tuple(sel),
                weights=w_all[sel0].copy(),
                lifs=eta[sel0].copy(),
                cw_indices=None if cw is None else tuple(int(cw[j]) for j in sel0),
            )
        )
    return out


def run_max_snr_pipeline(
    channels: ChannelSet,
    bases: ReferenceBasis,
    scenario: Scenario,
) -> list[CellSelection]:
    """Max-SNR baseline: eigen-beamforming on the direct link, pick the S
    largest received powers.  ``lifs`` still records the realized leakage of
    the chosen users (ordered by the selection metric, not sorted)."""
    if scenario.K < 2:
        raise ValueError("the leakage bookkeeping needs K >= 2")
    out = []
    for cell0 in range(scenario.K):
        direct = channels.h[cell0, cell0]          # (N, M, L)
        _, s, vh = np.linalg.svd(direct, full_matrices=False)
        w_all = vh[:, 0, :].conj()
        k = np.argmax(np.abs(w_all), axis=1)
        lead = w_all[np.arange(w_all.shape[0]), k]
        w_all = w_all * (lead.conj() / np.abs(lead))[:, None]
        gain = s[:, 0] ** 2
        order = np.argsort(-gain, kind="stable")
        sel0 = order[: scenario.S]
        g_all = _cell_stacked(channels, bases, cell0)
        eta = _leakages(g_all[sel0], w_all[sel0])
        out.append(
            CellSelection(
                cell=cell0 + 1,
                selected=tuple(int(j) + 1 for j in sel0),
                weights=w_all[sel0].copy(),
                lifs=eta,
                cw_indices=None,
            )
        )
    return out
