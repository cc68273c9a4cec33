"""Unit-vector codebooks: construction, quantization, and distance bounds.

A codebook is an ordered set of ``N_f = 2**n_f`` unit vectors in C^L.  The
squared chordal distance ``1 - |a^H b|^2`` is the metric everywhere; it is
blind to per-vector phases.  Codeword and quantization indices are 1-based
(they are the limited-feedforward payload); row ``n-1`` of
:attr:`Codebook.vectors` holds codeword ``n``.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import complex_gaussian


@dataclass(frozen=True)
class Codebook:
    vectors: np.ndarray          # (size, dim) complex, unit rows
    kind: str                    # random | grassmannian
    seed: int = 0                # construction seed, kept for the file header
    min_chordal_sq: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("codebook needs a (size, dim) array with size >= 1")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("codewords must be unit vectors (tolerance 1e-12)")
        object.__setattr__(self, "vectors", v)
        # min over pairs is vacuous for a single codeword
        mcs = _min_chordal_sq(v) if v.shape[0] >= 2 else 1.0
        object.__setattr__(self, "min_chordal_sq", mcs)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class QuantizationResult:
    index: int          # selected codeword, 1-based
    w: np.ndarray       # the chosen unit vector
    d_sq: float         # residual squared chordal distance 1 - |w^H v|^2


def _min_chordal_sq(vectors: np.ndarray) -> float:
    gram = vectors.conj() @ vectors.T
    corr_sq = np.abs(gram) ** 2
    np.fill_diagonal(corr_sq, -np.inf)
    return float(np.clip(1.0 - corr_sq.max(), 0.0, 1.0))


def min_chordal_distance(codebook: Codebook) -> float:
    """Minimum squared chordal distance over codeword pairs."""
    if codebook.size < 2:
        raise ValueError("min_chordal_distance needs at least 2 codewords")
    return _min_chordal_sq(codebook.vectors)


def packing_bound(L: int, N_f: int) -> float:
    """Composite packing bound on the squared codeword distance.

    min of the Rankin-type terms 1/2 and (L-1)N_f / (2L(N_f-1)) and the
    sphere-covering term N_f^(-1/(L-1)).
    """
    if N_f < 2:
        raise ValueError(f"packing_bound needs N_f >= 2, got {N_f}")
    if L < 2:
        raise ValueError(f"packing_bound needs L >= 2, got {L}")
    rankin_a = 0.5
    rankin_b = (L - 1) * N_f / (2.0 * L * (N_f - 1))
    covering = N_f ** (-1.0 / (L - 1))
    return min(rankin_a, rankin_b, covering)


def nu_f(L: int, N_f: int) -> float:
    """Quantization-distance bound (1/N_f)^(1/(L-1))."""
    if L < 2:
        raise ValueError(f"nu_f is undefined for L < 2, got L={L}")
    if N_f < 1:
        raise ValueError(f"nu_f needs N_f >= 1, got {N_f}")
    return (1.0 / N_f) ** (1.0 / (L - 1))


def residual_distance_cdf(L: int, N_f: int, z: float) -> float:
    """CDF of the squared residual distance for a random codebook of size N_f."""
    if L < 2:
        raise ValueError(f"residual_distance_cdf needs L >= 2, got {L}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    return 1.0 - (1.0 - z ** (L - 1)) ** N_f


def gen_random_codebook(L: int, n_f: int, rng: np.random.Generator) -> Codebook:
    """2**n_f codewords drawn isotropically from the unit sphere in C^L."""
    if L < 1 or n_f < 0:
        raise ValueError("need L >= 1 and n_f >= 0")
    size = 2 ** n_f
    v = complex_gaussian(rng, (size, L))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return Codebook(vectors=v, kind="random")


def gen_grassmannian_codebook(
    L: int,
    n_f: int,
    rng: np.random.Generator,
    restarts: int = 6,
    iters: int = 2000,
) -> Codebook:
    """Codebook locally maximizing the minimum chordal distance.

    Pairs whose correlation exceeds the level implied by
    :func:`packing_bound` repel each other along the sphere until no pair
    violates it (projected-gradient spreading; plain Gram-clip alternating
    projection stalls once the violating pairs outnumber L^2).  Best of
    ``restarts`` random initializations; non-convergence is not an error,
    the best iterate is returned with its achieved distance recorded.
    """
    if n_f < 0:
        raise ValueError("need n_f >= 0")
    if L == 1:
        warnings.warn("all unit scalars are equivalent for L=1; returning one codeword")
        return Codebook(vectors=np.array([[1.0 + 0j]]), kind="grassmannian")
    size = 2 ** n_f
    if size == 1:
        v = complex_gaussian(rng, (1, L))
        v /= np.linalg.norm(v)
        return Codebook(vectors=v, kind="grassmannian")
    if size <= L:
        # this many lines pack mutually orthogonal
        a = complex_gaussian(rng, (L, L))
        q, r = np.linalg.qr(a)
        q = q * (np.diagonal(r).conj() / np.abs(np.diagonal(r)))
        return Codebook(vectors=q[:, :size].T.copy(), kind="grassmannian")

    target = packing_bound(L, size)
    probes = complex_gaussian(rng, (512, L))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    best_v = None
    best_key = None
    # coverage differences self-average away for big codebooks; spend the
    # restart budget where it matters
    n_starts = max(1, restarts if size <= 256 else restarts // 3)
    for _ in range(n_starts):
        v = complex_gaussian(rng, (size, L))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        # spread against a 5% deeper level so pairs clear the target
        # decisively instead of crawling along it
        v = _spread(v, mu_sq=1.0 - min(1.0, 1.05 * target), iters=iters)
        d = _min_chordal_sq(v)
        # rank restarts: reach the distance level first, then best coverage
        # of a fixed probe mesh (smaller mean quantization error)
        corr = np.abs(probes.conj() @ v.T) ** 2
        coverage = float(np.mean(1.0 - corr.max(axis=1)))
        key = (d >= target - 1e-9, -coverage if d >= target - 1e-9 else d)
        if best_key is None or key > best_key:
            best_key, best_v = key, v
    return Codebook(vectors=best_v, kind="grassmannian")


def _spread(v: np.ndarray, mu_sq: float, iters: int, step: float = 0.5) -> np.ndarray:
    """Push apart codeword pairs with squared correlation above ``mu_sq``."""
    for _ in range(iters):
        gram = v.conj() @ v.T
        mag_sq = np.abs(gram) ** 2
        np.fill_diagonal(mag_sq, 0.0)
        excess = np.where(mag_sq > mu_sq, mag_sq - mu_sq, 0.0)
        worst = excess.max()
        if worst <= 0.0:
            break
        v = v - (step / worst) * ((excess * gram.conj()) @ v)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v


def quantize(v: np.ndarray, codebook: Codebook) -> QuantizationResult:
    """Pick the codeword maximizing |v^H c_n|^2 (lowest index wins ties)."""
    v = np.asarray(v, dtype=complex)
    if codebook.size < 1:
        raise ValueError("cannot quantize against an empty codebook")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"target must be a unit vector, got norm {nrm}")
    corr_sq = np.abs(codebook.vectors @ v.conj()) ** 2
    idx0 = int(np.argmax(corr_sq))
    d_sq = _clamp_d_sq(1.0 - float(corr_sq[idx0]))
    return QuantizationResult(index=idx0 + 1, w=codebook.vectors[idx0].copy(), d_sq=d_sq)


def quantize_many(targets: np.ndarray, codebook: Codebook):
    """Vectorized :func:`quantize` over rows of ``targets``.

    Returns ``(indices, w, d_sq)`` with 1-based indices.
    """
    corr_sq = np.abs(targets.conj() @ codebook.vectors.T) ** 2
    idx0 = np.argmax(corr_sq, axis=1)
    d_sq = 1.0 - corr_sq[np.arange(targets.shape[0]), idx0]
    if np.any(d_sq < -1e-12):
        raise FloatingPointError("residual distance below roundoff floor")
    return idx0 + 1, codebook.vectors[idx0], np.clip(d_sq, 0.0, 1.0)


def _clamp_d_sq(d_sq: float) -> float:
    if d_sq < 0.0:
        if d_sq < -1e-12:
            raise FloatingPointError(f"residual distance {d_sq} below roundoff floor")
        return 0.0
    return min(d_sq, 1.0)


# ---------------------------------------------------------------------------
# codebook files: header "L N_f kind seed", then N_f lines of 2L floats
# (re, im interleaved per coordinate, 17 significant digits)

def codebook_to_text(cb: Codebook) -> str:
    lines = [f"{cb.dim} {cb.size} {cb.kind} {cb.seed}"]
    for row in cb.vectors:
        parts = []
        for x in row:
            parts.append(f"{x.real:.17g}")
            parts.append(f"{x.imag:.17g}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def codebook_from_text(text: str) -> Codebook:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty codebook file")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"malformed codebook header: {lines[0]!r}")
    dim, size, kind, seed = int(head[0]), int(head[1]), head[2], int(head[3])
    if len(lines) - 1 != size:
        raise ValueError(f"expected {size} codeword lines, found {len(lines) - 1}")
    vectors = np.empty((size, dim), dtype=complex)
    for r, ln in enumerate(lines[1:]):
        vals = [float(t) for t in ln.split()]
        if len(vals) != 2 * dim:
            raise ValueError(f"codeword line {r + 1} has {len(vals)} values, expected {2 * dim}")
        arr = np.asarray(vals).reshape(dim, 2)
        vectors[r] = arr[:, 0] + 1j * arr[:, 1]
    return Codebook(vectors=vectors, kind=kind, seed=seed)


def save_codebook(cb: Codebook, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(codebook_to_text(cb))


def load_codebook(path) -> Codebook:
    with open(path, "r", encoding="utf-8") as f:
        return codebook_from_text(f.read())


def build_codebook(
    kind: str,
    L: int,
    n_f: int,
    rng: np.random.Generator,
    seed_tag: int = 0,
    cache_dir=None,
    restarts: int = 6,
    iters: int = 400,
) -> Codebook:
    """Build (or load) a codebook, optionally cached on disk.

    The cache key is ``(kind, L, n_f, seed_tag)`` so sweeps reuse identical
    codebooks across SNR/N grid points and worker pools.
    """
    path = None
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"{kind}_L{L}_nf{n_f}_seed{seed_tag}.txt")
        if os.path.exists(path):
            return load_codebook(path)
    if kind == "random":
        cb = gen_random_codebook(L, n_f, rng)
    elif kind == "grassmannian":
        cb = gen_grassmannian_codebook(L, n_f, rng, restarts=restarts, iters=iters)
    else:
        raise ValueError(f"no codebook for kind {kind!r}")
    cb = Codebook(vectors=cb.vectors, kind=cb.kind, seed=seed_tag)
    if path is not None:
        save_codebook(cb, path)
    return cb
