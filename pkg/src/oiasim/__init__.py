"""Codebook-based opportunistic interference alignment for the K-cell MIMO uplink.

Library layout:

* :mod:`oiasim.channel` - scenario parameters, channel draws, reference bases
* :mod:`oiasim.codebook` - random/Grassmannian codebooks and quantization
* :mod:`oiasim.oia` - weight design, leakage metrics, user selection
* :mod:`oiasim.receivers` - ZF rates, capacity, mismatched-decoder GMI
* :mod:`oiasim.analysis` - tail-exponent and slope diagnostics
* :mod:`oiasim.harness` - Monte Carlo experiments, CSV output, property suite
* :mod:`oiasim.cli` - the ``oiasim`` command
"""

from .channel import ChannelSet, ReferenceBasis, Scenario, draw_channel_set, draw_reference_bases
from .codebook import (
    Codebook,
    QuantizationResult,
    gen_grassmannian_codebook,
    gen_random_codebook,
    load_codebook,
    min_chordal_distance,
    nu_f,
    packing_bound,
    quantize,
    residual_distance_cdf,
    save_codebook,
)
from .oia import (
    CellSelection,
    UserState,
    eta_gc,
    eta_rc,
    lemma1_bound,
    lif,
    run_cell_pipeline,
    select_users,
    stack_interference,
    svd_weight,
)
from .receivers import (
    EffectiveChannel,
    ReceiverEval,
    SingularChannelError,
    capacity_ic,
    effective_channel,
    evaluate_cell,
    gmi_itheta,
    gmi_med,
    gmi_sup,
    interference_covariance,
    max_snr_beamformer,
    mc_gmi_estimate,
    med_decode,
    ml_decode,
    zf_equalizer,
    zf_rates,
)
from .analysis import (
    TailFit,
    condition_number_sq,
    cross_leakage_sum,
    empirical_tail_exponent,
    loglog_slope,
    psi,
    sum_lif,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
