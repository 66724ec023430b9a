"""Non-binary LDPC coded large-MIMO link simulator.

Pipeline: GF(2^m) LDPC encode -> Gray-mapped spatial multiplexing ->
flat Rayleigh MIMO channel -> soft-output MMSE detection -> probability-
domain belief propagation decoding, plus an ergodic-capacity estimator
for gap-to-capacity measurements.
"""

from .galois import GaloisField, build_field, DEFAULT_PRIMITIVE_POLYS
from .codes import (
    CodeParams,
    ParityCheckMatrix,
    EncoderPlan,
    ConstructionError,
    construct_code,
    build_encoder,
    make_code,
)
from .decoder import (
    DecodeResult,
    Decoder,
    wh_transform,
    convolve,
    check_to_var,
    var_to_check,
    decode,
)
from .modem import Constellation, MappingPlan, build_constellation, build_mapping_plan, map_codeword, hard_demap
from .channel import ChannelUse, sample_channel, noise_from_snr, transmit
from .detector import EqAwgnParams, compute_weights, detect, eq_awgn_params, likelihoods, gf_priors
from .capacity import CapacityEstimate, ergodic_capacity, snr_for_rate
from .harness import SimConfig, BerRecord, SimContext, run_frame, run_point, run_sweep

__version__ = "0.1.0"
