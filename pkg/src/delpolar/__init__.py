"""Polar codes on the binary deletion channel.

Trellis-based successive-cancellation decoding, hidden-Markov input
shaping, guard-band framing for block synchronization, and Monte-Carlo
code construction, plus the `delpolar` experiment CLI.
"""

from .arikan import (branch_to_index, index_to_branch, inverse_transform,
                     prefix_decisions_slice, transform)
from .channels import (embedding_count, exact_law, tdc_exact_law, transmit,
                       transmit_block_tdc, trim)
from .construction import (CodeConfig, IndexStats, RateEstimate,
                           estimate_index_stats, estimate_information_rate,
                           polarization_profile, select_information_set,
                           wilson_interval)
from .guardband import (GuardLayout, SegmentationResult, SegmentationStats,
                        SplitCheck, block_offsets, insert_guard_bands,
                        remove_guard_bands, segment,
                        segmentation_failure_rate)
from .hmm_input import (FaimProcess, build_dithered_block_process,
                        exact_probability, load_process, markov_process,
                        parse_process_arg, sample, sample_batch,
                        uniform_process, validate)
from .sc_decoder import (DecodeResult, IndexPosterior, TrellisLane,
                         conditional_probability, leaf_posterior, sc_decode_single_trellis,
                         sc_encode, two_stage_decode, two_stage_encode)
from .trellis import (Trellis, build_channel_trellis, build_process_trellis,
                      build_tdc_trellis, build_uniform_trellis,
                      dump_trellis, leaf_log_weights, minus_transform,
                      path_sum, plus_transform, prune, total_mass,
                      two_step_path_count)

__version__ = "0.1.0"

__all__ = [
    "transform", "inverse_transform", "branch_to_index", "index_to_branch",
    "prefix_decisions_slice",
    "transmit", "transmit_block_tdc", "trim", "exact_law", "tdc_exact_law",
    "embedding_count",
    "FaimProcess", "uniform_process", "markov_process", "sample",
    "sample_batch", "exact_probability", "validate", "load_process",
    "parse_process_arg", "build_dithered_block_process",
    "Trellis", "build_channel_trellis", "build_tdc_trellis",
    "build_uniform_trellis", "build_process_trellis", "path_sum",
    "total_mass", "leaf_log_weights", "minus_transform", "plus_transform",
    "prune", "dump_trellis", "two_step_path_count",
    "IndexPosterior", "TrellisLane", "conditional_probability",
    "leaf_posterior", "DecodeResult", "sc_encode",
    "sc_decode_single_trellis", "two_stage_encode", "two_stage_decode",
    "GuardLayout", "insert_guard_bands", "remove_guard_bands", "segment",
    "block_offsets", "SplitCheck", "SegmentationResult", "SegmentationStats",
    "segmentation_failure_rate",
    "IndexStats", "CodeConfig", "RateEstimate", "estimate_index_stats",
    "select_information_set", "estimate_information_rate",
    "polarization_profile", "wilson_interval",
    "__version__",
]
