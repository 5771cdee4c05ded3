"""The cyclic-bin lossless scheme, the superposition scheme and exact system tables."""

from .cyclic import (BinReport, CyclicBinCode, build_cyclic_bin_code, cyclic_decode, cyclic_encode, decode_batch,
                     encode_batch, verify_bin_property)
from .superposition import (SuperpositionCodebook, block_marginal, encoder_row, encoder_table,
                            idealized_joint_exact, induced_joint_exact, lemma_block_distance, likelihood_encode,
                            pq_distance, qhat_joint, sample_superposition_codebook, soft_covering_codebook,
                            soft_covering_mean_tv, soft_covering_tv, stochastic_decode)
from .system import (SystemJoint, cyclic_system_joint, one_bit_pad_system, one_time_pad_system,
                     system_joint_from_code)

__all__ = [
    "BinReport", "CyclicBinCode", "build_cyclic_bin_code", "cyclic_decode", "cyclic_encode", "decode_batch",
    "encode_batch", "verify_bin_property",
    "SuperpositionCodebook", "block_marginal", "encoder_row", "encoder_table", "idealized_joint_exact",
    "induced_joint_exact", "lemma_block_distance", "likelihood_encode", "pq_distance", "qhat_joint",
    "sample_superposition_codebook", "soft_covering_codebook", "soft_covering_mean_tv", "soft_covering_tv",
    "stochastic_decode",
    "SystemJoint", "cyclic_system_joint", "one_bit_pad_system", "one_time_pad_system", "system_joint_from_code",
]
