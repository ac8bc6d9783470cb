"""Block-BP degenerate maximum-likelihood decoding for the surface code.

The package splits into a surface-code layer (code, noise, cosetnet), a
tensor layer (tensor, mps, grid), the contraction engines (bp, gridbp,
blocks) and the decoding/benchmark surface (decoders, harness, cli).
"""

from .blocks import (
    BlockBPState,
    BlockPartition,
    block_delta,
    block_update,
    blockbp_contraction,
    init_block_messages,
    partition,
    run_blockbp,
)
from .bp import (
    BPState,
    GraphTN,
    bethe_contraction,
    bethe_free_energy_direct,
    bp_round,
    grid_to_graph,
    run_bp,
)
from .code import (
    LABEL_ORDER,
    LogicalLabel,
    PauliString,
    SurfaceCode,
    Syndrome,
    build_code,
    logical_class,
    logical_rep,
    pauli_mul,
    pure_error,
    syndrome_of,
)
from .cosetnet import CosetNetwork, build_coset_network, coset_prob_exact
from .decoders import (
    CosetEstimate,
    DecodeResult,
    DecoderParams,
    decode_blockbp,
    decode_bmps,
    decode_exact,
    is_success,
)
from .grid import GridTN, bmps_contract, fuse_grid
from .harness import (
    ExperimentConfig,
    RunStats,
    ShotRecord,
    bench_scaling,
    run_experiment,
    write_results,
)
from .mps import MPS, apply_mpo_column, canonicalize, mps_inner
from .noise import NoiseModel, depolarizing, prob_of, sample_error
from .tensor import LogScalar, contract, svd_truncate

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
