"""Degenerate maximum-likelihood decoders for the surface code.

All three decoders share the same shape: anchor the syndrome with a pure
error f, estimate the probability of the four cosets f*L*G, and return a
correction from the most probable one.  They differ in how the coset
networks are contracted: block BP (approximate, parallelizable), boundary
MPS (the reference), or brute-force enumeration (exact, small d only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blocks import blockbp_contraction, run_blockbp
from .bp import bethe_contraction, grid_to_graph, run_bp
from .gridbp import GridBP
from .code import (
    LABEL_ORDER,
    LogicalLabel,
    PauliString,
    SurfaceCode,
    Syndrome,
    logical_class,
    logical_rep,
    pauli_mul,
    pure_error,
    syndrome_of,
)
from .cosetnet import build_coset_network, coset_prob_exact
from .grid import bmps_contract, fuse_grid
from .noise import NoiseModel
from .tensor import LogScalar

# log-magnitude differences below this are treated as exact ties
TIE_TOL = 1e-12

MODE_MPS = "mps-messages"
MODE_FUSED = "fused"
MODE_COARSE = "coarse-then-block"

# coarse-then-block always contracts 3x3 patches, then blocks the result
COARSE_FACTOR = 3


@dataclass(frozen=True)
class DecoderParams:
    """Knobs of the block-BP decoder.

    ``mode`` picks the contraction variant: 'mps-messages' runs block BP
    with MPS messages of bond dimension <= chi; 'fused' contracts each
    k x k block into one tensor and runs plain vector BP on the coarse
    grid; 'coarse-then-block' first fuses 3x3 patches and then runs block
    BP with block size k//3.
    """

    k: int = 2
    chi: int = 16
    max_iter: int = 20
    delta0: float = 1e-4
    delta1: float = 1e-2
    damping: float = 0.1
    mode: str = MODE_FUSED

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("block size k must be >= 1")
        if self.chi < 0:
            raise ValueError("chi must be >= 0 (0 = untruncated)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.delta0 < self.delta1:
            raise ValueError("delta0 must be smaller than delta1")
        if not 0.0 <= self.damping <= 1.0:
            raise ValueError("damping must lie in [0, 1]")
        if self.mode not in (MODE_MPS, MODE_FUSED, MODE_COARSE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_COARSE and self.k % COARSE_FACTOR != 0:
            raise ValueError("coarse-then-block needs k divisible by 3")

    @staticmethod
    def for_block_size(k: int, **overrides) -> "DecoderParams":
        """Default mode per block size: fused vector BP for k in {1, 2, 4},
        3x3 coarse graining plus block BP for k = 6, MPS messages otherwise."""
        if "mode" not in overrides:
            if k in (1, 2, 4):
                overrides["mode"] = MODE_FUSED
            elif k == 6:
                overrides["mode"] = MODE_COARSE
            else:
                overrides["mode"] = MODE_MPS
        return DecoderParams(k=k, **overrides)


@dataclass
class CosetEstimate:
    label: LogicalLabel
    log_prob: LogScalar | None
    final_delta: float
    converged_0: bool
    trusted: bool
    rounds: int


@dataclass
class DecodeResult:
    correction: PauliString
    chosen: LogicalLabel
    estimates: list[CosetEstimate] = field(repr=False)
    fallback_used: bool = False

    def estimate(self, label: LogicalLabel) -> CosetEstimate:
        return self.estimates[LABEL_ORDER.index(label)]


def _greater(a: LogScalar, b: LogScalar) -> bool:
    """a > b beyond the tie tolerance."""
    return b < a and not a.is_close(b, rel_tol=TIE_TOL)


def _select(estimates: list[CosetEstimate]) -> tuple[LogicalLabel, bool]:
    """Most probable trusted coset; fall back to the fastest-converging one.

    Ties keep the earliest label in the fixed (I, X, Y, Z) order.
    """
    best = None
    for est in estimates:
        if est.trusted and (best is None or _greater(est.log_prob, best.log_prob)):
            best = est
    if best is not None:
        return best.label, False
    best = min(estimates, key=lambda est: est.final_delta)
    return best.label, True


def _result(code: SurfaceCode, f: PauliString, estimates: list[CosetEstimate]) -> DecodeResult:
    chosen, fallback = _select(estimates)
    correction = pauli_mul(f, logical_rep(code, chosen))
    return DecodeResult(correction=correction, chosen=chosen, estimates=estimates,
                        fallback_used=fallback)


def coset_estimate(
    code: SurfaceCode,
    model: NoiseModel,
    f: PauliString,
    label: LogicalLabel,
    params: DecoderParams,
) -> CosetEstimate:
    """BP estimate of one coset probability (trusted only below delta1)."""
    net = build_coset_network(code, model, f, label)
    if params.mode == MODE_FUSED:
        # batched two-color grid engine; equivalent to run_bp on
        # grid_to_graph(fused grid) but orders of magnitude faster
        engine = GridBP(fuse_grid(net.grid, params.k))
        state = engine.run(
            max_iter=params.max_iter,
            delta0=params.delta0,
            damping=params.damping,
        )
        delta = state.delta_history[-1]
        trusted = delta < params.delta1
        log_prob = engine.bethe_value(state.incoming) if trusted else None
    else:
        if params.mode == MODE_COARSE:
            grid = fuse_grid(net.grid, COARSE_FACTOR)
            k = max(1, params.k // COARSE_FACTOR)
        else:
            grid = net.grid
            k = params.k
        state = run_blockbp(
            grid,
            k=k,
            chi=params.chi,
            max_iter=params.max_iter,
            delta0=params.delta0,
            damping=params.damping,
        )
        delta = state.delta_history[-1]
        trusted = delta < params.delta1
        log_prob = blockbp_contraction(grid, state, params.chi) if trusted else None
    return CosetEstimate(
        label=label,
        log_prob=log_prob,
        final_delta=delta,
        converged_0=state.converged,
        trusted=trusted,
        rounds=state.rounds_used,
    )


def decode_blockbp(
    code: SurfaceCode,
    model: NoiseModel,
    s: Syndrome,
    params: DecoderParams,
    coset_workers: int = 1,
) -> DecodeResult:
    """Block-BP decoder: run BP on each coset network, trust the estimate
    only when the final message distance is below delta1, and pick the
    most probable trusted coset (or the fastest-converging coset when
    none is trusted).  The four cosets are independent; ``coset_workers``
    > 1 runs them in a thread pool."""
    f = pure_error(code, s)
    if coset_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=coset_workers) as pool:
            estimates = list(
                pool.map(lambda lab: coset_estimate(code, model, f, lab, params), LABEL_ORDER)
            )
    else:
        estimates = [coset_estimate(code, model, f, label, params) for label in LABEL_ORDER]
    return _result(code, f, estimates)


def decode_bmps(code: SurfaceCode, model: NoiseModel, s: Syndrome, chi: int) -> DecodeResult:
    """Reference decoder: contract all four coset networks with the
    boundary-MPS method at bond dimension chi (0 = exact)."""
    f = pure_error(code, s)
    estimates = []
    for label in LABEL_ORDER:
        net = build_coset_network(code, model, f, label)
        value = bmps_contract(net.grid, chi)
        estimates.append(
            CosetEstimate(
                label=label,
                log_prob=value,
                final_delta=0.0,
                converged_0=True,
                trusted=True,
                rounds=0,
            )
        )
    return _result(code, f, estimates)


def decode_exact(code: SurfaceCode, model: NoiseModel, s: Syndrome) -> DecodeResult:
    """Exact decoder by brute-force coset sums (enumeration-bounded)."""
    f = pure_error(code, s)
    estimates = []
    for label in LABEL_ORDER:
        value = coset_prob_exact(code, model, f, label)
        estimates.append(
            CosetEstimate(
                label=label,
                log_prob=value,
                final_delta=0.0,
                converged_0=True,
                trusted=True,
                rounds=0,
            )
        )
    return _result(code, f, estimates)


def is_success(code: SurfaceCode, error: PauliString, result: DecodeResult) -> bool:
    """True iff the correction undoes the error up to a stabilizer."""
    if syndrome_of(code, error) != syndrome_of(code, result.correction):
        raise ValueError("error syndrome does not match the decoded syndrome")
    residual = pauli_mul(error, result.correction)
    return logical_class(code, residual) == LogicalLabel.I
