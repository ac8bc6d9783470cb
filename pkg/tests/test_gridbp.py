"""The batched grid engine must be indistinguishable from the generic
graph engine run with the two-color schedule."""

import numpy as np
import pytest

from blockbp.bp import bethe_contraction, grid_to_graph, run_bp
from blockbp.code import build_code, syndrome_of
from blockbp.cosetnet import build_coset_network
from blockbp.decoders import LABEL_ORDER, pure_error
from blockbp.grid import LEFT, UP, fuse_grid
from blockbp.gridbp import GridBP
from blockbp.noise import depolarizing, sample_error

from oracles import random_grid


def directed_map(engine, incoming, W):
    """Batched incoming arrays -> {(src, dst): vector} like the graph engine."""
    out = {}
    n = engine.n
    for v in range(n):
        if engine.real[UP][v]:
            dim = engine.leg_dims[v, UP]
            out[(v - W, v)] = incoming[UP][v][:dim]
        if engine.real[LEFT][v]:
            dim = engine.leg_dims[v, LEFT]
            out[(v - 1, v)] = incoming[LEFT][v][:dim]
        if v + W < n:
            dim = engine.leg_dims[v, 2]
            out[(v + W, v)] = incoming[2][v][:dim]
        if (v % W) + 1 < W:
            dim = engine.leg_dims[v, 3]
            out[(v + 1, v)] = incoming[3][v][:dim]
    return out


@pytest.mark.parametrize("seed,H,W,damping", [
    (0, 3, 3, 0.0), (1, 4, 4, 0.1), (2, 3, 5, 0.1), (3, 5, 4, 0.3), (4, 2, 2, 0.1),
])
def test_messages_match_generic_engine(seed, H, W, damping):
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, H, W, 2, positive=True)
    rounds = 5
    engine = GridBP(grid)
    fast = engine.run(max_iter=rounds, delta0=0.0, damping=damping)
    graph = grid_to_graph(grid)
    slow = run_bp(graph, max_iter=rounds, delta0=0.0, damping=damping, schedule="two-color")
    assert fast.rounds_used == slow.rounds_used == rounds
    np.testing.assert_allclose(fast.delta_history, slow.delta_history, atol=1e-12)
    got = directed_map(engine, fast.incoming, W)
    assert got.keys() == slow.messages.keys()
    for key, vec in slow.messages.items():
        np.testing.assert_allclose(got[key], vec, atol=1e-12, err_msg=str(key))


@pytest.mark.parametrize("seed", range(4))
def test_bethe_value_matches_generic(seed):
    rng = np.random.default_rng(100 + seed)
    grid = random_grid(rng, 4, 4, 2, positive=True)
    engine = GridBP(grid)
    fast = engine.run(max_iter=30, delta0=1e-10, damping=0.1)
    graph = grid_to_graph(grid)
    slow = run_bp(graph, max_iter=30, delta0=1e-10, damping=0.1, schedule="two-color")
    want = bethe_contraction(graph, slow.messages)
    got = engine.bethe_value(fast.incoming)
    assert got.sign == want.sign
    assert got.log_mag == pytest.approx(want.log_mag, abs=1e-9)


def test_matches_on_fused_coset_networks():
    code = build_code(5)
    model = depolarizing(0.1, code.n)
    rng = np.random.default_rng(5)
    e = sample_error(model, rng)
    f = pure_error(code, syndrome_of(code, e))
    for label in LABEL_ORDER[:2]:
        net = build_coset_network(code, model, f, label)
        fused = fuse_grid(net.grid, 2)
        engine = GridBP(fused)
        fast = engine.run(max_iter=20, delta0=1e-4, damping=0.1)
        graph = grid_to_graph(fused)
        slow = run_bp(graph, max_iter=20, delta0=1e-4, damping=0.1, schedule="two-color")
        assert fast.rounds_used == slow.rounds_used
        assert fast.converged == slow.converged
        np.testing.assert_allclose(fast.delta_history, slow.delta_history, atol=1e-11)
        got = engine.bethe_value(fast.incoming)
        want = bethe_contraction(graph, slow.messages)
        assert got.log_mag == pytest.approx(want.log_mag, abs=1e-9)


def test_single_cell_grid():
    rng = np.random.default_rng(9)
    grid = random_grid(rng, 1, 1, 1)
    engine = GridBP(grid)
    state = engine.run(max_iter=5, delta0=1e-4, damping=0.1)
    assert state.converged and state.rounds_used == 1
    assert float(engine.bethe_value(state.incoming)) == pytest.approx(
        float(grid[0, 0].reshape(())), rel=1e-12
    )
