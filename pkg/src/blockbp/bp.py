"""Belief propagation on arbitrary-graph tensor networks with vector messages.

The contraction value of a converged network is estimated through the Bethe
free energy in its product form: one locally contracted term per vertex,
divided by the inner products of opposite message pairs.  The textbook
marginal-based free-energy formula is also provided; it serves as a
numerical cross-check on strictly positive networks.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .grid import DOWN, LEFT, RIGHT, UP, GridTN
from .tensor import LogScalar


@dataclass
class GraphTN:
    """Tensors on vertices; edges pair one leg of each endpoint.

    Every tensor leg is either on exactly one edge or a dangling leg of
    dimension 1.
    """

    tensors: list[np.ndarray]
    edges: list[tuple[int, int, int, int]]  # (u, v, leg_of_u, leg_of_v)

    def __post_init__(self):
        used: set[tuple[int, int]] = set()
        for u, v, lu, lv in self.edges:
            if self.tensors[u].shape[lu] != self.tensors[v].shape[lv]:
                raise ValueError(f"edge ({u},{v}) pairs legs of unequal dimension")
            for key in ((u, lu), (v, lv)):
                if key in used:
                    raise ValueError(f"leg {key} appears on two edges")
                used.add(key)
        for v, t in enumerate(self.tensors):
            for leg in range(t.ndim):
                if (v, leg) not in used and t.shape[leg] != 1:
                    raise ValueError(f"dangling leg {leg} of vertex {v} must have dimension 1")
        # vertex -> list of (neighbor, own leg); insertion order fixes schedules
        adj: list[list[tuple[int, int]]] = [[] for _ in self.tensors]
        for u, v, lu, lv in self.edges:
            adj[u].append((v, lu))
            adj[v].append((u, lv))
        self._adj = adj

    @property
    def n_vertices(self) -> int:
        return len(self.tensors)

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        return self._adj[v]

    def leg_towards(self, v: int, u: int) -> int:
        for other, leg in self._adj[v]:
            if other == u:
                return leg
        raise KeyError(f"no edge between {v} and {u}")

    def two_coloring(self) -> list[int]:
        """BFS bipartition; raises if the graph has an odd cycle."""
        color = [-1] * self.n_vertices
        for start in range(self.n_vertices):
            if color[start] != -1:
                continue
            color[start] = 0
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for u, _ in self._adj[v]:
                    if color[u] == -1:
                        color[u] = 1 - color[v]
                        queue.append(u)
                    elif color[u] == color[v]:
                        raise ValueError("graph is not bipartite; use the flood schedule")
        return color


MessageSet = dict[tuple[int, int], np.ndarray]


@dataclass
class BPState:
    messages: MessageSet
    delta_history: list[float] = field(default_factory=list)
    converged: bool = False
    rounds_used: int = 0
    degenerate_resets: int = 0


def uniform_messages(tn: GraphTN) -> MessageSet:
    msgs: MessageSet = {}
    for u, v, lu, lv in tn.edges:
        dim = tn.tensors[u].shape[lu]
        vec = np.ones(dim) / math.sqrt(dim)
        msgs[(u, v)] = vec
        msgs[(v, u)] = vec.copy()
    return msgs


def _vertex_contract(tn: GraphTN, msgs: MessageSet, v: int, skip: int | None) -> np.ndarray:
    """Contract T_v with every incoming message except the one from ``skip``.

    Returns the outgoing vector toward ``skip``, or the full scalar when
    ``skip`` is None (dangling dimension-1 legs are summed out).
    """
    work = tn.tensors[v]
    absorb = [(leg, msgs[(u, v)]) for u, leg in tn.neighbors(v) if u != skip]
    for leg, vec in sorted(absorb, key=lambda p: -p[0]):
        work = np.tensordot(work, vec, axes=([leg], [0]))
    return work.reshape(-1)


def message_delta(new: MessageSet, old: MessageSet) -> float:
    """Average outer-product distance between two unit-norm message sets.

    Per message the squared distance is ||mm^T - m'm'^T||_F^2
    = 2(1 - <m|m'>^2); the average takes 1/M outside the square root.
    Evaluated through d^2 = min(||m-m'||^2, ||m+m'||^2) = 2(1 - |<m|m'>|),
    which stays exact near fixed points where the plain inner product
    would drown in rounding noise.
    """
    if new.keys() != old.keys():
        raise ValueError("message sets are keyed differently")
    if not new:
        return 0.0
    total = 0.0
    for key, vec in new.items():
        prev = old[key]
        if vec is prev or np.array_equal(vec, prev):
            continue
        d2 = min(float(np.sum((vec - prev) ** 2)), float(np.sum((vec + prev) ** 2)))
        total += d2 * (2.0 - 0.5 * d2)
    return math.sqrt(total) / len(new)


def _normalize(vec: np.ndarray) -> tuple[np.ndarray, bool]:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not math.isfinite(norm):
        dim = vec.shape[0]
        return np.ones(dim) / math.sqrt(dim), True
    return vec / norm, False


def _damp(new_unit: np.ndarray, old_unit: np.ndarray, damping: float) -> np.ndarray:
    if damping == 0.0:
        return new_unit
    mixed, _ = _normalize((1.0 - damping) * new_unit + damping * old_unit)
    return mixed


def bp_round(
    tn: GraphTN, msgs: MessageSet, damping: float = 0.0
) -> tuple[MessageSet, float, int]:
    """One flood round: every directed message updated from the previous set.

    Raw updates are unit-normalized, damped against the previous message and
    normalized again.  Zero or non-finite updates are reset to uniform and
    counted.  Returns (new messages, delta, reset count).
    """
    new: MessageSet = {}
    resets = 0
    for (v, u), old in msgs.items():
        raw = _vertex_contract(tn, msgs, v, skip=u)
        unit, degenerate = _normalize(raw)
        resets += degenerate
        new[(v, u)] = _damp(unit, old, damping)
    return new, message_delta(new, msgs), resets


def run_bp(
    tn: GraphTN,
    max_iter: int = 20,
    delta0: float = 1e-4,
    damping: float = 0.1,
    schedule: str = "flood",
) -> BPState:
    """Iterate message passing until the average update distance drops
    below ``delta0`` or ``max_iter`` rounds elapse.

    ``schedule='flood'`` updates all messages synchronously each round;
    ``schedule='two-color'`` updates the two chessboard classes of a
    bipartite graph one after the other within each round.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if schedule not in ("flood", "two-color"):
        raise ValueError(f"unknown schedule {schedule!r}")
    color = tn.two_coloring() if schedule == "two-color" else None
    msgs = uniform_messages(tn)
    state = BPState(messages=msgs)
    for _ in range(max_iter):
        before = msgs
        if schedule == "flood":
            msgs, delta, resets = bp_round(tn, msgs, damping)
        else:
            resets = 0
            for phase in (0, 1):
                updates: MessageSet = {}
                for (v, u), old in msgs.items():
                    if color[v] != phase:
                        continue
                    raw = _vertex_contract(tn, msgs, v, skip=u)
                    unit, degenerate = _normalize(raw)
                    resets += degenerate
                    updates[(v, u)] = _damp(unit, old, damping)
                msgs = {**msgs, **updates}
            delta = message_delta(msgs, before)
        state.rounds_used += 1
        state.degenerate_resets += resets
        state.delta_history.append(delta)
        if delta < delta0:
            state.converged = True
            break
    state.messages = msgs
    return state


def bethe_contraction(tn: GraphTN, msgs: MessageSet) -> LogScalar:
    """Bethe estimate of the full contraction from (near) fixed-point messages.

    Equals the product over vertices of T_v contracted with its incoming
    messages, divided per edge by <m_uv, m_vu> - the rescaling that makes
    opposite messages biorthonormal.
    """
    result = LogScalar.one()
    for v in range(tn.n_vertices):
        term = float(_vertex_contract(tn, msgs, v, skip=None).reshape(()))
        if term == 0.0:
            return LogScalar(0, 0.0)
        result = result * LogScalar.from_float(term)
    for u, v, _, _ in tn.edges:
        pair = float(np.dot(msgs[(u, v)], msgs[(v, u)]))
        if pair == 0.0:
            raise ValueError(f"messages on edge ({u},{v}) have zero overlap; cannot normalize")
        result = result / LogScalar.from_float(pair)
    return result


def bethe_free_energy_direct(tn: GraphTN, msgs: MessageSet) -> float:
    """Marginal-based Bethe free energy; needs strictly positive marginals.

    F = sum_v sum_x P_v(x) ln(P_v(x)/T_v(x)) - sum_e sum_x P_e(x) ln P_e(x)
    with P_v the normalized product of T_v and its incoming messages and
    P_e the normalized product of the two opposite edge messages.
    """
    free_energy = 0.0
    for v in range(tn.n_vertices):
        t = tn.tensors[v]
        weighted = t.astype(float).copy()
        for u, leg in tn.neighbors(v):
            shape = [1] * t.ndim
            shape[leg] = t.shape[leg]
            weighted = weighted * msgs[(u, v)].reshape(shape)
        z = float(weighted.sum())
        if z <= 0.0:
            raise ValueError(f"vertex {v} marginal does not normalize to a positive value")
        p = weighted / z
        if (p <= 0.0).any() or (t <= 0.0).any():
            raise ValueError(f"vertex {v} has non-positive marginal entries")
        free_energy += float(np.sum(p * np.log(p / t)))
    for u, v, _, _ in tn.edges:
        prod = msgs[(u, v)] * msgs[(v, u)]
        z = float(prod.sum())
        if z <= 0.0:
            raise ValueError(f"edge ({u},{v}) marginal does not normalize to a positive value")
        p = prod / z
        if (p <= 0.0).any():
            raise ValueError(f"edge ({u},{v}) has non-positive marginal entries")
        free_energy -= float(np.sum(p * np.log(p)))
    return free_energy


def grid_to_graph(grid: GridTN) -> GraphTN:
    """View a grid as a general graph TN (row-major vertex order)."""
    H, W = grid.shape
    tensors = [grid[r, c] for r in range(H) for c in range(W)]
    edges = []
    for r in range(H):
        for c in range(W):
            v = r * W + c
            if c + 1 < W:
                edges.append((v, v + 1, RIGHT, LEFT))
            if r + 1 < H:
                edges.append((v, v + W, DOWN, UP))
    return GraphTN(tensors, edges)
