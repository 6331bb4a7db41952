"""UCT tree search over draft states.

Leaf evaluation is a pluggable callable so the same search runs in two modes:
random rollout to a completed draft scored by the win-rate predictor (used
while generating value-net training data), or a direct value-net call (used
at play time, skipping rollouts entirely).

Values flow through the tree from team A's perspective; uct_score converts
to the chooser's view, so team B's picks minimize team A's win probability.
"""

from __future__ import annotations

import math

from ..util import philox
from .state import DraftState, legal_picks


class MctsNode:
    __slots__ = ("state", "n", "w", "children", "chooser")

    def __init__(self, state: DraftState, chooser: int = -1):
        self.state = state
        self.n = 0
        self.w = 0.0          # total value, team A's perspective
        self.children: dict[int, "MctsNode"] = {}
        self.chooser = chooser   # team whose pick created this node

    def q_for_chooser(self) -> float:
        q = self.w / self.n
        return q if self.chooser == 0 else 1.0 - q


def uct_score(child: MctsNode, parent_visits: int, c_uct: float) -> float:
    """Exploitation from the chooser's perspective plus the UCT bonus.
    Unvisited children score +inf so each gets expanded before any revisit."""
    if child.n == 0:
        return math.inf
    return (child.q_for_chooser()
            + c_uct * math.sqrt(math.log(parent_visits) / child.n))


def _select_pick(node: MctsNode, pool_ids, c_uct: float) -> int:
    """Best pick at `node` by UCT; ties break to the lowest hero id because
    candidates are scanned in ascending order with a strict improvement test."""
    best_id, best_score = -1, -math.inf
    for hid in legal_picks(node.state, pool_ids):
        child = node.children.get(hid)
        score = math.inf if child is None or child.n == 0 else \
            uct_score(child, node.n, c_uct)
        if score > best_score:
            best_id, best_score = hid, score
    return best_id


def rollout_evaluator(predictor, team_size: int | None = None):
    """Classic UCT leaf evaluation: finish the draft uniformly at random and
    score the completed lineup with the win-rate predictor."""

    def evaluate(state: DraftState, rng) -> float:
        pool = range(predictor.pool_size)
        while not state.terminal:
            picks = legal_picks(state, pool)
            state = state.pick(int(picks[rng.integers(len(picks))]))
        return predictor.predict(state.picks_a, state.picks_b)

    return evaluate


def value_net_evaluator(valuenet, predictor=None):
    """Play-time leaf evaluation: the value net scores partial drafts
    directly; completed drafts go to the predictor when one is supplied."""

    def evaluate(state: DraftState, rng) -> float:
        if state.terminal and predictor is not None:
            return predictor.predict(state.picks_a, state.picks_b)
        return valuenet.value(state)

    return evaluate


def mcts_pick(state: DraftState, pool_ids, evaluate, iterations: int,
              c_uct: float = math.sqrt(2.0), seed: int = 0) -> int:
    """Run `iterations` rounds of select/expand/evaluate/backpropagate and
    return the root pick with the highest visit count. Visit ties break by
    the chooser-perspective mean value, then by lowest hero id, so a
    dominant pick wins even when every child got exactly one visit."""
    if state.terminal:
        raise ValueError("cannot pick from a terminal draft")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pool_ids = tuple(sorted(int(i) for i in pool_ids))
    root = MctsNode(state)

    for it in range(iterations):
        rng = philox(seed, 0xACE, it)
        node = root
        path = [root]
        # descend until we create a node or hit a terminal draft
        while not node.state.terminal:
            hid = _select_pick(node, pool_ids, c_uct)
            child = node.children.get(hid)
            if child is None:
                child = MctsNode(node.state.pick(hid),
                                 chooser=node.state.team_to_pick)
                node.children[hid] = child
                path.append(child)
                node = child
                break
            path.append(child)
            node = child
            if child.n == 0:
                break
        v = float(evaluate(node.state, rng))
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"evaluator returned {v}, expected [0, 1]")
        for n in path:
            n.n += 1
            n.w += v

    best_id, best_key = -1, (-1, -math.inf)
    for hid in legal_picks(state, pool_ids):
        child = root.children.get(hid)
        if child is None:
            continue
        key = (child.n, child.q_for_chooser())
        if key > best_key:
            best_id, best_key = hid, key
    return best_id


def make_mcts_strategy(pool_ids, evaluate, iterations: int,
                       c_uct: float = math.sqrt(2.0), seed: int = 0):
    """Adapt mcts_pick to the (state, rng) -> hero_id strategy protocol."""
    pool_ids = tuple(sorted(int(i) for i in pool_ids))

    def strategy(state: DraftState, rng) -> int:
        # derive a per-decision search seed from the caller's stream
        sub = int(rng.integers(1 << 31))
        return mcts_pick(state, pool_ids, evaluate, iterations, c_uct, seed=sub)

    return strategy
