"""Square-free sequence generation and online edge labelings of rays
and plane ternary trees.

The adversarial labelers implement an online protocol: at each vertex
the library first commits an inadmissible element z_v taken from the
vertex's candidate set F_v, then an adversary picks the actual labels
from F_v minus the inadmissible one.  The designation never looks at
future adversary choices; all the interesting state lives in the
threat-tracking engine below, which keeps the label sequence along any
ray 4-aperiodic and hence along any simple tree path 10-aperiodic (an
eleventh power crossing a path's apex would put five whole copies into
one ray leg).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from .errors import MalformedInputError
from .trees import PlaneTernaryTree
from .words import Word

__all__ = [
    "squarefree_ternary",
    "LabeledTree",
    "label_tree_three_letters",
    "InadmissibleEngine",
    "label_ray_adversarial",
    "label_tree_adversarial",
    "random_ray_adversary",
    "greedy_ray_adversary",
    "random_tree_adversary",
    "greedy_tree_adversary",
]


# ---------------------------------------------------------------------------
# Square-free ternary sequence: fixed point of A -> ABC, B -> AC, C -> B,
# a standard square-free morphism.  Deterministic so golden files stay
# stable.  The buffer grows geometrically and is cached between calls.
# ---------------------------------------------------------------------------

_MORPHISM = {"A": "ABC", "B": "AC", "C": "B"}
_sf_buffer = "A"


def squarefree_ternary(n: int) -> str:
    """First n letters of the fixed square-free sequence over {A, B, C}."""
    global _sf_buffer
    if n < 1:
        raise MalformedInputError(f"need n >= 1, got {n}")
    while len(_sf_buffer) < n:
        _sf_buffer = "".join(_MORPHISM[c] for c in _sf_buffer)
    return _sf_buffer[:n]


def _pair_stream_letter(idx: int, p, q):
    """Letter idx of the square-free-over-pairs sequence flattened to
    two symbols: A -> (p,q), B -> (q,p), C -> (p,p)."""
    block = squarefree_ternary(idx // 2 + 1)[idx // 2]
    if block == "A":
        return (p, q)[idx % 2]
    if block == "B":
        return (q, p)[idx % 2]
    return p


# ---------------------------------------------------------------------------
# Labeled trees.
# ---------------------------------------------------------------------------


@dataclass
class LabeledTree:
    """Edge labeling of a plane tree.  edge_labels is keyed by the child
    vertex of each edge; candidate sets and inadmissibles are present
    only for adversarial labelings."""

    tree: PlaneTernaryTree
    edge_labels: Dict[int, object]
    candidates: Optional[Dict[int, tuple]] = None
    inadmissibles: Optional[Dict[int, object]] = None

    def path_labels(self, path: Sequence[int]) -> List[object]:
        out = []
        for x, y in zip(path, path[1:]):
            if self.tree.parent[y] == x:
                out.append(self.edge_labels[y])
            elif self.tree.parent[x] == y:
                out.append(self.edge_labels[x])
            else:
                raise MalformedInputError("not a path in the tree")
        return out


def label_tree_three_letters(tree: PlaneTernaryTree) -> LabeledTree:
    """Depth-uniform labeling over {A, B, C}: every edge from level n to
    level n+1 carries letter n of the square-free sequence, so every
    ray from the origin reads the same square-free word and every
    simple path is 3-aperiodic."""
    labels = {}
    if tree.n_vertices > 1:
        seq = squarefree_ternary(tree.height())
        for v in tree.vertices():
            if v != tree.ORIGIN:
                labels[v] = seq[tree.level(v) - 1]
    return LabeledTree(tree, labels)


# ---------------------------------------------------------------------------
# The inadmissible-element engine.
#
# The designation is reactive: the engine tracks, for every period p,
# the longest p-periodic suffix of the labels seen so far.  A pattern
# that has reached 4 full copies is a live threat; banning its unique
# continuation letter while it stays live kills the fifth copy at its
# first letter.  Threats are ranked by how few letters remain until a
# fifth power would complete, closest first, so the only way a fifth
# power could ever land is a chain of mutually outranking threats with
# pairwise different continuation letters, which the adversary cannot
# sustain (two-state excursion schemes driven by a fixed master
# sequence, by contrast, can be steered into long powers).  On
# threat-free steps the designation pads along the flattened square-free
# pair stream, which keeps the two-letter case deterministic.
#
# When the vertex's candidate set cannot play a threat's continuation
# anyway, that threat is skipped and the next one is banned.
# ---------------------------------------------------------------------------


def _token_sort_key(t):
    if isinstance(t, Word):
        return (2, len(t), t.letters)
    if isinstance(t, (int, float)):
        return (0, t, ())
    return (1, str(t), ())


class InadmissibleEngine:
    """Online designator of inadmissible elements.

    ``designate`` is a pure function of the state; ``observe`` consumes
    the adversary's actual label.  Per-vertex forking (clone) turns the
    ray guarantee into the tree guarantee: every root-to-vertex label
    path is one honest run of the engine.
    """

    def __init__(self, ground, _history=None, _runs=None):
        tokens = sorted(set(ground), key=_token_sort_key)
        if len(tokens) < 2:
            raise MalformedInputError("ground set needs at least 2 elements")
        self.ground = tuple(tokens)
        self.history = _history if _history is not None else []
        # runs[p-1]: consecutive positions i ending the history with
        # history[i] == history[i-p]; the p-periodic suffix has length
        # runs[p-1] + p
        self.runs = _runs if _runs is not None else []

    def _threats(self):
        n = len(self.history)
        out = []
        for p in range(1, n // 4 + 1):
            suffix_len = self.runs[p - 1] + p
            if suffix_len >= 4 * p:
                remaining = 5 * p - suffix_len
                out.append((remaining, p, self.history[n - p]))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def designate(self, candidates) -> object:
        """The inadmissible element for the current step, drawn from the
        candidate set."""
        for _remaining, _p, letter in self._threats():
            if letter in candidates:
                return letter
        pad = _pair_stream_letter(len(self.history), self.ground[0], self.ground[1])
        if pad in candidates:
            return pad
        return min(candidates, key=_token_sort_key)

    def observe(self, x):
        n = len(self.history)
        new_runs = []
        for p in range(1, n + 1):
            prev = self.runs[p - 1] if p <= len(self.runs) else 0
            new_runs.append(prev + 1 if self.history[n - p] == x else 0)
        self.history.append(x)
        self.runs = new_runs

    def clone(self) -> "InadmissibleEngine":
        return InadmissibleEngine(
            self.ground, _history=list(self.history), _runs=list(self.runs)
        )


def _normalize_candidates(candidates, count, minimum):
    if isinstance(candidates, (list, tuple)) and candidates and isinstance(
        candidates[0], (set, frozenset, list, tuple)
    ):
        sets = [frozenset(c) for c in candidates]
        if len(sets) < count:
            raise MalformedInputError(
                f"need {count} candidate sets, got {len(sets)}"
            )
        sets = sets[:count]
    else:
        sets = [frozenset(candidates)] * count
    for fv in sets:
        if len(fv) < minimum:
            raise MalformedInputError(
                f"candidate set {sorted(map(str, fv))} smaller than {minimum}"
            )
    return sets


def label_ray_adversarial(length: int, candidates, adversary: Callable):
    """Label a ray online against an adversary.

    candidates: one token collection reused everywhere, or a sequence of
    per-vertex collections, each of size >= 2.  adversary(i, F_v, z_v)
    returns the label for step i and must avoid z_v.  Returns
    (labels, inadmissibles).
    """
    if length < 1:
        raise MalformedInputError("ray length must be >= 1")
    sets = _normalize_candidates(candidates, length, 2)
    ground = set().union(*sets)
    engine = InadmissibleEngine(ground)
    xs, zs = [], []
    for i in range(length):
        z = engine.designate(sets[i])
        x = adversary(i, sets[i], z)
        if x not in sets[i] or x == z:
            raise MalformedInputError(
                f"adversary chose {x!r} at step {i}, not an admissible element"
            )
        engine.observe(x)
        xs.append(x)
        zs.append(z)
    return xs, zs


def label_tree_adversarial(tree: PlaneTernaryTree, candidates, adversary: Callable) -> LabeledTree:
    """Label all lower edges of a plane ternary tree online.

    candidates: one collection or a per-vertex dict, each of size >= 4.
    adversary(v, F_v, z_v, k) returns k distinct admissible labels for
    the k lower edges of v, mapped to children left to right.
    """
    if isinstance(candidates, dict):
        sets = {v: frozenset(candidates[v]) for v in tree.vertices()}
    else:
        fv = frozenset(candidates)
        sets = {v: fv for v in tree.vertices()}
    for v, fv in sets.items():
        if len(fv) < 4:
            raise MalformedInputError(f"candidate set at vertex {v} smaller than 4")
    ground = set().union(*sets.values())
    states = {tree.ORIGIN: InadmissibleEngine(ground)}
    labels: Dict[int, object] = {}
    inadmissibles: Dict[int, object] = {}
    for v in tree.planar_order():
        engine = states.pop(v)
        kids = tree.children[v]
        z = engine.designate(sets[v])
        inadmissibles[v] = z
        if not kids:
            continue
        picks = adversary(v, sets[v], z, len(kids))
        picks = tuple(picks)
        if len(picks) != len(kids) or len(set(picks)) != len(picks):
            raise MalformedInputError(
                f"adversary must return {len(kids)} distinct labels at vertex {v}"
            )
        for x in picks:
            if x not in sets[v] or x == z:
                raise MalformedInputError(
                    f"adversary chose inadmissible label {x!r} at vertex {v}"
                )
        for child, x in zip(kids, picks):
            labels[child] = x
            forked = engine.clone()
            forked.observe(x)
            states[child] = forked
    return LabeledTree(
        tree, labels, candidates={v: tuple(sorted(map(str, s))) for v, s in sets.items()},
        inadmissibles=inadmissibles,
    )


# ---------------------------------------------------------------------------
# Stock adversaries.
# ---------------------------------------------------------------------------


def random_ray_adversary(seed: int) -> Callable:
    rng = random.Random(seed)

    def pick(i, fv, z):
        return rng.choice(sorted((t for t in fv if t != z), key=_token_sort_key))

    return pick


def greedy_ray_adversary() -> Callable:
    def pick(i, fv, z):
        return min((t for t in fv if t != z), key=_token_sort_key)

    return pick


def random_tree_adversary(seed: int) -> Callable:
    rng = random.Random(seed)

    def pick(v, fv, z, k):
        pool = sorted((t for t in fv if t != z), key=_token_sort_key)
        return tuple(rng.sample(pool, k))

    return pick


def greedy_tree_adversary() -> Callable:
    def pick(v, fv, z, k):
        pool = sorted((t for t in fv if t != z), key=_token_sort_key)
        return tuple(pool[:k])

    return pick
