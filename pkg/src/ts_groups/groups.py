"""Length and distance oracles for the groups the toolkit computes in.

Supported descriptors: ``free:k``, ``abelian:n``, ``prod(A,B)`` and
``f2xz:n=N`` (the rank-2 free group times the integers, generated by
a, b and a^ن z, whose Cayley metric mixes the factors).

All metrics are left invariant: d(g, h) = |g^-1 h|.  Elements are
canonical normal forms (reduced words, integer vectors, pairs), so
equality of elements is equality of forms.  Oracles are immutable
apart from an internal length memo, which behaves as a cache: repeated
or concurrent computation is allowed, inconsistency is not.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .errors import ConfigurationError, MalformedInputError, ResourceLimitError
from .words import Alphabet, Word, format_word, parse_word, reduce

__all__ = ["Limits", "Ball", "GroupOracle", "FreeOracle", "AbelianOracle",
           "ProductOracle", "F2xZOracle", "make_oracle", "length", "ball"]


@dataclass(frozen=True)
class Limits:
    """Resource caps; configuration, not constants."""

    ball_elements: int = 10**6
    frontier: int = 10**7


@dataclass(frozen=True)
class Ball:
    center: object
    radius: int
    elements: Tuple[object, ...]

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in set(self.elements)


class GroupOracle:
    """Base class; subclasses provide the normal-form arithmetic."""

    descriptor: str

    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def length(self, g) -> int:
        raise NotImplementedError

    def distance(self, g, h) -> int:
        return self.length(self.multiply(self.inverse(g), h))

    def generators(self) -> List[object]:
        """Symmetrized generating set (with inverses)."""
        raise NotImplementedError

    def geodesic_steps(self, g) -> List[object]:
        """Generators whose product is g, exactly length(g) of them."""
        raise NotImplementedError

    def geodesic_points(self, start, end) -> List[object]:
        """Unit-step path from start to end, inclusive."""
        pts = [start]
        for s in self.geodesic_steps(self.multiply(self.inverse(start), end)):
            pts.append(self.multiply(pts[-1], s))
        return pts

    def sort_key(self, g):
        raise NotImplementedError

    def parse_element(self, text: str):
        raise NotImplementedError

    def format_element(self, g) -> str:
        raise NotImplementedError

    def ball(self, r: int, limits: Limits = Limits()) -> Ball:
        """Exact ball of radius r around the identity."""
        if r < 0:
            raise MalformedInputError("radius must be >= 0")
        seen = {self.identity()}
        frontier = [self.identity()]
        for _ in range(r):
            nxt = []
            for g in frontier:
                for s in self.generators():
                    h = self.multiply(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > limits.ball_elements:
                            raise ResourceLimitError(
                                f"ball exceeds {limits.ball_elements} elements"
                            )
            frontier = nxt
        return Ball(self.identity(), r, tuple(sorted(seen, key=self.sort_key)))

    def __repr__(self):
        return f"<oracle {self.descriptor}>"


class FreeOracle(GroupOracle):
    def __init__(self, rank: int):
        if rank < 1:
            raise ConfigurationError(f"free rank must be >= 1, got {rank}")
        self.rank = rank
        self.alphabet = Alphabet(rank)
        self.descriptor = f"free:{rank}"

    def identity(self):
        return Word((), self.rank)

    def multiply(self, g: Word, h: Word) -> Word:
        return g * h

    def inverse(self, g: Word) -> Word:
        return ~g

    def length(self, g: Word) -> int:
        return len(g)

    def generators(self):
        return [Word((a,), self.rank) for a in self.alphabet.letters()]

    def geodesic_steps(self, g: Word):
        return [Word((a,), self.rank) for a in g.letters]

    def sort_key(self, g: Word):
        return (len(g), g.letters)

    def parse_element(self, text: str) -> Word:
        return parse_word(text, self.rank)

    def format_element(self, g: Word) -> str:
        return format_word(g)

    def sphere_count(self, r: int) -> int:
        """Closed-form sphere size, used to cross-check enumeration."""
        if r == 0:
            return 1
        k = self.rank
        return 2 * k * (2 * k - 1) ** (r - 1)


class AbelianOracle(GroupOracle):
    def __init__(self, dim: int):
        if dim < 1:
            raise ConfigurationError(f"abelian dimension must be >= 1, got {dim}")
        self.dim = dim
        self.descriptor = f"abelian:{dim}"

    def identity(self):
        return (0,) * self.dim

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def length(self, g):
        return sum(abs(a) for a in g)

    def generators(self):
        out = []
        for i in range(self.dim):
            e = [0] * self.dim
            e[i] = 1
            out.append(tuple(e))
            e[i] = -1
            out.append(tuple(e))
        return out

    def geodesic_steps(self, g):
        steps = []
        for i, a in enumerate(g):
            e = [0] * self.dim
            e[i] = 1 if a > 0 else -1
            steps.extend([tuple(e)] * abs(a))
        return steps

    def sort_key(self, g):
        return (self.length(g), g)

    def parse_element(self, text: str):
        try:
            v = tuple(int(p) for p in text.replace("(", "").replace(")", "").split(","))
        except ValueError as exc:
            raise MalformedInputError(f"bad abelian element {text!r}") from exc
        if len(v) != self.dim:
            raise MalformedInputError(
                f"expected {self.dim} coordinates, got {len(v)}"
            )
        return v

    def format_element(self, g) -> str:
        return ",".join(str(a) for a in g)

    def ball(self, r: int, limits: Limits = Limits()) -> Ball:
        if r < 0:
            raise MalformedInputError("radius must be >= 0")
        est = (2 * r + 1) ** self.dim
        if est > limits.ball_elements * 4:
            raise ResourceLimitError(f"abelian ball of radius {r} too large")
        pts = []
        rng = range(-r, r + 1)
        for v in itertools.product(rng, repeat=self.dim):
            if sum(abs(a) for a in v) <= r:
                pts.append(v)
        if len(pts) > limits.ball_elements:
            raise ResourceLimitError(f"ball exceeds {limits.ball_elements} elements")
        return Ball(self.identity(), r, tuple(sorted(pts, key=self.sort_key)))


class ProductOracle(GroupOracle):
    """Direct product with the union of the embedded factor generating
    sets; lengths add."""

    def __init__(self, left: GroupOracle, right: GroupOracle):
        self.left = left
        self.right = right
        self.descriptor = f"prod({left.descriptor},{right.descriptor})"

    def identity(self):
        return (self.left.identity(), self.right.identity())

    def multiply(self, g, h):
        return (self.left.multiply(g[0], h[0]), self.right.multiply(g[1], h[1]))

    def inverse(self, g):
        return (self.left.inverse(g[0]), self.right.inverse(g[1]))

    def length(self, g):
        return self.left.length(g[0]) + self.right.length(g[1])

    def generators(self):
        il, ir = self.left.identity(), self.right.identity()
        return [(s, ir) for s in self.left.generators()] + [
            (il, s) for s in self.right.generators()
        ]

    def geodesic_steps(self, g):
        il, ir = self.left.identity(), self.right.identity()
        return [(s, ir) for s in self.left.geodesic_steps(g[0])] + [
            (il, s) for s in self.right.geodesic_steps(g[1])
        ]

    def sort_key(self, g):
        return (self.length(g), self.left.sort_key(g[0]), self.right.sort_key(g[1]))

    def parse_element(self, text: str):
        if "|" not in text:
            raise MalformedInputError("product element must look like '<left>|<right>'")
        l, r = text.split("|", 1)
        return (self.left.parse_element(l.strip()), self.right.parse_element(r.strip()))

    def format_element(self, g) -> str:
        return f"{self.left.format_element(g[0])}|{self.right.format_element(g[1])}"


class F2xZOracle(GroupOracle):
    """F2 x Z under the mixed generating set {a, b, a^n z}.

    Elements are pairs (free part as a rank-2 reduced word, integer z
    exponent); related-set experiments embed a free-group link word w
    as the pair (w, 0).  The length is computed exactly from the
    syllable decomposition of the free part: writing the free part as
    a^{k_0} b^{d_1} a^{k_1} ... b^{d_L} a^{k_L}, each mixed generator
    used contributes one a^{+-n} block to exactly one a-syllable, so

        |(w, t)| = L + min over integer d_0..d_L with sum d_j = t of
                   sum_j ( |d_j| + |k_j - n * d_j| ).

    The minimum is a tiny convex DP over the syllables; the BFS oracle
    in the test suite cross-validates it on whole balls.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ConfigurationError(f"f2xz needs n >= 1, got {n}")
        self.n = n
        self.rank = 2
        self.descriptor = f"f2xz:n={n}"
        self._memo: Dict[tuple, tuple] = {}

    def identity(self):
        return (Word((), 2), 0)

    def multiply(self, g, h):
        return (g[0] * h[0], g[1] + h[1])

    def inverse(self, g):
        return (~g[0], -g[1])

    def generators(self):
        a = Word((1,), 2)
        b = Word((2,), 2)
        an = Word((1,) * self.n, 2)
        e = Word((), 2)
        return [
            (a, 0), (~a, 0), (b, 0), (~b, 0), (an, 1), (~an, -1),
        ]

    def _syllables(self, w: Word):
        """a-exponents k_0..k_L and the b-letter signs between them."""
        ks = [0]
        signs = []
        for letter in w.letters:
            if abs(letter) == 1:
                ks[-1] += 1 if letter > 0 else -1
            else:
                signs.append(1 if letter > 0 else -1)
                ks.append(0)
        return ks, signs

    def _solve(self, g):
        key = (g[0].letters, g[1])
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        ks, signs = self._syllables(g[0])
        t = g[1]
        n = self.n
        # Per-syllable block counts: the cost |d| + |k - n d| is convex
        # with full slope beyond [min(0, k//n) - 1, max(0, k//n + 1)],
        # and beyond-zone deviations of an optimal solution all point one
        # way and can be spread evenly, so widening each zone by |t|
        # keeps an optimal assignment inside the ranges.
        slack = abs(t) + 1
        ranges = []
        for k in ks:
            base = k // n
            ranges.append((min(base, 0) - slack, max(base + 1, 0) + slack))
        # capacity[j]: largest |balance| the syllables from j on can add
        capacity = [0] * (len(ks) + 1)
        for j in range(len(ks) - 1, -1, -1):
            lo, hi = ranges[j]
            capacity[j] = capacity[j + 1] + max(abs(lo), abs(hi))
        states = {0: (0, ())}  # balance so far -> (cost, choices)
        for j, k in enumerate(ks):
            lo, hi = ranges[j]
            nxt = {}
            for bal, (cost, picks) in states.items():
                for d in range(lo, hi + 1):
                    c = cost + abs(d) + abs(k - n * d)
                    b2 = bal + d
                    cur = nxt.get(b2)
                    if cur is None or c < cur[0]:
                        nxt[b2] = (c, picks + (d,))
            # drop balances that cannot reach t with the capacity left
            states = {
                b: v for b, v in nxt.items() if abs(t - b) <= capacity[j + 1]
            }
        if t not in states:
            raise InternalInvariantError("balance search missed the target")
        cost, picks = states[t]
        result = (len(signs) + cost, picks)
        self._memo[key] = result
        return result

    def length(self, g):
        return self._solve(g)[0]

    def geodesic_steps(self, g):
        ks, signs = self._syllables(g[0])
        _, picks = self._solve(g)
        a = Word((1,), 2)
        an = Word((1,) * self.n, 2)
        e = Word((), 2)
        steps = []
        for j, k in enumerate(ks):
            d = picks[j]
            jump = (an, 1) if d >= 0 else ((~an), -1)
            for _ in range(abs(d)):
                steps.append(jump)
            err = k - self.n * d
            step = (a, 0) if err >= 0 else ((~a), 0)
            for _ in range(abs(err)):
                steps.append(step)
            if j < len(signs):
                bstep = Word((2 if signs[j] > 0 else -2,), 2)
                steps.append((bstep, 0))
        return steps

    def sort_key(self, g):
        return (len(g[0]) + abs(g[1]), g[0].letters, g[1])

    def parse_element(self, text: str):
        if "|" not in text:
            raise MalformedInputError("f2xz element must look like '<word>|<int>'")
        w, t = text.rsplit("|", 1)
        return (parse_word(w.strip(), 2), int(t))

    def format_element(self, g) -> str:
        return f"{format_word(g[0])}|{g[1]}"


_PROD_RE = re.compile(r"^prod\((.*)\)$")


def _split_prod_args(body: str):
    depth = 0
    for i, c in enumerate(body):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "," and depth == 0:
            return body[:i], body[i + 1 :]
    raise ConfigurationError(f"cannot split product descriptor {body!r}")


def make_oracle(descriptor: str) -> GroupOracle:
    """Build an oracle from a descriptor string such as ``free:2``,
    ``abelian:3``, ``f2xz:n=4`` or ``prod(free:2,abelian:1)``."""
    d = descriptor.strip()
    m = _PROD_RE.match(d)
    if m:
        l, r = _split_prod_args(m.group(1))
        return ProductOracle(make_oracle(l), make_oracle(r))
    if d.startswith("free:"):
        return FreeOracle(int(d.split(":", 1)[1]))
    if d.startswith("abelian:"):
        return AbelianOracle(int(d.split(":", 1)[1]))
    if d.startswith("f2xz:"):
        arg = d.split(":", 1)[1]
        if not arg.startswith("n="):
            raise ConfigurationError(f"f2xz descriptor must be f2xz:n=N, got {d!r}")
        return F2xZOracle(int(arg[2:]))
    raise ConfigurationError(f"unknown group descriptor {descriptor!r}")


def length(oracle: GroupOracle, g) -> int:
    """Exact Cayley length of g in the oracle's metric."""
    return oracle.length(g)


def ball(oracle: GroupOracle, r: int, limits: Limits = Limits()) -> Ball:
    """Exact ball of radius r centered at the identity."""
    return oracle.ball(r, limits)
