"""Exact free-group word arithmetic and power/periodicity scanning.

Letters are nonzero integers: ``+i`` is the i-th generator, ``-i`` its
inverse.  Words are kept freely reduced at all times; reduction is the
only way cancellation ever happens, so every operation downstream can
trust ``len(word)`` to be the Cayley length.

Text form (used by golden files and the CLI): whitespace-separated
tokens, ``a``..``z`` for generators 1..26, ``A``..``Z`` for their
inverses, ``gN``/``GN`` for arbitrary generator indices.  The empty
string is the identity.  Compact strings without whitespace
(``"abBA"``) are accepted on input for convenience.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import MalformedInputError

__all__ = [
    "Alphabet",
    "Word",
    "Occurrence",
    "PowerWitness",
    "reduce",
    "concat",
    "inverse_letters",
    "parse_word",
    "format_word",
    "is_k_aperiodic",
    "max_power_order",
    "shift_right",
    "first_aperiodic_word",
]


@dataclass(frozen=True)
class Alphabet:
    """Symmetric alphabet of a free group: generators 1..rank and inverses."""

    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise MalformedInputError(f"alphabet rank must be >= 1, got {self.rank}")

    def letters(self):
        """All 2*rank signed letters, in the order a, a^-1, b, b^-1, ..."""
        out = []
        for i in range(1, self.rank + 1):
            out.append(i)
            out.append(-i)
        return out

    def inverse(self, letter: int) -> int:
        self.check(letter)
        return -letter

    def check(self, letter: int):
        if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
            raise MalformedInputError(
                f"letter {letter!r} out of range for alphabet of rank {self.rank}"
            )


@dataclass(frozen=True)
class Word:
    """A freely reduced word.  ``len(w)`` is its Cayley length.

    Instances are immutable and hashable; ``u * v`` is the reduced
    product, ``~u`` the inverse.
    """

    letters: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        for a in self.letters:
            if not isinstance(a, int) or a == 0 or abs(a) > self.rank:
                raise MalformedInputError(
                    f"letter {a!r} out of range for rank {self.rank}"
                )
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise MalformedInputError(
                    "letters are not freely reduced; build words via reduce()"
                )

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if self.rank != other.rank:
            raise MalformedInputError("cannot multiply words of different ranks")
        return reduce(self.letters + other.letters, Alphabet(self.rank))

    def __invert__(self) -> "Word":
        return Word(inverse_letters(self.letters), self.rank)

    def __pow__(self, n: int) -> "Word":
        result = Word((), self.rank)
        base = self if n >= 0 else ~self
        for _ in range(abs(n)):
            result = result * base
        return result

    def __str__(self):
        return format_word(self)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def subword(self, start: int, stop: int) -> "Word":
        """Contiguous window; windows of reduced words are reduced."""
        if not (0 <= start <= stop <= len(self.letters)):
            raise MalformedInputError(f"window [{start}:{stop}] out of range")
        return Word(self.letters[start:stop], self.rank)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def rotated(self, i: int) -> "Word":
        """Cyclic shift by i positions (requires cyclic reducedness)."""
        if not self.is_cyclically_reduced():
            raise MalformedInputError("cannot rotate a non-cyclically-reduced word")
        i %= max(len(self.letters), 1)
        return Word(self.letters[i:] + self.letters[:i], self.rank)


@dataclass(frozen=True)
class Occurrence:
    """A factorization window: ``word[start : start + length]``."""

    word: Word
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0 or self.start + self.length > len(self.word):
            raise MalformedInputError(
                f"occurrence [{self.start}, +{self.length}] exceeds word of "
                f"length {len(self.word)}"
            )

    @property
    def end(self) -> int:
        return self.start + self.length

    def segment(self) -> Word:
        return self.word.subword(self.start, self.end)


@dataclass(frozen=True)
class PowerWitness:
    """Evidence that ``base^exponent`` occurs contiguously in a sequence.

    ``start``/``period`` index into the scanned token sequence; ``base``
    is the repeating block.
    """

    start: int
    period: int
    exponent: int
    base: tuple

    def span(self):
        return (self.start, self.start + self.period * self.exponent)


def inverse_letters(letters: Sequence[int]) -> Tuple[int, ...]:
    return tuple(-a for a in reversed(letters))


def reduce(letters: Iterable[int], alphabet: Alphabet) -> Word:
    """Freely reduce a letter sequence.  Idempotent on reduced input."""
    stack = []
    for a in letters:
        alphabet.check(a)
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return Word(tuple(stack), alphabet.rank)


def concat(*words: Word) -> Word:
    """Reduced product of several words of a common rank."""
    if not words:
        raise MalformedInputError("concat needs at least one word")
    rank = words[0].rank
    out = []
    for w in words:
        if w.rank != rank:
            raise MalformedInputError("cannot concat words of different ranks")
        for a in w.letters:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
    return Word(tuple(out), rank)


_TOKEN_RE = re.compile(r"^([a-z]|[A-Z]|g[0-9]+|G[0-9]+)$")


def _token_to_letter(tok: str) -> int:
    if not _TOKEN_RE.match(tok):
        raise MalformedInputError(f"bad word token {tok!r}")
    if tok[0] in "gG" and len(tok) > 1:
        idx = int(tok[1:])
        if idx < 1:
            raise MalformedInputError(f"bad generator index in token {tok!r}")
        return idx if tok[0] == "g" else -idx
    if tok.islower():
        return ord(tok) - ord("a") + 1
    return -(ord(tok) - ord("A") + 1)


def _letter_to_token(a: int, rank: int) -> str:
    i = abs(a)
    if rank <= 26:
        c = chr(ord("a") + i - 1)
        return c if a > 0 else c.upper()
    return ("g" if a > 0 else "G") + str(i)


def parse_word(text: str, rank: int) -> Word:
    """Parse the text form.  Whitespace-separated tokens, or one compact
    run of single-letter tokens."""
    text = text.strip()
    if not text:
        return Word((), rank)
    if any(c.isspace() for c in text):
        tokens = text.split()
    elif _TOKEN_RE.match(text):
        tokens = [text]
    else:
        tokens = list(text)
    letters = [_token_to_letter(t) for t in tokens]
    return reduce(letters, Alphabet(rank))


def format_word(word: Word) -> str:
    return " ".join(_letter_to_token(a, word.rank) for a in word.letters)


# ---------------------------------------------------------------------------
# Power scanning.
#
# A block A^k (k copies of a period-p block A) starting at s corresponds to
# a run of k*p - p positions i in [s, s + (k-1)p) with seq[i] == seq[i+p].
# Scanning each period p and taking maximal equality runs therefore finds
# the maximal power order in O(n^2 / 2) comparisons, vectorized per period.
# Only periods p <= n // order can host a given order, which makes bounded
# queries (is there a (k+1)-th power?) linear-ish for large k.
# ---------------------------------------------------------------------------

_NUMPY_CUTOVER = 256


def _tokens_of(seq) -> Sequence:
    if isinstance(seq, Word):
        return seq.letters
    if isinstance(seq, str):
        return seq
    return seq


def _encode(tokens) -> np.ndarray:
    ids = {}
    out = np.empty(len(tokens), dtype=np.int32)
    for i, t in enumerate(tokens):
        out[i] = ids.setdefault(t, len(ids))
    return out


def _best_run_numpy(eq: np.ndarray):
    """Longest True run: (length, start)."""
    if not eq.any():
        return 0, 0
    idx = np.flatnonzero(~eq)
    bounds = np.concatenate(([-1], idx, [len(eq)]))
    gaps = np.diff(bounds) - 1
    j = int(np.argmax(gaps))
    return int(gaps[j]), int(bounds[j]) + 1


def _scan_period_py(tokens, p):
    """(best run length, start) of seq[i] == seq[i+p] runs, pure python."""
    best_len = 0
    best_start = 0
    run = 0
    for i in range(len(tokens) - p):
        if tokens[i] == tokens[i + p]:
            run += 1
            if run > best_len:
                best_len = run
                best_start = i - run + 1
        else:
            run = 0
    return best_len, best_start


def _power_scan(tokens, max_period=None, stop_at_order=None):
    """Scan all periods up to max_period; return the best power found.

    Returns (order, start, period); order 1 with no meaningful window
    when the sequence is square-free in the scanned period range.
    If stop_at_order is given, returns the first power of at least that
    order as soon as one period exhibits it.
    """
    n = len(tokens)
    if n == 0:
        return 1, 0, 0
    limit = n // 2 if max_period is None else min(max_period, n // 2)
    use_numpy = n > _NUMPY_CUTOVER
    arr = _encode(tokens) if use_numpy else None
    best_order, best_start, best_period = 1, 0, 0
    for p in range(1, limit + 1):
        if n // p <= best_order and stop_at_order is None:
            break
        if use_numpy:
            run, start = _best_run_numpy(arr[p:] == arr[:-p])
        else:
            run, start = _scan_period_py(tokens, p)
        order = (run + p) // p
        if order > best_order:
            best_order, best_start, best_period = order, start, p
            if stop_at_order is not None and best_order >= stop_at_order:
                break
    return best_order, best_start, best_period


def _witness(tokens, order, start, period) -> Optional[PowerWitness]:
    if order < 2:
        return None
    return PowerWitness(
        start=start,
        period=period,
        exponent=order,
        base=tuple(tokens[start : start + period]),
    )


def max_power_order(seq):
    """Maximum k such that some block A^k occurs contiguously.

    Returns (order, witness); order 1 and no witness for square-free
    input.  Agrees with brute-force scanning of all (start, period)
    pairs.
    """
    tokens = _tokens_of(seq)
    order, start, period = _power_scan(tokens)
    return order, _witness(tokens, order, start, period)


def is_k_aperiodic(seq, k: int):
    """True iff no k+1 consecutive identical blocks occur.

    Returns (flag, witness); on failure the witness pins down an
    offending (k+1)-th power.  The empty sequence is k-aperiodic for
    every k.
    """
    if k < 1:
        raise MalformedInputError(f"aperiodicity order must be >= 1, got {k}")
    tokens = _tokens_of(seq)
    n = len(tokens)
    if n < k + 1:
        return True, None
    order, start, period = _power_scan(
        tokens, max_period=n // (k + 1), stop_at_order=k + 1
    )
    if order >= k + 1:
        return False, _witness(tokens, order, start, period)
    return True, None


def shift_right(host: Word, occ: Occurrence, m: int) -> Word:
    """Slide an occurrence window m letters to the right.

    With the window at c_1..c_n and f_1..f_q the letters after it, the
    result is c_{1+m}..c_n f_1..f_m; m may be at most q, so the window
    length is preserved.
    """
    if occ.word is not host and occ.word != host:
        raise MalformedInputError("occurrence does not belong to the host word")
    q = len(host) - occ.end
    if m < 1 or m > q:
        raise MalformedInputError(
            f"shift {m} out of range: only {q} letters available to the right"
        )
    return host.subword(occ.start + m, occ.end + m)


def first_aperiodic_word(rank: int, length: int, k: int = 1) -> Word:
    """Deterministic shortlex-first reduced word of the given length with
    no (k+1)-th power.  Used wherever a fixed aperiodic word is needed."""
    if rank < 1 or length < 0:
        raise MalformedInputError("rank must be >= 1 and length >= 0")
    order = []
    for i in range(1, rank + 1):
        order.extend((i, -i))

    def extend(prefix):
        if len(prefix) == length:
            return prefix
        for a in order:
            if prefix and prefix[-1] == -a:
                continue
            prefix.append(a)
            if _suffix_power_free(prefix, k):
                result = extend(prefix)
                if result is not None:
                    return result
            prefix.pop()
        return None

    found = extend([])
    if found is None:
        raise MalformedInputError(
            f"no {k}-aperiodic word of length {length} over rank {rank}"
        )
    return Word(tuple(found), rank)


def _suffix_power_free(letters, k):
    """No (k+1)-th power ending at the last position."""
    n = len(letters)
    for p in range(1, n // (k + 1) + 1):
        span = (k + 1) * p
        tail = letters[n - span :]
        if all(tail[i] == tail[i + p] for i in range(span - p)):
            return False
    return True
