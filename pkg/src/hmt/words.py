"""Pair-partition words: enumeration, height, irreducibility, crossing.

A pair partition of {1, ..., 2k} is encoded as a word of 2k letters in
which every letter occurs exactly twice and first occurrences appear in
increasing letter order.  Letters are small integers (0, 1, 2, ...); the
a/b/c string form is a display layer only.  These words index every
limiting-moment formula in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import InvalidArgumentError

DEFAULT_WORD_CAP = 8

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class PartitionWord:
    """Canonical pair-partition word of length 2k.

    letters[i] is the integer id of the letter in position i; ids are
    assigned in order of first occurrence and each id occurs exactly twice.
    """

    letters: tuple[int, ...]

    def __post_init__(self):
        n = len(self.letters)
        if n == 0 or n % 2 != 0:
            raise InvalidArgumentError(f"word length must be positive and even, got {n}")
        seen: dict[int, int] = {}
        next_id = 0
        for pos, letter in enumerate(self.letters):
            if letter == next_id:
                seen[letter] = 1
                next_id += 1
            elif letter in seen:
                seen[letter] += 1
                if seen[letter] > 2:
                    raise InvalidArgumentError(
                        f"letter {letter} occurs more than twice in {self.letters}"
                    )
            else:
                raise InvalidArgumentError(
                    f"position {pos}: letter {letter} breaks first-occurrence order"
                )
        bad = [x for x, c in seen.items() if c != 2]
        if bad:
            raise InvalidArgumentError(f"letters {bad} do not occur exactly twice")

    @property
    def k(self) -> int:
        return len(self.letters) // 2

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return "".join(_ALPHABET[x] for x in self.letters)

    @classmethod
    def from_string(cls, text: str) -> "PartitionWord":
        """Build from a display string such as 'abba'."""
        ids: dict[str, int] = {}
        out = []
        for ch in text:
            if ch not in ids:
                ids[ch] = len(ids)
            out.append(ids[ch])
        return cls(tuple(out))

    def occurrences(self) -> tuple[tuple[int, int], ...]:
        """(first, second) 0-based positions for each letter id in order."""
        first: dict[int, int] = {}
        pairs: list[tuple[int, int]] = [(-1, -1)] * self.k
        for pos, letter in enumerate(self.letters):
            if letter in first:
                pairs[letter] = (first[letter], pos)
            else:
                first[letter] = pos
        return tuple(pairs)


def double_factorial_odd(k: int) -> int:
    """(2k-1)!! = 1*3*...*(2k-1), the number of pair partitions of {1..2k}."""
    out = 1
    for j in range(1, 2 * k, 2):
        out *= j
    return out


def iter_words(k: int) -> Iterator[tuple[int, ...]]:
    """Yield all canonical letter tuples of length 2k in lexicographic order.

    Fills positions left to right; at each slot the candidates, tried in
    increasing letter order, are the currently open letters (closing them)
    and then the next unused letter id (opening it), so the output is
    lexicographically sorted by construction.
    """
    n = 2 * k
    word = [0] * n

    def rec(pos: int, open_letters: list[int], next_id: int) -> Iterator[tuple[int, ...]]:
        if pos == n:
            yield tuple(word)
            return
        remaining = n - pos
        for i, letter in enumerate(open_letters):
            word[pos] = letter
            rest = open_letters[:i] + open_letters[i + 1 :]
            yield from rec(pos + 1, rest, next_id)
        if next_id < k and len(open_letters) + 1 <= remaining - 1:
            word[pos] = next_id
            yield from rec(pos + 1, open_letters + [next_id], next_id + 1)

    yield from rec(0, [], 0)


@lru_cache(maxsize=None)
def _words_tuple(k: int) -> tuple[PartitionWord, ...]:
    return tuple(PartitionWord(t) for t in iter_words(k))


def enumerate_words(k: int, cap: int = DEFAULT_WORD_CAP) -> list[PartitionWord]:
    """All pair-partition words of length 2k, lexicographically ordered.

    The count is (2k-1)!!.  k must satisfy 1 <= k <= cap (default 8; the
    table at k=8 has 2,027,025 entries).
    """
    if not isinstance(k, int) or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k!r}")
    if k > cap:
        raise InvalidArgumentError(f"k={k} exceeds the word-enumeration cap {cap}")
    return list(_words_tuple(k))


def _is_balanced(letters: tuple[int, ...], start: int, stop: int) -> bool:
    """True iff letters[start:stop] is itself a partition word (or empty).

    A contiguous window is a partition word exactly when every letter
    occurring in it occurs twice in it.
    """
    if (stop - start) % 2 != 0:
        return False
    counts: dict[int, int] = {}
    for pos in range(start, stop):
        letter = letters[pos]
        counts[letter] = counts.get(letter, 0) + 1
    return all(c == 2 for c in counts.values())


def height(w: PartitionWord) -> int:
    """Number of encapsulated partition subwords x.w1.x of w.

    Counts the letters whose two occurrences enclose a window that is empty
    or itself a partition word.  The weight 2**height(w) builds the Markov
    limit's moments.
    """
    letters = w.letters
    total = 0
    for first, second in w.occurrences():
        if _is_balanced(letters, first + 1, second):
            total += 1
    return total


def is_irreducible(w: PartitionWord) -> bool:
    """True iff no proper nonempty contiguous substring is a partition word.

    Counts of irreducible words give the free cumulants of the standard
    normal distribution.
    """
    letters = w.letters
    n = len(letters)
    pairs = w.occurrences()
    partner = [0] * n
    for first, second in pairs:
        partner[first] = second
        partner[second] = first
    for start in range(n):
        open_letters = 0
        for stop in range(start, n):
            mate = partner[stop]
            if start <= mate < stop:
                open_letters -= 1
            else:
                open_letters += 1
            if open_letters == 0:
                if start == 0 and stop == n - 1:
                    continue
                return False
    return True


def is_noncrossing(w: PartitionWord) -> bool:
    """True iff w reduces to the empty word by deleting adjacent equal pairs.

    Stack reduction: push each letter, cancel when it matches the top.
    Noncrossing word counts are the Catalan numbers.
    """
    stack: list[int] = []
    for letter in w.letters:
        if stack and stack[-1] == letter:
            stack.pop()
        else:
            stack.append(letter)
    return not stack


def delete_subword(w: PartitionWord, start: int, stop: int) -> PartitionWord:
    """Remove the window [start, stop) and re-canonicalize the remainder."""
    if not _is_balanced(w.letters, start, stop):
        raise InvalidArgumentError(f"window [{start}, {stop}) is not a partition subword")
    rest = w.letters[:start] + w.letters[stop:]
    ids: dict[int, int] = {}
    out = []
    for letter in rest:
        if letter not in ids:
            ids[letter] = len(ids)
        out.append(ids[letter])
    return PartitionWord(tuple(out))


def proper_subword_windows(w: PartitionWord) -> list[tuple[int, int]]:
    """All windows [start, stop) that are proper nonempty partition subwords."""
    letters = w.letters
    n = len(letters)
    out = []
    for start in range(n):
        for stop in range(start + 2, n + 1, 2):
            if (start, stop) != (0, n) and _is_balanced(letters, start, stop):
                out.append((start, stop))
    return out
