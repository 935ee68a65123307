"""Noncrossing partitions, Fuss-Catalan counting, and colored-word balance.

Everything here is exact: partitions are tuples of tuples, counts and
polynomial coefficients are ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

DEFAULT_ENUM_BOUND = 14

U = 1
UBAR = -1


class EnumerationBoundError(ValueError):
    """Raised when an enumeration would exceed the configured ground-size bound."""


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1..m} into nonempty disjoint blocks, kept in canonical form.

    Canonical form: blocks sorted by minimum element, elements ascending
    within each block.
    """

    ground_size: int
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_blocks(blocks: Sequence[Sequence[int]]) -> "SetPartition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        elements = [x for b in canon for x in b]
        m = len(elements)
        if sorted(elements) != list(range(1, m + 1)):
            raise ValueError("blocks must partition {1..m}")
        return SetPartition(m, canon)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no two blocks of ``p`` cross (no a < x < b < y with a~b, x~y, a!~x)."""
    for i, b1 in enumerate(p.blocks):
        for b2 in p.blocks[i + 1:]:
            # blocks cross iff b2 has elements both inside and outside some
            # gap of b1; equivalently the merged sequence alternates
            inside = [b1[0] < x < b1[-1] for x in b2]
            if any(inside):
                # b2 starts after b1's min (canonical order), so crossing
                # happens iff some element of b2 escapes past b1's max,
                # or b2 straddles a gap of b1 containing an element of b1
                if not all(inside):
                    return False
                lo, hi = b2[0], b2[-1]
                if any(lo < a < hi for a in b1):
                    return False
    return True


def _enum_nc(points: tuple[int, ...], block_mod: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All noncrossing partitions of ``points`` with block sizes divisible by ``block_mod``.

    First-block decomposition: the block containing the least point is chosen
    as an increasing subsequence; the gaps it leaves are partitioned
    independently.
    """
    if not points:
        yield ()
        return
    if len(points) % block_mod != 0:
        return
    first = points[0]
    yield from _grow_block((first,), points[1:], block_mod)


def _grow_block(
    block: tuple[int, ...], rest: tuple[int, ...], block_mod: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    if len(block) % block_mod == 0:
        for tail in _enum_nc(rest, block_mod):
            yield (block,) + tail
    for j, nxt in enumerate(rest):
        gap = rest[:j]
        if len(gap) % block_mod != 0:
            continue
        for gap_part in _enum_nc(gap, block_mod):
            for res in _grow_block(block + (nxt,), rest[j + 1:], block_mod):
                yield (res[0],) + gap_part + res[1:]


def enumerate_nc_s(s: int, k: int, bound: int = DEFAULT_ENUM_BOUND) -> list[SetPartition]:
    """All noncrossing partitions of {1..sk} whose block sizes are multiples of s.

    ``k = 0`` returns the single empty partition.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if s * k > bound:
        raise EnumerationBoundError(
            f"ground size {s * k} exceeds the enumeration bound {bound}"
        )
    points = tuple(range(1, s * k + 1))
    return [SetPartition.from_blocks(blocks) for blocks in _enum_nc(points, s)]


def enumerate_nc(m: int, bound: int = DEFAULT_ENUM_BOUND) -> list[SetPartition]:
    """All noncrossing partitions of {1..m}."""
    return enumerate_nc_s(1, m, bound=bound)


def generalized_binomial(x, j: int) -> Fraction:
    """binom(x, j) via the falling factorial, for rational (or integer) x."""
    if j < 0:
        raise ValueError("j must be >= 0")
    num = Fraction(1)
    xf = Fraction(x)
    for i in range(j):
        num *= xf - i
    return num / factorial(j)


def fuss_catalan(s, k: int) -> Fraction:
    """The generalized Fuss-Catalan number (1/(sk+1)) * binom(sk+k, k).

    Computed through the polynomial form (sk+2)(sk+3)...(sk+k)/k!, which is
    defined for any rational s > 0.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return Fraction(1)
    sk = Fraction(s) * k
    num = Fraction(1)
    for j in range(2, k + 1):
        num *= sk + j
    return num / factorial(k)


def fuss_narayana_poly(s: int, k: int) -> tuple[Fraction, ...]:
    """Coefficients (c_0..c_k) of the block-count refinement of fuss_catalan.

    c_b counts partitions in NC_s(k) with exactly b blocks:
    c_b = (1/b) * binom(k-1, b-1) * binom(sk, b-1).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    coeffs = [Fraction(0)] * (k + 1)
    for b in range(1, k + 1):
        coeffs[b] = (
            Fraction(1, b)
            * generalized_binomial(k - 1, b - 1)
            * generalized_binomial(Fraction(s) * k, b - 1)
        )
    return tuple(coeffs)


@dataclass(frozen=True)
class ColoredWord:
    """A word in the two letters U and its conjugate, stored as +1 / -1 signs."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if any(x not in (U, UBAR) for x in self.signs):
            raise ValueError("letters must be U (+1) or UBAR (-1)")

    @staticmethod
    def from_string(text: str) -> "ColoredWord":
        """Parse a word like "uu**": 'u'/'U' is the letter U, '*' or 'b' its conjugate."""
        signs = []
        for ch in text:
            if ch in "uU":
                signs.append(U)
            elif ch in "*bB":
                signs.append(UBAR)
            else:
                raise ValueError(f"unknown letter {ch!r}")
        return ColoredWord(tuple(signs))

    @staticmethod
    def same_color(k: int) -> "ColoredWord":
        return ColoredWord((U,) * k)

    @staticmethod
    def alternating(k: int) -> "ColoredWord":
        return ColoredWord(tuple(U if i % 2 == 0 else UBAR for i in range(k)))

    def __len__(self) -> int:
        return len(self.signs)


def _is_balanced(block: tuple[int, ...], word: ColoredWord, s: int) -> bool:
    return sum(word.signs[x - 1] for x in block) % s == 0


def enumerate_balanced(
    s: int, word: ColoredWord, bound: int = DEFAULT_ENUM_BOUND
) -> list[SetPartition]:
    """Noncrossing partitions of {1..len(word)} whose every block is color-balanced mod s."""
    if s < 1:
        raise ValueError("s must be >= 1")
    k = len(word)
    if k > bound:
        raise EnumerationBoundError(
            f"word length {k} exceeds the enumeration bound {bound}"
        )
    out = []
    for p in enumerate_nc(k, bound=bound):
        if all(_is_balanced(b, word, s) for b in p.blocks):
            out.append(p)
    return out


def star_moment(s: int, t, word: ColoredWord, bound: int = DEFAULT_ENUM_BOUND) -> Fraction:
    """Sum of t^(number of blocks) over the balanced noncrossing partitions of the word."""
    tf = Fraction(t)
    return sum(
        (tf ** p.block_count for p in enumerate_balanced(s, word, bound=bound)),
        Fraction(0),
    )


def join(p: SetPartition, q: SetPartition) -> SetPartition:
    """Join in the partition lattice: finest partition coarser than both p and q."""
    if p.ground_size != q.ground_size:
        raise ValueError("ground sizes differ")
    parent = list(range(p.ground_size + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for part in (p, q):
        for block in part.blocks:
            for x in block[1:]:
                union(block[0], x)
    groups: dict[int, list[int]] = {}
    for x in range(1, p.ground_size + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition.from_blocks(list(groups.values()))
