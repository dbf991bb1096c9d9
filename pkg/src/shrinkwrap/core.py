"""Finitely represented points and trees.

An ultimately periodic real is an infinite sequence of naturals given by a
finite prefix followed by a finite period repeated forever.  Equality, first
difference, and membership questions about such sequences are all decidable
by scanning a computable bound, which is what makes every structure built on
top of them (branch-finite trees, wrappers, domination harnesses) fully
checkable on a desk.

The module also fixes the three index coders used throughout the package:
a growth rule ``growth(i, l)``, a bijection between naturals and unordered
pairs of naturals, and a code for (binary word, natural) arguments.  The
defaults are pinned; :class:`CoderConfig` exists so alternates can be plugged
in where an operation is parameterised by the coders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cmp_to_key
from math import isqrt, lcm
from typing import Callable, Iterable, Iterator, Optional, Union

# A node is a finite word over the naturals.
Node = tuple[int, ...]


def _check_word(values: Iterable[int], what: str) -> tuple[int, ...]:
    out = tuple(values)
    for v in out:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValueError(f"{what} entries must be nonnegative integers, got {v!r}")
    return out


@dataclass(frozen=True)
class UPReal:
    """An ultimately periodic sequence: ``prefix`` then ``period`` forever.

    The constructor stores the representation as given; it does not reduce
    it.  Use :func:`up_canonical` for the unique minimal form (shortest
    period, then shortest prefix).  Structural equality of canonical values
    coincides with equality of the sequences they denote.
    """

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", _check_word(self.prefix, "prefix"))
        object.__setattr__(self, "period", _check_word(self.period, "period"))
        if not self.period:
            raise ValueError("period must be nonempty")

    @classmethod
    def constant(cls, value: int) -> "UPReal":
        return cls((), (value,))

    def __getitem__(self, i: int) -> int:
        return up_eval(self, i)

    def initial_segment(self, length: int) -> Node:
        return tuple(up_eval(self, i) for i in range(length))


ZERO = UPReal.constant(0)


def up_eval(x: UPReal, i: int) -> int:
    """Value of the sequence at position ``i``."""
    if i < 0:
        raise ValueError("position must be nonnegative")
    if i < len(x.prefix):
        return x.prefix[i]
    return x.period[(i - len(x.prefix)) % len(x.period)]


def up_scan_bound(x: UPReal, y: UPReal) -> int:
    """Positions below this bound decide whether ``x`` and ``y`` are equal."""
    return max(len(x.prefix), len(y.prefix)) + lcm(len(x.period), len(y.period))


def up_first_diff(x: UPReal, y: UPReal) -> Optional[int]:
    """Least position where the two sequences differ, or ``None`` if equal.

    Scanning up to :func:`up_scan_bound` is exact: past both prefixes the
    pointwise comparison is periodic with the lcm of the two period lengths.
    """
    for i in range(up_scan_bound(x, y)):
        if up_eval(x, i) != up_eval(y, i):
            return i
    return None


def up_equal(x: UPReal, y: UPReal) -> bool:
    return up_first_diff(x, y) is None


def _primitive_root(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


def up_canonical(x: UPReal) -> UPReal:
    """Unique minimal representation: shortest period, then shortest prefix.

    The period word is replaced by its primitive root, then the prefix is
    rolled back while its last value matches the value the rotated period
    would produce there.  Both steps preserve the denoted sequence.
    """
    period = list(_primitive_root(x.period))
    prefix = list(x.prefix)
    while prefix and prefix[-1] == period[-1]:
        prefix.pop()
        period = [period[-1]] + period[:-1]
    return UPReal(tuple(prefix), tuple(period))


def up_compare(x: UPReal, y: UPReal) -> int:
    """Order two sequences pointwise-lexicographically. 0 means equal."""
    d = up_first_diff(x, y)
    if d is None:
        return 0
    return -1 if up_eval(x, d) < up_eval(y, d) else 1


up_sort_key = cmp_to_key(up_compare)


def up_extends(x: UPReal, t: Node) -> bool:
    """Does the sequence pass through the node ``t``?"""
    return all(up_eval(x, i) == t[i] for i in range(len(t)))


# ---------------------------------------------------------------------------
# Index coders.


def growth(i: int, l: int) -> int:
    """Width allowance at level ``l`` for growth index ``i``."""
    return i + l + 1


def pair_index(pair: Iterable[int]) -> int:
    """Position of an unordered pair of naturals in the fixed enumeration.

    Pairs {a, b} with a < b are ordered by (b, a); the index is
    b(b-1)/2 + a.
    """
    items = sorted(set(pair))
    if len(items) != 2:
        raise ValueError(f"need two distinct naturals, got {list(pair)!r}")
    a, b = items
    if a < 0:
        raise ValueError("pair elements must be nonnegative")
    return b * (b - 1) // 2 + a


def pair_of(nt: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`; returns the pair as (smaller, larger)."""
    if nt < 0:
        raise ValueError("pair position must be nonnegative")
    b = (1 + isqrt(1 + 8 * nt)) // 2
    while b * (b - 1) // 2 > nt:
        b -= 1
    while (b + 1) * b // 2 <= nt:
        b += 1
    a = nt - b * (b - 1) // 2
    return (a, b)


def word_code(s: Node) -> int:
    """Rank of a binary word in the length-then-lexicographic enumeration."""
    value = 0
    for bit in s:
        if bit not in (0, 1):
            raise ValueError(f"binary word expected, got entry {bit!r}")
        value = 2 * value + bit
    return (1 << len(s)) - 1 + value


def shape_code(s: Node, n: int) -> int:
    """Growth index assigned to the argument pair (binary word, natural)."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    return word_code(s) + n


@dataclass(frozen=True)
class CoderConfig:
    """The three coder rules, bundled so alternates can be substituted.

    ``canonical_shape`` flags that ``shape_code`` is the default rule, whose
    value over the words of a fixed length extending a fixed prefix is
    minimised by the all-zero tail and whose growth rule is pointwise
    monotone in the index.  Verification exploits that to check one word per
    class; with a custom config every word of a class is checked instead,
    which is only feasible for small widths.
    """

    growth: Callable[[int, int], int] = growth
    pair_index: Callable[[Iterable[int]], int] = pair_index
    pair_of: Callable[[int], tuple[int, int]] = pair_of
    shape_code: Callable[[Node, int], int] = shape_code
    canonical_shape: bool = True

    _EXHAUSTIVE_CAP = 4096

    def class_shape_indices(self, prefix: Node, width: int, n: int) -> Iterator[int]:
        """Growth indices that certify a tree for every word in a class.

        The class is all binary words of length ``width`` extending
        ``prefix``.  For the canonical rules a single minimal index
        suffices; otherwise every member is produced.
        """
        pad = width - len(prefix)
        if pad < 0:
            raise ValueError("class prefix longer than the declared width")
        if self.canonical_shape:
            yield self.shape_code(prefix + (0,) * pad, n)
            return
        if 1 << pad > self._EXHAUSTIVE_CAP:
            raise ValueError(
                "class too large to scan with a non-canonical shape coder"
            )
        for tail in itertools.product((0, 1), repeat=pad):
            yield self.shape_code(prefix + tail, n)


DEFAULT_CODERS = CoderConfig()


# ---------------------------------------------------------------------------
# Branch-finite trees.


@dataclass(frozen=True)
class BranchTree:
    """A leafless subtree of the finite words, given by its branch set.

    The branch set is a finite nonempty set of ultimately periodic reals,
    canonicalised on construction; the node set of the tree is the set of
    finite initial segments of the branches.  Prefix-closure and
    leaflessness hold by construction.
    """

    branches: frozenset[UPReal]

    def __post_init__(self):
        branches = frozenset(up_canonical(x) for x in self.branches)
        if not branches:
            raise ValueError("branch set must be nonempty")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def of(cls, *branches: UPReal) -> "BranchTree":
        return cls(frozenset(branches))

    def sorted_branches(self) -> list[UPReal]:
        return sorted(self.branches, key=up_sort_key)

    def member(self, t: Node) -> bool:
        """Is ``t`` a node of the tree?"""
        return any(up_extends(x, t) for x in self.branches)

    def level_values(self, l: int) -> frozenset[int]:
        """Values the branches take at level ``l``."""
        return frozenset(up_eval(x, l) for x in self.branches)

    def obeys(self, i: int, coders: CoderConfig = DEFAULT_CODERS) -> bool:
        """Does every level's width stay within the growth allowance?

        Level widths never exceed the branch count, so scanning stops at the
        first level whose allowance reaches the branch count.  That bound is
        exact when the growth rule does not decrease in the level, which the
        canonical rule satisfies.
        """
        count = len(self.branches)
        l = 0
        while True:
            cap = coders.growth(i, l)
            if cap >= count:
                return True
            if len(self.level_values(l)) > cap:
                return False
            l += 1

    def stem(self) -> Union[Node, UPReal]:
        """The minimal branching node, or the unique branch if there is none."""
        items = self.sorted_branches()
        if len(items) == 1:
            return items[0]
        pivot = items[0]
        depth = min(
            up_first_diff(pivot, other) for other in items[1:]  # all distinct
        )
        return pivot.initial_segment(depth)

    def restrict(self, t: Node) -> "BranchTree":
        """Subtree of branches passing through ``t``; error if none do."""
        kept = frozenset(x for x in self.branches if up_extends(x, t))
        if not kept:
            raise ValueError(f"no branch passes through {t!r}")
        return BranchTree(kept)


def bt_intersect(t1: BranchTree, t2: BranchTree) -> Optional[BranchTree]:
    """Common branches of the two trees, pruned to a tree, or ``None``."""
    common = t1.branches & t2.branches
    if not common:
        return None
    return BranchTree(common)


def bt_separation_level(t1: BranchTree, t2: BranchTree) -> Optional[int]:
    """Least level past every pairwise agreement, for disjoint branch sets.

    ``None`` when the branch sets meet.  Otherwise every branch of one tree
    has left every branch of the other strictly below the returned level,
    and the value is minimal with that property; the maximum over finitely
    many pairwise first differences exists because both branch sets are
    finite.
    """
    if t1.branches & t2.branches:
        return None
    return 1 + max(
        up_first_diff(x, y) for x in t1.branches for y in t2.branches
    )
