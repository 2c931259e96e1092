"""Lexicographic enumerators for the three index sets summed over.

All enumerators are generators: nothing is materialised, and the order is
fixed so that downstream ball sums are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator


@dataclass(frozen=True)
class SubsetSplit:
    n: int
    S: tuple[int, ...]
    T: tuple[int, ...]


@dataclass(frozen=True)
class RootTuple:
    """Distinct n-th roots of unity exp(2 pi i a / n), one per exponent a."""

    order: int
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class WeightVector:
    """Weight with strictly decreasing coordinates nu_i = t_i - offset.

    ``t`` is the integer chain t_1 > ... > t_N = 0 and ``offset`` = sum(t) / N
    recentres it to sum zero.
    """

    N: int
    level_bound: int
    t: tuple[int, ...]

    @property
    def offset(self) -> Fraction:
        return Fraction(sum(self.t), self.N)

    @property
    def nu(self) -> tuple[Fraction, ...]:
        c = self.offset
        return tuple(ti - c for ti in self.t)


def _check(n: int, k: int, kmin: int) -> None:
    if not (isinstance(n, int) and isinstance(k, int)) or n < 0 or k < kmin or k > n:
        raise ValueError("invalid parameters")


def enumerate_subset_splits(n: int, k: int) -> Iterator[SubsetSplit]:
    """Yield every split {0..n-1} = S u T with |S| = k, S in lex order."""
    _check(n, k, 0)
    ground = range(n)
    for S in combinations(ground, k):
        members = set(S)
        yield SubsetSplit(n, S, tuple(x for x in ground if x not in members))


def enumerate_root_tuples(n: int, k: int) -> Iterator[RootTuple]:
    _check(n, k, 1)
    for exps in combinations(range(n), k):
        yield RootTuple(n, exps)


def enumerate_weight_vectors(N: int, level_bound: int) -> Iterator[WeightVector]:
    """Yield every nu with nu_1 > ... > nu_N, integer gaps, nu_1 - nu_N < level_bound
    and zero sum.

    Such nu are in bijection with chains level_bound > t_1 > ... > t_{N-1} > t_N = 0.
    Chains are produced in lex order of (t_{N-1}, ..., t_1).
    """
    if not (isinstance(N, int) and isinstance(level_bound, int)) or N < 1 or level_bound < 1:
        raise ValueError("invalid parameters")
    if N == 1:
        yield WeightVector(1, level_bound, (0,))
        return
    for rising in combinations(range(1, level_bound), N - 1):
        yield WeightVector(N, level_bound, tuple(reversed(rising)) + (0,))
