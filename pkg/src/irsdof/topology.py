"""Connectivity patterns of the K-user network and their enumeration.

A pattern records which cross links carry interference: entry ``(i, j)``
is 1 when transmitter ``i`` reaches receiver ``j``.  Diagonal entries are
always 1 (each user hears its own transmitter).  The off-diagonal zeros
are the links a surface must cancel, so patterns are ranked by how many
zeros they have and whether those zeros decompose into whole "silenced
user" groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator

import numpy as np

# Eager enumeration helpers refuse anything past this many cross links.
MAX_CROSS_LINKS = 20


@dataclass(frozen=True)
class NetworkMatrix:
    """Immutable 0/1 connectivity pattern with unit diagonal.

    ``bits[i][j]`` is the transmitter-i to receiver-j link indicator.
    """

    bits: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.bits)
        if k < 1:
            raise ValueError("pattern needs at least one user")
        for i, row in enumerate(self.bits):
            if len(row) != k:
                raise ValueError(f"row {i} has length {len(row)}, expected {k}")
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError(f"entry ({i}, {j}) must be 0 or 1, got {v}")
            if row[i] != 1:
                raise ValueError(f"diagonal entry ({i}, {i}) must be 1")

    @classmethod
    def from_array(cls, arr) -> "NetworkMatrix":
        a = np.asarray(arr)
        return cls(tuple(tuple(int(v) for v in row) for row in a))

    @property
    def K(self) -> int:
        return len(self.bits)

    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def zero_count(self) -> int:
        """Number of absent cross links."""
        k = self.K
        return sum(1 for i in range(k) for j in range(k)
                   if i != j and self.bits[i][j] == 0)

    def to_lines(self) -> list[str]:
        """K rows of '0'/'1' characters, transmitter-major."""
        return ["".join(str(v) for v in row) for row in self.bits]

    @classmethod
    def from_lines(cls, lines) -> "NetworkMatrix":
        rows = [line.strip() for line in lines if line.strip()]
        bits = tuple(tuple(int(c) for c in row) for row in rows)
        return cls(bits)


@dataclass(frozen=True)
class CancellationSet:
    """Cross links a surface would have to null for a given pattern."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)


def full_network(k: int) -> NetworkMatrix:
    """All links present."""
    return NetworkMatrix(tuple(tuple(1 for _ in range(k)) for _ in range(k)))


def no_cross_network(k: int) -> NetworkMatrix:
    """Only the direct links present (identity pattern)."""
    return NetworkMatrix(tuple(
        tuple(1 if i == j else 0 for j in range(k)) for i in range(k)
    ))


def cancellation_set(network: NetworkMatrix) -> CancellationSet:
    """Absent cross links, row-major: all targets an exact nulling solve needs.

    >>> n = NetworkMatrix.from_lines(["110", "011", "101"])
    >>> cancellation_set(n).pairs
    ((0, 2), (1, 0), (2, 1))
    """
    k = network.K
    pairs = tuple(
        (i, j)
        for i in range(k)
        for j in range(k)
        if i != j and network.bits[i][j] == 0
    )
    return CancellationSet(pairs=pairs)


def _cross_positions(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(k) if i != j]


def enumerate_family(k: int, q: int, descending: bool = False) -> Iterator[NetworkMatrix]:
    """Lazily yield every pattern whose zero count a Q-element surface can target.

    Patterns appear ordered by zero count (ascending by default), ties
    broken lexicographically on the zero-position list.  With
    ``descending=True`` the zero-count order reverses (the upper-bound
    search wants the most aggressive patterns first); the within-count
    order stays lexicographic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if q < 0:
        raise ValueError("q must be >= 0")
    cross = _cross_positions(k)
    if len(cross) > MAX_CROSS_LINKS:
        raise ValueError(
            f"{len(cross)} cross links exceed the enumeration cap {MAX_CROSS_LINKS}"
        )
    max_zeros = min(q, len(cross))
    counts = range(max_zeros, -1, -1) if descending else range(max_zeros + 1)
    for z in counts:
        for removed in itertools.combinations(cross, z):
            bits = [[1] * k for _ in range(k)]
            for (i, j) in removed:
                bits[i][j] = 0
            yield NetworkMatrix(tuple(tuple(row) for row in bits))


def family_size(k: int, q: int) -> int:
    """Number of patterns :func:`enumerate_family` yields.

    >>> family_size(3, 2), family_size(3, 6)
    (22, 64)
    """
    cross = k * (k - 1)
    return sum(comb(cross, z) for z in range(min(q, cross) + 1))


def w_pattern_zeros(k: int, silenced: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Zero positions of the pattern that silences the user subset ``silenced``.

    A silenced user neither interferes elsewhere nor hears the active
    users: zeros are every cross link into a silenced receiver plus every
    link from a silenced transmitter to an active receiver.  For |B| = W
    that is W(K-1) + W(K-W) positions.
    """
    b = set(silenced)
    if not b or not b.issubset(range(k)):
        raise ValueError(f"silenced must be a non-empty subset of 0..{k - 1}")
    zeros = [(i, j) for j in sorted(b) for i in range(k) if i != j]
    zeros += [(i, j) for i in sorted(b) for j in range(k)
              if j != i and j not in b]
    return tuple(sorted(set(zeros)))


def w_pattern(k: int, silenced: tuple[int, ...]) -> NetworkMatrix:
    """Pattern with exactly the :func:`w_pattern_zeros` links removed."""
    bits = [[1] * k for _ in range(k)]
    for (i, j) in w_pattern_zeros(k, silenced):
        bits[i][j] = 0
    return NetworkMatrix(tuple(tuple(row) for row in bits))


def w_decomposition(network: NetworkMatrix) -> int:
    """Largest W such that some W-subset of users is fully silenced.

    Scans all 2^K subsets from large to small and returns the first whose
    silencing zeros are all absent in ``network`` (extra zeros elsewhere
    are allowed).  Returns 0 when not even one user is silenced.
    """
    k = network.K
    for w in range(k, 0, -1):
        for subset in itertools.combinations(range(k), w):
            zeros = w_pattern_zeros(k, subset)
            if all(network.bits[i][j] == 0 for (i, j) in zeros):
                return w
    return 0
