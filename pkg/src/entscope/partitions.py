"""Set partitions of the party set.

Parties are numbered from 0 in the Python API. The text form used in
reports and on the command line ("1|2,3|4") numbers them from 1.
"""

from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

from .exceptions import ArgumentError


@dataclass(frozen=True)
class Partition:
    """A division of parties ``0..n-1`` into disjoint non-empty blocks.

    Blocks are stored canonically: parties sorted inside each block and
    blocks sorted by their smallest party, so two partitions with the
    same blocks compare equal regardless of input order.
    """

    blocks: tuple

    def __init__(self, blocks: Sequence[Sequence[int]]):
        canon = []
        for block in blocks:
            block = tuple(sorted(int(i) for i in block))
            if not block:
                raise ValueError("partition blocks must be non-empty")
            canon.append(block)
        canon.sort(key=lambda b: b[0])
        seen = [i for b in canon for i in b]
        if len(set(seen)) != len(seen):
            raise ValueError(f"partition blocks overlap: {canon}")
        if sorted(seen) != list(range(len(seen))):
            raise ValueError(f"partition blocks must cover 0..{len(seen) - 1}: {canon}")
        object.__setattr__(self, "blocks", tuple(canon))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __str__(self):
        return "|".join(",".join(str(i + 1) for i in b) for b in self.blocks)

    def __repr__(self):
        return f"Partition({str(self)!r})"

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        """Parse the 1-based form ``"1|2,3|4"``."""
        try:
            blocks = [[int(tok) - 1 for tok in part.split(",")] for part in text.strip().split("|")]
        except ValueError as exc:
            raise ValueError(f"bad partition text {text!r}") from exc
        if any(i < 0 for b in blocks for i in b):
            raise ValueError(f"bad partition text {text!r}")
        return cls(blocks)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        """Build from a restricted growth string (``rgs[i]`` = block of party i)."""
        blocks: list = [[] for _ in range(max(rgs) + 1)]
        for party, label in enumerate(rgs):
            blocks[label].append(party)
        return cls(blocks)

    def rgs(self) -> tuple:
        out = [0] * self.n
        for label, block in enumerate(self.blocks):
            for i in block:
                out[i] = label
        return tuple(out)

    def block_of(self, party: int) -> int:
        for label, block in enumerate(self.blocks):
            if party in block:
                return label
        raise IndexError(f"party {party} not in partition {self}")

    def order(self) -> tuple:
        """Parties in block order, i.e. the axis permutation that groups blocks."""
        return tuple(i for b in self.blocks for i in b)


def merged_dims(p: Partition, dims: Sequence[int]) -> tuple:
    """Per-block products of the party dimensions.

    >>> merged_dims(Partition([[0], [1, 2]]), (2, 2, 2))
    (2, 4)
    """
    if p.n > len(dims):
        raise IndexError(f"partition {p} refers to parties beyond {len(dims)} dims")
    return tuple(prod(dims[i] for i in b) for b in p.blocks)


def enumerate_partitions(n: int, m: int) -> Iterator[Partition]:
    """Yield every partition of ``n`` parties into exactly ``m`` blocks.

    Partitions are generated lazily as restricted growth strings
    ``a[0..n-1]`` with ``a[0] = 0`` and ``a[i] <= max(a[:i]) + 1``, in
    lexicographic order of the string. Branches that can no longer reach
    ``m`` distinct labels are pruned, so every string emitted uses exactly
    ``m`` labels and the count equals the Stirling number S(n, m).
    """
    if not isinstance(n, int) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")
    if not isinstance(m, int) or not 1 <= m <= n:
        raise ArgumentError(f"m must satisfy 1 <= m <= n={n}, got {m!r}")

    a = [0] * n

    def extend(i, used):
        # used = number of distinct labels among a[:i]
        if i == n:
            if used == m:
                yield Partition.from_rgs(a)
            return
        remaining = n - i
        for label in range(min(used + 1, m)):
            new_used = max(used, label + 1)
            if m - new_used > remaining - 1:
                continue
            a[i] = label
            yield from extend(i + 1, new_used)

    yield from extend(1, 1)


def bipartitions(n: int) -> Iterator[Partition]:
    """All ``2**(n-1) - 1`` two-block partitions of ``n`` parties."""
    if not isinstance(n, int) or n < 2:
        raise ArgumentError(f"bipartitions need n >= 2, got {n!r}")
    return enumerate_partitions(n, 2)


def stirling2(n: int, m: int) -> int:
    """Stirling number of the second kind S(n, m)."""
    if m < 0 or n < 0:
        return 0
    row = [1] + [0] * m  # S(0, j)
    for i in range(1, n + 1):
        new = [0] * (m + 1)
        for j in range(1, min(i, m) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[m]
