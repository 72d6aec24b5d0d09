"""Block-design data model: blocks, incidence, duals, constructions.

Treatment labels are 1-based in every public interface. Blocks are
multisets stored as sorted tuples, so two designs compare equal exactly
when their incidence matrices agree with blocks in the same order; block
order never influences any criterion, only display.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DesignFormatError,
    EmptyBlock,
    IndexOutOfRange,
    InvalidParameters,
    InvalidSize,
    LabelOutOfRange,
    NotSupportedOrder,
    TooFewBlocksRemain,
)

_LATTICE_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class BlockDesign:
    """A block design on treatments 1..v with an ordered list of blocks."""

    v: int
    blocks: tuple[tuple[int, ...], ...]

    @property
    def b(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    @cached_property
    def incidence(self) -> np.ndarray:
        """v x b matrix whose (i, j) entry counts the occurrences of
        treatment i+1 in block j+1; entries may exceed one for non-binary
        designs."""
        n = np.zeros((self.v, self.b), dtype=int)
        for j, block in enumerate(self.blocks):
            for label in block:
                n[label - 1, j] += 1
        n.setflags(write=False)
        return n

    @cached_property
    def replications(self) -> tuple[int, ...]:
        """Replication count of each treatment (row sums of incidence)."""
        return tuple(int(x) for x in self.incidence.sum(axis=1))

    @cached_property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(block) for block in self.blocks)

    def uniform_block_size(self) -> int | None:
        """The common block size, or None when the sizes differ."""
        sizes = set(self.block_sizes)
        return sizes.pop() if len(sizes) == 1 else None


@dataclass(frozen=True)
class AugmentationSpec:
    """Number of unreplicated test treatments added to each block.

    Either one count shared by every block (`s`) or one count per block
    (`s_list`); every block must receive at least one test treatment.
    """

    s: int | None = None
    s_list: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.s is None) == (self.s_list is None):
            raise InvalidParameters("give exactly one of a common count or a per-block list")
        if self.s is not None:
            object.__setattr__(self, "s", int(self.s))
            if self.s < 1:
                raise InvalidParameters("the common test-treatment count must be >= 1")
        if self.s_list is not None:
            counts = tuple(int(x) for x in self.s_list)
            if not counts or any(c < 1 for c in counts):
                raise InvalidParameters("every block must receive at least one test treatment")
            object.__setattr__(self, "s_list", counts)

    @classmethod
    def common(cls, s: int) -> "AugmentationSpec":
        return cls(s=int(s))

    @classmethod
    def per_block(cls, counts: Iterable[int]) -> "AugmentationSpec":
        return cls(s_list=tuple(int(c) for c in counts))

    @property
    def is_common(self) -> bool:
        return self.s is not None

    def counts(self, b: int) -> tuple[int, ...]:
        """Per-block counts resolved for a design with b blocks."""
        if self.s is not None:
            return (self.s,) * b
        if len(self.s_list) != b:
            raise InvalidParameters(f"{len(self.s_list)} per-block counts for {b} blocks")
        return self.s_list

    def total(self, b: int) -> int:
        return sum(self.counts(b))

    def describe(self) -> str:
        return str(self.s) if self.is_common else ",".join(map(str, self.s_list))


def from_blocks(v: int, blocks: Iterable[Sequence[int]]) -> BlockDesign:
    """Validate labels and build a design; blocks are sorted internally."""
    if v < 1:
        raise InvalidParameters("need at least one treatment")
    cleaned = []
    for pos, block in enumerate(blocks, start=1):
        members = tuple(sorted(int(x) for x in block))
        if not members:
            raise EmptyBlock(f"block {pos} is empty")
        for label in members:
            if not 1 <= label <= v:
                raise LabelOutOfRange(f"label {label} in block {pos} outside 1..{v}")
        cleaned.append(members)
    return BlockDesign(v, tuple(cleaned))


def is_connected(d: BlockDesign) -> bool:
    """True when every treatment occurs somewhere and the treatment-block
    incidence graph has a single component."""
    if d.b == 0:
        return False
    if any(r == 0 for r in d.replications):
        return False
    blocks_of = [[] for _ in range(d.v)]
    for j, block in enumerate(d.blocks):
        for label in set(block):
            blocks_of[label - 1].append(j)
    seen_t = [False] * d.v
    seen_b = [False] * d.b
    stack = [0]
    seen_b[0] = True
    while stack:
        j = stack.pop()
        for label in set(d.blocks[j]):
            i = label - 1
            if not seen_t[i]:
                seen_t[i] = True
                for j2 in blocks_of[i]:
                    if not seen_b[j2]:
                        seen_b[j2] = True
                        stack.append(j2)
    return all(seen_t) and all(seen_b)


def dual(d: BlockDesign) -> BlockDesign:
    """Interchange the roles of treatments and blocks (the incidence
    matrix transposes); applying it twice restores the design."""
    n = d.incidence
    blocks = []
    for i in range(d.v):
        members = []
        for j in range(d.b):
            members.extend([j + 1] * int(n[i, j]))
        blocks.append(tuple(members))
    return BlockDesign(v=d.b, blocks=tuple(blocks))


def _check_indices(d: BlockDesign, indices: Iterable[int]) -> list[int]:
    idx = [int(i) for i in indices]
    for i in idx:
        if not 1 <= i <= d.b:
            raise IndexOutOfRange(f"block index {i} outside 1..{d.b}")
    return idx


def delete_blocks(d: BlockDesign, indices: Iterable[int]) -> BlockDesign:
    """Remove the 1-based blocks listed in `indices`, keeping the rest in
    their original order. At least two blocks must remain."""
    drop = set(_check_indices(d, indices))
    if d.b - len(drop) < 2:
        raise TooFewBlocksRemain(f"deleting {len(drop)} of {d.b} blocks leaves fewer than 2")
    kept = tuple(block for j, block in enumerate(d.blocks, start=1) if j not in drop)
    return BlockDesign(d.v, kept)


def repeat_blocks(d: BlockDesign, indices: Iterable[int]) -> BlockDesign:
    """Append one copy of each listed block, in ascending index order."""
    idx = sorted(_check_indices(d, indices))
    extra = tuple(d.blocks[i - 1] for i in idx)
    return BlockDesign(d.v, d.blocks + extra)


def all_k_subsets(v: int, k: int) -> BlockDesign:
    """All C(v, k) k-subsets of {1..v} as blocks, in lexicographic order.

    The result is a BIB design with replication C(v-1, k-1) and pairwise
    concurrence C(v-2, k-2).
    """
    if not 1 <= k <= v:
        raise InvalidSize(f"need 1 <= k <= v, got k={k}, v={v}")
    return BlockDesign(v, tuple(itertools.combinations(range(1, v + 1), k)))


def lattice_bib(q: int) -> BlockDesign:
    """Lattice BIB design on q^2 treatments built from the lines of the
    affine plane over the integers mod q: q(q+1) blocks of size q,
    replication q+1, every treatment pair together in exactly one block.
    Only prime q up to 13 is supported.
    """
    if q not in _LATTICE_PRIMES:
        raise NotSupportedOrder(f"q must be one of {_LATTICE_PRIMES}, got {q}")

    def label(x: int, y: int) -> int:
        return q * x + y + 1

    blocks = []
    for slope in range(q):
        for intercept in range(q):
            blocks.append(tuple(sorted(label(x, (slope * x + intercept) % q) for x in range(q))))
    for column in range(q):
        blocks.append(tuple(label(column, y) for y in range(q)))
    return BlockDesign(q * q, tuple(blocks))


def block_overlap(a: Sequence[int], b: Sequence[int]) -> int:
    """Multiset intersection size of two blocks."""
    return sum((Counter(a) & Counter(b)).values())


def low_overlap_indices(d: BlockDesign, n: int) -> tuple[int, ...]:
    """Greedy choice of n block indices with small pairwise overlap.

    Starts from the lexicographically first pair attaining the minimum
    overlap, then repeatedly adds the block whose worst overlap with the
    chosen set is smallest, ties broken by lowest index. Asking for a
    single block returns block 1.
    """
    if not 1 <= n <= d.b:
        raise IndexOutOfRange(f"cannot pick {n} blocks from {d.b}")
    if n == 1:
        return (1,)
    _, first, second = min(
        (block_overlap(d.blocks[i], d.blocks[j]), i + 1, j + 1)
        for i in range(d.b)
        for j in range(i + 1, d.b)
    )
    chosen = [first, second]
    while len(chosen) < n:
        _, pick = min(
            (max(block_overlap(d.blocks[j - 1], d.blocks[c - 1]) for c in chosen), j)
            for j in range(1, d.b + 1)
            if j not in chosen
        )
        chosen.append(pick)
    return tuple(sorted(chosen))


def parse_design(text: str) -> BlockDesign:
    """Parse the design text format: one `v N` line, then one `block ...`
    line per block; `#` starts a comment and blank lines are skipped."""
    v = None
    blocks: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "v":
            if v is not None:
                raise DesignFormatError(f"line {lineno}: duplicate `v` line")
            if len(fields) != 2:
                raise DesignFormatError(f"line {lineno}: expected `v <count>`")
            try:
                v = int(fields[1])
            except ValueError:
                raise DesignFormatError(f"line {lineno}: bad treatment count {fields[1]!r}") from None
        elif fields[0] == "block":
            if v is None:
                raise DesignFormatError(f"line {lineno}: `block` before `v`")
            try:
                labels = [int(x) for x in fields[1:]]
            except ValueError:
                raise DesignFormatError(f"line {lineno}: non-integer label in block") from None
            if not labels:
                raise DesignFormatError(f"line {lineno}: block line with no labels")
            blocks.append(labels)
        else:
            raise DesignFormatError(f"line {lineno}: unknown directive {fields[0]!r}")
    if v is None:
        raise DesignFormatError("missing `v` line")
    return from_blocks(v, blocks)


def format_design(d: BlockDesign) -> str:
    lines = [f"v {d.v}"]
    lines.extend("block " + " ".join(str(x) for x in block) for block in d.blocks)
    return "\n".join(lines) + "\n"


def read_design(path) -> BlockDesign:
    return parse_design(Path(path).read_text(encoding="utf-8"))


def write_design(d: BlockDesign, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_design(d))
