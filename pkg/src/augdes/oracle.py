"""Ground truth for the closed-form criteria.

`build_model` lays out the full fixed-effects model of an augmented
design, one row per plot: a control plot in block j carries a one for the
block effect and a one for its control effect; a test plot carries a one
for the block effect and a one for its own (unreplicated) effect.
`gls_variance` then computes exact generalized-least-squares contrast
variances from a Moore-Penrose inverse of the information matrix X^T X.

That information matrix is singular exactly because block and treatment
effects are aliased within each connected component of the plot
structure. Its pseudo-inverse is therefore obtained without any
eigensolver: add the known orthonormal null basis (one vector per
component, +1 on its blocks and -1 on its treatments, normalized), invert
with the dense routine, and subtract the same rank-one pieces again.

`enumerate_class` walks every design of a small class, blockwise and as a
multiset of blocks, so that bounds and criterion minima can be checked
exhaustively.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import criteria
from .design import AugmentationSpec, BlockDesign, is_connected
from .errors import (
    ClassTooLarge,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidParameters,
    NotEstimable,
)
from .matrix import SymMatrix, invert

DEFAULT_ENUM_CAP = 10_000_000
DEFAULT_PLOT_CAP = 200
ESTIMABLE_TOL = 1e-8

CRITERION_NAMES = ("a_cc", "a_tt", "a_ct", "mv_cc", "mv_tt", "mv_ct")


@dataclass(frozen=True, eq=False)
class AugmentedModel:
    """Model matrix of an augmented design plus the pseudo-inverse of its
    information matrix.

    Parameter layout: b block effects, then v control effects, then one
    effect per test treatment, blockwise in plot order. `test_offsets[j]`
    is the position of block j+1's first test effect within the combined
    (control, test) coefficient vector, counted after the v controls.
    """

    design: BlockDesign
    aug: AugmentationSpec
    x: np.ndarray
    info: np.ndarray
    info_pinv: np.ndarray
    test_offsets: tuple[int, ...]

    @property
    def n_tests(self) -> int:
        return self.aug.total(self.design.b)

    def _test_pos(self, j: int, w: int) -> int:
        counts = self.aug.counts(self.design.b)
        if not 1 <= j <= self.design.b:
            raise IndexOutOfRange(f"block index {j} outside 1..{self.design.b}")
        if not 1 <= w <= counts[j - 1]:
            raise IndexOutOfRange(f"test slot {w} outside 1..{counts[j - 1]} in block {j}")
        return self.design.v + self.test_offsets[j - 1] + (w - 1)

    def cc_contrast(self, i: int, i_star: int) -> np.ndarray:
        """Coefficients of control i minus control i* over (controls, tests)."""
        c = np.zeros(self.design.v + self.n_tests)
        c[i - 1] = 1.0
        c[i_star - 1] -= 1.0
        return c

    def tt_contrast(self, j: int, w: int, j_star: int, w_star: int) -> np.ndarray:
        """Coefficients of test (j, w) minus test (j*, w*)."""
        c = np.zeros(self.design.v + self.n_tests)
        c[self._test_pos(j, w)] = 1.0
        c[self._test_pos(j_star, w_star)] -= 1.0
        return c

    def ct_contrast(self, i: int, j: int, w: int) -> np.ndarray:
        """Coefficients of control i minus test (j, w)."""
        c = np.zeros(self.design.v + self.n_tests)
        c[i - 1] = 1.0
        c[self._test_pos(j, w)] -= 1.0
        return c


def _components(d: BlockDesign) -> tuple[list[int], list[int], int]:
    """Component labels for blocks and controls of the incidence graph;
    a control that appears nowhere forms its own component."""
    parent = list(range(d.b + d.v))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, block in enumerate(d.blocks):
        for label in set(block):
            ra, rb = find(j), find(d.b + label - 1)
            if ra != rb:
                parent[ra] = rb
    roots: dict[int, int] = {}
    comp = [roots.setdefault(find(node), len(roots)) for node in range(d.b + d.v)]
    return comp[: d.b], comp[d.b :], len(roots)


def _null_basis(d: BlockDesign, counts: tuple[int, ...]) -> np.ndarray:
    """Orthonormal basis of the null space of the information matrix."""
    b, v = d.b, d.v
    total = sum(counts)
    p = b + v + total
    offsets = [0]
    for c in counts[:-1]:
        offsets.append(offsets[-1] + c)
    comp_block, comp_control, n_comp = _components(d)
    cols = []
    for comp in range(n_comp):
        vec = np.zeros(p)
        for j in range(b):
            if comp_block[j] == comp:
                vec[j] = 1.0
                start = b + v + offsets[j]
                vec[start : start + counts[j]] = -1.0
        for i in range(v):
            if comp_control[i] == comp:
                vec[b + i] = -1.0
        cols.append(vec / math.sqrt(float(vec @ vec)))
    return np.column_stack(cols)


def build_model(
    d: BlockDesign, aug: AugmentationSpec, max_plots: int = DEFAULT_PLOT_CAP
) -> AugmentedModel:
    """Assemble the plot-level model matrix and pseudo-invert X^T X."""
    counts = aug.counts(d.b)
    total = sum(counts)
    n_plots = sum(d.block_sizes) + total
    if n_plots > max_plots:
        raise InvalidParameters(f"model would need {n_plots} plots, cap is {max_plots}")
    b, v = d.b, d.v
    p = b + v + total
    offsets = [0]
    for c in counts[:-1]:
        offsets.append(offsets[-1] + c)
    x = np.zeros((n_plots, p))
    row = 0
    for j, block in enumerate(d.blocks):
        for label in block:
            x[row, j] = 1.0
            x[row, b + label - 1] = 1.0
            row += 1
        for w in range(counts[j]):
            x[row, j] = 1.0
            x[row, b + v + offsets[j] + w] = 1.0
            row += 1
    info = x.T @ x
    basis = _null_basis(d, counts)
    shift = basis @ basis.T
    pinv = invert(SymMatrix(info + shift)).a - shift
    return AugmentedModel(
        design=d,
        aug=aug,
        x=x,
        info=0.5 * (info + info.T),
        info_pinv=0.5 * (pinv + pinv.T),
        test_offsets=tuple(offsets),
    )


def gls_variance(m: AugmentedModel, contrast) -> float:
    """Exact variance multiplier of a treatment contrast, in sigma^2 units.

    `contrast` holds one coefficient per control followed by one per test
    treatment (blockwise); block effects are nuisance and implicitly carry
    zero. Raises NotEstimable when the contrast is outside the row space
    of the model matrix.
    """
    c = np.asarray(contrast, dtype=float)
    b = m.design.b
    expected = m.x.shape[1] - b
    if c.shape != (expected,):
        raise DimensionMismatch(f"expected {expected} coefficients, got shape {c.shape}")
    full = np.concatenate([np.zeros(b), c])
    solved = m.info_pinv @ full
    residual = float(np.max(np.abs(m.info @ solved - full)))
    if residual > ESTIMABLE_TOL:
        raise NotEstimable(f"contrast not estimable (projection residual {residual:.3e})")
    return float(full @ solved)


@dataclass(frozen=True)
class VerificationReport:
    """Worst absolute gaps between closed-form and GLS variances."""

    max_dev_cc: float
    max_dev_tt_same: float
    max_dev_tt_cross: float
    max_dev_ct: float
    n_contrasts: int

    @property
    def max_deviation(self) -> float:
        return max(self.max_dev_cc, self.max_dev_tt_same, self.max_dev_tt_cross, self.max_dev_ct)


def verify_design(
    d: BlockDesign, aug: AugmentationSpec, max_plots: int = DEFAULT_PLOT_CAP
) -> VerificationReport:
    """Compare every cc, tt and ct contrast variance of the closed forms
    against the plot-level GLS value; same-block test pairs are checked
    against the constant 2."""
    ib = criteria.intrablock(d)
    model = build_model(d, aug, max_plots=max_plots)
    counts = aug.counts(d.b)
    dev_cc = dev_tt_same = dev_tt_cross = dev_ct = 0.0
    n = 0
    for i in range(1, d.v + 1):
        for i_star in range(i + 1, d.v + 1):
            got = gls_variance(model, model.cc_contrast(i, i_star))
            dev_cc = max(dev_cc, abs(got - criteria.v_cc(ib, i, i_star)))
            n += 1
    tests = [(j, w) for j in range(1, d.b + 1) for w in range(1, counts[j - 1] + 1)]
    for a_idx in range(len(tests)):
        for b_idx in range(a_idx + 1, len(tests)):
            j, w = tests[a_idx]
            j_star, w_star = tests[b_idx]
            got = gls_variance(model, model.tt_contrast(j, w, j_star, w_star))
            if j == j_star:
                dev_tt_same = max(dev_tt_same, abs(got - 2.0))
            else:
                dev_tt_cross = max(dev_tt_cross, abs(got - (2.0 + criteria.v_tt(ib, j, j_star))))
            n += 1
    for i in range(1, d.v + 1):
        for j, w in tests:
            got = gls_variance(model, model.ct_contrast(i, j, w))
            dev_ct = max(dev_ct, abs(got - criteria.v_ct(ib, d, i, j)))
            n += 1
    return VerificationReport(dev_cc, dev_tt_same, dev_tt_cross, dev_ct, n)


def enumerate_class(
    b: int, v: int, k: int, connected_only: bool = False, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[BlockDesign]:
    """Yield every design with b blocks of size k on v treatments.

    Blocks are k-multisets over 1..v and a design is a multiset of such
    blocks, so non-binary and non-equireplicate designs are included and
    each design appears exactly once.
    """
    if b < 1 or v < 1 or k < 1:
        raise InvalidParameters(f"need b, v, k >= 1; got ({b}, {v}, {k})")
    n_blocks = math.comb(v + k - 1, k)
    if n_blocks > cap:
        raise ClassTooLarge(f"{n_blocks} candidate blocks exceed the cap {cap}")
    n_designs = math.comb(n_blocks + b - 1, b)
    if n_designs > cap:
        raise ClassTooLarge(f"{n_designs} designs exceed the cap {cap}")
    pool = list(itertools.combinations_with_replacement(range(1, v + 1), k))
    for chosen in itertools.combinations_with_replacement(pool, b):
        d = BlockDesign(v, chosen)
        if connected_only and not is_connected(d):
            continue
        yield d


@dataclass(frozen=True)
class ClassMinima:
    """Exact criterion minima over the connected designs of one class."""

    b: int
    v: int
    k: int
    n_designs: int
    n_connected: int
    minima: dict[str, float]
    argmin: dict[str, BlockDesign]


def class_minima(
    b: int, v: int, k: int, aug: AugmentationSpec, cap: int = DEFAULT_ENUM_CAP
) -> ClassMinima:
    """Minimize all six criteria over the connected designs of a class,
    recording one minimizing design per criterion."""
    best: dict[str, float] = {}
    arg: dict[str, BlockDesign] = {}
    n_raw = 0
    n_connected = 0
    for d in enumerate_class(b, v, k, cap=cap):
        n_raw += 1
        if not is_connected(d):
            continue
        n_connected += 1
        ib = criteria.intrablock(d)
        values = criteria.a_criteria(ib, d, aug) + criteria.mv_criteria(ib, d)
        for name, value in zip(CRITERION_NAMES, values):
            if name not in best or value < best[name]:
                best[name] = value
                arg[name] = d
    return ClassMinima(b, v, k, n_raw, n_connected, best, arg)
