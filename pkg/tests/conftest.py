"""Shared fixtures: deterministic corpora of small connected designs."""

import random

import pytest

from augdes import (
    AugmentationSpec,
    BlockDesign,
    all_k_subsets,
    dual,
    from_blocks,
    is_connected,
    lattice_bib,
)

CORPUS_SEED = 20240601


def random_connected_design(rng, b, v, k, attempts=1000):
    for _ in range(attempts):
        blocks = tuple(
            tuple(sorted(rng.randrange(1, v + 1) for _ in range(k))) for _ in range(b)
        )
        d = BlockDesign(v, blocks)
        if is_connected(d):
            return d
    return None


def build_corpus(seed=CORPUS_SEED, size=60):
    """Connected designs with bk + S <= 40: binary and non-binary,
    equireplicate and not, with common and per-block test counts."""
    rng = random.Random(seed)
    corpus = []
    while len(corpus) < size:
        b = rng.randint(2, 6)
        v = rng.randint(2, 6)
        k = rng.randint(2, 4)
        # a connected incidence graph needs at least v + b - 1 edges
        if b * k > 30 or b * k < v + b - 1:
            continue
        if rng.random() < 0.5:
            aug = AugmentationSpec.common(rng.randint(1, 3))
        else:
            aug = AugmentationSpec.per_block([rng.randint(1, 3) for _ in range(b)])
        if b * k + aug.total(b) > 40:
            continue
        d = random_connected_design(rng, b, v, k)
        if d is not None:
            corpus.append((d, aug))
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


def equireplicate_designs():
    """Hand-picked equireplicate designs of varied shape."""
    cycle4 = from_blocks(4, [[1, 2], [2, 3], [3, 4], [1, 4]])
    return [
        all_k_subsets(5, 3),
        all_k_subsets(4, 2),
        lattice_bib(2),
        lattice_bib(3),
        lattice_bib(5),
        dual(lattice_bib(2)),
        dual(lattice_bib(5)),
        cycle4,
    ]


@pytest.fixture(scope="session")
def equireplicate_corpus():
    return equireplicate_designs()
