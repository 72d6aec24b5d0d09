import pytest

from augdes.design import AugmentationSpec, format_design, is_connected
from augdes.errors import InvalidParameters, NoConnectedStart
from augdes.oracle import class_minima
from augdes.search import SearchConfig, exchange_search

ONE = AugmentationSpec.common(1)


def test_invalid_weights():
    with pytest.raises(InvalidParameters):
        SearchConfig(w_cc=0.0, w_tt=0.0, w_ct=0.0)
    with pytest.raises(InvalidParameters):
        SearchConfig(w_cc=-1.0, w_tt=1.0, w_ct=1.0)
    with pytest.raises(InvalidParameters):
        SearchConfig(w_cc=float("nan"), w_tt=1.0, w_ct=1.0)


def test_restarts_validated():
    with pytest.raises(InvalidParameters):
        SearchConfig(w_cc=1.0, w_tt=0.0, w_ct=0.0, restarts=0)


def test_no_connected_start():
    # two singleton blocks can never touch five treatments
    cfg = SearchConfig(w_cc=1.0, w_tt=1.0, w_ct=1.0, restarts=1)
    with pytest.raises(NoConnectedStart):
        exchange_search(2, 5, 1, cfg)


def test_result_is_connected_with_constant_block_size():
    cfg = SearchConfig(w_cc=1.0, w_tt=1.0, w_ct=1.0, restarts=3, rng_seed=11)
    result = exchange_search(5, 4, 3, cfg)
    assert is_connected(result.design)
    assert result.design.uniform_block_size() == 3
    assert result.design.b == 5


def test_traces_non_increasing():
    cfg = SearchConfig(w_cc=1.0, w_tt=1.0, w_ct=1.0, restarts=4, rng_seed=3)
    result = exchange_search(5, 4, 2, cfg)
    assert len(result.traces) == 4
    for trace in result.traces:
        assert all(later <= earlier for earlier, later in zip(trace, trace[1:]))
    assert result.objective == min(trace[-1] for trace in result.traces)


def test_deterministic_given_seed():
    cfg = SearchConfig(w_cc=1.0, w_tt=2.0, w_ct=0.5, restarts=3, rng_seed=99)
    first = exchange_search(4, 4, 2, cfg)
    second = exchange_search(4, 4, 2, cfg)
    assert first.design == second.design
    assert first.objective == second.objective
    assert first.traces == second.traces
    assert format_design(first.design) == format_design(second.design)


def test_matches_enumerated_minimum_for_cc_only():
    cfg = SearchConfig(w_cc=1.0, w_tt=0.0, w_ct=0.0, restarts=5, rng_seed=42)
    result = exchange_search(4, 3, 2, cfg)
    minimum = class_minima(4, 3, 2, ONE).minima["a_cc"]
    assert abs(result.objective - minimum) <= 1e-9


def test_per_block_objective_supported():
    cfg = SearchConfig(
        w_cc=1.0, w_tt=1.0, w_ct=1.0,
        aug=AugmentationSpec.per_block([1, 2, 1, 2]),
        restarts=2, rng_seed=5,
    )
    result = exchange_search(4, 3, 2, cfg)
    assert is_connected(result.design)
