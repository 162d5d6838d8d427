"""Deterministic local and one-way signaling strategies"""

from fractions import Fraction

import pytest

from bell import BIPARTITE_BINARY, TRIPARTITE_BINARY
from core import permute_parties
from errors import IncompatibleScenario
from models import Behavior, DeterministicStrategy, Direction, OneWayPairStrategy, Scenario
from reference_data import backward_signaling_pair, forward_signaling_pair, two_way_signaling_pair
from strategies import (enumerate_local_deterministic, enumerate_oneway, enumerate_party,
                        oneway_count, pair_table_of, product_pair, swap_pair, validate_direction)


@pytest.mark.parametrize('scenario, count', [
    (TRIPARTITE_BINARY, 64),
    (BIPARTITE_BINARY, 16),
    (Scenario((1,), (2,)), 2),
    (Scenario((2, 3), (3, 2)), 9 * 8),
])
def test_local_deterministic_counts(scenario, count):
    points = list(enumerate_local_deterministic(scenario))
    assert len(points) == count == scenario.deterministic_count()
    assert len(set(points)) == count


def test_party_enumeration_is_lexicographic():
    assert [s.assignment for s in enumerate_party(2, 2)] == [(0, 0), (0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize('direction', list(Direction))
def test_oneway_counts(direction):
    strategies = list(enumerate_oneway(BIPARTITE_BINARY, direction))
    assert len(strategies) == 64 == oneway_count(BIPARTITE_BINARY)
    assert len(set(strategies)) == 64


def test_oneway_count_with_single_inputs():
    assert len(list(enumerate_oneway(Scenario((1, 1), (2, 2)), Direction.FORWARD))) == 4


def test_oneway_needs_two_parties():
    with pytest.raises(IncompatibleScenario):
        list(enumerate_oneway(TRIPARTITE_BINARY, Direction.FORWARD))


def test_forward_example_is_forward_signaling_pair():
    strategy = OneWayPairStrategy(Direction.FORWARD, (2, 2), (2, 2), (0, 1), (0, 1, 1, 0))
    table = pair_table_of(strategy)
    for y in range(2):
        for z in range(2):
            assert table.probability((y, z), (y, y ^ z)) == 1
    assert table == forward_signaling_pair()


def test_backward_example_is_backward_signaling_pair():
    strategy = OneWayPairStrategy(Direction.BACKWARD, (2, 2), (2, 2), (0, 1), (0, 1, 0, 1))
    table = pair_table_of(strategy)
    for y in range(2):
        for z in range(2):
            assert table.probability((y, z), (z, z)) == 1
    assert table == backward_signaling_pair()


def test_constant_strategy():
    strategy = OneWayPairStrategy(Direction.FORWARD, (2, 2), (2, 2), (0, 0), (0, 0, 0, 0))
    table = pair_table_of(strategy)
    assert all(table.probability(x, (0, 0)) == 1 for x in BIPARTITE_BINARY.input_tuples)


def test_signaling_pair_directions():
    assert validate_direction(forward_signaling_pair(), Direction.FORWARD)
    assert not validate_direction(forward_signaling_pair(), Direction.BACKWARD)
    assert validate_direction(backward_signaling_pair(), Direction.BACKWARD)
    assert not validate_direction(backward_signaling_pair(), Direction.FORWARD)
    assert not validate_direction(two_way_signaling_pair(), Direction.FORWARD)
    assert not validate_direction(two_way_signaling_pair(), Direction.BACKWARD)


@pytest.mark.parametrize('direction', list(Direction))
def test_enumerated_strategies_respect_their_direction(direction):
    tables = [pair_table_of(s) for s in enumerate_oneway(BIPARTITE_BINARY, direction)]
    assert all(validate_direction(t, direction) for t in tables)
    assert len(set(tables)) == 64


def test_product_pairs_signal_in_neither_direction():
    for sender_j in enumerate_party(2, 2):
        for sender_k in enumerate_party(2, 2):
            for direction in Direction:
                table = pair_table_of(product_pair(sender_j, sender_k, direction))
                assert validate_direction(table, Direction.FORWARD)
                assert validate_direction(table, Direction.BACKWARD)


def test_swap_pair_matches_party_swap():
    scenario = Scenario((2, 3), (2, 2))
    for direction in Direction:
        for strategy in list(enumerate_oneway(scenario, direction))[::37]:
            swapped = swap_pair(strategy)
            assert swapped.direction is not strategy.direction
            expected = permute_parties(pair_table_of(strategy), (1, 0))
            actual = pair_table_of(swapped)
            assert actual == expected
            assert swap_pair(swapped) == strategy


def test_pair_table_equals_plain_behavior_with_same_table():
    pair = forward_signaling_pair()
    plain = Behavior(pair.scenario, dict(pair.table))
    assert pair == plain
    assert plain == pair
    assert hash(pair) == hash(plain)
    assert len({pair, plain}) == 1
    assert pair != backward_signaling_pair()


def test_b_and_c_columns_follow_the_direction():
    forward = OneWayPairStrategy(Direction.FORWARD, (2, 2), (2, 2), (1, 0), (1, 1, 1, 0))
    backward = OneWayPairStrategy(Direction.BACKWARD, (2, 2), (2, 2), (1, 1), (1, 1, 1, 0))
    assert (forward.b, forward.c) == ((1, 0), (1, 1, 1, 0))
    assert (backward.b, backward.c) == ((1, 1, 1, 0), (1, 1))
    assert backward.respond(1, 1) == (0, 1)
    assert pair_table_of(backward).probability((1, 1), (0, 1)) == Fraction(1)


def test_deterministic_strategy_is_callable():
    strategy = DeterministicStrategy(3, (2, 0, 1))
    assert [strategy(x) for x in range(3)] == [2, 0, 1]
    assert strategy.inputs == 3
