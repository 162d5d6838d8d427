"""
TOBL Correlation Toolkit - Strategies Module
Enumerates deterministic local strategies and one-way signaling pair strategies
"""

import itertools
from typing import Iterator, Tuple

from core import complement, marginal
from errors import IncompatibleScenario
from models import (ONE, ZERO, DeterministicStrategy, Direction, OneWayPairStrategy,
                    PairTable, Scenario)


def enumerate_party(inputs: int, outputs: int) -> Iterator[DeterministicStrategy]:
    """All d^m assignments of one party, lexicographic"""
    for assignment in itertools.product(range(outputs), repeat=inputs):
        yield DeterministicStrategy(outputs, assignment)


def enumerate_local_deterministic(scenario: Scenario) -> Iterator[Tuple[DeterministicStrategy, ...]]:
    """Every product strategy once; first party varies slowest"""
    per_party = [list(enumerate_party(m, d)) for m, d in zip(scenario.inputs, scenario.outputs)]
    return itertools.product(*per_party)


def _require_pair(scenario: Scenario) -> None:
    if scenario.parties != 2:
        raise IncompatibleScenario(f"one-way strategies need a two-party scenario, got {scenario}")


def enumerate_oneway(scenario: Scenario, direction: Direction) -> Iterator[OneWayPairStrategy]:
    """
    Deterministic strategies signaling at most in `direction`.

    Sender assignment varies slowest, then the receiver's joint table.
    """
    _require_pair(scenario)
    (m_j, m_k), (d_j, d_k) = scenario.inputs, scenario.outputs
    if direction is Direction.FORWARD:
        sender_shape, receiver_out = (m_j, d_j), d_k
    else:
        sender_shape, receiver_out = (m_k, d_k), d_j
    for sender in itertools.product(range(sender_shape[1]), repeat=sender_shape[0]):
        for receiver in itertools.product(range(receiver_out), repeat=m_j * m_k):
            yield OneWayPairStrategy(direction, (m_j, m_k), (d_j, d_k), sender, receiver)


def oneway_count(scenario: Scenario) -> int:
    """Strategies per direction (equal for both only when the parties match)"""
    (m_j, m_k), (d_j, d_k) = scenario.inputs, scenario.outputs
    return d_j ** m_j * d_k ** (m_j * m_k)


def pair_table_of(strategy: OneWayPairStrategy) -> PairTable:
    scenario = Scenario(strategy.inputs, strategy.outputs)
    table = {}
    for x, a in scenario.entries:
        table[(x, a)] = ONE if strategy.respond(*x) == a else ZERO
    return PairTable(scenario, table)


def validate_direction(table: PairTable, direction: Direction) -> bool:
    """True iff the sender's marginal ignores the receiver's input, exactly"""
    scenario = table.scenario
    _require_pair(scenario)
    sender = 0 if direction is Direction.FORWARD else 1
    receiver = complement(scenario, (sender,))
    for x_s in range(scenario.inputs[sender]):
        reference = None
        for x_r in range(scenario.inputs[receiver[0]]):
            current = marginal(table, (sender,), (x_s,), (x_r,))
            if reference is None:
                reference = current
            elif current != reference:
                return False
    return True


def product_pair(sender_j: DeterministicStrategy, sender_k: DeterministicStrategy,
                 direction: Direction) -> OneWayPairStrategy:
    """Non-signaling product response expressed as a one-way strategy"""
    m_j, m_k = sender_j.inputs, sender_k.inputs
    inputs, outputs = (m_j, m_k), (sender_j.outputs, sender_k.outputs)
    if direction is Direction.FORWARD:
        receiver = tuple(sender_k(z) for y in range(m_j) for z in range(m_k))
        return OneWayPairStrategy(direction, inputs, outputs, sender_j.assignment, receiver)
    receiver = tuple(sender_j(y) for y in range(m_j) for z in range(m_k))
    return OneWayPairStrategy(direction, inputs, outputs, sender_k.assignment, receiver)


def swap_pair(strategy: OneWayPairStrategy) -> OneWayPairStrategy:
    """Re-express with the two parties' order exchanged; the direction flips"""
    m_j, m_k = strategy.inputs
    transposed = tuple(strategy.receiver[y * m_k + z] for z in range(m_k) for y in range(m_j))
    flipped = Direction.BACKWARD if strategy.direction is Direction.FORWARD else Direction.FORWARD
    return OneWayPairStrategy(flipped, (m_k, m_j), (strategy.outputs[1], strategy.outputs[0]),
                              strategy.sender, transposed)
