"""
TOBL Correlation Toolkit - Bell Functionals
Probability-form Bell functionals: GYNI, CHSH, evaluation and symmetries
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from core import check_permutation, permute_entry
from errors import IndexOutOfRange, ScenarioMismatch
from models import (ONE, ZERO, Behavior, BellBound, BellFunctional, DeterministicStrategy,
                    Entry, Scenario)
from strategies import enumerate_local_deterministic

logger = logging.getLogger(__name__)

TRIPARTITE_BINARY = Scenario((2, 2, 2), (2, 2, 2))
BIPARTITE_BINARY = Scenario((2, 2), (2, 2))

# (outputs, inputs) of the four guessing events
GYNI_EVENTS = (((0, 0, 0), (0, 0, 0)),
               ((1, 1, 0), (0, 1, 1)),
               ((0, 1, 1), (1, 0, 1)),
               ((1, 0, 1), (1, 1, 0)))


def check_functional(functional: BellFunctional) -> BellFunctional:
    """Raise IndexOutOfRange if a coefficient key lies outside the scenario"""
    index = functional.scenario.entry_index
    for entry in functional.coefficients:
        if entry not in index:
            raise IndexOutOfRange(f"coefficient key {entry} outside scenario {functional.scenario}")
    return functional


def zero_functional(scenario: Scenario) -> BellFunctional:
    return BellFunctional(scenario, {})


def gyni() -> BellFunctional:
    """Guess-your-neighbor's-input: P(000|000)+P(110|011)+P(011|101)+P(101|110)"""
    coefficients = {(x, a): ONE for a, x in GYNI_EVENTS}
    return BellFunctional(TRIPARTITE_BINARY, coefficients, BellBound(ONE, "local and quantum"))


def chsh() -> BellFunctional:
    """Sum of (-1)^(a+b+xy) P(ab|xy), with its local bound found by enumeration"""
    coefficients = {}
    for (x, y), (a, b) in BIPARTITE_BINARY.entries:
        coefficients[((x, y), (a, b))] = Fraction(-1 if (a ^ b ^ (x & y)) else 1)
    functional = BellFunctional(BIPARTITE_BINARY, coefficients)
    bound = local_bound(functional)
    return BellFunctional(BIPARTITE_BINARY, coefficients, BellBound(bound, "local"))


def evaluate(functional: BellFunctional, behavior: Behavior) -> Fraction:
    if functional.scenario != behavior.scenario:
        raise ScenarioMismatch(
            f"functional on {functional.scenario} cannot evaluate behavior on {behavior.scenario}")
    return sum((c * behavior.probability(x, a) for (x, a), c in functional.coefficients.items()),
               ZERO)


def deterministic_value(functional: BellFunctional,
                        strategies: Sequence[DeterministicStrategy]) -> Fraction:
    """Value on the deterministic point given by one strategy per party"""
    total = ZERO
    for (x, a), c in functional.coefficients.items():
        if all(s(xi) == ai for s, xi, ai in zip(strategies, x, a)):
            total += c
    return total


def local_bound(functional: BellFunctional) -> Fraction:
    """Maximum over all deterministic product strategies"""
    return max(deterministic_value(functional, point)
               for point in enumerate_local_deterministic(functional.scenario))


def permute_functional(functional: BellFunctional, permutation: Sequence[int]) -> BellFunctional:
    """Functional F' with F'(permute_parties(P, permutation)) = F(P)"""
    scenario = functional.scenario
    permutation = check_permutation(permutation, scenario.parties)
    coefficients = {permute_entry(permutation, x, a): c
                    for (x, a), c in functional.coefficients.items()}
    return BellFunctional(scenario.restrict(permutation), coefficients, functional.bound)


def _support(coefficients: Dict[Entry, Fraction]) -> Dict[Entry, Fraction]:
    return {entry: c for entry, c in coefficients.items() if c}


def symmetry_group(functional: BellFunctional) -> List[Tuple[int, ...]]:
    """Party permutations leaving the scenario and every coefficient unchanged"""
    scenario = functional.scenario
    reference = _support(functional.coefficients)
    group = []
    for permutation in itertools.permutations(range(scenario.parties)):
        if scenario.restrict(permutation) != scenario:
            continue
        if _support(permute_functional(functional, permutation).coefficients) == reference:
            group.append(permutation)
    logger.debug(f"functional invariant under {len(group)} party permutations")
    return group
