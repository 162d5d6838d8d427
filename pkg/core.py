"""
TOBL Correlation Toolkit - Core Module
Exact-rational behaviors: validation, marginals, no-signaling, postselection,
mixing, party permutation and relabeling
"""

import itertools
import logging
from fractions import Fraction
from functools import reduce
from operator import mul
from typing import Dict, List, Sequence, Tuple

from errors import (BadWeights, IncompatibleScenario, IndexOutOfRange, InvalidBehavior,
                    MissingEntry, ScenarioMismatch, SignalingInput, ZeroProbabilityOutcome)
from models import (ONE, ZERO, Behavior, DeterministicStrategy, InputTuple, IssueKind,
                    NsViolation, OutputTuple, Scenario, ValidationIssue, ValidationReport,
                    radix_index)

logger = logging.getLogger(__name__)


def validate(behavior: Behavior) -> ValidationReport:
    """Check nonnegativity and exact normalization of every input row"""
    scenario = behavior.scenario
    table = behavior.table
    missing = [entry for entry in scenario.entries if entry not in table]
    if missing:
        x, a = missing[0]
        raise MissingEntry(f"table is not total: {len(missing)} entries missing, first ({x} | {a})")
    if len(table) != len(scenario.entries):
        raise IndexOutOfRange(f"table has entries outside scenario {scenario}")

    issues = []
    for x in scenario.input_tuples:
        row_sum = ZERO
        for a in scenario.output_tuples:
            value = table[(x, a)]
            if value < 0:
                issues.append(ValidationIssue(IssueKind.NEGATIVE, x, a, value))
            row_sum += value
        if row_sum != 1:
            issues.append(ValidationIssue(IssueKind.NORMALIZATION, x, None, row_sum))
    return ValidationReport(tuple(issues))


def require_valid(behavior: Behavior) -> None:
    report = validate(behavior)
    if not report.ok:
        raise InvalidBehavior("; ".join(issue.describe() for issue in report.issues[:3]))


def _check_parties(scenario: Scenario, parties: Sequence[int]) -> Tuple[int, ...]:
    parties = tuple(parties)
    if len(set(parties)) != len(parties) or any(not 0 <= p < scenario.parties for p in parties):
        raise IndexOutOfRange(f"parties {parties} not a subset of 0..{scenario.parties - 1}")
    return parties


def _check_inputs(scenario: Scenario, parties: Tuple[int, ...], inputs: Sequence[int]) -> Tuple[int, ...]:
    inputs = tuple(inputs)
    if len(inputs) != len(parties):
        raise IndexOutOfRange(f"expected {len(parties)} inputs for parties {parties}, got {inputs}")
    for party, x in zip(parties, inputs):
        if not 0 <= x < scenario.inputs[party]:
            raise IndexOutOfRange(f"input {x} out of range for party {party}")
    return inputs


def _assemble(n: int, first: Tuple[int, ...], first_values: Sequence[int],
              second: Tuple[int, ...], second_values: Sequence[int]) -> Tuple[int, ...]:
    full = [0] * n
    for p, v in zip(first, first_values):
        full[p] = v
    for p, v in zip(second, second_values):
        full[p] = v
    return tuple(full)


def complement(scenario: Scenario, parties: Sequence[int]) -> Tuple[int, ...]:
    return tuple(p for p in range(scenario.parties) if p not in parties)


def marginal(behavior: Behavior, kept_parties: Sequence[int], kept_inputs: Sequence[int],
             dropped_inputs: Sequence[int]) -> Dict[OutputTuple, Fraction]:
    """Sum over the dropped parties' outputs at fully specified inputs"""
    scenario = behavior.scenario
    kept = _check_parties(scenario, kept_parties)
    dropped = complement(scenario, kept)
    kept_inputs = _check_inputs(scenario, kept, kept_inputs)
    dropped_inputs = _check_inputs(scenario, dropped, dropped_inputs)
    x = _assemble(scenario.parties, kept, kept_inputs, dropped, dropped_inputs)

    result: Dict[OutputTuple, Fraction] = {
        a_kept: ZERO for a_kept in itertools.product(*(range(scenario.outputs[p]) for p in kept))}
    for a in scenario.output_tuples:
        key = tuple(a[p] for p in kept)
        result[key] += behavior.probability(x, a)
    return result


def proper_subsets(n: int) -> List[Tuple[int, ...]]:
    return [subset for size in range(1, n) for subset in itertools.combinations(range(n), size)]


def is_nonsignaling(behavior: Behavior) -> List[NsViolation]:
    """Empty list iff every proper party subset has input-independent marginals"""
    require_valid(behavior)
    scenario = behavior.scenario
    violations: List[NsViolation] = []
    for subset in proper_subsets(scenario.parties):
        others = complement(scenario, subset)
        other_inputs = list(itertools.product(*(range(scenario.inputs[p]) for p in others)))
        for kept_inputs in itertools.product(*(range(scenario.inputs[p]) for p in subset)):
            reference_inputs = other_inputs[0]
            reference = marginal(behavior, subset, kept_inputs, reference_inputs)
            for conflicting_inputs in other_inputs[1:]:
                current = marginal(behavior, subset, kept_inputs, conflicting_inputs)
                for outputs, value in reference.items():
                    if current[outputs] != value:
                        violations.append(NsViolation(
                            subset, kept_inputs, outputs, reference_inputs,
                            conflicting_inputs, value, current[outputs]))
    if violations:
        logger.debug(f"{len(violations)} no-signaling violations found")
    return violations


def party_marginal(behavior: Behavior, party: int, x: int) -> Dict[int, Fraction]:
    """P(a_party | x_party), requiring independence from every other input"""
    scenario = behavior.scenario
    _check_parties(scenario, (party,))
    _check_inputs(scenario, (party,), (x,))
    others = complement(scenario, (party,))
    reference = None
    for dropped in itertools.product(*(range(scenario.inputs[p]) for p in others)):
        current = marginal(behavior, (party,), (x,), dropped)
        if reference is None:
            reference = current
        elif current != reference:
            raise SignalingInput(
                f"marginal of party {party} at input {x} depends on other inputs ({dropped})")
    return {a[0]: value for a, value in reference.items()}


def postselect(behavior: Behavior, party: int, sel_input: int, sel_outcome: int) -> Behavior:
    """Condition on party observing sel_outcome for sel_input"""
    require_valid(behavior)
    scenario = behavior.scenario
    if scenario.parties < 2:
        raise IncompatibleScenario("postselection needs at least two parties")
    _check_parties(scenario, (party,))
    if not 0 <= sel_outcome < scenario.outputs[party]:
        raise IndexOutOfRange(f"outcome {sel_outcome} out of range for party {party}")
    selected = party_marginal(behavior, party, sel_input)[sel_outcome]
    if selected == 0:
        raise ZeroProbabilityOutcome(
            f"P({sel_outcome}|{sel_input}) = 0 for party {party}")

    rest = complement(scenario, (party,))
    reduced = scenario.restrict(rest)
    table = {}
    for x_rest, a_rest in reduced.entries:
        x = _assemble(scenario.parties, rest, x_rest, (party,), (sel_input,))
        a = _assemble(scenario.parties, rest, a_rest, (party,), (sel_outcome,))
        table[(x_rest, a_rest)] = behavior.probability(x, a) / selected
    return Behavior(reduced, table)


def mix(behaviors: Sequence[Behavior], weights: Sequence[Fraction]) -> Behavior:
    """Entrywise convex combination"""
    if not behaviors or len(behaviors) != len(weights):
        raise BadWeights(f"{len(behaviors)} behaviors with {len(weights)} weights")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise BadWeights(f"weights {[str(w) for w in weights]} are not a probability vector")
    scenario = behaviors[0].scenario
    if any(b.scenario != scenario for b in behaviors):
        raise ScenarioMismatch("cannot mix behaviors of different scenarios")
    table = {}
    for entry in scenario.entries:
        table[entry] = sum((w * b.table[entry] for b, w in zip(behaviors, weights)), ZERO)
    return Behavior(scenario, table)


def check_permutation(permutation: Sequence[int], n: int) -> Tuple[int, ...]:
    permutation = tuple(permutation)
    if sorted(permutation) != list(range(n)):
        raise IncompatibleScenario(f"{permutation} is not a permutation of 0..{n - 1}")
    return permutation


def permute_entry(permutation: Tuple[int, ...], x: InputTuple, a: OutputTuple):
    """New party q holds old party permutation[q]"""
    return (tuple(x[p] for p in permutation), tuple(a[p] for p in permutation))


def permute_parties(behavior: Behavior, permutation: Sequence[int]) -> Behavior:
    """Relabel parties; new party q is old party permutation[q].

    The scenario is permuted along with the table, so unequal arities are
    accepted and the result lives on the permuted scenario. A permuted box on
    unequal arities therefore never equals the original. Only a sequence that
    is not a permutation of 0..n-1 raises IncompatibleScenario.
    """
    scenario = behavior.scenario
    permutation = check_permutation(permutation, scenario.parties)
    table = {permute_entry(permutation, x, a): value for (x, a), value in behavior.table.items()}
    return Behavior(scenario.restrict(permutation), table)


def uniform(scenario: Scenario) -> Behavior:
    value = Fraction(1, len(scenario.output_tuples))
    return Behavior(scenario, {entry: value for entry in scenario.entries})


def deterministic_behavior(scenario: Scenario, strategies: Sequence[DeterministicStrategy]) -> Behavior:
    if len(strategies) != scenario.parties:
        raise ScenarioMismatch(f"{len(strategies)} strategies for {scenario.parties} parties")
    table = {}
    for x, a in scenario.entries:
        hit = all(s(xi) == ai for s, xi, ai in zip(strategies, x, a))
        table[(x, a)] = ONE if hit else ZERO
    return Behavior(scenario, table)


def product(behaviors: Sequence[Behavior]) -> Behavior:
    """Independent boxes side by side: P1 (x) P2 (x) ..."""
    scenario = Scenario(tuple(m for b in behaviors for m in b.scenario.inputs),
                        tuple(d for b in behaviors for d in b.scenario.outputs))
    offsets = list(itertools.accumulate([0] + [b.scenario.parties for b in behaviors]))
    table = {}
    for x, a in scenario.entries:
        value = ONE
        for b, lo, hi in zip(behaviors, offsets, offsets[1:]):
            value *= b.table[(x[lo:hi], a[lo:hi])]
            if value == 0:
                break
        table[(x, a)] = value
    return Behavior(scenario, table)


def group_parties(behavior: Behavior, groups: Sequence[Sequence[int]]) -> Behavior:
    """Merge each group into one composite party (first member most significant)"""
    scenario = behavior.scenario
    groups = [tuple(g) for g in groups]
    flat = [p for g in groups for p in g]
    if sorted(flat) != list(range(scenario.parties)) or any(not g for g in groups):
        raise IncompatibleScenario(f"groups {groups} do not partition the parties")
    input_sizes = [tuple(scenario.inputs[p] for p in g) for g in groups]
    output_sizes = [tuple(scenario.outputs[p] for p in g) for g in groups]
    grouped = Scenario(tuple(reduce(mul, s, 1) for s in input_sizes),
                       tuple(reduce(mul, s, 1) for s in output_sizes))
    table = {}
    for (x, a), value in behavior.table.items():
        gx = tuple(radix_index(tuple(x[p] for p in g), s) for g, s in zip(groups, input_sizes))
        ga = tuple(radix_index(tuple(a[p] for p in g), s) for g, s in zip(groups, output_sizes))
        table[(gx, ga)] = value
    return Behavior(grouped, table)


def relabel(behavior: Behavior, input_perms: Sequence[Sequence[int]],
            output_maps: Sequence[Sequence[Sequence[int]]]) -> Behavior:
    """
    Local relabeling: party i's input x becomes input_perms[i][x] and its
    output a (given old input x) becomes output_maps[i][x][a].
    """
    scenario = behavior.scenario
    if len(input_perms) != scenario.parties or len(output_maps) != scenario.parties:
        raise IncompatibleScenario("one input permutation and output map per party required")
    for i in range(scenario.parties):
        check_permutation(input_perms[i], scenario.inputs[i])
        if len(output_maps[i]) != scenario.inputs[i]:
            raise IncompatibleScenario(f"party {i} needs one output map per input")
        for perm in output_maps[i]:
            check_permutation(perm, scenario.outputs[i])
    table = {}
    for (x, a), value in behavior.table.items():
        new_x = tuple(input_perms[i][xi] for i, xi in enumerate(x))
        new_a = tuple(output_maps[i][xi][ai] for i, (xi, ai) in enumerate(zip(x, a)))
        table[(new_x, new_a)] = value
    return Behavior(scenario, table)
