"""Behaviors: validation, marginals, no-signaling, postselection, mixing, permutations"""

import itertools
from fractions import Fraction

import pytest

from bell import TRIPARTITE_BINARY, evaluate, gyni
from core import (deterministic_behavior, group_parties, is_nonsignaling, marginal, mix,
                  party_marginal, permute_parties, postselect, product, relabel, require_valid,
                  uniform, validate)
from errors import (BadWeights, IncompatibleScenario, IndexOutOfRange, InvalidBehavior,
                    MissingEntry, ScenarioMismatch, SignalingInput, ZeroProbabilityOutcome)
from models import Behavior, DeterministicStrategy, IssueKind, Scenario
from reference_data import two_way_signaling_pair
from strategies import enumerate_local_deterministic

SINGLE = Scenario((2,), (2,))


def single(*values):
    return Behavior.from_vector(SINGLE, [Fraction(v) for v in values])


def with_entry(behavior, entry, value):
    table = dict(behavior.table)
    table[entry] = Fraction(value)
    return Behavior(behavior.scenario, table)


# --- validate ------------------------------------------------------------------


def test_uniform_box_is_valid(uniform_box):
    assert validate(uniform_box).ok
    assert set(uniform_box.table.values()) == {Fraction(1, 8)}


def test_gyni_box_is_valid(gyni_box):
    assert validate(gyni_box).ok


def test_modified_entry_breaks_normalization_of_its_row(gyni_box):
    broken = with_entry(gyni_box, ((0, 0, 0), (0, 0, 0)), '1/2')
    report = validate(broken)
    assert not report.ok
    assert [(i.kind, i.inputs, i.value) for i in report.issues] == \
        [(IssueKind.NORMALIZATION, (0, 0, 0), Fraction(5, 6))]


def test_negative_entry_is_reported(uniform_box):
    broken = with_entry(uniform_box, ((1, 1, 1), (0, 0, 0)), '-1/8')
    kinds = {i.kind for i in validate(broken).issues}
    assert kinds == {IssueKind.NEGATIVE, IssueKind.NORMALIZATION}
    with pytest.raises(InvalidBehavior):
        require_valid(broken)


def test_partial_table_raises_missing_entry(gyni_box):
    table = dict(gyni_box.table)
    del table[((1, 0, 1), (1, 1, 0))]
    with pytest.raises(MissingEntry):
        validate(Behavior(gyni_box.scenario, table))


# --- marginals -----------------------------------------------------------------


def test_marginal_of_third_party(gyni_box):
    assert marginal(gyni_box, (2,), (0,), (0, 0)) == {(0,): Fraction(2, 3), (1,): Fraction(1, 3)}


def test_uniform_pair_marginals(uniform_box):
    for kept_inputs in itertools.product(range(2), repeat=2):
        result = marginal(uniform_box, (0, 1), kept_inputs, (1,))
        assert set(result.values()) == {Fraction(1, 4)}


def test_pair_marginal_ignores_dropped_input(gyni_box):
    assert marginal(gyni_box, (1, 2), (1, 1), (0,)) == marginal(gyni_box, (1, 2), (1, 1), (1,))


def test_marginal_rejects_out_of_range_input(gyni_box):
    with pytest.raises(IndexOutOfRange):
        marginal(gyni_box, (0,), (2,), (0, 0))


def test_marginals_are_input_independent_everywhere(gyni_box):
    for size in (1, 2):
        for kept in itertools.combinations(range(3), size):
            for kept_inputs in itertools.product(range(2), repeat=size):
                maps = [marginal(gyni_box, kept, kept_inputs, dropped)
                        for dropped in itertools.product(range(2), repeat=3 - size)]
                assert all(m == maps[0] for m in maps)
                assert sum(maps[0].values()) == 1


# --- no-signaling ----------------------------------------------------------------


def test_gyni_box_is_nonsignaling(gyni_box):
    assert is_nonsignaling(gyni_box) == []


def test_two_way_signaling_pair_is_caught():
    trivial = Behavior.from_vector(Scenario((1,), (2,)), [1, 0])
    embedded = product([trivial, two_way_signaling_pair()])
    violations = is_nonsignaling(embedded)
    assert violations
    assert any(v.parties == (1,) for v in violations)
    assert all(v.reference_value != v.conflicting_value for v in violations)


def test_deterministic_product_points_are_nonsignaling():
    for point in itertools.islice(enumerate_local_deterministic(TRIPARTITE_BINARY), 0, 64, 7):
        assert is_nonsignaling(deterministic_behavior(TRIPARTITE_BINARY, point)) == []


# --- postselection -----------------------------------------------------------------


def test_postselect_gyni_box_on_third_party(gyni_box):
    result = postselect(gyni_box, 2, 0, 0)
    assert result.scenario == Scenario((2, 2), (2, 2))
    assert result.probability((0, 0), (0, 0)) == 1
    assert result.probability((0, 1), (0, 0)) == Fraction(1, 2)
    assert result.probability((0, 1), (0, 1)) == Fraction(1, 2)
    assert result.probability((1, 1), (1, 0)) == Fraction(1, 4)
    assert validate(result).ok


def test_postselect_uniform_gives_uniform_pair(uniform_box):
    result = postselect(uniform_box, 2, 0, 0)
    assert result == uniform(Scenario((2, 2), (2, 2)))


def test_postselect_on_impossible_outcome():
    zero = DeterministicStrategy(2, (0, 0))
    box = deterministic_behavior(TRIPARTITE_BINARY, (zero, zero, zero))
    with pytest.raises(ZeroProbabilityOutcome):
        postselect(box, 2, 0, 1)


def test_postselect_on_signaling_party_is_rejected():
    trivial = Behavior.from_vector(Scenario((1,), (2,)), [1, 0])
    embedded = product([trivial, two_way_signaling_pair()])
    with pytest.raises(SignalingInput):
        postselect(embedded, 2, 0, 0)


def test_party_marginal_of_gyni_box(gyni_box):
    assert party_marginal(gyni_box, 0, 1) == {0: Fraction(1, 2), 1: Fraction(1, 2)}


# --- mixing --------------------------------------------------------------------


def test_mix_identity(gyni_box):
    assert mix([gyni_box], [1]) == gyni_box


def test_mixing_all_deterministic_points_gives_uniform(uniform_box):
    points = [deterministic_behavior(TRIPARTITE_BINARY, p)
              for p in enumerate_local_deterministic(TRIPARTITE_BINARY)]
    assert len(points) == 64
    assert mix(points, [Fraction(1, 64)] * 64) == uniform_box


def test_mix_is_linear_under_gyni(gyni_box, uniform_box):
    assert evaluate(gyni(), mix([gyni_box, uniform_box], ['1/2', '1/2'])) == Fraction(5, 6)


def test_mix_rejects_bad_weights(gyni_box, uniform_box):
    with pytest.raises(BadWeights):
        mix([gyni_box, uniform_box], [Fraction(2, 3), Fraction(2, 3)])
    with pytest.raises(BadWeights):
        mix([gyni_box, uniform_box], [Fraction(3, 2), Fraction(-1, 2)])


def test_mix_rejects_mixed_scenarios(gyni_box):
    with pytest.raises(ScenarioMismatch):
        mix([gyni_box, uniform(Scenario((2, 2), (2, 2)))], ['1/2', '1/2'])


# --- permutations, products and relabelings --------------------------------------


def test_gyni_box_is_permutation_invariant(gyni_box):
    for permutation in itertools.permutations(range(3)):
        assert permute_parties(gyni_box, permutation) == gyni_box


def test_swapping_product_factors():
    p1, p2, p3 = single(1, 0, '1/3', '2/3'), single('1/2', '1/2', '1/4', '3/4'), single(1, 0, 0, 1)
    assert permute_parties(product([p1, p2, p3]), (1, 0, 2)) == product([p2, p1, p3])
    assert permute_parties(product([p1, p2, p3]), (0, 1, 2)) == product([p1, p2, p3])


def test_permutation_carries_unequal_arities():
    box = uniform(Scenario((2, 3), (3, 2)))
    swapped = permute_parties(box, (1, 0))
    assert swapped.scenario == Scenario((3, 2), (2, 3))
    assert swapped != box
    assert permute_parties(swapped, (1, 0)) == box


def test_non_permutation_is_rejected(gyni_box):
    with pytest.raises(IncompatibleScenario):
        permute_parties(gyni_box, (0, 0, 1))


def test_grouping_keeps_first_member_most_significant(gyni_box):
    grouped = group_parties(gyni_box, [(0,), (1, 2)])
    assert grouped.scenario == Scenario((2, 4), (2, 4))
    assert grouped.probability((0, 1), (0, 1)) == gyni_box.probability((0, 0, 1), (0, 0, 1))
    assert grouped.probability((1, 2), (1, 2)) == gyni_box.probability((1, 1, 0), (1, 1, 0))
    assert is_nonsignaling(grouped) == []


def test_relabeling_preserves_validity_and_no_signaling(gyni_box, rng):
    from conftest import random_relabeling
    for _ in range(10):
        input_perms, output_maps = random_relabeling(rng, gyni_box.scenario)
        relabeled = relabel(gyni_box, input_perms, output_maps)
        assert validate(relabeled).ok
        assert is_nonsignaling(relabeled) == []


def test_relabeling_flips_outputs(uniform_box, gyni_box):
    flip = [[[1, 0], [1, 0]]] * 3
    keep = [[0, 1]] * 3
    flipped = relabel(gyni_box, keep, flip)
    assert flipped.probability((0, 0, 0), (1, 1, 1)) == Fraction(2, 3)
    assert relabel(uniform_box, keep, flip) == uniform_box
