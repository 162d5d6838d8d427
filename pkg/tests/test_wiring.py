"""Wirings of TOBL boxes across A|B and the local models they admit"""

import itertools
from fractions import Fraction

import pytest

import reference_data
from bell import TRIPARTITE_BINARY
from config import WIRING_CASES
from conftest import pr_box, random_local_model, random_protocol, random_tobl
from core import deterministic_behavior, group_parties, product, uniform
from errors import (BoxCountMismatch, DecompositionMismatch, NotTripartite, ProtocolInvalid,
                    SignalingBox, UnsupportedSplit)
from membership import is_local, local_to_tobl, reconstruct_local
from models import (Behavior, Bipartition, DeterministicStrategy, Direction, LocalModel, LocalTerm,
                    ProgramStep, Scenario, Side, SideProgram, WiringProtocol)
from wiring import (box_direction, box_split, check_wiring_locality, final_scenario,
                    local_model_from_tobl, simulate, simulate_in_order, validate_protocol)

ZERO_STRATEGY = DeterministicStrategy(2, (0, 0))


def passthrough(slots, box=0):
    """Query each slot with its own external input, output every outcome"""
    arities = (2,) * len(slots)
    externals = list(itertools.product(range(2), repeat=len(slots)))
    steps = tuple(
        ProgramStep(box, slot, {(e, o): e[n] for e in externals
                                for o in itertools.product(range(2), repeat=n)})
        for n, slot in enumerate(slots))
    outputs = {(e, o): o for e in externals for o in itertools.product(range(2), repeat=len(slots))}
    return SideProgram(arities, arities, steps, outputs)


def single_box_protocol(sides, order=None):
    slots_a = [s for s, side in enumerate(sides) if side is Side.A]
    slots_b = [s for s, side in enumerate(sides) if side is Side.B]
    if order is None:
        order = [(Side.A, n) for n in range(len(slots_a))] + [(Side.B, n) for n in range(len(slots_b))]
    return WiringProtocol(1, (tuple(sides),), passthrough(slots_a), passthrough(slots_b), tuple(order))


def zero_box():
    return deterministic_behavior(TRIPARTITE_BINARY, (ZERO_STRATEGY,) * 3)


def zero_decomposition():
    return local_to_tobl(LocalModel(TRIPARTITE_BINARY, (LocalTerm(Fraction(1), (ZERO_STRATEGY,) * 3),)))


def signaling_box():
    trivial = Behavior.from_vector(Scenario((2,), (2,)), [Fraction(1, 2)] * 4)
    return product([trivial, reference_data.two_way_signaling_pair()])


# --- simulation --------------------------------------------------------------------


def test_identity_wiring_groups_the_receivers(gyni_box):
    protocol = reference_data.identity_protocol()
    assert final_scenario(protocol) == Scenario((2, 4), (2, 4))
    assert simulate(protocol, [gyni_box]) == group_parties(gyni_box, [(0,), (1, 2)])


def test_passthrough_matches_identity(gyni_box):
    assert simulate(single_box_protocol((Side.A, Side.B, Side.B)), [gyni_box]) == \
        simulate(reference_data.identity_protocol(), [gyni_box])


def test_three_box_on_all_zero_boxes():
    p_fin = simulate(reference_data.three_box_protocol(), [zero_box()] * 3)
    assert p_fin.scenario == Scenario((2, 4), (2, 4))
    for x in p_fin.scenario.input_tuples:
        assert p_fin.probability(x, (0, 0)) == 1


def test_three_box_on_reference_boxes_is_a_distribution(gyni_box):
    p_fin = simulate(reference_data.three_box_protocol(), [gyni_box] * 3)
    for x in p_fin.scenario.input_tuples:
        assert sum(p_fin.probability(x, a) for a in p_fin.scenario.output_tuples) == 1


def test_simulation_ignores_interleaving(gyni_box, full_decomposition):
    protocol = reference_data.three_box_protocol()
    reordered = WiringProtocol(protocol.boxes, protocol.assignment, protocol.program_a,
                               protocol.program_b,
                               tuple([(Side.A, n) for n in range(3)] + [(Side.B, n) for n in range(6)]))
    boxes = [gyni_box] * 3
    assert simulate(reordered, boxes) == simulate(protocol, boxes)
    assert reconstruct_local(local_model_from_tobl(reordered, boxes, [full_decomposition] * 3)) == \
        simulate(protocol, boxes)



@pytest.mark.parametrize('order', [
    [(Side.A, n) for n in range(3)] + [(Side.B, n) for n in range(6)],
    [(Side.B, n) for n in range(6)] + [(Side.A, n) for n in range(3)],
    [(Side.B, 0), (Side.A, 0), (Side.B, 1), (Side.B, 2), (Side.A, 1), (Side.B, 3), (Side.A, 2),
     (Side.B, 4), (Side.B, 5)],
])
def test_sequential_simulation_agrees_for_any_interleaving(gyni_box, order):
    protocol = reference_data.three_box_protocol()
    reordered = WiringProtocol(protocol.boxes, protocol.assignment, protocol.program_a,
                               protocol.program_b, tuple(order))
    boxes = [gyni_box] * 3
    assert simulate_in_order(reordered, boxes) == simulate(protocol, boxes)


def test_sequential_simulation_on_random_protocols(rng):
    for _ in range(5):
        count = rng.randint(1, 2)
        protocol = random_protocol(rng, count)
        boxes = [random_tobl(rng)[0] for _ in range(count)]
        assert simulate_in_order(protocol, boxes) == simulate(protocol, boxes)

# --- splits and directions -----------------------------------------------------------


@pytest.mark.parametrize('sides, expected', [
    ((Side.A, Side.A, Side.A), Bipartition.ONE_TWOTHREE),
    ((Side.B, Side.B, Side.B), Bipartition.ONE_TWOTHREE),
    ((Side.A, Side.B, Side.B), Bipartition.ONE_TWOTHREE),
    ((Side.B, Side.A, Side.A), Bipartition.ONE_TWOTHREE),
    ((Side.B, Side.A, Side.B), Bipartition.TWO_THREEONE),
    ((Side.B, Side.B, Side.A), Bipartition.THREE_ONETWO),
])
def test_box_split(sides, expected):
    assert box_split(single_box_protocol(sides), 0) is expected


def test_direction_follows_query_order():
    protocol = reference_data.identity_protocol()
    assert box_direction(protocol, 0, Bipartition.ONE_TWOTHREE) is Direction.FORWARD
    swapped = WiringProtocol(1, ((Side.A, Side.B, Side.B),), passthrough([0]), passthrough([2, 1]),
                             ((Side.B, 0), (Side.A, 0), (Side.B, 1)))
    assert box_direction(swapped, 0, Bipartition.ONE_TWOTHREE) is Direction.BACKWARD


def test_direction_of_pair_on_the_other_side():
    protocol = single_box_protocol((Side.A, Side.A, Side.B),
                                   [(Side.B, 0), (Side.A, 0), (Side.A, 1)])
    split = box_split(protocol, 0)
    assert split is Bipartition.THREE_ONETWO
    assert box_direction(protocol, 0, split) is Direction.FORWARD


# --- local models -------------------------------------------------------------------


def test_identity_wiring_of_reference_box_is_local(gyni_box, gyni_decomposition):
    protocol = reference_data.identity_protocol()
    model = local_model_from_tobl(protocol, [gyni_box], [gyni_decomposition])
    assert model.total_weight() == 1
    assert reconstruct_local(model) == simulate(protocol, [gyni_box])
    assert len(model.terms) <= 10


def test_identity_wiring_report(gyni_box, full_decomposition):
    report = check_wiring_locality(reference_data.identity_protocol(), [gyni_box], [full_decomposition])
    assert report.reconstruction_equal
    assert report.is_local_confirmed
    assert report.chsh_value is None
    assert report.passed


def test_three_box_on_reference_boxes_is_local(gyni_box, full_decomposition):
    protocol = reference_data.three_box_protocol()
    report = check_wiring_locality(protocol, [gyni_box] * 3, [full_decomposition] * 3)
    assert report.reconstruction_equal
    assert report.is_local_confirmed
    assert isinstance(is_local(report.p_fin), LocalModel)


def test_three_box_on_all_zero_boxes_is_local():
    model = local_model_from_tobl(reference_data.three_box_protocol(), [zero_box()] * 3, [zero_decomposition()] * 3)
    assert len(model.terms) == 1
    assert model.terms[0].weight == 1


def test_binary_wiring_reports_chsh(gyni_box, full_decomposition):
    binary = WiringProtocol(1, ((Side.A, Side.B, Side.B),), passthrough([0]),
                            SideProgram((2,), (2,), (
                                ProgramStep(0, 1, {((y,), ()): y for y in range(2)}),
                                ProgramStep(0, 2, {((y,), (o,)): o for y in range(2) for o in range(2)})),
                                {((y,), o): (o[1],) for y in range(2)
                                 for o in itertools.product(range(2), repeat=2)}),
                            ((Side.A, 0), (Side.B, 0), (Side.B, 1)))
    report = check_wiring_locality(binary, [gyni_box], [full_decomposition])
    assert report.chsh_value is not None
    assert report.chsh_value <= 2
    assert report.passed


def test_random_wirings_of_tobl_boxes(rng):
    for _ in range(5):
        count = rng.randint(1, 2)
        protocol = random_protocol(rng, count)
        pairs = [random_tobl(rng) for _ in range(count)]
        boxes = [b for b, _ in pairs]
        model = local_model_from_tobl(protocol, boxes, [d for _, d in pairs])
        assert reconstruct_local(model) == simulate(protocol, boxes)


@pytest.mark.slow
def test_random_wiring_campaign(rng):
    for _ in range(WIRING_CASES):
        count = rng.randint(1, 3)
        protocol = random_protocol(rng, count)
        pairs = [random_tobl(rng, local_terms=rng.randint(0, 2)) for _ in range(count)]
        report = check_wiring_locality(protocol, [b for b, _ in pairs], [d for _, d in pairs])
        assert report.passed


def test_local_boxes_wire_to_local_models(rng):
    protocol = reference_data.three_box_protocol()
    models = [random_local_model(rng, TRIPARTITE_BINARY, 2) for _ in range(3)]
    boxes = [reconstruct_local(m) for m in models]
    model = local_model_from_tobl(protocol, boxes, [local_to_tobl(m) for m in models])
    assert reconstruct_local(model) == simulate(protocol, boxes)


# --- errors -------------------------------------------------------------------------


def test_interleaving_must_merge_both_programs():
    protocol = reference_data.identity_protocol()
    broken = WiringProtocol(1, protocol.assignment, protocol.program_a, protocol.program_b,
                            ((Side.A, 0), (Side.B, 1), (Side.B, 0)))
    with pytest.raises(ProtocolInvalid):
        validate_protocol(broken)


def test_each_subsystem_is_queried_once():
    protocol = WiringProtocol(1, ((Side.A, Side.B, Side.B),), passthrough([0]), passthrough([1, 1]),
                              ((Side.A, 0), (Side.B, 0), (Side.B, 1)))
    with pytest.raises(ProtocolInvalid):
        validate_protocol(protocol)


def test_box_count_mismatch(gyni_box, full_decomposition):
    with pytest.raises(BoxCountMismatch):
        simulate(reference_data.identity_protocol(), [gyni_box, gyni_box])
    with pytest.raises(BoxCountMismatch):
        local_model_from_tobl(reference_data.identity_protocol(), [gyni_box], [])


def test_signaling_box_is_rejected():
    with pytest.raises(SignalingBox):
        simulate(reference_data.identity_protocol(), [signaling_box()])


def test_bipartite_box_is_rejected():
    with pytest.raises(NotTripartite):
        simulate(reference_data.identity_protocol(), [pr_box()])


def test_decomposition_of_another_box(gyni_box, uniform_box):
    model = is_local(uniform_box)
    with pytest.raises(DecompositionMismatch):
        local_model_from_tobl(reference_data.identity_protocol(), [gyni_box], [local_to_tobl(model)])


def test_missing_split_is_unsupported(gyni_box, gyni_decomposition):
    protocol = single_box_protocol((Side.B, Side.A, Side.B))
    with pytest.raises(UnsupportedSplit):
        local_model_from_tobl(protocol, [gyni_box], [gyni_decomposition])


def test_uniform_boxes_wire_to_uniform():
    p_fin = simulate(reference_data.identity_protocol(), [uniform(TRIPARTITE_BINARY)])
    assert p_fin == uniform(Scenario((2, 4), (2, 4)))
