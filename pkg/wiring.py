"""
TOBL Correlation Toolkit - Wiring Module
Simulates wirings of tripartite boxes across a bipartition A|B and builds
the bipartite local model that exists when every box is TOBL
"""

import itertools
import logging
from fractions import Fraction
from functools import reduce
from operator import mul
from typing import Callable, Dict, Optional, Sequence, Tuple

from bell import BIPARTITE_BINARY, chsh, evaluate
from config import ENUM_CAP
from core import is_nonsignaling, marginal, require_valid
from errors import (BoxCountMismatch, DecompositionMismatch, NotTripartite, ProtocolInvalid,
                    SignalingBox, UnsupportedSplit)
from membership import is_local, reconstruct_local, verify_bipartition
from models import (ONE, ZERO, Behavior, Bipartition, DeterministicStrategy, Direction,
                    LocalityReport, LocalModel, LocalTerm, ProgramStep, Scenario, Side,
                    SideProgram, ToblDecomposition, WiringProtocol, radix_index)

logger = logging.getLogger(__name__)

Subsystem = Tuple[int, int]
# (step, chosen input, inputs chosen so far on this side) -> outcome
Responder = Callable[[ProgramStep, int, Dict[Subsystem, int]], int]


def _size(sizes: Sequence[int]) -> int:
    return reduce(mul, sizes, 1)


def validate_protocol(protocol: WiringProtocol) -> None:
    """Structural checks that need no box data"""
    if protocol.boxes < 1:
        raise ProtocolInvalid("a protocol wires at least one box")
    if len(protocol.assignment) != protocol.boxes:
        raise ProtocolInvalid(
            f"assignment lists {len(protocol.assignment)} boxes, protocol declares {protocol.boxes}")
    for box, sides in enumerate(protocol.assignment):
        if len(sides) != 3 or any(not isinstance(s, Side) for s in sides):
            raise ProtocolInvalid(f"box {box + 1} must assign each of its three slots to A or B")

    for side in Side:
        program = protocol.program(side)
        if not program.outputs or any(d < 2 for d in program.outputs) \
                or any(m < 1 for m in program.inputs):
            raise ProtocolInvalid(f"side {side.value} needs at least one output of arity >= 2")
        owned = {(b, s) for b, sides in enumerate(protocol.assignment)
                 for s, owner in enumerate(sides) if owner is side}
        queried = [(step.box, step.slot) for step in program.steps]
        for box, slot in queried:
            if not 0 <= box < protocol.boxes or not 0 <= slot < 3:
                raise ProtocolInvalid(f"side {side.value} queries missing subsystem "
                                      f"(box {box + 1}, slot {slot + 1})")
        if len(set(queried)) != len(queried) or set(queried) != owned:
            raise ProtocolInvalid(f"side {side.value} must query each owned subsystem exactly once")

    positions = {side: [] for side in Side}
    for side, step in protocol.interleaving:
        positions[side].append(step)
    for side in Side:
        expected = list(range(len(protocol.program(side).steps)))
        if positions[side] != expected:
            raise ProtocolInvalid(
                f"interleaving is not a merge of side {side.value}'s steps: {positions[side]}")


def _check_boxes(protocol: WiringProtocol, boxes: Sequence[Behavior]) -> None:
    if len(boxes) != protocol.boxes:
        raise BoxCountMismatch(f"protocol wires {protocol.boxes} boxes, {len(boxes)} given")
    for number, box in enumerate(boxes, 1):
        if box.scenario.parties != 3:
            raise NotTripartite(f"box {number} has {box.scenario.parties} parties")
        require_valid(box)
        if is_nonsignaling(box):
            raise SignalingBox(f"box {number} is signaling")


def _replay(program: SideProgram, boxes: Sequence[Behavior], external: Tuple[int, ...],
            respond: Responder) -> Tuple[Dict[Subsystem, int], Tuple[int, ...], Tuple[int, ...]]:
    """Run one side's program; returns chosen inputs, observations and final outputs"""
    chosen: Dict[Subsystem, int] = {}
    observed: Tuple[int, ...] = ()
    for number, step in enumerate(program.steps, 1):
        key = (external, observed)
        if key not in step.input_table:
            raise ProtocolInvalid(f"step {number} has no input for {key}")
        x = step.input_table[key]
        if not 0 <= x < boxes[step.box].scenario.inputs[step.slot]:
            raise ProtocolInvalid(f"step {number} chooses input {x} outside box {step.box + 1}")
        chosen[(step.box, step.slot)] = x
        observed += (respond(step, x, chosen),)
    key = (external, observed)
    if key not in program.output_table:
        raise ProtocolInvalid(f"output table has no entry for {key}")
    outputs = tuple(program.output_table[key])
    if len(outputs) != len(program.outputs) or \
            any(not 0 <= a < d for a, d in zip(outputs, program.outputs)):
        raise ProtocolInvalid(f"output {outputs} does not fit arities {program.outputs}")
    return chosen, observed, outputs


def final_scenario(protocol: WiringProtocol) -> Scenario:
    """Bipartite scenario with each side as one composite party"""
    a, b = protocol.program_a, protocol.program_b
    return Scenario((_size(a.inputs), _size(b.inputs)), (_size(a.outputs), _size(b.outputs)))


def _externals(program: SideProgram):
    return list(itertools.product(*(range(m) for m in program.inputs)))


def simulate(protocol: WiringProtocol, boxes: Sequence[Behavior]) -> Behavior:
    """
    Exact P_fin(a_A a_B | x_A x_B), summing over every assignment of outcomes
    to the queried subsystems.

    Each assignment is weighted by the joint box probabilities, so the
    interleaving does not enter: both sides' inputs are fixed by their own
    observations alone. simulate_in_order follows the interleaving instead.
    """
    validate_protocol(protocol)
    _check_boxes(protocol, boxes)
    program_a, program_b = protocol.program_a, protocol.program_b
    subsystems = [(s.box, s.slot) for p in (program_a, program_b) for s in p.steps]
    outcome_ranges = [range(boxes[b].scenario.outputs[s]) for b, s in subsystems]
    scenario = final_scenario(protocol)
    table = {entry: ZERO for entry in scenario.entries}

    for ext_a in _externals(program_a):
        for ext_b in _externals(program_b):
            x = (radix_index(ext_a, program_a.inputs), radix_index(ext_b, program_b.inputs))
            for outcomes in itertools.product(*outcome_ranges):
                assigned = dict(zip(subsystems, outcomes))
                fixed: Responder = lambda step, _x, _chosen: assigned[(step.box, step.slot)]  # noqa: E731
                inputs_a, _, out_a = _replay(program_a, boxes, ext_a, fixed)
                inputs_b, _, out_b = _replay(program_b, boxes, ext_b, fixed)
                inputs = {**inputs_a, **inputs_b}
                weight = ONE
                for b, box in enumerate(boxes):
                    weight *= box.probability(tuple(inputs[(b, s)] for s in range(3)),
                                              tuple(assigned[(b, s)] for s in range(3)))
                    if not weight:
                        break
                if weight:
                    a = (radix_index(out_a, program_a.outputs), radix_index(out_b, program_b.outputs))
                    table[(x, a)] += weight
    logger.debug(f"simulated {protocol.boxes} boxes over {len(subsystems)} subsystems")
    return Behavior(scenario, table)


def _box_marginal(box: Behavior, queried: Dict[int, Tuple[int, int]]) -> Fraction:
    """P(outcomes of the queried slots | their inputs); other slots' inputs are irrelevant for NS boxes"""
    slots = tuple(sorted(queried))
    dropped = tuple(s for s in range(3) if s not in queried)
    values = marginal(box, slots, [queried[s][0] for s in slots], [0] * len(dropped))
    return values[tuple(queried[s][1] for s in slots)]


def simulate_in_order(protocol: WiringProtocol, boxes: Sequence[Behavior]) -> Behavior:
    """
    P_fin generated step by step in interleaving order.

    Each queried subsystem answers from its box's marginal on the slots queried
    so far, conditioned on the outcomes that box has already produced. For
    no-signaling boxes the result equals simulate() for every interleaving.
    """
    validate_protocol(protocol)
    _check_boxes(protocol, boxes)
    programs = {Side.A: protocol.program_a, Side.B: protocol.program_b}
    scenario = final_scenario(protocol)
    table = {entry: ZERO for entry in scenario.entries}

    def step(position, externals, observed, queried, weight, x):
        if position == len(protocol.interleaving):
            outputs = []
            for side in Side:
                key = (externals[side], observed[side])
                if key not in programs[side].output_table:
                    raise ProtocolInvalid(f"output table has no entry for {key}")
                outputs.append(radix_index(programs[side].output_table[key], programs[side].outputs))
            table[(x, tuple(outputs))] += weight
            return

        side, index = protocol.interleaving[position]
        current = programs[side].steps[index]
        key = (externals[side], observed[side])
        if key not in current.input_table:
            raise ProtocolInvalid(f"step {index + 1} has no input for {key}")
        box = boxes[current.box]
        chosen = current.input_table[key]
        if not 0 <= chosen < box.scenario.inputs[current.slot]:
            raise ProtocolInvalid(f"step {index + 1} chooses input {chosen} outside box {current.box + 1}")

        before = queried.get(current.box, {})
        prior = _box_marginal(box, before) if before else ONE
        for outcome in range(box.scenario.outputs[current.slot]):
            after = {**before, current.slot: (chosen, outcome)}
            conditional = _box_marginal(box, after) / prior
            if conditional:
                step(position + 1, externals, {**observed, side: observed[side] + (outcome,)},
                     {**queried, current.box: after}, weight * conditional, x)

    for ext_a in _externals(protocol.program_a):
        for ext_b in _externals(protocol.program_b):
            x = (radix_index(ext_a, protocol.program_a.inputs), radix_index(ext_b, protocol.program_b.inputs))
            step(0, {Side.A: ext_a, Side.B: ext_b}, {Side.A: (), Side.B: ()}, {}, ONE, x)
    return Behavior(scenario, table)


def box_split(protocol: WiringProtocol, box: int) -> Bipartition:
    """Bipartition matching how the protocol splits the box's slots"""
    sides = protocol.assignment[box]
    counts = {side: sides.count(side) for side in Side}
    if max(counts.values()) == 3:
        return Bipartition.ONE_TWOTHREE
    lone = next(slot for slot, side in enumerate(sides) if counts[side] == 1)
    return Bipartition.with_solo(lone)


def box_direction(protocol: WiringProtocol, box: int, bipartition: Bipartition) -> Direction:
    """Forward when the pair's sender slot is queried before its receiver"""
    j, k = bipartition.pair
    order = {}
    for position, (side, index) in enumerate(protocol.interleaving):
        step = protocol.program(side).steps[index]
        if step.box == box:
            order[step.slot] = position
    return Direction.FORWARD if order[j] < order[k] else Direction.BACKWARD


def _check_decomposition(box: Behavior, decomposition: ToblDecomposition,
                         bipartition: Bipartition, number: int) -> None:
    if decomposition.scenario != box.scenario:
        raise DecompositionMismatch(f"decomposition {number} is for another scenario")
    terms = decomposition.terms.get(bipartition)
    if not terms:
        raise UnsupportedSplit(f"box {number} is split as {bipartition.label}, "
                               f"its decomposition has no terms for it")
    if not verify_bipartition(box, decomposition, bipartition):
        raise DecompositionMismatch(
            f"box {number}: terms of {bipartition.label} do not reproduce the box")


def local_model_from_tobl(protocol: WiringProtocol, boxes: Sequence[Behavior],
                          decompositions: Sequence[ToblDecomposition]) -> LocalModel:
    """
    Bipartite local model of simulate(protocol, boxes).

    The hidden variable picks one term per box. Each side then answers
    deterministically by replaying its program: a box's solo slot answers
    with the term's solo strategy, and its two pair slots use the pair
    strategy whose sender is queried first, which only needs inputs that
    are already fixed when the receiver is queried.
    """
    validate_protocol(protocol)
    _check_boxes(protocol, boxes)
    if len(decompositions) != len(boxes):
        raise BoxCountMismatch(f"{len(boxes)} boxes with {len(decompositions)} decompositions")

    splits = [box_split(protocol, b) for b in range(protocol.boxes)]
    directions = []
    for b, (box, decomposition, split) in enumerate(zip(boxes, decompositions, splits)):
        _check_decomposition(box, decomposition, split, b + 1)
        directions.append(box_direction(protocol, b, split))
        logger.debug(f"box {b + 1}: {split.label}, {directions[-1].value}")

    term_lists = [decompositions[b].terms[splits[b]] for b in range(protocol.boxes)]
    programs = (protocol.program_a, protocol.program_b)
    merged: Dict[Tuple[DeterministicStrategy, DeterministicStrategy], Fraction] = {}

    for choice in itertools.product(*term_lists):
        weight = reduce(mul, (t.weight for t in choice), ONE)
        if not weight:
            continue

        def respond(step: ProgramStep, x: int, chosen: Dict[Subsystem, int]) -> int:
            term = choice[step.box]
            i, j, k = splits[step.box].value
            if step.slot == i:
                return term.solo(x)
            pair = term.forward if directions[step.box] is Direction.FORWARD else term.backward
            sender = j if pair.direction is Direction.FORWARD else k
            if step.slot == sender:
                return pair.sender[x]
            x_j, x_k = chosen[(step.box, j)], chosen[(step.box, k)]
            return pair.receiver[x_j * boxes[step.box].scenario.inputs[k] + x_k]

        strategies = []
        for program in programs:
            assignment = [0] * _size(program.inputs)
            for external in _externals(program):
                _, _, outputs = _replay(program, boxes, external, respond)
                assignment[radix_index(external, program.inputs)] = radix_index(outputs, program.outputs)
            strategies.append(DeterministicStrategy(_size(program.outputs), tuple(assignment)))
        key = tuple(strategies)
        merged[key] = merged.get(key, ZERO) + weight

    terms = tuple(LocalTerm(w, key) for key, w in merged.items())
    model = LocalModel(final_scenario(protocol), terms).canonical()
    logger.info(f"local model with {len(model.terms)} terms from "
                f"{reduce(mul, (len(t) for t in term_lists), 1)} hidden-variable values")
    return model


def check_wiring_locality(protocol: WiringProtocol, boxes: Sequence[Behavior],
                          decompositions: Sequence[ToblDecomposition],
                          enum_cap: int = ENUM_CAP) -> LocalityReport:
    p_fin = simulate(protocol, boxes)
    model = local_model_from_tobl(protocol, boxes, decompositions)
    reconstruction_equal = reconstruct_local(model) == p_fin
    chsh_value: Optional[Fraction] = None
    if p_fin.scenario == BIPARTITE_BINARY:
        chsh_value = evaluate(chsh(), p_fin)
    confirmed = isinstance(is_local(p_fin, enum_cap=enum_cap), LocalModel)
    report = LocalityReport(p_fin, model, reconstruction_equal, chsh_value, confirmed)
    logger.info(f"wiring locality: reconstruction {'matches' if reconstruction_equal else 'differs'}, "
                f"local {'confirmed' if confirmed else 'refuted'}"
                + (f", CHSH {chsh_value}" if chsh_value is not None else ""))
    return report
