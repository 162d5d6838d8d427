"""
Shared fixtures and random generators for the test suite
"""

import itertools
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import reference_data  # noqa: E402
from bell import BIPARTITE_BINARY, TRIPARTITE_BINARY, chsh, gyni  # noqa: E402
from config import RANDOM_SEED  # noqa: E402
from core import mix, permute_parties, relabel, uniform  # noqa: E402
from membership import (local_to_tobl, mix_decompositions, permute_decomposition,  # noqa: E402
                        reconstruct_local, relabel_decomposition)
from models import (Behavior, DeterministicStrategy, LocalModel, LocalTerm, ProgramStep,  # noqa: E402
                    Scenario, Side, SideProgram, ToblDecomposition, WiringProtocol)


def random_weights(rng: random.Random, count: int) -> List[Fraction]:
    raw = [rng.randint(1, 6) for _ in range(count)]
    return [Fraction(r, sum(raw)) for r in raw]


def random_strategy(rng: random.Random, inputs: int, outputs: int) -> DeterministicStrategy:
    return DeterministicStrategy(outputs, tuple(rng.randrange(outputs) for _ in range(inputs)))


def random_local_model(rng: random.Random, scenario: Scenario, terms: int = 3) -> LocalModel:
    weights = random_weights(rng, terms)
    return LocalModel(scenario, tuple(
        LocalTerm(w, tuple(random_strategy(rng, m, d)
                           for m, d in zip(scenario.inputs, scenario.outputs)))
        for w in weights))


def random_relabeling(rng: random.Random, scenario: Scenario):
    input_perms, output_maps = [], []
    for m, d in zip(scenario.inputs, scenario.outputs):
        input_perms.append(rng.sample(range(m), m))
        output_maps.append([rng.sample(range(d), d) for _ in range(m)])
    return input_perms, output_maps


def random_reference_image(rng: random.Random) -> Tuple[Behavior, ToblDecomposition]:
    """Reference box under a random party permutation and relabeling"""
    permutation = rng.choice(list(itertools.permutations(range(3))))
    behavior = permute_parties(reference_data.gyni_box(), permutation)
    decomposition = permute_decomposition(reference_data.full_decomposition(), permutation)
    input_perms, output_maps = random_relabeling(rng, TRIPARTITE_BINARY)
    return (relabel(behavior, input_perms, output_maps),
            relabel_decomposition(decomposition, input_perms, output_maps))


def random_tobl(rng: random.Random, local_terms: int = 2) -> Tuple[Behavior, ToblDecomposition]:
    """Permuted, relabeled reference box mixed with a random local model"""
    behavior, decomposition = random_reference_image(rng)
    if not local_terms:
        return behavior, decomposition
    model = random_local_model(rng, TRIPARTITE_BINARY, local_terms)
    weights = random_weights(rng, 2)
    return (mix([behavior, reconstruct_local(model)], weights),
            mix_decompositions([decomposition, local_to_tobl(model)], weights))


def random_tobl_mixture(rng: random.Random, images: int = 3,
                        local_points: int = 2) -> Tuple[Behavior, ToblDecomposition]:
    """
    Random convex mixture of independent reference images and deterministic
    local points, each carried as TOBL columns in every bipartition.
    """
    parts = [random_reference_image(rng) for _ in range(images)]
    for _ in range(local_points):
        model = random_local_model(rng, TRIPARTITE_BINARY, 1)
        parts.append((reconstruct_local(model), local_to_tobl(model)))
    weights = random_weights(rng, len(parts))
    return (mix([b for b, _ in parts], weights),
            mix_decompositions([d for _, d in parts], weights))


def pr_box() -> Behavior:
    """b xor c = y * z with uniform marginals"""
    return Behavior(BIPARTITE_BINARY, {((y, z), (b, c)): Fraction(1, 2) if b ^ c == y & z else Fraction(0)
                                       for (y, z), (b, c) in BIPARTITE_BINARY.entries})


def _random_program(rng: random.Random, owned: List[Tuple[int, int]],
                    inputs: Tuple[int, ...], outputs: Tuple[int, ...]) -> SideProgram:
    order = rng.sample(owned, len(owned))
    externals = list(itertools.product(*(range(m) for m in inputs)))
    steps = []
    for n, (box, slot) in enumerate(order):
        table = {(e, o): rng.randrange(2) for e in externals
                 for o in itertools.product(range(2), repeat=n)}
        steps.append(ProgramStep(box, slot, table))
    output_table = {(e, o): tuple(rng.randrange(d) for d in outputs) for e in externals
                    for o in itertools.product(range(2), repeat=len(order))}
    return SideProgram(inputs, outputs, tuple(steps), output_table)


def random_protocol(rng: random.Random, boxes: int) -> WiringProtocol:
    """Random adaptive protocol over binary tripartite boxes"""
    assignment = tuple(tuple(rng.choice(list(Side)) for _ in range(3)) for _ in range(boxes))
    owned = {side: [(b, s) for b in range(boxes) for s in range(3) if assignment[b][s] is side]
             for side in Side}
    program_a = _random_program(rng, owned[Side.A], (2,), (2,))
    program_b = _random_program(rng, owned[Side.B], rng.choice([(2,), (2,), (2,), (2, 2)]), (2,))
    slots = [Side.A] * len(program_a.steps) + [Side.B] * len(program_b.steps)
    rng.shuffle(slots)
    counters = {Side.A: 0, Side.B: 0}
    interleaving = []
    for side in slots:
        interleaving.append((side, counters[side]))
        counters[side] += 1
    return WiringProtocol(boxes, assignment, program_a, program_b, tuple(interleaving))


@pytest.fixture
def rng():
    return random.Random(RANDOM_SEED)


@pytest.fixture
def gyni_box():
    return reference_data.gyni_box()


@pytest.fixture
def gyni_decomposition():
    return reference_data.gyni_box_decomposition()


@pytest.fixture
def full_decomposition():
    return reference_data.full_decomposition()


@pytest.fixture
def uniform_box():
    return uniform(TRIPARTITE_BINARY)


@pytest.fixture
def gyni_functional():
    return gyni()


@pytest.fixture
def chsh_functional():
    return chsh()
