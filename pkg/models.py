"""
TOBL Correlation Toolkit - Data Models
Defines the exact-rational data structures shared by all modules
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, reduce
from operator import mul
from typing import Dict, List, Optional, Tuple, Union

from errors import IncompatibleScenario, MissingEntry

InputTuple = Tuple[int, ...]
OutputTuple = Tuple[int, ...]
Entry = Tuple[InputTuple, OutputTuple]

ZERO = Fraction(0)
ONE = Fraction(1)


def radix_index(digits: Tuple[int, ...], sizes: Tuple[int, ...]) -> int:
    """Mixed-radix index, first digit most significant"""
    index = 0
    for digit, size in zip(digits, sizes):
        index = index * size + digit
    return index


def radix_digits(index: int, sizes: Tuple[int, ...]) -> Tuple[int, ...]:
    digits = []
    for size in reversed(sizes):
        index, digit = divmod(index, size)
        digits.append(digit)
    return tuple(reversed(digits))


@dataclass(frozen=True)
class Scenario:
    """n parties, party i has inputs[i] settings and outputs[i] results"""
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'inputs', tuple(self.inputs))
        object.__setattr__(self, 'outputs', tuple(self.outputs))
        if len(self.inputs) != len(self.outputs) or not self.inputs:
            raise IncompatibleScenario(
                f"inputs {self.inputs} and outputs {self.outputs} must be non-empty and of equal length")
        if any(m < 1 for m in self.inputs) or any(d < 2 for d in self.outputs):
            raise IncompatibleScenario(
                f"need at least one input and two outputs per party, got {self}")

    @property
    def parties(self) -> int:
        return len(self.inputs)

    @cached_property
    def input_tuples(self) -> List[InputTuple]:
        return list(itertools.product(*(range(m) for m in self.inputs)))

    @cached_property
    def output_tuples(self) -> List[OutputTuple]:
        return list(itertools.product(*(range(d) for d in self.outputs)))

    @cached_property
    def entries(self) -> List[Entry]:
        return [(x, a) for x in self.input_tuples for a in self.output_tuples]

    @cached_property
    def entry_index(self) -> Dict[Entry, int]:
        return {entry: i for i, entry in enumerate(self.entries)}

    def restrict(self, parties: Tuple[int, ...]) -> 'Scenario':
        return Scenario(tuple(self.inputs[p] for p in parties),
                        tuple(self.outputs[p] for p in parties))

    def deterministic_count(self) -> int:
        return reduce(mul, (d ** m for m, d in zip(self.inputs, self.outputs)), 1)

    def label(self) -> str:
        return (f"({self.parties};{','.join(map(str, self.inputs))};"
                f"{','.join(map(str, self.outputs))})")

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True, eq=False)
class Behavior:
    """Conditional probability table P(a|x); treated as an immutable value"""
    scenario: Scenario
    table: Dict[Entry, Fraction] = field(hash=False)

    def probability(self, inputs: InputTuple, outputs: OutputTuple) -> Fraction:
        try:
            return self.table[(tuple(inputs), tuple(outputs))]
        except KeyError:
            raise MissingEntry(f"no entry for ({inputs} | {outputs})") from None

    def vector(self) -> List[Fraction]:
        return [self.probability(x, a) for x, a in self.scenario.entries]

    @classmethod
    def from_vector(cls, scenario: Scenario, values) -> 'Behavior':
        return cls(scenario, {entry: Fraction(v) for entry, v in zip(scenario.entries, values)})

    def __eq__(self, other):
        # subclasses such as PairTable compare by value with plain behaviors
        if not isinstance(other, Behavior):
            return NotImplemented
        return self.scenario == other.scenario and self.table == other.table

    def __hash__(self):
        return hash((self.scenario, tuple(self.vector())))


class IssueKind(Enum):
    NEGATIVE = "negative"
    NORMALIZATION = "normalization"


@dataclass(frozen=True)
class ValidationIssue:
    kind: IssueKind
    inputs: InputTuple
    outputs: Optional[OutputTuple]
    value: Fraction

    def describe(self) -> str:
        if self.kind is IssueKind.NEGATIVE:
            return f"negative entry {self.value} at ({self.inputs} | {self.outputs})"
        return f"row {self.inputs} sums to {self.value}, not 1"


@dataclass(frozen=True)
class ValidationReport:
    issues: Tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues


@dataclass(frozen=True)
class NsViolation:
    """Marginal of `parties` at fixed inputs/outputs differs between two complementary inputs"""
    parties: Tuple[int, ...]
    kept_inputs: InputTuple
    kept_outputs: OutputTuple
    reference_inputs: InputTuple
    conflicting_inputs: InputTuple
    reference_value: Fraction
    conflicting_value: Fraction


@dataclass(frozen=True)
class DeterministicStrategy:
    """Single-party response function x -> assignment[x]"""
    outputs: int
    assignment: Tuple[int, ...]

    @property
    def inputs(self) -> int:
        return len(self.assignment)

    def __call__(self, x: int) -> int:
        return self.assignment[x]


class Direction(Enum):
    FORWARD = "forward"    # j -> k: sender j answers from its own input
    BACKWARD = "backward"  # j <- k: sender k answers from its own input


@dataclass(frozen=True)
class OneWayPairStrategy:
    """
    Deterministic bipartite response allowing signaling in one direction.

    inputs/outputs are ordered (j, k). The sender answers from its own input;
    the receiver table is indexed by x_j * inputs[1] + x_k.
    """
    direction: Direction
    inputs: Tuple[int, int]
    outputs: Tuple[int, int]
    sender: Tuple[int, ...]
    receiver: Tuple[int, ...]

    def respond(self, x_j: int, x_k: int) -> Tuple[int, int]:
        joint = self.receiver[x_j * self.inputs[1] + x_k]
        if self.direction is Direction.FORWARD:
            return self.sender[x_j], joint
        return joint, self.sender[x_k]

    @property
    def b(self) -> Tuple[int, ...]:
        """Outputs of party j, in decomposition table column order"""
        return self.sender if self.direction is Direction.FORWARD else self.receiver

    @property
    def c(self) -> Tuple[int, ...]:
        """Outputs of party k, in decomposition table column order"""
        return self.receiver if self.direction is Direction.FORWARD else self.sender


@dataclass(frozen=True, eq=False)
class PairTable(Behavior):
    """Bipartite conditional table P(b c|y z), possibly signaling"""

    def __post_init__(self):
        if self.scenario.parties != 2:
            raise IncompatibleScenario("a pair table has exactly two parties")

    def __hash__(self):
        return super().__hash__()


class Bipartition(Enum):
    """(solo i, sender j, receiver k), 0-based"""
    ONE_TWOTHREE = (0, 1, 2)
    TWO_THREEONE = (1, 2, 0)
    THREE_ONETWO = (2, 0, 1)

    @property
    def solo(self) -> int:
        return self.value[0]

    @property
    def pair(self) -> Tuple[int, int]:
        return self.value[1], self.value[2]

    @property
    def label(self) -> str:
        i, j, k = self.value
        return f"{i + 1}|{j + 1}{k + 1}"

    @classmethod
    def from_label(cls, label: str) -> 'Bipartition':
        for bipartition in cls:
            if bipartition.label == label:
                return bipartition
        raise ValueError(f"unknown bipartition {label!r}")

    @classmethod
    def with_solo(cls, party: int) -> 'Bipartition':
        for bipartition in cls:
            if bipartition.solo == party:
                return bipartition
        raise ValueError(f"no bipartition with solo party {party}")


@dataclass(frozen=True)
class ToblTerm:
    """One λ: shared weight and solo assignment, one pair strategy per direction"""
    weight: Fraction
    solo: DeterministicStrategy
    forward: OneWayPairStrategy
    backward: OneWayPairStrategy

    def sort_key(self):
        return (self.solo.assignment, self.forward.sender, self.forward.receiver,
                self.backward.sender, self.backward.receiver)


@dataclass(frozen=True)
class ToblDecomposition:
    scenario: Scenario
    terms: Dict[Bipartition, Tuple[ToblTerm, ...]]

    def bipartitions(self) -> List[Bipartition]:
        return [b for b in Bipartition if b in self.terms]


@dataclass(frozen=True)
class LocalTerm:
    weight: Fraction
    strategies: Tuple[DeterministicStrategy, ...]


@dataclass(frozen=True)
class LocalModel:
    scenario: Scenario
    terms: Tuple[LocalTerm, ...]

    def total_weight(self) -> Fraction:
        return sum((t.weight for t in self.terms), ZERO)

    def canonical(self) -> 'LocalModel':
        """Merge repeated strategy tuples, drop zero weights, sort"""
        merged: Dict[Tuple[DeterministicStrategy, ...], Fraction] = {}
        for term in self.terms:
            merged[term.strategies] = merged.get(term.strategies, ZERO) + term.weight
        terms = tuple(LocalTerm(w, s) for s, w in
                      sorted(merged.items(), key=lambda kv: [st.assignment for st in kv[0]])
                      if w != 0)
        return LocalModel(self.scenario, terms)


class CorrelationSet(Enum):
    LOCAL = "local"
    TOBL = "tobl"
    NO_SIGNALING = "ns"


@dataclass(frozen=True)
class BellBound:
    value: Fraction
    set_label: str


@dataclass(frozen=True)
class BellFunctional:
    scenario: Scenario
    coefficients: Dict[Entry, Fraction]
    bound: Optional[BellBound] = None


@dataclass(frozen=True)
class SeparatingFunctional:
    """Bell-type inequality F <= bound valid on the tested set, violated by the behavior"""
    functional: BellFunctional
    bound: Fraction
    value: Fraction

    @property
    def sound(self) -> bool:
        return self.value > self.bound


@dataclass(frozen=True)
class BellOptimum:
    value: Fraction
    optimizer: Behavior
    witness: Union[LocalModel, ToblDecomposition, None]
    correlation_set: CorrelationSet
    symmetric: bool = False


class Side(Enum):
    A = "A"
    B = "B"


ObservationKey = Tuple[InputTuple, OutputTuple]


@dataclass(frozen=True)
class ProgramStep:
    """Query one owned subsystem; input chosen from (external inputs, earlier observations)"""
    box: int
    slot: int
    input_table: Dict[ObservationKey, int]


@dataclass(frozen=True)
class SideProgram:
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]
    steps: Tuple[ProgramStep, ...]
    output_table: Dict[ObservationKey, OutputTuple]


@dataclass(frozen=True)
class WiringProtocol:
    boxes: int
    assignment: Tuple[Tuple[Side, Side, Side], ...]
    program_a: SideProgram
    program_b: SideProgram
    interleaving: Tuple[Tuple[Side, int], ...]

    def program(self, side: Side) -> SideProgram:
        return self.program_a if side is Side.A else self.program_b


@dataclass(frozen=True)
class LocalityReport:
    p_fin: Behavior
    model: LocalModel
    reconstruction_equal: bool
    chsh_value: Optional[Fraction]
    is_local_confirmed: bool

    @property
    def passed(self) -> bool:
        chsh_ok = self.chsh_value is None or self.chsh_value <= 2
        return self.reconstruction_equal and self.is_local_confirmed and chsh_ok
