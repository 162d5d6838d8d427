"""
TOBL Correlation Toolkit - Reference Data
The GYNI-maximal TOBL behavior, its decomposition for 1|23, the one-way
signaling pair examples and the three-box wiring used for regression checks
"""

import itertools
from fractions import Fraction
from typing import Callable, Dict, Tuple

from bell import TRIPARTITE_BINARY
from membership import extend_by_symmetry
from models import (Behavior, Bipartition, DeterministicStrategy, Direction, OneWayPairStrategy,
                    PairTable, ProgramStep, Scenario, Side, SideProgram, ToblDecomposition,
                    ToblTerm, WiringProtocol)
from strategies import pair_table_of

GYNI_TOBL_MAXIMUM = Fraction(7, 6)
GYNI_LOCAL_MAXIMUM = Fraction(1)
GYNI_NS_MAXIMUM = Fraction(4, 3)

# rows x y z, columns a b c = 000 ... 111
GYNI_BOX_ROWS = {
    '000': '2/3 0 0 0 0 0 0 1/3',
    '001': '1/3 1/3 0 0 0 0 1/6 1/6',
    '010': '1/3 0 1/3 0 0 1/6 0 1/6',
    '011': '1/6 1/6 1/6 1/6 0 1/6 1/6 0',
    '100': '1/3 0 0 1/6 1/3 0 0 1/6',
    '101': '1/6 1/6 0 1/6 1/6 1/6 1/6 0',
    '110': '1/6 0 1/6 1/6 1/6 1/6 1/6 0',
    '111': '0 1/6 1/6 1/6 1/6 1/6 1/6 0',
}

# weight, a0 a1, b0 b1, c00 c01 c10 c11  (party 2 signals to party 3)
FORWARD_TERMS = (
    ('1/12', '0 0', '0 1', '0 1 0 1'),
    ('1/12', '0 0', '0 0', '0 1 0 1'),
    ('1/12', '0 0', '0 0', '0 0 0 1'),
    ('1/12', '0 0', '0 1', '0 0 0 1'),
    ('1/12', '0 1', '0 1', '0 0 0 0'),
    ('1/12', '0 1', '0 0', '0 1 0 0'),
    ('1/12', '0 1', '0 0', '0 0 0 0'),
    ('1/12', '0 1', '0 1', '0 1 0 0'),
    ('1/6', '1 0', '1 1', '1 1 1 0'),
    ('1/6', '1 1', '1 0', '1 0 1 1'),
)

# weight, a0 a1, b00 b01 b10 b11, c0 c1  (party 3 signals to party 2)
BACKWARD_TERMS = (
    ('1/12', '0 0', '0 0 0 1', '0 0'),
    ('1/12', '0 0', '0 0 0 1', '0 1'),
    ('1/12', '0 0', '0 0 1 1', '0 0'),
    ('1/12', '0 0', '0 0 1 1', '0 1'),
    ('1/12', '0 1', '0 0 0 0', '0 0'),
    ('1/12', '0 1', '0 0 0 0', '0 1'),
    ('1/12', '0 1', '0 0 1 0', '0 0'),
    ('1/12', '0 1', '0 0 1 0', '0 1'),
    ('1/6', '1 0', '1 1 1 0', '1 1'),
    ('1/6', '1 1', '1 1 0 1', '1 0'),
)

PAIR = Scenario((2, 2), (2, 2))


def _bits(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.split())


def gyni_box(rows: Dict[str, str] = GYNI_BOX_ROWS) -> Behavior:
    table = {}
    for inputs, values in rows.items():
        x = tuple(int(c) for c in inputs)
        for a, value in zip(TRIPARTITE_BINARY.output_tuples, values.split()):
            table[(x, a)] = Fraction(value)
    return Behavior(TRIPARTITE_BINARY, table)


def gyni_box_decomposition(forward_rows=FORWARD_TERMS, backward_rows=BACKWARD_TERMS) -> ToblDecomposition:
    """The 1|23 decomposition, row n of both tables sharing weight and solo outputs"""
    terms = []
    for (weight, a, b, c), (_, _, b_back, c_back) in zip(forward_rows, backward_rows):
        terms.append(ToblTerm(
            Fraction(weight),
            DeterministicStrategy(2, _bits(a)),
            OneWayPairStrategy(Direction.FORWARD, (2, 2), (2, 2), _bits(b), _bits(c)),
            OneWayPairStrategy(Direction.BACKWARD, (2, 2), (2, 2), _bits(c_back), _bits(b_back))))
    return ToblDecomposition(TRIPARTITE_BINARY, {Bipartition.ONE_TWOTHREE: tuple(terms)})


def full_decomposition() -> ToblDecomposition:
    """The 1|23 terms carried to every bipartition by the box's permutation symmetry"""
    return extend_by_symmetry(gyni_box(), gyni_box_decomposition())


def forward_signaling_pair() -> PairTable:
    """b = y, c = y xor z: signals 2 -> 3 only"""
    return pair_table_of(OneWayPairStrategy(Direction.FORWARD, (2, 2), (2, 2),
                                            (0, 1), (0, 1, 1, 0)))


def backward_signaling_pair() -> PairTable:
    """c = z, b = z: signals 2 <- 3 only"""
    return pair_table_of(OneWayPairStrategy(Direction.BACKWARD, (2, 2), (2, 2),
                                            (0, 1), (0, 1, 0, 1)))


def two_way_signaling_pair() -> PairTable:
    """b = 1 xor y xor z, c = y xor z: signals both ways"""
    table = {}
    responses = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (1, 0)}
    for x, a in PAIR.entries:
        table[(x, a)] = Fraction(1 if responses[x] == a else 0)
    return PairTable(PAIR, table)


def _table(arities: Tuple[int, ...], observed: int, rule: Callable) -> Dict:
    """Lookup table over every (external inputs, binary observations) pair"""
    return {(ext, obs): rule(ext, obs)
            for ext in itertools.product(*(range(m) for m in arities))
            for obs in itertools.product(range(2), repeat=observed)}


def identity_protocol() -> WiringProtocol:
    """One box; A answers on slot 1, B on slots 2 and 3, inputs passed through"""
    program_a = SideProgram((2,), (2,),
                            (ProgramStep(0, 0, _table((2,), 0, lambda e, o: e[0])),),
                            _table((2,), 1, lambda e, o: o))
    program_b = SideProgram((2, 2), (2, 2),
                            (ProgramStep(0, 1, _table((2, 2), 0, lambda e, o: e[0])),
                             ProgramStep(0, 2, _table((2, 2), 1, lambda e, o: e[1]))),
                            _table((2, 2), 2, lambda e, o: o))
    return WiringProtocol(1, ((Side.A, Side.B, Side.B),), program_a, program_b,
                          ((Side.A, 0), (Side.B, 0), (Side.B, 1)))


def three_box_protocol() -> WiringProtocol:
    """
    Three boxes, A holding slot 1 of each. A gets x and returns one bit;
    B gets (y1, y2) and returns (b1, b2).

    B: box 1 slot 2 <- y1; box 2 slot 3 <- that outcome; box 3 slot 2 <- that
    outcome; box 1 slot 3 <- y2; box 2 slot 2 <- y1 xor y2; box 3 slot 3 <- y2;
    b1 = box 1 slot 3 outcome, b2 = box 3 slot 2 outcome.
    A: box 1 <- x; box 2 <- first outcome; box 3 <- x xor second outcome;
    a = parity of the three outcomes.
    """
    b_steps = (
        ProgramStep(0, 1, _table((2, 2), 0, lambda e, o: e[0])),
        ProgramStep(1, 2, _table((2, 2), 1, lambda e, o: o[0])),
        ProgramStep(2, 1, _table((2, 2), 2, lambda e, o: o[1])),
        ProgramStep(0, 2, _table((2, 2), 3, lambda e, o: e[1])),
        ProgramStep(1, 1, _table((2, 2), 4, lambda e, o: e[0] ^ e[1])),
        ProgramStep(2, 2, _table((2, 2), 5, lambda e, o: e[1])),
    )
    program_b = SideProgram((2, 2), (2, 2), b_steps,
                            _table((2, 2), 6, lambda e, o: (o[3], o[2])))
    a_steps = (
        ProgramStep(0, 0, _table((2,), 0, lambda e, o: e[0])),
        ProgramStep(1, 0, _table((2,), 1, lambda e, o: o[0])),
        ProgramStep(2, 0, _table((2,), 2, lambda e, o: e[0] ^ o[1])),
    )
    program_a = SideProgram((2,), (2,), a_steps,
                            _table((2,), 3, lambda e, o: (o[0] ^ o[1] ^ o[2],)))
    interleaving = ((Side.B, 0), (Side.A, 0), (Side.B, 1), (Side.A, 1), (Side.B, 2),
                    (Side.B, 3), (Side.A, 2), (Side.B, 4), (Side.B, 5))
    return WiringProtocol(3, ((Side.A, Side.B, Side.B),) * 3, program_a, program_b, interleaving)
