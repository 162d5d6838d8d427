"""
TOBL Correlation Toolkit - File Formats
JSON encoding of behaviors, functionals, decompositions, models and wiring
protocols. Rationals are always strings, "n" or "n/d".
"""

import json
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from errors import ParseError, ToblError
from models import (BellBound, BellFunctional, BellOptimum, Behavior, Bipartition, CorrelationSet,
                    DeterministicStrategy, Direction, LocalityReport, LocalModel, LocalTerm,
                    NsViolation, OneWayPairStrategy, ProgramStep, Scenario, SeparatingFunctional,
                    Side, SideProgram, ToblDecomposition, ToblTerm, WiringProtocol)

logger = logging.getLogger(__name__)

_RATIONAL = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$')


# --- primitives ------------------------------------------------------------


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def parse_rational(text: Any, key: Optional[str] = None) -> Fraction:
    """Accept "n", "n/d" or a JSON integer; refuse decimals"""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {text!r}", key=key)
    match = _RATIONAL.match(text)
    if not match:
        raise ParseError(f"not an exact rational: {text!r}", key=key)
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ParseError(f"zero denominator in {text!r}", key=key)
    return Fraction(int(numerator), int(denominator or 1))


def _field(data: Dict[str, Any], name: str, context: str, kind=None):
    if not isinstance(data, dict) or name not in data:
        raise ParseError(f"missing field '{name}'", key=context)
    value = data[name]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field '{name}' has the wrong type", key=f"{context}.{name}")
    return value


def _int_list(value: Any, key: str) -> Tuple[int, ...]:
    if not isinstance(value, list) or any(not isinstance(v, int) or isinstance(v, bool) for v in value):
        raise ParseError("expected a list of integers", key=key)
    return tuple(value)


def format_key(left: Sequence[int], right: Sequence[int]) -> str:
    return f"{' '.join(map(str, left))} | {' '.join(map(str, right))}"


def parse_key(text: str, key: Optional[str] = None) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    if not isinstance(text, str) or text.count('|') != 1:
        raise ParseError(f"key {text!r} is not of the form 'x1 x2 | a1 a2'", key=key)
    left, right = text.split('|')
    try:
        return tuple(int(v) for v in left.split()), tuple(int(v) for v in right.split())
    except ValueError:
        raise ParseError(f"key {text!r} has non-integer parts", key=key) from None


# --- scenario and behavior -------------------------------------------------


def scenario_to_json(scenario: Scenario) -> Dict[str, Any]:
    return {'parties': scenario.parties, 'inputs': list(scenario.inputs),
            'outputs': list(scenario.outputs)}


def scenario_from_json(data: Any, context: str = 'scenario') -> Scenario:
    inputs = _int_list(_field(data, 'inputs', context), f'{context}.inputs')
    outputs = _int_list(_field(data, 'outputs', context), f'{context}.outputs')
    parties = data.get('parties', len(inputs))
    if parties != len(inputs):
        raise ParseError(f"parties={parties} but {len(inputs)} input counts", key=context)
    try:
        return Scenario(inputs, outputs)
    except ToblError as e:
        raise ParseError(str(e), key=context) from None


def _entry_table(data: Any, scenario: Scenario, context: str) -> Dict:
    if not isinstance(data, dict):
        raise ParseError("expected an object of 'x | a' keys", key=context)
    table = {}
    valid = scenario.entry_index
    for key, value in data.items():
        entry = parse_key(key, f'{context}[{key}]')
        if entry not in valid:
            raise ParseError("entry outside the scenario", key=f'{context}[{key}]')
        table[entry] = parse_rational(value, f'{context}[{key}]')
    return table


def behavior_to_json(behavior: Behavior) -> Dict[str, Any]:
    return {'scenario': scenario_to_json(behavior.scenario),
            'table': {format_key(x, a): format_rational(behavior.table[(x, a)])
                      for x, a in behavior.scenario.entries}}


def behavior_from_json(data: Any) -> Behavior:
    scenario = scenario_from_json(_field(data, 'scenario', 'behavior'))
    table = _entry_table(_field(data, 'table', 'behavior'), scenario, 'table')
    missing = [e for e in scenario.entries if e not in table]
    if missing:
        x, a = missing[0]
        raise ParseError(f"table is not total ({len(missing)} entries missing)",
                         key=f'table[{format_key(x, a)}]')
    return Behavior(scenario, table)


# --- functionals -------------------------------------------------------------


def functional_to_json(functional: BellFunctional) -> Dict[str, Any]:
    data = {'scenario': scenario_to_json(functional.scenario),
            'coefficients': {format_key(x, a): format_rational(c)
                             for (x, a), c in sorted(functional.coefficients.items())}}
    if functional.bound is not None:
        data['bound'] = {'value': format_rational(functional.bound.value),
                         'set': functional.bound.set_label}
    return data


def functional_from_json(data: Any) -> BellFunctional:
    scenario = scenario_from_json(_field(data, 'scenario', 'functional'))
    coefficients = _entry_table(_field(data, 'coefficients', 'functional'), scenario, 'coefficients')
    bound = None
    if data.get('bound') is not None:
        raw = data['bound']
        bound = BellBound(parse_rational(_field(raw, 'value', 'bound'), 'bound.value'),
                          str(raw.get('set', '')))
    return BellFunctional(scenario, coefficients, bound)


def separating_to_json(separating: SeparatingFunctional) -> Dict[str, Any]:
    return {'functional': functional_to_json(separating.functional),
            'bound': format_rational(separating.bound),
            'value': format_rational(separating.value)}


def separating_from_json(data: Any) -> SeparatingFunctional:
    return SeparatingFunctional(functional_from_json(_field(data, 'functional', 'separating')),
                                parse_rational(_field(data, 'bound', 'separating'), 'bound'),
                                parse_rational(_field(data, 'value', 'separating'), 'value'))


def violations_to_json(violations: Sequence[NsViolation]) -> List[Dict[str, Any]]:
    return [{'parties': [p + 1 for p in v.parties],
             'inputs': list(v.kept_inputs), 'outputs': list(v.kept_outputs),
             'reference_inputs': list(v.reference_inputs),
             'conflicting_inputs': list(v.conflicting_inputs),
             'reference_value': format_rational(v.reference_value),
             'conflicting_value': format_rational(v.conflicting_value)}
            for v in violations]


# --- decompositions and local models -----------------------------------------


def _pair_to_json(strategy: OneWayPairStrategy) -> Dict[str, List[int]]:
    return {'b': list(strategy.b), 'c': list(strategy.c)}


def _pair_from_json(data: Any, direction: Direction, inputs, outputs, key: str) -> OneWayPairStrategy:
    b = _int_list(_field(data, 'b', key), f'{key}.b')
    c = _int_list(_field(data, 'c', key), f'{key}.c')
    sender, receiver = (b, c) if direction is Direction.FORWARD else (c, b)
    sender_index = 0 if direction is Direction.FORWARD else 1
    if len(sender) != inputs[sender_index] or len(receiver) != inputs[0] * inputs[1]:
        raise ParseError(f"{direction.value} strategy has the wrong shape", key=key)
    if any(not 0 <= v < outputs[sender_index] for v in sender) or \
            any(not 0 <= v < outputs[1 - sender_index] for v in receiver):
        raise ParseError(f"{direction.value} strategy output out of range", key=key)
    return OneWayPairStrategy(direction, inputs, outputs, sender, receiver)


def _strategy_from_json(data: Any, inputs: int, outputs: int, key: str) -> DeterministicStrategy:
    assignment = _int_list(data, key)
    if len(assignment) != inputs or any(not 0 <= v < outputs for v in assignment):
        raise ParseError(f"expected {inputs} outputs in 0..{outputs - 1}", key=key)
    return DeterministicStrategy(outputs, assignment)


def decomposition_to_json(decomposition: ToblDecomposition) -> Dict[str, Any]:
    return {'scenario': scenario_to_json(decomposition.scenario),
            'bipartitions': {
                b.label: [{'weight': format_rational(t.weight),
                           'solo': list(t.solo.assignment),
                           'forward': _pair_to_json(t.forward),
                           'backward': _pair_to_json(t.backward)}
                          for t in decomposition.terms[b]]
                for b in decomposition.bipartitions()}}


def decomposition_from_json(data: Any) -> ToblDecomposition:
    scenario = scenario_from_json(_field(data, 'scenario', 'decomposition'))
    if scenario.parties != 3:
        raise ParseError("decompositions are tripartite", key='scenario')
    raw = _field(data, 'bipartitions', 'decomposition', dict)
    terms = {}
    for label, raw_terms in raw.items():
        try:
            bipartition = Bipartition.from_label(label)
        except ValueError as e:
            raise ParseError(str(e), key=f'bipartitions.{label}') from None
        i, j, k = bipartition.value
        inputs = (scenario.inputs[j], scenario.inputs[k])
        outputs = (scenario.outputs[j], scenario.outputs[k])
        parsed = []
        for n, term in enumerate(raw_terms):
            key = f'bipartitions.{label}[{n}]'
            parsed.append(ToblTerm(
                parse_rational(_field(term, 'weight', key), f'{key}.weight'),
                _strategy_from_json(_field(term, 'solo', key), scenario.inputs[i],
                                    scenario.outputs[i], f'{key}.solo'),
                _pair_from_json(_field(term, 'forward', key), Direction.FORWARD,
                                inputs, outputs, f'{key}.forward'),
                _pair_from_json(_field(term, 'backward', key), Direction.BACKWARD,
                                inputs, outputs, f'{key}.backward')))
        terms[bipartition] = tuple(parsed)
    return ToblDecomposition(scenario, terms)


def local_model_to_json(model: LocalModel) -> Dict[str, Any]:
    return {'scenario': scenario_to_json(model.scenario),
            'terms': [{'weight': format_rational(t.weight),
                       'strategies': [list(s.assignment) for s in t.strategies]}
                      for t in model.terms]}


def local_model_from_json(data: Any) -> LocalModel:
    scenario = scenario_from_json(_field(data, 'scenario', 'model'))
    terms = []
    for n, term in enumerate(_field(data, 'terms', 'model', list)):
        key = f'terms[{n}]'
        raw = _field(term, 'strategies', key, list)
        if len(raw) != scenario.parties:
            raise ParseError(f"expected {scenario.parties} strategies", key=key)
        strategies = tuple(_strategy_from_json(s, m, d, f'{key}.strategies[{p}]')
                           for p, (s, m, d) in enumerate(zip(raw, scenario.inputs, scenario.outputs)))
        terms.append(LocalTerm(parse_rational(_field(term, 'weight', key), f'{key}.weight'),
                               strategies))
    return LocalModel(scenario, tuple(terms))


# --- optimization results ------------------------------------------------------


def optimum_to_json(optimum: BellOptimum) -> Dict[str, Any]:
    witness = optimum.witness
    if isinstance(witness, LocalModel):
        witness = local_model_to_json(witness)
    elif isinstance(witness, ToblDecomposition):
        witness = decomposition_to_json(witness)
    return {'set': optimum.correlation_set.value, 'value': format_rational(optimum.value),
            'symmetric': optimum.symmetric, 'optimizer': behavior_to_json(optimum.optimizer),
            'witness': witness}


def optimum_from_json(data: Any) -> BellOptimum:
    try:
        correlation_set = CorrelationSet(_field(data, 'set', 'optimum'))
    except ValueError as e:
        raise ParseError(str(e), key='set') from None
    raw = data.get('witness')
    witness = None
    if raw is not None and correlation_set is CorrelationSet.LOCAL:
        witness = local_model_from_json(raw)
    elif raw is not None and correlation_set is CorrelationSet.TOBL:
        witness = decomposition_from_json(raw)
    return BellOptimum(parse_rational(_field(data, 'value', 'optimum'), 'value'),
                       behavior_from_json(_field(data, 'optimizer', 'optimum')),
                       witness, correlation_set, bool(data.get('symmetric', False)))


# --- wiring protocols ----------------------------------------------------------


def _side(value: Any, key: str) -> Side:
    try:
        return Side(value)
    except ValueError:
        raise ParseError(f"side must be 'A' or 'B', got {value!r}", key=key) from None


def _arities(value: Any, key: str) -> Tuple[int, ...]:
    if isinstance(value, int) and not isinstance(value, bool):
        return (2,) * value
    return _int_list(value, key)


def _program_from_json(data: Any, boxes: int, side: Side) -> SideProgram:
    context = side.value
    inputs = _arities(_field(data, 'inputs', context), f'{context}.inputs')
    outputs = _arities(_field(data, 'outputs', context), f'{context}.outputs')
    steps = []
    for n, raw in enumerate(_field(data, 'steps', context, list)):
        key = f'{context}.steps[{n}]'
        box = _field(raw, 'box', key, int)
        slot = _field(raw, 'slot', key, int)
        if not 1 <= box <= boxes or not 1 <= slot <= 3:
            raise ParseError(f"no subsystem (box {box}, slot {slot})", key=key)
        table = {}
        for k, v in _field(raw, 'input_table', key, dict).items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError("input must be an integer", key=f'{key}.input_table[{k}]')
            table[parse_key(k, f'{key}.input_table[{k}]')] = v
        steps.append(ProgramStep(box - 1, slot - 1, table))
    output_table = {}
    for k, v in _field(data, 'output_table', context, dict).items():
        output_table[parse_key(k, f'{context}.output_table[{k}]')] = \
            _int_list(v, f'{context}.output_table[{k}]')
    return SideProgram(inputs, outputs, tuple(steps), output_table)


def _program_to_json(program: SideProgram) -> Dict[str, Any]:
    return {'inputs': list(program.inputs), 'outputs': list(program.outputs),
            'steps': [{'box': s.box + 1, 'slot': s.slot + 1,
                       'input_table': {format_key(e, o): v for (e, o), v in s.input_table.items()}}
                      for s in program.steps],
            'output_table': {format_key(e, o): list(v) for (e, o), v in program.output_table.items()}}


def protocol_to_json(protocol: WiringProtocol) -> Dict[str, Any]:
    return {'boxes': protocol.boxes,
            'assignment': [[s.value for s in sides] for sides in protocol.assignment],
            'A': _program_to_json(protocol.program_a),
            'B': _program_to_json(protocol.program_b),
            'interleaving': [[side.value, step + 1] for side, step in protocol.interleaving]}


def protocol_from_json(data: Any) -> WiringProtocol:
    boxes = _field(data, 'boxes', 'protocol', int)
    assignment = tuple(tuple(_side(s, f'assignment[{n}]') for s in sides)
                       for n, sides in enumerate(_field(data, 'assignment', 'protocol', list)))
    program_a = _program_from_json(_field(data, 'A', 'protocol'), boxes, Side.A)
    program_b = _program_from_json(_field(data, 'B', 'protocol'), boxes, Side.B)
    interleaving = []
    for n, ref in enumerate(_field(data, 'interleaving', 'protocol', list)):
        if not isinstance(ref, list) or len(ref) != 2 or not isinstance(ref[1], int):
            raise ParseError("step reference must be [side, step number]", key=f'interleaving[{n}]')
        interleaving.append((_side(ref[0], f'interleaving[{n}]'), ref[1] - 1))
    return WiringProtocol(boxes, assignment, program_a, program_b, tuple(interleaving))


def report_to_json(report: LocalityReport) -> Dict[str, Any]:
    return {'p_fin': behavior_to_json(report.p_fin),
            'model': local_model_to_json(report.model),
            'reconstruction_equal': report.reconstruction_equal,
            'chsh_value': None if report.chsh_value is None else format_rational(report.chsh_value),
            'is_local_confirmed': report.is_local_confirmed,
            'passed': report.passed}


# --- files -------------------------------------------------------------------


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=str(path), line=e.lineno) from None


def load(path: Union[str, Path], decoder):
    """Decode a file, attaching the path to any ParseError"""
    data = read_json(path)
    try:
        return decoder(data)
    except ParseError as e:
        raise ParseError(e.detail, path=str(path), key=e.key, line=e.line) from None
    except (AttributeError, TypeError) as e:
        raise ParseError(f"unexpected structure ({e})", path=str(path)) from None


def dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def write_json(path: Union[str, Path], payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump(payload) + '\n', encoding='utf-8')
    logger.debug(f"wrote {path}")
    return path
