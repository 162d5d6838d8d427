"""
TOBL Correlation Toolkit - Membership Module
Local and TOBL membership LPs, decomposition algebra and Bell maximization
"""

import bisect
import itertools
import logging
from collections.abc import Sequence as SequenceABC
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from bell import check_functional, deterministic_value, evaluate, symmetry_group
from config import ENUM_CAP, MEMBERSHIP_PIVOT_RULE, SOLVER_WORKERS
from core import (check_permutation, complement, party_marginal, permute_entry,
                  permute_parties, proper_subsets, require_valid)
from errors import (BadWeights, DecompositionMismatch, IncompatibleScenario, IndexOutOfRange,
                    NotTripartite, ScenarioMismatch, ScenarioTooLarge, ZeroProbabilityOutcome)
from models import (ONE, ZERO, Behavior, BellFunctional, BellOptimum, Bipartition,
                    CorrelationSet, DeterministicStrategy, Direction, LocalModel,
                    LocalTerm, OneWayPairStrategy, Scenario, SeparatingFunctional, ToblDecomposition,
                    ToblTerm)
from ratlp import (Feasible, LinearProgram, Optimal, PivotRule, SparseColumn,
                   reduced_cost, solve)
from strategies import (enumerate_local_deterministic, enumerate_oneway, enumerate_party,
                        product_pair, swap_pair)

logger = logging.getLogger(__name__)

ToblVerdict = Union[ToblDecomposition, Tuple[Bipartition, SeparatingFunctional]]


def _require_tripartite(scenario: Scenario) -> None:
    if scenario.parties != 3:
        raise NotTripartite(f"TOBL models are tripartite, got {scenario.parties} parties")


def _membership_rule(rule: Optional[PivotRule]) -> PivotRule:
    return rule or PivotRule(MEMBERSHIP_PIVOT_RULE)


def _require_optimal(outcome, what: str) -> Optimal:
    if not isinstance(outcome, Optimal):
        raise RuntimeError(f"{what}: expected a bounded feasible LP, solver returned "
                           f"{type(outcome).__name__}")
    return outcome


def _outputs_of(point: Sequence[DeterministicStrategy], x: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(s(xi) for s, xi in zip(point, x))


# --- column blocks ---------------------------------------------------------


class _ExplicitBlock:
    """Materialized columns, priced by scanning"""

    def __init__(self, offset: int, columns: List[SparseColumn]):
        self.offset = offset
        self.columns = columns
        self.size = len(columns)

    def column(self, local: int) -> SparseColumn:
        return self.columns[local]

    def best(self, duals, costs, bland) -> Optional[Tuple[int, Fraction]]:
        best = None
        for local, column in enumerate(self.columns):
            j = self.offset + local
            rc = reduced_cost(column, duals, costs.get(j, ZERO))
            if rc > 0:
                if bland:
                    return j, rc
                if best is None or rc > best[1]:
                    best = (j, rc)
        return best


class _TripleBlock:
    """
    Zero-cost columns (solo, forward, backward) of one bipartition.

    Each column puts a one on the forward-block row of every entry hit by
    solo x forward, on the backward-block row of every entry hit by
    solo x backward, and on each of `extra_rows`.  Reduced costs split into
    a forward part and a backward part per solo strategy, so pricing the
    whole block never touches individual columns.
    """

    def __init__(self, offset: int, scenario: Scenario, bipartition: Bipartition,
                 forward_offset: int, backward_offset: int,
                 extra_rows: Optional[Dict[int, Fraction]] = None):
        self.offset = offset
        self.bipartition = bipartition
        i, j, k = bipartition.value
        pair = scenario.restrict((j, k))
        self.solos = list(enumerate_party(scenario.inputs[i], scenario.outputs[i]))
        self.forwards = list(enumerate_oneway(pair, Direction.FORWARD))
        self.backwards = list(enumerate_oneway(pair, Direction.BACKWARD))
        self.extra_rows = dict(extra_rows or {})
        index = scenario.entry_index

        def rows(solo, strategy, row_offset):
            hits = []
            for x in scenario.input_tuples:
                a = [0, 0, 0]
                a[i] = solo(x[i])
                a[j], a[k] = strategy.respond(x[j], x[k])
                hits.append(row_offset + index[(x, tuple(a))])
            return tuple(hits)

        self.forward_rows = [[rows(s, f, forward_offset) for f in self.forwards] for s in self.solos]
        self.backward_rows = [[rows(s, b, backward_offset) for b in self.backwards] for s in self.solos]
        self.size = len(self.solos) * len(self.forwards) * len(self.backwards)

    def locate(self, local: int) -> Tuple[int, int, int]:
        s, rest = divmod(local, len(self.forwards) * len(self.backwards))
        f, b = divmod(rest, len(self.backwards))
        return s, f, b

    def index(self, s: int, f: int, b: int) -> int:
        return self.offset + (s * len(self.forwards) + f) * len(self.backwards) + b

    def column(self, local: int) -> SparseColumn:
        s, f, b = self.locate(local)
        column = {r: ONE for r in self.forward_rows[s][f]}
        column.update((r, ONE) for r in self.backward_rows[s][b])
        column.update(self.extra_rows)
        return column

    def term(self, local: int, weight: Fraction) -> ToblTerm:
        s, f, b = self.locate(local)
        return ToblTerm(weight, self.solos[s], self.forwards[f], self.backwards[b])

    def partial_sums(self, duals):
        extra = sum((duals[r] * v for r, v in self.extra_rows.items()), ZERO)
        forward = [[sum((duals[r] for r in rows), ZERO) for rows in per_solo]
                   for per_solo in self.forward_rows]
        backward = [[sum((duals[r] for r in rows), ZERO) for rows in per_solo]
                    for per_solo in self.backward_rows]
        return extra, forward, backward

    def best(self, duals, costs, bland) -> Optional[Tuple[int, Fraction]]:
        extra, forward, backward = self.partial_sums(duals)
        if bland:
            for s in range(len(self.solos)):
                min_b = min(backward[s])
                if min(forward[s]) + min_b + extra >= 0:
                    continue
                for f, fv in enumerate(forward[s]):
                    if fv + min_b + extra < 0:
                        for b, bv in enumerate(backward[s]):
                            if fv + bv + extra < 0:
                                return self.index(s, f, b), -(fv + bv + extra)
            return None
        best = None
        for s in range(len(self.solos)):
            f = min(range(len(forward[s])), key=forward[s].__getitem__)
            b = min(range(len(backward[s])), key=backward[s].__getitem__)
            rc = -(forward[s][f] + backward[s][b] + extra)
            if rc > 0 and (best is None or rc > best[1]):
                best = (self.index(s, f, b), rc)
        return best

    def max_value(self, duals) -> Fraction:
        """Largest y^T column over the block"""
        extra, forward, backward = self.partial_sums(duals)
        return max(max(fs) + max(bs) for fs, bs in zip(forward, backward)) + extra


class _BlockProgram(SequenceABC):
    """Concatenated column blocks; doubles as the LP's pricer"""

    def __init__(self, blocks):
        self.blocks = blocks
        self.starts = [block.offset for block in blocks]
        self.total = sum(block.size for block in blocks)

    def __len__(self):
        return self.total

    def __getitem__(self, j):
        if not 0 <= j < self.total:
            raise IndexError(j)
        block = self.blocks[bisect.bisect_right(self.starts, j) - 1]
        return block.column(j - block.offset)

    def entering(self, duals, costs, bland):
        best = None
        for block in self.blocks:
            found = block.best(duals, costs, bland)
            if found is None:
                continue
            if bland:
                return found[0]
            if best is None or found[1] > best[1]:
                best = found
        return None if best is None else best[0]


# --- local set -------------------------------------------------------------


def _local_columns(scenario: Scenario, enum_cap: int):
    count = scenario.deterministic_count()
    if count > enum_cap:
        raise ScenarioTooLarge(f"{count} deterministic points exceed the cap of {enum_cap}")
    points = list(enumerate_local_deterministic(scenario))
    index = scenario.entry_index
    columns = [{index[(x, _outputs_of(point, x))]: ONE for x in scenario.input_tuples}
               for point in points]
    return points, columns


def _functional_from(scenario: Scenario, values: Sequence[Fraction]) -> BellFunctional:
    return BellFunctional(scenario, {entry: v for entry, v in zip(scenario.entries, values) if v})


def reconstruct_local(model: LocalModel) -> Behavior:
    scenario = model.scenario
    table = {entry: ZERO for entry in scenario.entries}
    for term in model.terms:
        for x in scenario.input_tuples:
            table[(x, _outputs_of(term.strategies, x))] += term.weight
    return Behavior(scenario, table)


def is_local(behavior: Behavior, enum_cap: int = ENUM_CAP,
             rule: Optional[PivotRule] = None) -> Union[LocalModel, SeparatingFunctional]:
    """Local model of the behavior, or a Bell functional it violates"""
    require_valid(behavior)
    scenario = behavior.scenario
    points, columns = _local_columns(scenario, enum_cap)
    outcome = solve(LinearProgram(columns, behavior.vector()), _membership_rule(rule))

    if isinstance(outcome, Feasible):
        terms = tuple(LocalTerm(w, points[j]) for j, w in outcome.primal.items())
        model = LocalModel(scenario, terms).canonical()
        logger.info(f"local: model with {len(model.terms)} terms")
        return model

    y = outcome.certificate
    functional = _functional_from(scenario, y)
    bound = max(sum((y[r] for r in column), ZERO) for column in columns)
    separating = SeparatingFunctional(functional, bound, evaluate(functional, behavior))
    logger.info(f"not local: functional value {separating.value} exceeds bound {bound}")
    return separating


# --- TOBL set ----------------------------------------------------------------


def _canonical_terms(terms: Sequence[ToblTerm]) -> Tuple[ToblTerm, ...]:
    merged: Dict[Tuple, Fraction] = {}
    for term in terms:
        key = (term.solo, term.forward, term.backward)
        merged[key] = merged.get(key, ZERO) + term.weight
    canonical = [ToblTerm(w, *key) for key, w in merged.items() if w != 0]
    return tuple(sorted(canonical, key=ToblTerm.sort_key))


def _solve_bipartition(behavior: Behavior, bipartition: Bipartition,
                       rule: PivotRule) -> Union[Tuple[ToblTerm, ...], SeparatingFunctional]:
    scenario = behavior.scenario
    size = len(scenario.entries)
    block = _TripleBlock(0, scenario, bipartition, 0, size)
    program = _BlockProgram([block])
    vector = behavior.vector()
    outcome = solve(LinearProgram(program, vector + vector, pricer=program), rule)
    if isinstance(outcome, Feasible):
        return _canonical_terms([block.term(j, w) for j, w in outcome.primal.items()])

    y = outcome.certificate
    functional = _functional_from(scenario, [f + b for f, b in zip(y[:size], y[size:])])
    return SeparatingFunctional(functional, block.max_value(y), evaluate(functional, behavior))


def _bipartition_results(behavior: Behavior, rule: PivotRule, workers: int) -> Iterator:
    bipartitions = list(Bipartition)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(bipartitions))) as pool:
            results = list(pool.map(_solve_bipartition, [behavior] * len(bipartitions),
                                    bipartitions, [rule] * len(bipartitions)))
        yield from zip(bipartitions, results)
        return
    for bipartition in bipartitions:
        yield bipartition, _solve_bipartition(behavior, bipartition, rule)


def is_tobl(behavior: Behavior, workers: int = SOLVER_WORKERS,
            rule: Optional[PivotRule] = None) -> ToblVerdict:
    """
    Decide TOBL membership, one feasibility LP per bipartition.

    Returns the decomposition, or the first failing bipartition (in
    1|23, 2|31, 3|12 order) with a separating functional valid on every
    behavior that decomposes for that bipartition.
    """
    _require_tripartite(behavior.scenario)
    require_valid(behavior)
    terms = {}
    for bipartition, result in _bipartition_results(behavior, _membership_rule(rule), workers):
        if isinstance(result, SeparatingFunctional):
            logger.info(f"not TOBL: bipartition {bipartition.label} infeasible, "
                        f"functional value {result.value} exceeds bound {result.bound}")
            return bipartition, result
        terms[bipartition] = result
        logger.debug(f"bipartition {bipartition.label}: {len(result)} terms")
    logger.info("TOBL: decomposition found for all bipartitions")
    return ToblDecomposition(behavior.scenario, terms)


def _pair_fits(strategy: OneWayPairStrategy, direction: Direction,
               inputs: Tuple[int, int], outputs: Tuple[int, int]) -> bool:
    if strategy.direction is not direction or tuple(strategy.inputs) != inputs \
            or tuple(strategy.outputs) != outputs:
        return False
    sender = 0 if direction is Direction.FORWARD else 1
    receiver = 1 - sender
    return (len(strategy.sender) == inputs[sender]
            and len(strategy.receiver) == inputs[0] * inputs[1]
            and all(0 <= v < outputs[sender] for v in strategy.sender)
            and all(0 <= v < outputs[receiver] for v in strategy.receiver))


def _term_fits(scenario: Scenario, bipartition: Bipartition, term: ToblTerm) -> bool:
    i, j, k = bipartition.value
    solo = term.solo
    if solo.outputs != scenario.outputs[i] or solo.inputs != scenario.inputs[i] \
            or not all(0 <= v < solo.outputs for v in solo.assignment):
        return False
    inputs = (scenario.inputs[j], scenario.inputs[k])
    outputs = (scenario.outputs[j], scenario.outputs[k])
    return (_pair_fits(term.forward, Direction.FORWARD, inputs, outputs)
            and _pair_fits(term.backward, Direction.BACKWARD, inputs, outputs))


def reconstruct_tobl(decomposition: ToblDecomposition, bipartition: Bipartition,
                     direction: Direction) -> Behavior:
    """Behavior generated by one bipartition's terms using one signaling direction"""
    scenario = decomposition.scenario
    _require_tripartite(scenario)
    if bipartition not in decomposition.terms:
        raise DecompositionMismatch(f"no terms for bipartition {bipartition.label}")
    i, j, k = bipartition.value
    table = {entry: ZERO for entry in scenario.entries}
    for term in decomposition.terms[bipartition]:
        pair = term.forward if direction is Direction.FORWARD else term.backward
        for x in scenario.input_tuples:
            a = [0, 0, 0]
            a[i] = term.solo(x[i])
            a[j], a[k] = pair.respond(x[j], x[k])
            table[(x, tuple(a))] += term.weight
    return Behavior(scenario, table)


def verify_bipartition(behavior: Behavior, decomposition: ToblDecomposition,
                       bipartition: Bipartition) -> bool:
    """One bipartition's terms: well-shaped, a distribution, and both directions reproduce"""
    scenario = behavior.scenario
    if decomposition.scenario != scenario or scenario.parties != 3:
        return False
    terms = decomposition.terms.get(bipartition)
    if not terms:
        logger.debug(f"bipartition {bipartition.label} missing")
        return False
    if not all(_term_fits(scenario, bipartition, t) for t in terms):
        logger.debug(f"bipartition {bipartition.label}: term shape does not fit {scenario}")
        return False
    if any(t.weight < 0 for t in terms) or sum((t.weight for t in terms), ZERO) != 1:
        logger.debug(f"bipartition {bipartition.label}: weights are not a distribution")
        return False
    for direction in Direction:
        if reconstruct_tobl(decomposition, bipartition, direction) != behavior:
            logger.debug(f"bipartition {bipartition.label}: {direction.value} reconstruction differs")
            return False
    return True


def verify_tobl_decomposition(behavior: Behavior, decomposition: ToblDecomposition) -> bool:
    return all(verify_bipartition(behavior, decomposition, b) for b in Bipartition)


# --- decomposition algebra ---------------------------------------------------


def local_to_tobl(model: LocalModel) -> ToblDecomposition:
    """A local model read as a TOBL decomposition with product pair strategies"""
    _require_tripartite(model.scenario)
    terms = {}
    for bipartition in Bipartition:
        i, j, k = bipartition.value
        terms[bipartition] = _canonical_terms([
            ToblTerm(t.weight, t.strategies[i],
                     product_pair(t.strategies[j], t.strategies[k], Direction.FORWARD),
                     product_pair(t.strategies[j], t.strategies[k], Direction.BACKWARD))
            for t in model.terms])
    return ToblDecomposition(model.scenario, terms)


def _inverse(permutation: Tuple[int, ...]) -> List[int]:
    inverse = [0] * len(permutation)
    for q, p in enumerate(permutation):
        inverse[p] = q
    return inverse


def permute_decomposition(decomposition: ToblDecomposition,
                          permutation: Sequence[int]) -> ToblDecomposition:
    """Decomposition of permute_parties(behavior, permutation)"""
    scenario = decomposition.scenario
    _require_tripartite(scenario)
    permutation = check_permutation(permutation, 3)
    inverse = _inverse(permutation)
    terms = {}
    for bipartition, old_terms in decomposition.terms.items():
        i, j, k = bipartition.value
        target = Bipartition.with_solo(inverse[i])
        same_order = target.pair == (inverse[j], inverse[k])
        moved = []
        for t in old_terms:
            if same_order:
                moved.append(t)
            else:
                moved.append(ToblTerm(t.weight, t.solo, swap_pair(t.backward), swap_pair(t.forward)))
        terms[target] = _canonical_terms(moved)
    return ToblDecomposition(scenario.restrict(permutation), terms)


def extend_by_symmetry(behavior: Behavior, decomposition: ToblDecomposition,
                       group: Optional[Sequence[Sequence[int]]] = None) -> ToblDecomposition:
    """Fill in missing bipartitions from symmetries of the behavior"""
    _require_tripartite(behavior.scenario)
    if group is None:
        group = list(itertools.permutations(range(3)))
    symmetries = [tuple(g) for g in group if permute_parties(behavior, g) == behavior]
    terms = dict(decomposition.terms)
    for target in Bipartition:
        if target in terms:
            continue
        for g in symmetries:
            inverse = _inverse(g)
            source = next((b for b in decomposition.terms if inverse[b.solo] == target.solo), None)
            if source is not None:
                single = ToblDecomposition(decomposition.scenario,
                                           {source: decomposition.terms[source]})
                terms[target] = permute_decomposition(single, g).terms[target]
                break
        else:
            raise DecompositionMismatch(
                f"no symmetry of the behavior maps a known bipartition onto {target.label}")
    return ToblDecomposition(decomposition.scenario, terms)


def mix_decompositions(decompositions: Sequence[ToblDecomposition],
                       weights: Sequence[Fraction]) -> ToblDecomposition:
    """Decomposition of mix(behaviors, weights); keeps bipartitions common to all"""
    if not decompositions or len(decompositions) != len(weights):
        raise BadWeights(f"{len(decompositions)} decompositions with {len(weights)} weights")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise BadWeights(f"weights {[str(w) for w in weights]} are not a probability vector")
    scenario = decompositions[0].scenario
    if any(d.scenario != scenario for d in decompositions):
        raise ScenarioMismatch("cannot mix decompositions of different scenarios")
    common = [b for b in Bipartition if all(b in d.terms for d in decompositions)]
    terms = {}
    for bipartition in common:
        terms[bipartition] = _canonical_terms([
            ToblTerm(w * t.weight, t.solo, t.forward, t.backward)
            for d, w in zip(decompositions, weights) for t in d.terms[bipartition]])
    return ToblDecomposition(scenario, terms)


def _relabel_solo(strategy: DeterministicStrategy, party: int, input_perms, output_maps):
    assignment = [0] * strategy.inputs
    for x, a in enumerate(strategy.assignment):
        assignment[input_perms[party][x]] = output_maps[party][x][a]
    return DeterministicStrategy(strategy.outputs, tuple(assignment))


def _relabel_pair(strategy: OneWayPairStrategy, j: int, k: int, input_perms, output_maps):
    forward = strategy.direction is Direction.FORWARD
    m_j, m_k = strategy.inputs
    sender_party, receiver_party = (j, k) if forward else (k, j)
    sender = [0] * len(strategy.sender)
    for x, a in enumerate(strategy.sender):
        sender[input_perms[sender_party][x]] = output_maps[sender_party][x][a]
    receiver = [0] * (m_j * m_k)
    for y in range(m_j):
        for z in range(m_k):
            own = z if forward else y
            value = output_maps[receiver_party][own][strategy.receiver[y * m_k + z]]
            receiver[input_perms[j][y] * m_k + input_perms[k][z]] = value
    return OneWayPairStrategy(strategy.direction, strategy.inputs, strategy.outputs,
                              tuple(sender), tuple(receiver))


def relabel_decomposition(decomposition: ToblDecomposition, input_perms, output_maps) -> ToblDecomposition:
    """Decomposition of core.relabel(behavior, input_perms, output_maps)"""
    scenario = decomposition.scenario
    _require_tripartite(scenario)
    for i in range(3):
        check_permutation(input_perms[i], scenario.inputs[i])
        if len(output_maps[i]) != scenario.inputs[i]:
            raise IncompatibleScenario(f"party {i} needs one output map per input")
        for perm in output_maps[i]:
            check_permutation(perm, scenario.outputs[i])
    terms = {}
    for bipartition, old_terms in decomposition.terms.items():
        i, j, k = bipartition.value
        terms[bipartition] = _canonical_terms([
            ToblTerm(t.weight,
                     _relabel_solo(t.solo, i, input_perms, output_maps),
                     _relabel_pair(t.forward, j, k, input_perms, output_maps),
                     _relabel_pair(t.backward, j, k, input_perms, output_maps))
            for t in old_terms])
    return ToblDecomposition(scenario, terms)


def postselection_local_model(behavior: Behavior, decomposition: ToblDecomposition, party: int,
                              sel_input: int, sel_outcome: int) -> LocalModel:
    """
    Local model of postselect(behavior, party, sel_input, sel_outcome).

    Uses the bipartition in which `party` is the sender of the backward
    strategies: each term keeps weight p * [c(sel_input) = sel_outcome] / P,
    the solo party keeps its strategy and the remaining receiver answers
    with its table at the fixed selected input.
    """
    scenario = behavior.scenario
    _require_tripartite(scenario)
    bipartition = next(b for b in Bipartition if b.value[2] == party)
    i, j, _ = bipartition.value
    if not 0 <= sel_input < scenario.inputs[party] or not 0 <= sel_outcome < scenario.outputs[party]:
        raise IndexOutOfRange(f"input {sel_input} / outcome {sel_outcome} outside party {party}")
    if not verify_bipartition(behavior, decomposition, bipartition):
        raise DecompositionMismatch(
            f"decomposition does not reproduce the behavior on {bipartition.label}")

    selected = party_marginal(behavior, party, sel_input)[sel_outcome]
    if selected == 0:
        raise ZeroProbabilityOutcome(f"P({sel_outcome}|{sel_input}) = 0 for party {party}")

    m_k = scenario.inputs[party]
    rest = complement(scenario, (party,))
    terms = []
    for term in decomposition.terms[bipartition]:
        backward = term.backward
        if backward.sender[sel_input] != sel_outcome:
            continue
        receiver = DeterministicStrategy(
            scenario.outputs[j],
            tuple(backward.receiver[y * m_k + sel_input] for y in range(scenario.inputs[j])))
        by_party = {i: term.solo, j: receiver}
        terms.append(LocalTerm(term.weight / selected, tuple(by_party[p] for p in rest)))
    return LocalModel(scenario.restrict(rest), tuple(terms))


# --- Bell maximization -------------------------------------------------------


def _full_tuple(n: int, first, first_values, second, second_values) -> Tuple[int, ...]:
    full = [0] * n
    for p, v in zip(first, first_values):
        full[p] = v
    for p, v in zip(second, second_values):
        full[p] = v
    return tuple(full)


def nonsignaling_rows(scenario: Scenario) -> Tuple[List[Dict[int, Fraction]], List[Fraction]]:
    """Normalization and no-signaling equalities over entry variables"""
    index = scenario.entry_index
    rows: List[Dict[int, Fraction]] = []
    rhs: List[Fraction] = []
    for x in scenario.input_tuples:
        rows.append({index[(x, a)]: ONE for a in scenario.output_tuples})
        rhs.append(ONE)
    n = scenario.parties
    ranges = lambda parties, sizes: [range(sizes[p]) for p in parties]  # noqa: E731
    for subset in proper_subsets(n):
        others = complement(scenario, subset)
        other_inputs = list(itertools.product(*ranges(others, scenario.inputs)))
        other_outputs = list(itertools.product(*ranges(others, scenario.outputs)))
        for kept_x in itertools.product(*ranges(subset, scenario.inputs)):
            for kept_a in itertools.product(*ranges(subset, scenario.outputs)):
                reference = other_inputs[0]
                for conflicting in other_inputs[1:]:
                    row: Dict[int, Fraction] = {}
                    for a_other in other_outputs:
                        a = _full_tuple(n, subset, kept_a, others, a_other)
                        ref = index[(_full_tuple(n, subset, kept_x, others, reference), a)]
                        alt = index[(_full_tuple(n, subset, kept_x, others, conflicting), a)]
                        row[ref] = row.get(ref, ZERO) + ONE
                        row[alt] = row.get(alt, ZERO) - ONE
                    rows.append(row)
                    rhs.append(ZERO)
    return rows, rhs


def _symmetry_rows(scenario: Scenario, group) -> List[Dict[int, Fraction]]:
    """P(e) - P(representative of e's orbit) = 0"""
    index = scenario.entry_index
    rows = []
    for entry in scenario.entries:
        orbit = {index[permute_entry(g, *entry)] for g in group}
        representative = min(orbit)
        if index[entry] != representative:
            rows.append({index[entry]: ONE, representative: -ONE})
    return rows


def _kept_bipartitions(group) -> List[Bipartition]:
    kept = []
    for bipartition in Bipartition:
        if not any(bipartition.solo in {g[b.solo] for g in group} for b in kept):
            kept.append(bipartition)
    return kept


def _maximize_local(functional: BellFunctional, rule: PivotRule, enum_cap: int) -> BellOptimum:
    scenario = functional.scenario
    points, _ = _local_columns(scenario, enum_cap)
    objective = {}
    for j, point in enumerate(points):
        value = deterministic_value(functional, point)
        if value:
            objective[j] = value
    lp = LinearProgram([{0: ONE} for _ in points], [ONE], objective)
    outcome = _require_optimal(solve(lp, rule), "local maximization")
    model = LocalModel(scenario, tuple(LocalTerm(w, points[j])
                                       for j, w in outcome.primal.items())).canonical()
    return BellOptimum(outcome.value, reconstruct_local(model), model, CorrelationSet.LOCAL)


def _maximize_program(functional: BellFunctional, correlation_set: CorrelationSet,
                      symmetric: bool, rule: PivotRule) -> BellOptimum:
    scenario = functional.scenario
    size = len(scenario.entries)
    entry_columns: List[Dict[int, Fraction]] = [{} for _ in range(size)]
    rhs: List[Fraction] = []

    def add_row(coefficients: Dict[int, Fraction], value: Fraction) -> int:
        row = len(rhs)
        rhs.append(value)
        for e, c in coefficients.items():
            entry_columns[e][row] = c
        return row

    group = symmetry_group(functional) if symmetric else [tuple(range(scenario.parties))]
    if len(group) > 1:
        for row in _symmetry_rows(scenario, group):
            add_row(row, ZERO)

    blocks = []
    if correlation_set is CorrelationSet.NO_SIGNALING:
        rows, values = nonsignaling_rows(scenario)
        for row, value in zip(rows, values):
            add_row(row, value)
        bipartitions = []
    else:
        bipartitions = _kept_bipartitions(group)
        normalization = add_row({}, ONE)
        offset = size
        for position, bipartition in enumerate(bipartitions):
            forward_offset = len(rhs)
            for e in range(size):
                add_row({e: -ONE}, ZERO)
            backward_offset = len(rhs)
            for e in range(size):
                add_row({e: -ONE}, ZERO)
            extra = {normalization: ONE} if position == 0 else None
            block = _TripleBlock(offset, scenario, bipartition, forward_offset, backward_offset, extra)
            blocks.append(block)
            offset += block.size

    program = _BlockProgram([_ExplicitBlock(0, entry_columns)] + blocks)
    index = scenario.entry_index
    objective = {index[entry]: c for entry, c in functional.coefficients.items() if c}
    logger.info(f"maximizing over {correlation_set.value}: {len(rhs)} rows, {len(program)} columns"
                f"{' (symmetric)' if len(group) > 1 else ''}")
    outcome = _require_optimal(solve(LinearProgram(program, rhs, objective, pricer=program), rule),
                               f"{correlation_set.value} maximization")

    optimizer = Behavior(scenario, {entry: outcome.primal.get(index[entry], ZERO)
                                    for entry in scenario.entries})
    witness = None
    if blocks:
        terms = {}
        for block in blocks:
            terms[block.bipartition] = _canonical_terms([
                block.term(j - block.offset, w) for j, w in outcome.primal.items()
                if block.offset <= j < block.offset + block.size])
        witness = ToblDecomposition(scenario, terms)
        if len(terms) < 3:
            witness = extend_by_symmetry(optimizer, witness, group)
    return BellOptimum(outcome.value, optimizer, witness, correlation_set, len(group) > 1)


def maximize_bell(functional: BellFunctional, correlation_set: CorrelationSet,
                  symmetric: bool = False, rule: Optional[PivotRule] = None,
                  enum_cap: int = ENUM_CAP) -> BellOptimum:
    """Exact maximum of the functional over the local, TOBL or no-signaling set"""
    check_functional(functional)
    rule = _membership_rule(rule)
    if correlation_set is CorrelationSet.LOCAL:
        optimum = _maximize_local(functional, rule, enum_cap)
    else:
        if correlation_set is CorrelationSet.TOBL:
            _require_tripartite(functional.scenario)
        optimum = _maximize_program(functional, correlation_set, symmetric, rule)
    logger.info(f"maximum over {correlation_set.value}: {optimum.value}")
    return optimum
