"""
TOBL Correlation Toolkit - Exact Rational Linear Programming
Two-phase revised primal simplex over fractions.Fraction for
Ax = b, x >= 0, with Farkas certificates of infeasibility
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

from config import DEGENERATE_STREAK, PIVOT_RULE
from errors import DimensionMismatch
from models import ONE, ZERO

logger = logging.getLogger(__name__)

SparseColumn = Mapping[int, Fraction]


class PivotRule(Enum):
    BLAND = "bland"      # lowest-index entering and leaving variable
    DANTZIG = "dantzig"  # largest reduced cost, Bland's rule while a degenerate streak lasts


class Pricer(Protocol):
    """Chooses the entering column from the current duals"""

    def entering(self, duals: Sequence[Fraction], costs: Mapping[int, Fraction],
                 bland: bool) -> Optional[int]:
        ...


def reduced_cost(column: SparseColumn, duals: Sequence[Fraction], cost: Fraction) -> Fraction:
    return cost - sum((duals[i] * v for i, v in column.items()), ZERO)


class ScanPricer:
    """Prices every column in index order"""

    def __init__(self, columns: Sequence[SparseColumn]):
        self.columns = columns

    def entering(self, duals, costs, bland):
        best, best_j = ZERO, None
        for j in range(len(self.columns)):
            rc = reduced_cost(self.columns[j], duals, costs.get(j, ZERO))
            if rc > 0:
                if bland:
                    return j
                if rc > best:
                    best, best_j = rc, j
        return best_j


@dataclass
class LinearProgram:
    """
    Standard form: columns of A (sparse, row -> value), right-hand side b,
    optional sparse objective to maximize (absent: pure feasibility).

    `columns` may be any Sequence, including one that builds columns on
    demand; `pricer` replaces the default full scan when the column set has
    structure that allows faster pricing.
    """
    columns: Sequence[SparseColumn]
    rhs: Sequence[Fraction]
    objective: Optional[Mapping[int, Fraction]] = None
    pricer: Optional[Pricer] = None

    @property
    def rows(self) -> int:
        return len(self.rhs)


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    primal: Dict[int, Fraction]
    dual: Tuple[Fraction, ...]
    iterations: int = 0


@dataclass(frozen=True)
class Feasible:
    primal: Dict[int, Fraction]
    iterations: int = 0


@dataclass(frozen=True)
class Infeasible:
    certificate: Tuple[Fraction, ...]
    iterations: int = 0


@dataclass(frozen=True)
class Unbounded:
    ray: Dict[int, Fraction]
    primal: Dict[int, Fraction]
    iterations: int = 0


LpOutcome = Union[Optimal, Feasible, Infeasible, Unbounded]


def _check_dimensions(lp: LinearProgram) -> None:
    m, n = lp.rows, len(lp.columns)
    if lp.objective is not None:
        bad = [j for j in lp.objective if not 0 <= j < n]
        if bad:
            raise DimensionMismatch(f"objective refers to columns {bad[:5]} of {n}")
    if lp.pricer is None:
        for j in range(n):
            bad = [i for i in lp.columns[j] if not 0 <= i < m]
            if bad:
                raise DimensionMismatch(f"column {j} refers to rows {bad[:5]} of {m}")


class _RevisedSimplex:
    """Dense-free revised simplex: sparse rows of the basis inverse"""

    def __init__(self, lp: LinearProgram, rule: PivotRule, degenerate_streak: int):
        self.lp = lp
        self.rule = rule
        self.degenerate_streak = degenerate_streak
        self.m = lp.rows
        self.n = len(lp.columns)
        rhs = [Fraction(b) for b in lp.rhs]
        self.sign = [-1 if b < 0 else 1 for b in rhs]
        self.x_b = [abs(b) for b in rhs]
        self.basis = [self.n + i for i in range(self.m)]
        self.binv: List[Dict[int, Fraction]] = [{i: ONE} for i in range(self.m)]
        self.pricer = lp.pricer or ScanPricer(lp.columns)
        self.iterations = 0

    def column(self, j: int) -> Dict[int, Fraction]:
        if j >= self.n:
            return {j - self.n: ONE}
        return {i: v * self.sign[i] for i, v in self.lp.columns[j].items() if v}

    def duals(self, cost) -> List[Fraction]:
        """c_B^T B^-1 in the sign-adjusted row space"""
        y = [ZERO] * self.m
        for r, var in enumerate(self.basis):
            c = cost(var)
            if c:
                for k, v in self.binv[r].items():
                    y[k] += c * v
        return y

    def to_original(self, y: Sequence[Fraction]) -> List[Fraction]:
        return [v * s for v, s in zip(y, self.sign)]

    def direction(self, a_q: Mapping[int, Fraction]) -> List[Fraction]:
        d = []
        for row in self.binv:
            total = ZERO
            for k, v in a_q.items():
                coefficient = row.get(k)
                if coefficient is not None:
                    total += coefficient * v
            d.append(total)
        return d

    def ratio_test(self, d: Sequence[Fraction], artificials_fixed: bool) -> Optional[int]:
        best_key, best_row = None, None
        for i, d_i in enumerate(d):
            if not d_i:
                continue
            if artificials_fixed and self.basis[i] >= self.n:
                ratio = ZERO  # artificial pinned at zero after phase 1
            elif d_i > 0:
                ratio = self.x_b[i] / d_i
            else:
                continue
            key = (ratio, self.basis[i])
            if best_key is None or key < best_key:
                best_key, best_row = key, i
        return best_row

    def pivot(self, r: int, q: int, d: Sequence[Fraction], theta: Fraction) -> None:
        for i, d_i in enumerate(d):
            if i != r and d_i:
                self.x_b[i] -= theta * d_i
        self.x_b[r] = theta
        pivot_value = d[r]
        pivot_row = {k: v / pivot_value for k, v in self.binv[r].items()}
        self.binv[r] = pivot_row
        for i, d_i in enumerate(d):
            if i == r or not d_i:
                continue
            row = self.binv[i]
            for k, v in pivot_row.items():
                updated = row.get(k, ZERO) - d_i * v
                if updated:
                    row[k] = updated
                else:
                    row.pop(k, None)
        self.basis[r] = q

    def run(self, cost, costs: Mapping[int, Fraction], artificials_fixed: bool):
        """Iterate to optimality; returns None, or (entering, direction) if unbounded"""
        streak = 0
        while True:
            bland = self.rule is PivotRule.BLAND or streak >= self.degenerate_streak
            y = self.to_original(self.duals(cost))
            q = self.pricer.entering(y, costs, bland)
            if q is None:
                return None
            d = self.direction(self.column(q))
            r = self.ratio_test(d, artificials_fixed)
            if r is None:
                return q, d
            theta = self.x_b[r] / d[r] if not (artificials_fixed and self.basis[r] >= self.n) else ZERO
            if theta == 0:
                streak += 1
                if streak == self.degenerate_streak and self.rule is PivotRule.DANTZIG:
                    logger.debug(f"{streak} degenerate pivots, switching to Bland's rule")
            else:
                streak = 0
            self.pivot(r, q, d, theta)
            self.iterations += 1
            if self.iterations % 200 == 0:
                logger.debug(f"simplex iteration {self.iterations}")

    def primal(self) -> Dict[int, Fraction]:
        return {var: value for var, value in zip(self.basis, self.x_b) if var < self.n and value}

    def solve(self) -> LpOutcome:
        n = self.n
        phase_one_cost = lambda var: -ONE if var >= n else ZERO  # noqa: E731
        self.run(phase_one_cost, {}, artificials_fixed=False)
        infeasibility = sum((v for var, v in zip(self.basis, self.x_b) if var >= n), ZERO)
        logger.debug(f"phase 1 finished after {self.iterations} iterations, "
                     f"infeasibility {infeasibility}")
        if infeasibility > 0:
            y = self.duals(phase_one_cost)
            certificate = tuple(-v * s for v, s in zip(y, self.sign))
            return Infeasible(certificate, self.iterations)

        if self.lp.objective is None:
            return Feasible(self.primal(), self.iterations)

        objective = {j: Fraction(c) for j, c in self.lp.objective.items() if c}
        phase_two_cost = lambda var: objective.get(var, ZERO)  # noqa: E731
        unbounded = self.run(phase_two_cost, objective, artificials_fixed=True)
        if unbounded is not None:
            q, d = unbounded
            ray = {q: ONE}
            for var, d_i in zip(self.basis, d):
                if var < n and d_i:
                    ray[var] = ray.get(var, ZERO) - d_i
            return Unbounded(ray, self.primal(), self.iterations)

        primal = self.primal()
        value = sum((objective.get(j, ZERO) * v for j, v in primal.items()), ZERO)
        dual = tuple(self.to_original(self.duals(phase_two_cost)))
        return Optimal(value, primal, dual, self.iterations)


def solve(lp: LinearProgram, rule: Optional[PivotRule] = None,
          degenerate_streak: int = DEGENERATE_STREAK) -> LpOutcome:
    """Solve exactly; the result is deterministic for a fixed pivot rule"""
    _check_dimensions(lp)
    rule = rule or PivotRule(PIVOT_RULE)
    outcome = _RevisedSimplex(lp, rule, degenerate_streak).solve()
    logger.debug(f"LP {lp.rows}x{len(lp.columns)}: {type(outcome).__name__} "
                 f"after {outcome.iterations} iterations")
    return outcome


def _residual(lp: LinearProgram, x: Mapping[int, Fraction]) -> List[Fraction]:
    totals = [ZERO] * lp.rows
    for j, value in x.items():
        for i, v in lp.columns[j].items():
            totals[i] += v * value
    return [t - Fraction(b) for t, b in zip(totals, lp.rhs)]


def _primal_ok(lp: LinearProgram, x: Mapping[int, Fraction]) -> bool:
    if any(v < 0 or not 0 <= j < len(lp.columns) for j, v in x.items()):
        return False
    return all(r == 0 for r in _residual(lp, x))


def verify_certificate(lp: LinearProgram, outcome: LpOutcome) -> bool:
    """Re-check the outcome's claims from the LP data alone"""
    objective = lp.objective or {}
    if isinstance(outcome, Feasible):
        return _primal_ok(lp, outcome.primal)
    if isinstance(outcome, Optimal):
        if len(outcome.dual) != lp.rows or not _primal_ok(lp, outcome.primal):
            return False
        value = sum((Fraction(objective.get(j, 0)) * v for j, v in outcome.primal.items()), ZERO)
        dual_value = sum((y * Fraction(b) for y, b in zip(outcome.dual, lp.rhs)), ZERO)
        if value != outcome.value or dual_value != outcome.value:
            return False
        return all(reduced_cost(lp.columns[j], outcome.dual, Fraction(objective.get(j, 0))) <= 0
                   for j in range(len(lp.columns)))
    if isinstance(outcome, Infeasible):
        y = outcome.certificate
        if len(y) != lp.rows:
            return False
        if sum((v * Fraction(b) for v, b in zip(y, lp.rhs)), ZERO) <= 0:
            return False
        return all(sum((y[i] * v for i, v in lp.columns[j].items()), ZERO) <= 0
                   for j in range(len(lp.columns)))
    if isinstance(outcome, Unbounded):
        ray = outcome.ray
        if any(v < 0 for v in ray.values()) or not _primal_ok(lp, outcome.primal):
            return False
        homogeneous = _residual(lp, ray)
        if any(r + Fraction(b) != 0 for r, b in zip(homogeneous, lp.rhs)):
            return False
        return sum((Fraction(objective.get(j, 0)) * v for j, v in ray.items()), ZERO) > 0
    return False


def format_program(lp: LinearProgram) -> str:
    """Plain-text dump: one line per row, coefficients then '|' and rhs"""
    n = len(lp.columns)
    dense = [[ZERO] * n for _ in range(lp.rows)]
    for j in range(n):
        for i, v in lp.columns[j].items():
            dense[i][j] = Fraction(v)
    lines = []
    if lp.objective is not None:
        lines.append("max " + " ".join(str(Fraction(lp.objective.get(j, 0))) for j in range(n)))
    for row, b in zip(dense, lp.rhs):
        lines.append(" ".join(str(v) for v in row) + " | " + str(Fraction(b)))
    return "\n".join(lines)
