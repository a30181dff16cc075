"""The 0-1 mode selection program and its exact solution.

For every session i pick exactly one offered plan j with travel time
``Q[i, j] <= Qprime[i]`` (the clicked plan's ETA), minimising
``sum_i alpha * P[i, j] + beta * Q[i, j]``. Sessions share no constraint,
so the joint optimum is the row-wise optimum; :func:`brute_force_oracle`
checks that claim by enumerating joint assignments.

``alpha`` weighs grams of CO2 and ``beta`` weighs seconds. With the default
``alpha = beta = 1`` grams and seconds are simply added.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ecomode import kernels
from ecomode.emissions import DEFAULT_TABLE, EmissionTable, plan_emission_g
from ecomode.modes import ModeMapping, TransportMeans

ORACLE_LIMIT = 10**7
_MIN_CHUNK = 4096


class InstanceError(ValueError):
    pass


class OracleTooLarge(RuntimeError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"joint feasible space has {size} assignments, over the limit of {limit}")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class Instance:
    """Dense m x n matrices over the sorted mode IDs in ``mode_ids``.

    Entries for plans that were not displayed are NaN in P and Q and False in
    ``offered``; they are never read as values.
    """

    sids: tuple[str, ...]
    mode_ids: tuple[int, ...]
    P: np.ndarray
    Q: np.ndarray
    offered: np.ndarray
    qprime: np.ndarray
    clicked: np.ndarray
    alpha: float = 1.0
    beta: float = 1.0
    means: tuple[TransportMeans, ...] = field(default=())

    def __post_init__(self):
        m, n = len(self.sids), len(self.mode_ids)
        for name in ("P", "Q", "offered"):
            if getattr(self, name).shape != (m, n):
                raise InstanceError(f"{name} has shape {getattr(self, name).shape}, expected {(m, n)}")
        if self.qprime.shape != (m,) or self.clicked.shape != (m,):
            raise InstanceError("qprime and clicked must have one entry per session")
        if not (self.alpha >= 0 and self.beta >= 0) or (self.alpha == 0 and self.beta == 0):
            raise InstanceError(f"weights must be non-negative and not both zero (alpha={self.alpha}, beta={self.beta})")
        if m:
            rows = np.arange(m)
            if not self.offered[rows, self.clicked].all():
                raise InstanceError("clicked plan not offered")
            if not np.array_equal(self.Q[rows, self.clicked], self.qprime):
                raise InstanceError("qprime differs from the clicked plan's ETA")
        for arr in (self.P, self.Q, self.offered, self.qprime, self.clicked):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.sids)

    @property
    def n(self) -> int:
        return len(self.mode_ids)

    def objective_row(self, i: int) -> np.ndarray:
        return self.alpha * self.P[i] + self.beta * self.Q[i]

    def feasible(self, i: int) -> np.ndarray:
        """Column indices allowed for row i."""
        return np.flatnonzero(self.offered[i] & (self.Q[i] <= self.qprime[i]))

    def objective(self, chosen) -> float:
        chosen = np.asarray(chosen, dtype=np.intp)
        rows = np.arange(self.m)
        values = self.alpha * self.P[rows, chosen] + self.beta * self.Q[rows, chosen]
        # left-to-right sum so the oracle's totals compare exactly
        total = 0.0
        for v in values.tolist():
            total += v
        return total

    def baseline(self) -> Assignment:
        return Assignment(chosen=self.clicked.copy())


@dataclass(frozen=True)
class Assignment:
    """``chosen[i] = j`` means session i takes column j of the instance."""

    chosen: np.ndarray
    objective: float = math.nan

    def __post_init__(self):
        arr = np.asarray(self.chosen, dtype=np.intp).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "chosen", arr)

    def __len__(self):
        return len(self.chosen)

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.chosen, other.chosen)

    __hash__ = None


def build_instance(sessions, mapping: ModeMapping, table: EmissionTable = DEFAULT_TABLE, alpha=1.0, beta=1.0) -> Instance:
    mode_ids = tuple(sorted({o.mode_id for s in sessions for o in s.options}))
    col = {mode_id: j for j, mode_id in enumerate(mode_ids)}
    means = []
    for mode_id in mode_ids:
        means.append(mapping[mode_id])
    m, n = len(sessions), len(mode_ids)
    P = np.full((m, n), np.nan)
    Q = np.full((m, n), np.nan)
    offered = np.zeros((m, n), dtype=bool)
    qprime = np.zeros(m)
    clicked = np.zeros(m, dtype=np.intp)
    for i, s in enumerate(sessions):
        for o in s.options:
            mean = mapping[o.mode_id]
            if mean is TransportMeans.UNKNOWN:
                raise InstanceError(f"session {s.sid}: mode {o.mode_id} maps to unknown means")
            j = col[o.mode_id]
            P[i, j] = plan_emission_g(o.distance_m, mean, table)
            Q[i, j] = o.eta_s
            offered[i, j] = True
        clicked[i] = col[s.clicked_mode_id]
        qprime[i] = s.clicked_eta_s
    return Instance(
        sids=tuple(s.sid for s in sessions),
        mode_ids=mode_ids,
        P=P,
        Q=Q,
        offered=offered,
        qprime=qprime,
        clicked=clicked,
        alpha=float(alpha),
        beta=float(beta),
        means=tuple(means),
    )


def _row_key(instance: Instance, i: int, j: int):
    return (
        instance.alpha * instance.P[i, j] + instance.beta * instance.Q[i, j],
        instance.P[i, j],
        j != instance.clicked[i],
        j,
    )


def solve_session(i: int, instance: Instance) -> int:
    """Best column for one row; ties go to lower CO2, then the clicked plan, then the lower mode ID."""
    feasible = instance.feasible(i)
    return int(min(feasible, key=lambda j: _row_key(instance, i, int(j))))


def solve(instance: Instance, workers: int | None = None) -> Assignment:
    """Solve every row exactly; the result does not depend on ``workers``."""
    if workers is None:
        workers = kernels.worker_count()
    m = instance.m
    args = (instance.P, instance.Q, instance.offered, instance.qprime, instance.clicked, instance.alpha, instance.beta)
    if workers <= 1 or m < 2 * _MIN_CHUNK:
        chosen = kernels.solve_rows(*args)
    else:
        bounds = np.linspace(0, m, min(workers, m // _MIN_CHUNK) + 1).astype(int)
        chunks = list(zip(bounds[:-1], bounds[1:]))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: kernels.solve_rows(*(a[b[0]:b[1]] for a in args[:5]), *args[5:]), chunks))
        chosen = np.concatenate(parts)
    return Assignment(chosen=chosen, objective=instance.objective(chosen))


def brute_force_oracle(instance: Instance, limit: int = ORACLE_LIMIT) -> Assignment:
    """Search all joint assignments satisfying the constraints.

    Among assignments with the smallest total objective the one that is
    lexicographically smallest in per-row tie-break order wins.
    """
    ordered = []
    size = 1
    for i in range(instance.m):
        cols = sorted((int(j) for j in instance.feasible(i)), key=lambda j: _row_key(instance, i, j))
        ordered.append(cols)
        size *= len(cols)
        if size > limit:
            raise OracleTooLarge(math.prod(len(instance.feasible(k)) for k in range(instance.m)), limit)
    values = [instance.objective_row(i)[cols] for i, cols in enumerate(ordered)]
    total, ranks = kernels.enumerate_min(values)
    chosen = np.array([ordered[i][r] for i, r in enumerate(ranks)], dtype=np.intp)
    return Assignment(chosen=chosen, objective=total)


@dataclass
class Verification:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def verify_assignment(instance: Instance, assignment: Assignment) -> Verification:
    violations = []
    chosen = np.asarray(assignment.chosen)
    if chosen.ndim != 1 or len(chosen) != instance.m:
        violations.append(f"one-mode-per-session: expected {instance.m} choices, got {chosen.size}")
        return Verification(violations)
    for i, j in enumerate(chosen.tolist()):
        sid = instance.sids[i]
        if not 0 <= j < instance.n:
            violations.append(f"row {i} (sid {sid}): column {j} out of range (one-mode-per-session)")
            continue
        if not instance.offered[i, j]:
            violations.append(f"row {i} (sid {sid}): mode {instance.mode_ids[j]} was not displayed (defined-entry)")
            continue
        if instance.Q[i, j] > instance.qprime[i]:
            violations.append(
                f"row {i} (sid {sid}): travel time {instance.Q[i, j]:g} s exceeds clicked {instance.qprime[i]:g} s (travel-time constraint)"
            )
    return Verification(violations)
