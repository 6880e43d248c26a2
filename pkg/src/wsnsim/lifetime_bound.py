"""Exact small-instance solver for the network-lifetime activation problem.

The model: N sensors with a shared per-sensor energy budget E must, in
every active round, have at least one of them cover every CH position,
each active sensor using exactly one of Z sensing ranges with per-round
cost e_z. Maximizing the number of active rounds bounds the achievable
network lifetime from above.

Two independent solution paths are kept deliberately separate:
`solve_exact` is a branch-and-bound over minimal covering assignments,
while `solve_exhaustive` enumerates every affordable covering assignment
round by round (memoized on remaining budgets) and serves as the oracle
the branch-and-bound is tested against. Both share one affordability
helper so their floating-point budget arithmetic agrees bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, TextIO

from .energy_model import crossover_distance, tx_energy
from .network import Network

MAX_SENSORS = 8
MAX_CHS = 4
MAX_RANGES = 3
MAX_ROUNDS = 16


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class BoundInstance:
    """One activation-scheduling instance.

    coverage[i][z][j] is True when sensor i operating at range z covers CH
    position j.
    """

    n_sensors: int
    n_chs: int
    n_ranges: int
    k_max: int
    range_energies: tuple[float, ...]
    budget: float
    coverage: tuple[tuple[tuple[bool, ...], ...], ...]

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if len(self.range_energies) != self.n_ranges:
            raise ValueError("range_energies length must equal n_ranges")
        if any(e <= 0 for e in self.range_energies):
            raise ValueError("range energies must be positive")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if len(self.coverage) != self.n_sensors or any(
                len(rows) != self.n_ranges or any(len(row) != self.n_chs for row in rows)
                for rows in self.coverage):
            raise ValueError("coverage tensor must be n_sensors x n_ranges x n_chs")

    def check_solver_guards(self) -> None:
        if (self.n_sensors > MAX_SENSORS or self.n_chs > MAX_CHS
                or self.n_ranges > MAX_RANGES or self.k_max > MAX_ROUNDS):
            raise InstanceTooLargeError(
                f"instance exceeds exact-solver guards "
                f"(N <= {MAX_SENSORS}, M <= {MAX_CHS}, Z <= {MAX_RANGES}, "
                f"K <= {MAX_ROUNDS}): got N={self.n_sensors}, M={self.n_chs}, "
                f"Z={self.n_ranges}, K={self.k_max}")


@dataclass
class Schedule:
    """Activation plan: x[i][k][z] and per-round activity flags r[k]."""

    x: list[list[list[bool]]]
    r: list[bool]

    @classmethod
    def empty(cls, instance: BoundInstance) -> "Schedule":
        return cls(
            x=[[[False] * instance.n_ranges for _ in range(instance.k_max)]
               for _ in range(instance.n_sensors)],
            r=[False] * instance.k_max,
        )

    def objective(self) -> int:
        return sum(self.r)


def _sensor_cost(counts: tuple[int, ...], energies: tuple[float, ...]) -> float:
    """Total energy for a sensor's activation counts; the one shared arithmetic."""
    return sum(c * e for c, e in zip(counts, energies))


def _with_activation(counts: tuple[int, ...], z: int) -> tuple[int, ...]:
    return counts[:z] + (counts[z] + 1,) + counts[z + 1:]


def _affordable(counts: tuple[int, ...], z: int, instance: BoundInstance) -> bool:
    return _sensor_cost(_with_activation(counts, z), instance.range_energies) <= instance.budget


# an assignment maps each sensor to a range index, or -1 for idle
Assignment = tuple[int, ...]


def _is_covering(assignment: Assignment, instance: BoundInstance) -> bool:
    for j in range(instance.n_chs):
        if not any(z >= 0 and instance.coverage[i][z][j]
                   for i, z in enumerate(assignment)):
            return False
    return True


def _covering_assignments(instance: BoundInstance) -> list[Assignment]:
    choices = range(-1, instance.n_ranges)
    return [a for a in itertools.product(choices, repeat=instance.n_sensors)
            if _is_covering(a, instance)]


def _is_minimal(assignment: Assignment, instance: BoundInstance) -> bool:
    for i, z in enumerate(assignment):
        if z < 0:
            continue
        reduced = assignment[:i] + (-1,) + assignment[i + 1:]
        if _is_covering(reduced, instance):
            return False
    return True


def _assignment_cost(assignment: Assignment, instance: BoundInstance) -> float:
    return sum(instance.range_energies[z] for z in assignment if z >= 0)


def verify_schedule(instance: BoundInstance,
                    schedule: Schedule) -> tuple[bool, list[tuple]]:
    """Check all four constraint families; violations carry their indices."""
    n, z_count, k_count, m = (instance.n_sensors, instance.n_ranges,
                              instance.k_max, instance.n_chs)
    if (len(schedule.x) != n or len(schedule.r) != k_count
            or any(len(per_round) != k_count for per_round in schedule.x)
            or any(len(row) != z_count for per_round in schedule.x for row in per_round)):
        raise ValueError("schedule dimensions do not match instance")

    violations: list[tuple] = []
    for i in range(n):
        for k in range(k_count):
            for z in range(z_count):
                if schedule.x[i][k][z] not in (False, True):
                    violations.append(("1d", i, k, z))
    for k in range(k_count):
        if schedule.r[k] not in (False, True):
            violations.append(("1d-r", k))

    # 1a: per-sensor lifetime budget (counts form, same arithmetic as solvers)
    for i in range(n):
        counts = tuple(sum(1 for k in range(k_count) if schedule.x[i][k][z])
                       for z in range(z_count))
        if _sensor_cost(counts, instance.range_energies) > instance.budget:
            violations.append(("1a", i))

    # 1b: at most one range per sensor per round, none in inactive rounds
    for i in range(n):
        for k in range(k_count):
            if sum(schedule.x[i][k]) > (1 if schedule.r[k] else 0):
                violations.append(("1b", i, k))

    # 1c: every CH covered in every active round
    for k in range(k_count):
        if not schedule.r[k]:
            continue
        for j in range(m):
            covered = any(schedule.x[i][k][z] and instance.coverage[i][z][j]
                          for i in range(n) for z in range(z_count))
            if not covered:
                violations.append(("1c", k, j))

    return (not violations, violations)


def solve_exhaustive(instance: BoundInstance) -> int:
    """Oracle: maximum active rounds by plain round-by-round enumeration.

    Tries every affordable covering assignment at every level, memoizing on
    the per-sensor usage counts (budgets decrease strictly, so recursion
    terminates). Exact, no pruning heuristics.
    """
    instance.check_solver_guards()
    assignments = _covering_assignments(instance)
    memo: dict[tuple, int] = {}

    def best_from(state: tuple[tuple[int, ...], ...]) -> int:
        cached = memo.get(state)
        if cached is not None:
            return cached
        best = 0
        for assignment in assignments:
            next_state = list(state)
            ok = True
            for i, z in enumerate(assignment):
                if z < 0:
                    continue
                if not _affordable(state[i], z, instance):
                    ok = False
                    break
                next_state[i] = _with_activation(state[i], z)
            if not ok:
                continue
            depth = 1 + best_from(tuple(next_state))
            if depth > best:
                best = depth
                if best >= instance.k_max:
                    break
        memo[state] = best
        return best

    zero = tuple((0,) * instance.n_ranges for _ in range(instance.n_sensors))
    return min(instance.k_max, best_from(zero))


def solve_exact(instance: BoundInstance) -> tuple[int, Schedule]:
    """Maximum active rounds plus a witnessing schedule, by branch-and-bound.

    Searches multisets of minimal covering assignments (rounds are
    interchangeable) with an admissible per-CH capacity bound for pruning.
    The witness always passes `verify_schedule`.
    """
    instance.check_solver_guards()
    minimal = [a for a in _covering_assignments(instance)
               if _is_minimal(a, instance)]
    minimal.sort(key=lambda a: (_assignment_cost(a, instance), a))
    energies = instance.range_energies
    k_cap = instance.k_max

    # coverage options per CH: which (sensor, range) pairs can serve it
    per_ch_options: list[list[tuple[int, int]]] = [
        [(i, z) for i in range(instance.n_sensors)
         for z in range(instance.n_ranges) if instance.coverage[i][z][j]]
        for j in range(instance.n_chs)
    ]

    def remaining_activations(counts: tuple[int, ...], z: int) -> int:
        # exact count of further range-z activations this sensor can afford,
        # probed with the shared arithmetic (no float division)
        extra = 0
        current = counts
        while extra <= k_cap and _affordable(current, z, instance):
            current = _with_activation(current, z)
            extra += 1
        return extra

    def upper_bound(state: tuple[tuple[int, ...], ...]) -> int:
        bound = k_cap
        for options in per_ch_options:
            capacity = 0
            for i, z in options:
                capacity += remaining_activations(state[i], z)
                if capacity >= bound:
                    break
            bound = min(bound, capacity)
            if bound == 0:
                return 0
        return bound

    best = 0
    best_path: list[Assignment] = []
    path: list[Assignment] = []

    def dfs(state: tuple[tuple[int, ...], ...], start: int) -> None:
        nonlocal best, best_path
        depth = len(path)
        if depth > best:
            best = depth
            best_path = list(path)
        if depth >= k_cap or depth + upper_bound(state) <= best:
            return
        for idx in range(start, len(minimal)):
            assignment = minimal[idx]
            next_state = list(state)
            ok = True
            for i, z in enumerate(assignment):
                if z < 0:
                    continue
                if not _affordable(next_state[i], z, instance):
                    ok = False
                    break
                next_state[i] = _with_activation(next_state[i], z)
            if not ok:
                continue
            path.append(assignment)
            dfs(tuple(next_state), idx)
            path.pop()
            if best >= k_cap:
                return

    zero = tuple((0,) * instance.n_ranges for _ in range(instance.n_sensors))
    dfs(zero, 0)

    schedule = Schedule.empty(instance)
    for k, assignment in enumerate(best_path):
        schedule.r[k] = True
        for i, z in enumerate(assignment):
            if z >= 0:
                schedule.x[i][k][z] = True
    ok, violations = verify_schedule(instance, schedule)
    if not ok:
        raise AssertionError(f"solver produced an infeasible witness: {violations}")
    return best, schedule


def bound_for_simulated_network(network: Network, k_max: int = MAX_ROUNDS,
                                max_range: Optional[float] = None) -> BoundInstance:
    """Map a deployed network onto a bound instance.

    The single coverage target is the base station. Range 0 is the
    free-space regime (radius d0) priced at the electronics-only floor of a
    packet transmission; range 1 is the multipath regime (radius
    `max_range`, default the field diagonal) priced at the d0 crossing
    cost. Both prices understate what any node actually pays per round in
    the simulator, and the budget is the richest node's initial energy, so
    the resulting optimum never falls below an achievable simulated
    lifetime.
    """
    config = network.config
    radio = config.radio
    if config.node_count > MAX_SENSORS:
        raise InstanceTooLargeError(
            f"network has {config.node_count} nodes; the exact solver handles "
            f"at most {MAX_SENSORS}")
    d0 = crossover_distance(radio)
    if max_range is None:
        max_range = math.hypot(config.field_width, config.field_height)
    bits = config.packet_bits
    e_near = tx_energy(radio, bits, 0.0)
    e_far = tx_energy(radio, bits, d0)
    coverage = tuple(
        (
            (network.bs_distance(node.id) <= d0,),
            (network.bs_distance(node.id) <= max_range,),
        )
        for node in network.nodes
    )
    return BoundInstance(
        n_sensors=config.node_count,
        n_chs=1,
        n_ranges=2,
        k_max=k_max,
        range_energies=(e_near, e_far),
        budget=max(n.initial_energy for n in network.nodes),
        coverage=coverage,
    )


def instance_to_text(instance: BoundInstance) -> str:
    """Serialize to the plain matrix format (see `instance_from_text`)."""
    lines = [f"{instance.n_sensors} {instance.n_chs} {instance.n_ranges} {instance.k_max}"]
    lines.append(" ".join(repr(e) for e in instance.range_energies))
    lines.append(repr(instance.budget))
    for i in range(instance.n_sensors):
        for z in range(instance.n_ranges):
            lines.append(" ".join("1" if c else "0" for c in instance.coverage[i][z]))
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> BoundInstance:
    """Parse the plain matrix format.

    Line 1: `N M Z K`. Line 2: the Z range energies. Line 3: the budget E.
    Then N*Z rows of M 0/1 flags: row i*Z + z holds sensor i's coverage of
    each CH at range z.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if len(lines) < 3:
        raise ValueError("instance text too short")
    n, m, z_count, k_max = (int(tok) for tok in lines[0].split())
    energies = tuple(float(tok) for tok in lines[1].split())
    budget = float(lines[2])
    rows = lines[3:]
    if len(rows) != n * z_count:
        raise ValueError(f"expected {n * z_count} coverage rows, got {len(rows)}")
    coverage = []
    for i in range(n):
        per_range = []
        for z in range(z_count):
            toks = rows[i * z_count + z].split()
            if len(toks) != m:
                raise ValueError(f"coverage row {i * z_count + z} needs {m} entries")
            per_range.append(tuple(tok == "1" for tok in toks))
        coverage.append(tuple(per_range))
    return BoundInstance(n_sensors=n, n_chs=m, n_ranges=z_count, k_max=k_max,
                         range_energies=energies, budget=budget,
                         coverage=tuple(coverage))


def schedule_to_text(schedule: Schedule) -> str:
    """Serialize a schedule: the r row, then per-sensor blocks of K range rows."""
    lines = [" ".join("1" if flag else "0" for flag in schedule.r)]
    for per_round in schedule.x:
        for row in per_round:
            lines.append(" ".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def write_schedule(schedule: Schedule, stream: TextIO) -> None:
    stream.write(schedule_to_text(schedule))
