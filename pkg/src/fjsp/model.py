"""Core domain model for flexible job-shop assembly scheduling.

An :class:`Instance` bundles jobs (each with one or more process plans made
of typed operations), machines (robotic units with a robot type and a
locomotion divisor), a robot-type x operation-type efficiency matrix, a
precedence DAG over jobs, holding arcs that demand machine continuity
between linked operations, and a job-to-job distance matrix.

All durations are integer *ticks*, 150 ticks per time unit.  Travel times
divide by per-machine locomotion constants (30 or 25 in the benchmark),
and 150 is divisible by both, so every quantity in the model is an exact
integer and schedule comparisons never need float tolerances.
"""

from dataclasses import dataclass, field
from fractions import Fraction

TICKS_PER_UNIT = 150

JobId = int
MachineId = int
OperationTypeId = int
RobotTypeId = int


class FjspError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(FjspError):
    """Instance data violates a structural invariant."""


class InvalidReferenceError(FjspError):
    """An id refers to a job, machine, plan, or operation that does not exist."""


def ticks_to_units(ticks: int) -> Fraction:
    """Exact conversion from ticks to time units."""
    return Fraction(ticks, TICKS_PER_UNIT)


def units_to_ticks(units) -> int:
    """Exact conversion from time units to ticks; rejects off-grid values."""
    value = Fraction(units) * TICKS_PER_UNIT
    if value.denominator != 1:
        raise ValueError(f"{units} time units is not a whole number of ticks")
    return int(value)


@dataclass(frozen=True)
class Machine:
    """A robotic unit: robot type plus its travel-time divisor.

    ``start_location`` of ``None`` means a free start: the machine begins
    wherever its first job is, with zero setup time.  A fixed start adds
    the travel time from that job's location to the first job.
    """

    id: MachineId
    name: str
    robot_type: RobotTypeId
    locomotion_divisor: int
    start_location: JobId | None = None


@dataclass(frozen=True)
class Job:
    """A job with one or more alternative process plans.

    Each plan is an ordered tuple of operation-type ids; exactly one plan
    is chosen per job in any schedule.
    """

    id: JobId
    name: str
    plans: tuple[tuple[OperationTypeId, ...], ...]


@dataclass(frozen=True)
class HoldingArc:
    """Machine-continuity requirement between two precedence-linked jobs.

    ``op_links`` pairs operation indices (index in from-job's chosen plan,
    index in to-job's chosen plan) that must be served by the same machine,
    and that machine must travel from ``from_job`` directly to ``to_job``.
    """

    from_job: JobId
    to_job: JobId
    op_links: tuple[tuple[int, int], ...]


def _as_plan_tuple(plans) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(q) for q in plan) for plan in plans)


@dataclass(frozen=True, repr=False)
class Instance:
    """A complete scheduling problem.  Immutable after construction.

    ``horizon`` (ticks) is the big-L constant used by timing constraints;
    it defaults to :func:`default_horizon` and must never be below it.
    Construction validates every cross-reference and rejects cyclic DAGs.
    """

    jobs: tuple[Job, ...]
    machines: tuple[Machine, ...]
    robot_types: tuple[str, ...]
    operation_types: tuple[str, ...]
    efficiency: tuple[tuple[int, ...], ...]
    dag: frozenset[tuple[JobId, JobId]]
    holding: tuple[HoldingArc, ...]
    distances: tuple[tuple[int, ...], ...]
    locomote_type: OperationTypeId
    horizon: int | None = None
    _topo_order: tuple[JobId, ...] = field(init=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(self, "robot_types", tuple(self.robot_types))
        object.__setattr__(self, "operation_types", tuple(self.operation_types))
        object.__setattr__(
            self, "efficiency", tuple(tuple(int(v) for v in row) for row in self.efficiency)
        )
        object.__setattr__(self, "dag", frozenset((int(a), int(b)) for a, b in self.dag))
        object.__setattr__(self, "holding", tuple(self.holding))
        object.__setattr__(
            self, "distances", tuple(tuple(int(v) for v in row) for row in self.distances)
        )
        self._check_types()
        self._check_machines()
        self._check_jobs()
        self._check_dag()
        self._check_holding()
        self._check_distances()
        if self.horizon is None:
            object.__setattr__(self, "horizon", default_horizon(self))
        elif self.horizon < default_horizon(self):
            raise InvalidInstanceError(
                f"horizon {self.horizon} ticks is below the safe bound "
                f"{default_horizon(self)}"
            )

    # -- construction-time checks ------------------------------------------

    def _check_types(self):
        if not self.robot_types or not self.operation_types:
            raise InvalidInstanceError("robot_types and operation_types must be non-empty")
        if len(self.efficiency) != len(self.robot_types):
            raise InvalidInstanceError("efficiency matrix must have one row per robot type")
        for r, row in enumerate(self.efficiency):
            if len(row) != len(self.operation_types):
                raise InvalidInstanceError(
                    f"efficiency row {r} must have one entry per operation type"
                )
            for q, v in enumerate(row):
                if v < 1:
                    raise InvalidInstanceError(
                        f"efficiency[{r}][{q}] = {v}; entries must be >= 1"
                    )
        if not 0 <= self.locomote_type < len(self.operation_types):
            raise InvalidInstanceError(f"locomote_type {self.locomote_type} out of range")

    def _check_machines(self):
        names = set()
        for i, m in enumerate(self.machines):
            if m.id != i:
                raise InvalidInstanceError(f"machine ids must equal their index; got {m.id} at {i}")
            if m.name in names:
                raise InvalidInstanceError(f"duplicate machine name {m.name!r}")
            names.add(m.name)
            if not 0 <= m.robot_type < len(self.robot_types):
                raise InvalidInstanceError(f"machine {m.name!r}: unknown robot type {m.robot_type}")
            # divisor must divide the tick scale to keep travel times integral
            if m.locomotion_divisor <= 0 or TICKS_PER_UNIT % m.locomotion_divisor != 0:
                raise InvalidInstanceError(
                    f"machine {m.name!r}: locomotion_divisor {m.locomotion_divisor} "
                    f"must divide {TICKS_PER_UNIT}"
                )
            if m.start_location is not None and not 0 <= m.start_location < len(self.jobs):
                raise InvalidInstanceError(
                    f"machine {m.name!r}: start_location {m.start_location} is not a job"
                )

    def _check_jobs(self):
        names = set()
        for i, j in enumerate(self.jobs):
            if j.id != i:
                raise InvalidInstanceError(f"job ids must equal their index; got {j.id} at {i}")
            if j.name in names:
                raise InvalidInstanceError(f"duplicate job name {j.name!r}")
            names.add(j.name)
            if not j.plans:
                raise InvalidInstanceError(f"job {j.name!r} has no process plans")
            for p, plan in enumerate(j.plans):
                if not plan:
                    raise InvalidInstanceError(f"job {j.name!r} plan {p} is empty")
                for q in plan:
                    if not 0 <= q < len(self.operation_types):
                        raise InvalidInstanceError(
                            f"job {j.name!r} plan {p}: unknown operation type {q}"
                        )

    def _check_dag(self):
        n = len(self.jobs)
        for a, b in self.dag:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidInstanceError(f"dag arc ({a}, {b}) references unknown jobs")
            if a == b:
                raise InvalidInstanceError(f"dag arc ({a}, {a}) is a self-loop")
        order = _topological_order(n, self.dag)
        if order is None:
            cycle = _find_cycle(n, self.dag)
            names = " -> ".join(self.jobs[j].name for j in cycle)
            raise InvalidInstanceError(f"precedence graph contains a cycle: {names}")
        object.__setattr__(self, "_topo_order", tuple(order))

    def _check_holding(self):
        for h in self.holding:
            if (h.from_job, h.to_job) not in self.dag:
                raise InvalidInstanceError(
                    f"holding arc ({h.from_job}, {h.to_job}) is not a precedence arc"
                )
            if not h.op_links:
                raise InvalidInstanceError(
                    f"holding arc ({h.from_job}, {h.to_job}) has no operation links"
                )
            for a, b in h.op_links:
                for plan in self.jobs[h.from_job].plans:
                    if not 0 <= a < len(plan):
                        raise InvalidInstanceError(
                            f"holding arc ({h.from_job}, {h.to_job}): op index {a} "
                            f"invalid for a plan of job {self.jobs[h.from_job].name!r}"
                        )
                for plan in self.jobs[h.to_job].plans:
                    if not 0 <= b < len(plan):
                        raise InvalidInstanceError(
                            f"holding arc ({h.from_job}, {h.to_job}): op index {b} "
                            f"invalid for a plan of job {self.jobs[h.to_job].name!r}"
                        )

    def _check_distances(self):
        n = len(self.jobs)
        if len(self.distances) != n:
            raise InvalidInstanceError("distance matrix must have one row per job")
        for i, row in enumerate(self.distances):
            if len(row) != n:
                raise InvalidInstanceError("distance matrix must be square")
            for j, d in enumerate(row):
                if d < 0:
                    raise InvalidInstanceError(f"distance[{i}][{j}] = {d}; must be >= 0")
            if row[i] != 0:
                raise InvalidInstanceError(f"distance[{i}][{i}] = {row[i]}; diagonal must be 0")

    # -- lookups ------------------------------------------------------------

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    def topological_order(self) -> tuple[JobId, ...]:
        """Jobs in a deterministic topological order of the precedence DAG."""
        return self._topo_order

    def predecessors(self, job: JobId) -> list[JobId]:
        return sorted(a for a, b in self.dag if b == job)

    def job_by_name(self, name: str) -> Job:
        for j in self.jobs:
            if j.name == name:
                return j
        raise InvalidReferenceError(f"unknown job name {name!r}")

    def machine_by_name(self, name: str) -> Machine:
        for m in self.machines:
            if m.name == name:
                return m
        raise InvalidReferenceError(f"unknown machine name {name!r}")

    def __repr__(self):
        return (
            f"Instance({self.n_jobs} jobs, {self.n_machines} machines, "
            f"{len(self.dag)} arcs, {len(self.holding)} holding arcs)"
        )


def _topological_order(n: int, arcs) -> list[int] | None:
    """Kahn's algorithm; smallest ready id first.  None if cyclic."""
    succs = {i: [] for i in range(n)}
    indeg = [0] * n
    for a, b in arcs:
        succs[a].append(b)
        indeg[b] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order = []
    while ready:
        j = ready.pop(0)
        order.append(j)
        changed = False
        for s in succs[j]:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
                changed = True
        if changed:
            ready.sort()
    return order if len(order) == n else None


def _find_cycle(n: int, arcs) -> list[int]:
    """Return one cycle (as a job-id list, closed) from a cyclic arc set."""
    succs = {i: [] for i in range(n)}
    for a, b in arcs:
        succs[a].append(b)
    color = {i: 0 for i in range(n)}  # 0 new, 1 active, 2 done
    stack: list[int] = []

    def visit(v):
        color[v] = 1
        stack.append(v)
        for w in sorted(succs[v]):
            if color[w] == 1:
                return stack[stack.index(w):] + [w]
            if color[w] == 0:
                found = visit(w)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in range(n):
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    raise AssertionError("no cycle found in graph reported cyclic")


def _machine_of(instance: Instance, machine) -> Machine:
    if isinstance(machine, Machine):
        if not (0 <= machine.id < instance.n_machines):
            raise InvalidReferenceError(f"machine id {machine.id} out of range")
        return machine
    if not 0 <= machine < instance.n_machines:
        raise InvalidReferenceError(f"machine id {machine} out of range")
    return instance.machines[machine]


def op_duration(instance: Instance, machine, op_type: OperationTypeId) -> int:
    """Ticks for ``machine`` to complete one operation of type ``op_type``.

    This is the robot type's completion efficiency (time units) for the
    operation type, converted to ticks.  Always strictly positive.
    """
    m = _machine_of(instance, machine)
    if not 0 <= op_type < len(instance.operation_types):
        raise InvalidReferenceError(f"operation type {op_type} out of range")
    return instance.efficiency[m.robot_type][op_type] * TICKS_PER_UNIT


def travel_time(instance: Instance, machine, from_job: JobId, to_job: JobId) -> int:
    """Ticks for ``machine`` to move between two job locations.

    distance x locomote efficiency / locomotion divisor, exact in ticks
    because every divisor divides the tick scale.  Zero when the distance
    is zero.
    """
    m = _machine_of(instance, machine)
    n = instance.n_jobs
    if not (0 <= from_job < n and 0 <= to_job < n):
        raise InvalidReferenceError(f"travel between unknown jobs ({from_job}, {to_job})")
    d = instance.distances[from_job][to_job]
    eff = instance.efficiency[m.robot_type][instance.locomote_type]
    ticks, rem = divmod(d * eff * TICKS_PER_UNIT, m.locomotion_divisor)
    assert rem == 0  # guaranteed: locomotion_divisor divides TICKS_PER_UNIT
    return ticks


def default_horizon(instance: Instance) -> int:
    """A safe big-L value in ticks, guaranteed >= any optimal makespan.

    Sum over jobs of the worst single-operation duration, plus one worst-case
    travel per job.  Any forward-scheduled solution's critical path visits
    each job at most once and crosses at most one travel edge per job, so
    this dominates every reachable makespan.
    """
    if not instance.jobs:
        return 0
    total = 0
    for job in instance.jobs:
        total += max(
            op_duration(instance, m, q)
            for plan in job.plans
            for q in plan
            for m in instance.machines
        )
    max_travel = 0
    for m in instance.machines:
        for a in range(instance.n_jobs):
            for b in range(instance.n_jobs):
                t = travel_time(instance, m, a, b)
                if t > max_travel:
                    max_travel = t
    return total + instance.n_jobs * max_travel
