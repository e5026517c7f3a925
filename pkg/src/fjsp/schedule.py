"""Schedules and the semantic feasibility validator.

A :class:`Schedule` fixes one process plan per job, one machine per
operation of the chosen plan, start/completion times in ticks, per-machine
visit routes, and the makespan.  :func:`validate` checks every timing,
assignment, routing, and holding rule on a concrete schedule and returns
all violations found, so infeasibility reports are complete rather than
first-failure.
"""

import json
from dataclasses import dataclass, field

from .model import (
    Instance,
    InvalidReferenceError,
    JobId,
    MachineId,
    TICKS_PER_UNIT,
    op_duration,
    ticks_to_units,
    travel_time,
)

# violation kinds
PLAN_COUNT = "PLAN_COUNT"
OP_ASSIGNMENT = "OP_ASSIGNMENT"
PRECEDENCE = "PRECEDENCE"
HOLDING_MACHINE = "HOLDING_MACHINE"
HOLDING_NEXT = "HOLDING_NEXT"
ROUTE_STRUCTURE = "ROUTE_STRUCTURE"
TIMING_DURATION = "TIMING_DURATION"
TIMING_TRAVEL = "TIMING_TRAVEL"
MAKESPAN = "MAKESPAN"

VIOLATION_KINDS = frozenset({
    PLAN_COUNT, OP_ASSIGNMENT, PRECEDENCE, HOLDING_MACHINE, HOLDING_NEXT,
    ROUTE_STRUCTURE, TIMING_DURATION, TIMING_TRAVEL, MAKESPAN,
})


@dataclass(frozen=True)
class Violation:
    """One broken constraint, with the offending ids and times in ``detail``."""

    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class Assignment:
    """Plan choice per job and machine choice per operation of that plan."""

    chosen_plan: dict[JobId, int]
    op_machine: dict[tuple[JobId, int], MachineId]


@dataclass(frozen=True)
class Schedule:
    """A complete candidate solution over one instance.

    ``routes`` list the jobs each machine visits, in order.  A machine may
    visit a job it performs no operation at (it just passes through or
    parks there); every job it does work at must appear exactly once.
    """

    assignment: Assignment
    start: dict[JobId, int]
    completion: dict[JobId, int]
    op_completion: dict[tuple[JobId, int], int]
    routes: dict[MachineId, tuple[JobId, ...]]
    makespan: int


def makespan(schedule: Schedule) -> int:
    """Largest job completion time; equals ``schedule.makespan`` when feasible."""
    if not schedule.completion:
        raise ValueError("schedule has no jobs")
    return max(schedule.completion.values())


def forward_schedule(
    instance: Instance,
    assignment: Assignment,
    routes: dict[MachineId, tuple[JobId, ...]],
) -> Schedule | None:
    """Tightest times for fixed plan/machine/route decisions.

    Longest-path pass: a job starts at the max of its DAG predecessors'
    completions and each visiting machine's arrival (previous route job's
    completion plus travel, or travel from a fixed start location); it
    completes after its longest assigned operation.  Returns None when the
    combined precedence/route graph is cyclic, i.e. the decisions admit no
    schedule.
    """
    n = instance.n_jobs
    preds: dict[int, list[tuple[int, int]]] = {j: [] for j in range(n)}  # job -> [(pred, travel)]
    base_start = [0] * n
    for a, b in instance.dag:
        preds[b].append((a, 0))
    for m_id, route in routes.items():
        machine = instance.machines[m_id]
        if route and machine.start_location is not None:
            base_start[route[0]] = max(
                base_start[route[0]], travel_time(instance, machine, machine.start_location, route[0])
            )
        for prev, nxt in zip(route, route[1:]):
            preds[nxt].append((prev, travel_time(instance, machine, prev, nxt)))

    indeg = [0] * n
    succs: dict[int, list[int]] = {j: [] for j in range(n)}
    for j, plist in preds.items():
        for p, _ in plist:
            indeg[j] += 1
            succs[p].append(j)

    start: dict[int, int] = {}
    completion: dict[int, int] = {}
    op_completion: dict[tuple[int, int], int] = {}
    ready = sorted(j for j in range(n) if indeg[j] == 0)
    done = 0
    while ready:
        j = ready.pop(0)
        done += 1
        s = base_start[j]
        for p, tt in preds[j]:
            s = max(s, completion[p] + tt)
        plan = instance.jobs[j].plans[assignment.chosen_plan[j]]
        c = s
        for o in range(len(plan)):
            dur = op_duration(instance, assignment.op_machine[(j, o)], plan[o])
            op_completion[(j, o)] = s + dur
            c = max(c, s + dur)
        start[j] = s
        completion[j] = c
        fresh = []
        for nxt in succs[j]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                fresh.append(nxt)
        if fresh:
            ready.extend(fresh)
            ready.sort()
    if done != n:
        return None
    return Schedule(
        assignment=assignment,
        start=start,
        completion=completion,
        op_completion=op_completion,
        routes={m: tuple(r) for m, r in routes.items()},
        makespan=max(completion.values()) if completion else 0,
    )


def _check_references(instance: Instance, schedule: Schedule) -> None:
    n = instance.n_jobs
    for j, p in schedule.assignment.chosen_plan.items():
        if not 0 <= j < n:
            raise InvalidReferenceError(f"chosen plan for unknown job {j}")
        if not 0 <= p < len(instance.jobs[j].plans):
            raise InvalidReferenceError(f"job {instance.jobs[j].name!r} has no plan {p}")
    for (j, o), m in schedule.assignment.op_machine.items():
        if not 0 <= j < n:
            raise InvalidReferenceError(f"operation assignment for unknown job {j}")
        if not 0 <= m < instance.n_machines:
            raise InvalidReferenceError(f"operation assignment to unknown machine {m}")
        p = schedule.assignment.chosen_plan.get(j)
        if p is not None and not 0 <= o < len(instance.jobs[j].plans[p]):
            raise InvalidReferenceError(
                f"job {instance.jobs[j].name!r} plan {p} has no operation {o}"
            )
    for m_id, route in schedule.routes.items():
        if not 0 <= m_id < instance.n_machines:
            raise InvalidReferenceError(f"route for unknown machine {m_id}")
        for j in route:
            if not 0 <= j < n:
                raise InvalidReferenceError(f"route of machine {m_id} visits unknown job {j}")
    for j in range(n):
        if j not in schedule.start or j not in schedule.completion:
            raise InvalidReferenceError(
                f"schedule has no times for job {instance.jobs[j].name!r}"
            )


def validate(instance: Instance, schedule: Schedule, *, strict: bool = False) -> list[Violation]:
    """All constraint violations of ``schedule``; an empty list means feasible.

    Checks, in order: exactly one plan per job; one machine per operation of
    the chosen plan; precedence arcs; per-operation durations and job
    completion bounds; travel timing along each machine route; route
    structure (no duplicate visits, every worked job on the route); holding
    machine continuity and direct jig-to-affix transitions; and that the
    stored makespan is the maximum completion.  With ``strict`` set, two
    operations of one job sharing a machine is also rejected.

    Dangling ids raise :class:`InvalidReferenceError` instead of being
    reported as violations.
    """
    _check_references(instance, schedule)
    violations: list[Violation] = []
    names = [j.name for j in instance.jobs]
    chosen = schedule.assignment.chosen_plan
    op_machine = schedule.assignment.op_machine

    for j in range(instance.n_jobs):
        if j not in chosen:
            violations.append(Violation(PLAN_COUNT, f"job {names[j]} has no chosen plan"))

    # one machine per operation of the chosen plan
    for j, p in chosen.items():
        plan = instance.jobs[j].plans[p]
        used: dict[int, list[int]] = {}
        for o in range(len(plan)):
            m = op_machine.get((j, o))
            if m is None:
                violations.append(
                    Violation(OP_ASSIGNMENT, f"job {names[j]} op {o} has no machine")
                )
            else:
                used.setdefault(m, []).append(o)
        if strict:
            for m, ops in used.items():
                if len(ops) > 1:
                    violations.append(
                        Violation(
                            OP_ASSIGNMENT,
                            f"job {names[j]} ops {ops} share machine "
                            f"{instance.machines[m].name} (strict mode)",
                        )
                    )

    for a, b in sorted(instance.dag):
        if schedule.start[b] < schedule.completion[a]:
            violations.append(
                Violation(
                    PRECEDENCE,
                    f"job {names[b]} starts at {schedule.start[b]} before "
                    f"predecessor {names[a]} completes at {schedule.completion[a]}",
                )
            )

    # operation durations within the job window
    for j, p in sorted(chosen.items()):
        plan = instance.jobs[j].plans[p]
        for o in range(len(plan)):
            m = op_machine.get((j, o))
            if m is None:
                continue
            c_op = schedule.op_completion.get((j, o))
            if c_op is None:
                violations.append(
                    Violation(TIMING_DURATION, f"job {names[j]} op {o} has no completion time")
                )
                continue
            dur = op_duration(instance, m, plan[o])
            if c_op < schedule.start[j] + dur:
                violations.append(
                    Violation(
                        TIMING_DURATION,
                        f"job {names[j]} op {o} completes at {c_op} < start "
                        f"{schedule.start[j]} + duration {dur}",
                    )
                )
            if schedule.completion[j] < c_op:
                violations.append(
                    Violation(
                        TIMING_DURATION,
                        f"job {names[j]} completes at {schedule.completion[j]} "
                        f"before its op {o} at {c_op}",
                    )
                )

    # route timing and structure
    worked: dict[int, set[int]] = {m: set() for m in range(instance.n_machines)}
    for (j, o), m in op_machine.items():
        if chosen.get(j) is not None and o < len(instance.jobs[j].plans[chosen[j]]):
            worked[m].add(j)
    for m_id in range(instance.n_machines):
        machine = instance.machines[m_id]
        route = schedule.routes.get(m_id, ())
        seen = set()
        for j in route:
            if j in seen:
                violations.append(
                    Violation(
                        ROUTE_STRUCTURE,
                        f"machine {machine.name} visits job {names[j]} more than once",
                    )
                )
            seen.add(j)
        for j in sorted(worked[m_id] - seen):
            violations.append(
                Violation(
                    ROUTE_STRUCTURE,
                    f"machine {machine.name} works job {names[j]} but never visits it",
                )
            )
        if route and machine.start_location is not None:
            setup = travel_time(instance, machine, machine.start_location, route[0])
            if schedule.start[route[0]] < setup:
                violations.append(
                    Violation(
                        TIMING_TRAVEL,
                        f"machine {machine.name} cannot reach first job "
                        f"{names[route[0]]} before {setup}",
                    )
                )
        for prev, nxt in zip(route, route[1:]):
            tt = travel_time(instance, machine, prev, nxt)
            if schedule.start[nxt] < schedule.completion[prev] + tt:
                violations.append(
                    Violation(
                        TIMING_TRAVEL,
                        f"machine {machine.name}: job {names[nxt]} starts at "
                        f"{schedule.start[nxt]} < {names[prev]} completion "
                        f"{schedule.completion[prev]} + travel {tt}",
                    )
                )

    # holding continuity: same machine on linked ops, direct transition
    for h in instance.holding:
        pf = chosen.get(h.from_job)
        pt = chosen.get(h.to_job)
        if pf is None or pt is None:
            continue
        for a, b in h.op_links:
            m_from = op_machine.get((h.from_job, a))
            m_to = op_machine.get((h.to_job, b))
            if m_from is None or m_to is None:
                continue
            if m_from != m_to:
                violations.append(
                    Violation(
                        HOLDING_MACHINE,
                        f"holding {names[h.from_job]}->{names[h.to_job]}: op {a} on "
                        f"{instance.machines[m_from].name} but linked op {b} on "
                        f"{instance.machines[m_to].name}",
                    )
                )
            route = schedule.routes.get(m_from, ())
            direct = any(
                prev == h.from_job and nxt == h.to_job for prev, nxt in zip(route, route[1:])
            )
            if not direct:
                violations.append(
                    Violation(
                        HOLDING_NEXT,
                        f"holding {names[h.from_job]}->{names[h.to_job]}: machine "
                        f"{instance.machines[m_from].name} does not go there directly",
                    )
                )

    if schedule.completion:
        actual = max(schedule.completion.values())
        if schedule.makespan != actual:
            violations.append(
                Violation(
                    MAKESPAN,
                    f"stored makespan {schedule.makespan} != max completion {actual}",
                )
            )
    return violations


# -- schedule file format ------------------------------------------------------

SCHEDULE_FORMAT_VERSION = 1


def schedule_to_dict(instance: Instance, schedule: Schedule) -> dict:
    """JSON-ready dict; times carry ticks plus a decimal time-unit mirror."""

    def time_pair(ticks: int) -> dict:
        return {"ticks": ticks, "units": float(ticks_to_units(ticks))}

    doc = {
        "format_version": SCHEDULE_FORMAT_VERSION,
        "makespan": time_pair(schedule.makespan),
        "jobs": [],
        "routes": [
            {
                "machine": instance.machines[m].name,
                "jobs": [instance.jobs[j].name for j in schedule.routes.get(m, ())],
            }
            for m in range(instance.n_machines)
        ],
    }
    for j in sorted(schedule.assignment.chosen_plan):
        p = schedule.assignment.chosen_plan[j]
        plan = instance.jobs[j].plans[p]
        doc["jobs"].append(
            {
                "name": instance.jobs[j].name,
                "plan": p,
                "start": time_pair(schedule.start[j]),
                "completion": time_pair(schedule.completion[j]),
                "operations": [
                    {
                        "index": o,
                        "machine": instance.machines[
                            schedule.assignment.op_machine[(j, o)]
                        ].name,
                        "completion": time_pair(schedule.op_completion[(j, o)]),
                    }
                    for o in range(len(plan))
                    if (j, o) in schedule.assignment.op_machine
                ],
            }
        )
    return doc


def schedule_from_dict(instance: Instance, doc: dict) -> Schedule:
    """Parse the schedule file format; tick values are authoritative."""
    version = doc.get("format_version")
    if version != SCHEDULE_FORMAT_VERSION:
        raise ValueError(f"unsupported schedule format_version {version}")
    chosen: dict[int, int] = {}
    op_machine: dict[tuple[int, int], int] = {}
    start: dict[int, int] = {}
    completion: dict[int, int] = {}
    op_completion: dict[tuple[int, int], int] = {}
    for entry in doc["jobs"]:
        j = instance.job_by_name(entry["name"]).id
        chosen[j] = entry["plan"]
        start[j] = entry["start"]["ticks"]
        completion[j] = entry["completion"]["ticks"]
        for op in entry["operations"]:
            o = op["index"]
            op_machine[(j, o)] = instance.machine_by_name(op["machine"]).id
            op_completion[(j, o)] = op["completion"]["ticks"]
    routes = {
        instance.machine_by_name(r["machine"]).id: tuple(
            instance.job_by_name(name).id for name in r["jobs"]
        )
        for r in doc["routes"]
    }
    return Schedule(
        assignment=Assignment(chosen, op_machine),
        start=start,
        completion=completion,
        op_completion=op_completion,
        routes=routes,
        makespan=doc["makespan"]["ticks"],
    )


def save_schedule(instance: Instance, schedule: Schedule, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schedule_to_dict(instance, schedule), fh, indent=2)
        fh.write("\n")


def load_schedule(instance: Instance, path) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_dict(instance, json.load(fh))
