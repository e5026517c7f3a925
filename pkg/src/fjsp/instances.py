"""Benchmark instances and the JSON instance file format.

Ships the solar-panel assembly benchmark (12 jobs, 4 machines), the 5-job
reduced instance used for Q-learning, and a multi-panel generator that
replicates the single panel at a configurable shift distance.
"""

import json

from .model import (
    HoldingArc,
    Instance,
    InvalidInstanceError,
    Job,
    Machine,
)

OPERATION_TYPES = ("hold_frame_link", "hold_sheet", "weld", "locomote")
ROBOT_TYPES = ("assembler", "marc", "lsms")
LOCOMOTE = 3

# time units for robot type r to complete one operation of type q
EFFICIENCY = (
    (1, 1, 5, 100),   # assembler
    (5, 5, 1, 5),     # marc
    (10, 10, 10, 1),  # lsms
)

# (name, plans); job order fixes the job ids used everywhere below
SOLAR_PANEL_JOBS = (
    ("M1", ((3,),)),
    ("M2", ((3,),)),
    ("Ja", ((0, 0),)),
    ("Jb", ((0, 0),)),
    ("Aa", ((0, 0, 2),)),
    ("Ab", ((0, 0, 2),)),
    ("M3", ((3,),)),
    ("Jc", ((1,),)),
    ("Ac", ((1, 2),)),
    ("Md", ((3,),)),
    ("Jd", ((0, 1),)),
    ("Ad", ((1, 2),)),
)

# spatial distances between job locations, same job order as above
SOLAR_PANEL_DISTANCES = (
    (0, 0, 43, 50, 38, 55, 0, 36, 35, 0, 56, 55),
    (0, 0, 41, 50, 36, 55, 0, 35, 35, 0, 55, 55),
    (43, 41, 0, 0, 0, 0, 40, 0, 0, 40, 0, 0),
    (50, 50, 0, 0, 0, 0, 52, 0, 0, 53, 0, 0),
    (38, 36, 0, 0, 0, 0, 35, 0, 0, 35, 0, 0),
    (55, 55, 0, 0, 0, 0, 57, 0, 0, 58, 0, 0),
    (0, 0, 40, 52, 35, 57, 0, 35, 35, 0, 55, 55),
    (36, 35, 0, 0, 0, 0, 35, 0, 0, 35, 0, 0),
    (35, 35, 0, 0, 0, 0, 35, 0, 0, 35, 0, 0),
    (0, 0, 40, 53, 35, 58, 0, 35, 35, 0, 55, 55),
    (56, 55, 0, 0, 0, 0, 55, 0, 0, 55, 0, 0),
    (55, 55, 0, 0, 0, 0, 55, 0, 0, 55, 0, 0),
)

# job precedence by name: frame pieces moved, jigged, affixed; then the
# sheet moved, jigged, affixed on one side, unrolled, affixed on the other
SOLAR_PANEL_DAG = (
    ("M1", "Ja"),
    ("M2", "Ja"),
    ("M1", "Jb"),
    ("M2", "Jb"),
    ("Ja", "Aa"),
    ("Jb", "Ab"),
    ("Aa", "M3"),
    ("Ab", "M3"),
    ("M3", "Jc"),
    ("Jc", "Ac"),
    ("Ac", "Md"),
    ("Md", "Jd"),
    ("Jd", "Ad"),
)

# jig job -> affix job continuity; op_links pair the i-th hold operation of
# matching type on each side (Jd's frame-link hold has no counterpart in Ad
# and stays unlinked)
SOLAR_PANEL_HOLDING = (
    ("Ja", "Aa", ((0, 0), (1, 1))),
    ("Jb", "Ab", ((0, 0), (1, 1))),
    ("Jc", "Ac", ((0, 0),)),
    ("Jd", "Ad", ((1, 0),)),
)

# (name, robot_type name, locomotion divisor)
SOLAR_PANEL_MACHINES = (
    ("assembler", "assembler", 30),
    ("marc1", "marc", 30),
    ("marc2", "marc", 25),
    ("lsms", "lsms", 30),
)

REDUCED_JOB_NAMES = ("M2", "Ja", "Jb", "Aa", "Ab")


def make_instance(
    *,
    operation_types,
    robot_types,
    efficiency,
    machines,
    jobs,
    dag,
    holding=(),
    distances,
    locomote_type,
    horizon=None,
) -> Instance:
    """Build an Instance from name-free positional data, assigning ids.

    ``machines`` entries are (name, robot_type index, divisor[, start job id])
    tuples; ``jobs`` entries are (name, plans) tuples; ``dag`` and ``holding``
    use job ids.
    """
    job_objs = tuple(Job(i, name, tuple(tuple(p) for p in plans)) for i, (name, plans) in enumerate(jobs))
    machine_objs = []
    for i, spec in enumerate(machines):
        name, rt, div = spec[:3]
        start = spec[3] if len(spec) > 3 else None
        machine_objs.append(Machine(i, name, rt, div, start))
    holding_objs = tuple(HoldingArc(f, t, tuple(tuple(l) for l in links)) for f, t, links in holding)
    return Instance(
        jobs=job_objs,
        machines=tuple(machine_objs),
        robot_types=tuple(robot_types),
        operation_types=tuple(operation_types),
        efficiency=efficiency,
        dag=frozenset(dag),
        holding=holding_objs,
        distances=distances,
        locomote_type=locomote_type,
        horizon=horizon,
    )


def solar_panel_instance() -> Instance:
    """The full 12-job solar panel assembly benchmark."""
    name_to_id = {name: i for i, (name, _) in enumerate(SOLAR_PANEL_JOBS)}
    rt_index = {name: i for i, name in enumerate(ROBOT_TYPES)}
    return make_instance(
        operation_types=OPERATION_TYPES,
        robot_types=ROBOT_TYPES,
        efficiency=EFFICIENCY,
        machines=tuple((n, rt_index[rt], div) for n, rt, div in SOLAR_PANEL_MACHINES),
        jobs=SOLAR_PANEL_JOBS,
        dag=tuple((name_to_id[a], name_to_id[b]) for a, b in SOLAR_PANEL_DAG),
        holding=tuple(
            (name_to_id[f], name_to_id[t], links) for f, t, links in SOLAR_PANEL_HOLDING
        ),
        distances=SOLAR_PANEL_DISTANCES,
        locomote_type=LOCOMOTE,
    )


def reduced_rl_instance() -> Instance:
    """The 5-job restriction used for Q-learning: M2, Ja, Jb, Aa, Ab.

    Precedence, holding arcs, and distances are the sub-instance induced by
    the full benchmark on these jobs; machines are unchanged.
    """
    full_ids = {name: i for i, (name, _) in enumerate(SOLAR_PANEL_JOBS)}
    keep = [full_ids[n] for n in REDUCED_JOB_NAMES]
    new_id = {old: new for new, old in enumerate(keep)}
    rt_index = {name: i for i, name in enumerate(ROBOT_TYPES)}
    jobs = tuple(SOLAR_PANEL_JOBS[i] for i in keep)
    dag = tuple(
        (new_id[full_ids[a]], new_id[full_ids[b]])
        for a, b in SOLAR_PANEL_DAG
        if a in REDUCED_JOB_NAMES and b in REDUCED_JOB_NAMES
    )
    holding = tuple(
        (new_id[full_ids[f]], new_id[full_ids[t]], links)
        for f, t, links in SOLAR_PANEL_HOLDING
        if f in REDUCED_JOB_NAMES and t in REDUCED_JOB_NAMES
    )
    distances = tuple(tuple(SOLAR_PANEL_DISTANCES[a][b] for b in keep) for a in keep)
    return make_instance(
        operation_types=OPERATION_TYPES,
        robot_types=ROBOT_TYPES,
        efficiency=EFFICIENCY,
        machines=tuple((n, rt_index[rt], div) for n, rt, div in SOLAR_PANEL_MACHINES),
        jobs=jobs,
        dag=dag,
        holding=holding,
        distances=distances,
        locomote_type=LOCOMOTE,
    )


def gen_multi_panel(n: int, shift: int = 100) -> Instance:
    """``n`` copies of the solar panel, the k-th shifted ``shift`` units away.

    Job names get a ``_k`` suffix (k starting at 1).  Distances within a
    panel are preserved; the distance between jobs on different panels is
    ``shift`` plus the larger of the two jobs' distances to their own
    panel's M1 anchor.  Precedence and holding arcs are replicated per
    panel with no cross-panel arcs; the machine set is shared.
    """
    if n < 1:
        raise ValueError(f"panel count must be >= 1, got {n}")
    if shift < 0:
        raise ValueError(f"shift must be >= 0, got {shift}")
    base = len(SOLAR_PANEL_JOBS)
    name_to_id = {name: i for i, (name, _) in enumerate(SOLAR_PANEL_JOBS)}
    rt_index = {name: i for i, name in enumerate(ROBOT_TYPES)}
    anchor = name_to_id["M1"]

    jobs = []
    for k in range(1, n + 1):
        for name, plans in SOLAR_PANEL_JOBS:
            jobs.append((f"{name}_{k}", plans))

    def dist(i: int, j: int) -> int:
        pi, a = divmod(i, base)
        pj, b = divmod(j, base)
        if pi == pj:
            return SOLAR_PANEL_DISTANCES[a][b]
        return shift + max(SOLAR_PANEL_DISTANCES[a][anchor], SOLAR_PANEL_DISTANCES[b][anchor])

    total = n * base
    distances = tuple(tuple(dist(i, j) for j in range(total)) for i in range(total))
    dag = tuple(
        (name_to_id[a] + k * base, name_to_id[b] + k * base)
        for k in range(n)
        for a, b in SOLAR_PANEL_DAG
    )
    holding = tuple(
        (name_to_id[f] + k * base, name_to_id[t] + k * base, links)
        for k in range(n)
        for f, t, links in SOLAR_PANEL_HOLDING
    )
    return make_instance(
        operation_types=OPERATION_TYPES,
        robot_types=ROBOT_TYPES,
        efficiency=EFFICIENCY,
        machines=tuple((m, rt_index[rt], div) for m, rt, div in SOLAR_PANEL_MACHINES),
        jobs=jobs,
        dag=dag,
        holding=holding,
        distances=distances,
        locomote_type=LOCOMOTE,
    )


# -- instance file format ----------------------------------------------------

FORMAT_VERSION = 1


def instance_to_dict(instance: Instance) -> dict:
    """JSON-ready dict in the versioned instance file format."""
    doc = {
        "format_version": FORMAT_VERSION,
        "operation_types": list(instance.operation_types),
        "locomote_type": instance.locomote_type,
        "robot_types": list(instance.robot_types),
        "efficiency": [list(row) for row in instance.efficiency],
        "machines": [],
        "jobs": [
            {"name": j.name, "plans": [list(p) for p in j.plans]} for j in instance.jobs
        ],
        "dag": sorted(
            [instance.jobs[a].name, instance.jobs[b].name] for a, b in instance.dag
        ),
        "holding": [
            {
                "from": instance.jobs[h.from_job].name,
                "to": instance.jobs[h.to_job].name,
                "op_links": [list(l) for l in h.op_links],
            }
            for h in instance.holding
        ],
        "distances": [list(row) for row in instance.distances],
        "horizon_ticks": instance.horizon,
    }
    for m in instance.machines:
        entry = {
            "name": m.name,
            "robot_type": instance.robot_types[m.robot_type],
            "locomotion_divisor": m.locomotion_divisor,
        }
        if m.start_location is not None:
            entry["start_location"] = instance.jobs[m.start_location].name
        doc["machines"].append(entry)
    return doc


def instance_from_dict(doc: dict) -> Instance:
    """Parse the instance file format; all invariants are re-checked."""
    try:
        version = doc["format_version"]
        if version != FORMAT_VERSION:
            raise InvalidInstanceError(f"unsupported format_version {version}")
        op_types = tuple(doc["operation_types"])
        robot_types = tuple(doc["robot_types"])
        rt_index = {name: i for i, name in enumerate(robot_types)}
        job_names = [j["name"] for j in doc["jobs"]]
        job_index = {name: i for i, name in enumerate(job_names)}
        jobs = tuple((j["name"], tuple(tuple(p) for p in j["plans"])) for j in doc["jobs"])
        machines = []
        for m in doc["machines"]:
            rt = m["robot_type"]
            if rt not in rt_index:
                raise InvalidInstanceError(f"machine {m['name']!r}: unknown robot type {rt!r}")
            start = m.get("start_location")
            if start is not None:
                if start not in job_index:
                    raise InvalidInstanceError(
                        f"machine {m['name']!r}: unknown start_location {start!r}"
                    )
                start = job_index[start]
            machines.append((m["name"], rt_index[rt], m["locomotion_divisor"], start))
        for field_name in ("dag", "holding"):
            for entry in doc[field_name]:
                pair = entry if field_name == "dag" else (entry["from"], entry["to"])
                for name in pair:
                    if name not in job_index:
                        raise InvalidInstanceError(
                            f"{field_name} references unknown job {name!r}"
                        )
        dag = tuple((job_index[a], job_index[b]) for a, b in doc["dag"])
        holding = tuple(
            (job_index[h["from"]], job_index[h["to"]], tuple(tuple(l) for l in h["op_links"]))
            for h in doc["holding"]
        )
        return make_instance(
            operation_types=op_types,
            robot_types=robot_types,
            efficiency=doc["efficiency"],
            machines=machines,
            jobs=jobs,
            dag=dag,
            holding=holding,
            distances=doc["distances"],
            locomote_type=doc["locomote_type"],
            horizon=doc.get("horizon_ticks"),
        )
    except KeyError as exc:
        raise InvalidInstanceError(f"instance file is missing field {exc.args[0]!r}") from exc


def save(instance: Instance, path) -> None:
    """Write an instance to ``path`` in the JSON instance file format."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def load(path) -> Instance:
    """Read an instance file; raises InvalidInstanceError with diagnostics."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInstanceError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return instance_from_dict(doc)
