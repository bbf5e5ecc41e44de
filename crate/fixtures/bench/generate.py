#!/usr/bin/env python3
"""Generates the benchmark fixture suites.

Writes two suites next to this script:

    full/    10 scenes x 5 categories x 5 variations
    subset/  living_room and operating_room only

Each suite has scenes/, cases/ and expected.json. Oracles, scripted model
replies and the expected success rates and mean latencies are computed here
with plain Python, independently of the Rust crate, so the harness can be
checked against them.

The scripted replies follow a fixed error pattern (see FAILURES) that
exercises retries, exhausted retries and wrong answers. The numbers they
produce say nothing about real model behaviour.
"""

import json
import math
import shutil
from pathlib import Path

HERE = Path(__file__).resolve().parent

ROOM = ((0.0, 0.0, 0.0), (8.0, 6.0, 3.0))
BUFFER = 0.02 * math.sqrt(sum((b - a) ** 2 for a, b in zip(*ROOM)))
CONTACT_SLACK = 1e-3
NEXT_TO_GAP = 0.5
NEXT_TO_MAX = 2 * BUFFER + 0.3

# role -> (size, center xy, base z)
LAYOUT = {
    "A": ((1.6, 0.9, 0.75), (2.0, 4.5), 0.0),
    "B": ((1.0, 0.6, 0.9), (6.0, 4.6), 0.0),
    "C": ((0.5, 0.5, 0.9), (2.0, 2.5), 0.0),
    "D": ((0.6, 0.4, 1.0), (4.0, 2.5), 0.0),
    "E": ((0.2, 0.2, 0.3), (6.5, 1.5), 1.0),
    "F": ((0.3, 0.2, 0.25), (4.0, 4.5), 0.0),
    "G": ((0.8, 0.5, 1.0), (6.5, 1.5), 0.0),
    "H": ((2.0, 0.9, 0.8), (1.8, 1.0), 0.0),
}

THEMES = [
    ("living_room", ["coffee table", "side table", "armchair", "floor lamp", "vase", "plant pot", "bookcase", "sofa"]),
    ("wine_cellar", ["tasting table", "barrel", "stool", "wine rack", "wine bottle", "crate", "cabinet", "bench"]),
    ("kitchen", ["kitchen island", "counter", "chair", "trash bin", "kettle", "fruit bowl", "fridge", "dining bench"]),
    ("operating_room", ["operating table", "tool table", "stool", "monitor stand", "orange bottle", "tray", "supply cabinet", "gurney"]),
    ("bedroom", ["desk", "nightstand", "chair", "lamp", "alarm clock", "laundry basket", "dresser", "bed"]),
    ("office", ["desk", "printer table", "office chair", "coat rack", "mug", "box", "filing cabinet", "couch"]),
    ("bathroom", ["vanity", "shelf", "stool", "towel rack", "soap bottle", "basket", "cabinet", "bathtub"]),
    ("dining_room", ["dining table", "sideboard", "chair", "plant", "candle", "bowl", "cupboard", "bench"]),
    ("workshop", ["workbench", "tool table", "stool", "drill press", "oil can", "toolbox", "shelf unit", "lumber pile"]),
    ("library", ["reading table", "book cart", "chair", "globe", "lamp", "book stack", "bookshelf", "sofa"]),
]
SUBSET = ["living_room", "operating_room"]

CATEGORIES = ["simple", "compositional", "fuzzy", "compositional_fuzzy", "hard"]
STRATEGIES = ["cga", "euclidean", "omniverse"]

BASE_DELAY_MS = 1000
FAILURE_DELAY_MS = 500
FAILURE_BODY = "I'm sorry, I cannot determine the transformation for this request."

# (strategy, category, variation) -> kind of scripted failure
#   "retry2"    two unusable replies, then the correct one
#   "exhaust"   unusable replies on every attempt
#   "partial"   only the first object of a swap is moved
#   "delta"     the object ends slightly inside its support; the resolver lifts it
FAILURES = {
    ("cga", "simple", 5): "retry2",
    ("cga", "fuzzy", 2): "delta",
    ("cga", "hard", 2): "partial",
    ("euclidean", "simple", 5): "retry2",
    ("euclidean", "compositional_fuzzy", 5): "exhaust",
    ("euclidean", "hard", 1): "partial",
    ("euclidean", "hard", 3): "partial",
    ("omniverse", "simple", 5): "retry2",
    ("omniverse", "fuzzy", 5): "exhaust",
    ("omniverse", "hard", 1): "partial",
    ("omniverse", "hard", 2): "partial",
    ("omniverse", "hard", 3): "partial",
}
MAX_ATTEMPTS = 5


# ---------------------------------------------------------------- geometry

def rot_z(deg):
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def matvec(a, v):
    return [sum(a[i][k] * v[k] for k in range(3)) for i in range(3)]


def add(a, b):
    return [x + y for x, y in zip(a, b)]


def sub(a, b):
    return [x - y for x, y in zip(a, b)]


class Motion:
    """p -> R p + t, built from elementary steps applied in order."""

    def __init__(self):
        self.r = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        self.t = [0.0, 0.0, 0.0]
        self.yaw = 0.0
        self.steps = []

    def translate(self, v):
        self.t = add(self.t, v)
        self.steps.append(("t", list(v)))
        return self

    def rotate(self, deg, pivot):
        r = rot_z(deg)
        # p -> r (p - c) + c applied after the current motion
        self.r = matmul(r, self.r)
        self.t = add(matvec(r, sub(self.t, pivot)), pivot)
        self.yaw += deg
        self.steps.append(("r", deg, list(pivot)))
        return self

    def apply(self, p):
        return add(matvec(self.r, p), self.t)

    def is_identity(self):
        return not self.steps


def center(box):
    return [(a + b) * 0.5 for a, b in zip(box[0], box[1])]


def corners(box):
    (x0, y0, z0), (x1, y1, z1) = box
    return [[x, y, z] for x in (x0, x1) for y in (y0, y1) for z in (z0, z1)]


def moved_box(box, motion):
    pts = [motion.apply(c) for c in corners(box)]
    return (
        [min(p[k] for p in pts) for k in range(3)],
        [max(p[k] for p in pts) for k in range(3)],
    )


def overlaps(a, b):
    return all(a[0][k] < b[1][k] and b[0][k] < a[1][k] for k in range(3))


def inflate(box, d):
    return ([box[0][0] - d, box[0][1] - d, box[0][2]], [box[1][0] + d, box[1][1] + d, box[1][2]])


def collides(a, b):
    return overlaps(inflate(a, BUFFER), inflate(b, BUFFER))


def inside_room(box):
    return all(ROOM[0][k] <= box[0][k] and box[1][k] <= ROOM[1][k] for k in range(3))


def on_top_of(a, s):
    return abs(a[0][2] - s[1][2]) <= BUFFER + CONTACT_SLACK and all(
        s[0][k] <= a[0][k] and a[1][k] <= s[1][k] for k in range(2)
    )


def horizontal_gap(a, b):
    dx = max(a[0][0] - b[1][0], b[0][0] - a[1][0], 0.0)
    dy = max(a[0][1] - b[1][1], b[0][1] - a[1][1], 0.0)
    return math.hypot(dx, dy)


def boxes_close(a, b, tol):
    return all(abs(a[i][k] - b[i][k]) <= tol for i in range(2) for k in range(3))


# ---------------------------------------------------------------- payloads

def num(x):
    """Decimal text without exponent notation."""
    if x == 0:
        return "0"
    text = repr(float(x))
    if "e" in text or "E" in text:
        text = f"{x:.20f}".rstrip("0").rstrip(".")
    return text


def vec_text(v):
    return f"{num(v[0])}*e1 + {num(v[1])}*e2 + {num(v[2])}*e3"


def cga_text(motion):
    if motion.is_identity():
        return "1"
    factors = []
    for step in motion.steps:
        if step[0] == "t":
            factors.append(f"(1 - 0.5*({vec_text(step[1])})*einf)")
        else:
            _, deg, pivot = step
            h = math.radians(deg) / 2
            rot = f"({num(math.cos(h))} - {num(math.sin(h))}*e12)"
            factors.append(
                f"(1 - 0.5*({vec_text(pivot)})*einf)*{rot}*(1 + 0.5*({vec_text(pivot)})*einf)"
            )
    # later steps multiply from the left
    return "*".join(reversed(factors))


def matrix_payload(motion):
    r, t = motion.r, motion.t
    return [r[0] + [t[0]], r[1] + [t[1]], r[2] + [t[2]], [0.0, 0.0, 0.0, 1.0]]


def pose_payload(box, motion):
    c = motion.apply(center(box))
    yaw = (motion.yaw + 180.0) % 360.0 - 180.0
    return {"position": c, "rotation": [0.0, 0.0, yaw]}


def payload(strategy, box, motion):
    if strategy == "cga":
        return cga_text(motion)
    if strategy == "euclidean":
        return matrix_payload(motion)
    return pose_payload(box, motion)


# ---------------------------------------------------------------- scenes

def build_scene(index, scene_id, names):
    dx, dy = 0.04 * index, 0.02 * index
    objects = {}
    for role, name in zip("ABCDEFGH", names):
        size, (cx, cy), z0 = LAYOUT[role]
        cx, cy = cx + dx, cy + dy
        box = (
            [cx - size[0] / 2, cy - size[1] / 2, z0],
            [cx + size[0] / 2, cy + size[1] / 2, z0 + size[2]],
        )
        objects[role] = (name, box)
    return {"id": scene_id, "objects": objects}


def scene_json(scene):
    return {
        "id": scene["id"],
        "bounds": {"min": list(ROOM[0]), "max": list(ROOM[1])},
        "objects": [
            {"name": name, "min": box[0], "max": box[1]}
            for name, box in scene["objects"].values()
        ],
    }


# ---------------------------------------------------------------- queries

def q(role_names, text):
    """Fills {A}..{H} with quoted object names."""
    return text.format(**{r: f"'{n}'" for r, n in role_names.items()})


def case_specs(scene):
    """Yields (category, variation, query, motions, checks, extra).

    motions maps role -> Motion for the objects the reply moves, in query
    order; checks are oracle checks keyed by role.
    """
    objs = scene["objects"]
    box = {r: b for r, (_, b) in objs.items()}
    names = {r: n for r, (n, _) in objs.items()}
    c = {r: center(b) for r, b in box.items()}

    def size(r):
        return [box[r][1][k] - box[r][0][k] for k in range(3)]

    specs = []

    def add_case(cat, var, text, motions, fuzzy=None, order=None):
        specs.append((cat, var, q(names, text), motions, fuzzy or [], order))

    # simple
    add_case("simple", 1, "move the {C} to the right by 0.5 meters", {"C": Motion().translate([0.5, 0, 0])})
    add_case("simple", 2, "move the {D} forward by 0.4 meters", {"D": Motion().translate([0, 0.4, 0])})
    add_case("simple", 3, "rotate the {A} by 90 degrees counterclockwise", {"A": Motion().rotate(90, c["A"])})
    add_case("simple", 4, "move the {H} to the left by 0.3 meters", {"H": Motion().translate([-0.3, 0, 0])})
    add_case("simple", 5, "move the {F} backward by 0.5 meters", {"F": Motion().translate([0, -0.5, 0])})

    # compositional
    d_left = add(c["D"], [-0.5, 0, 0])
    add_case("compositional", 1, "move the {D} to the left by 0.5 meters and then rotate it by 90 degrees",
             {"D": Motion().translate([-0.5, 0, 0]).rotate(90, d_left)})
    add_case("compositional", 2, "move the {C} forward by 0.3 meters and move the {F} to the left by 0.5 meters",
             {"C": Motion().translate([0, 0.3, 0]), "F": Motion().translate([-0.5, 0, 0])})
    add_case("compositional", 3, "lift the {E} by 0.2 meters and rotate the {B} by 90 degrees",
             {"E": Motion().translate([0, 0, 0.2]), "B": Motion().rotate(90, c["B"])})
    add_case("compositional", 4, "move the {H} to the right by 0.4 meters and move the {G} backward by 0.3 meters",
             {"H": Motion().translate([0.4, 0, 0]), "G": Motion().translate([0, -0.3, 0])})
    add_case("compositional", 5, "rotate the {D} by 90 degrees and then move it forward by 0.5 meters",
             {"D": Motion().rotate(90, c["D"]).translate([0, 0.5, 0])})

    def onto(r, support):
        top = box[support][1][2]
        sc = c[support]
        return Motion().translate([sc[0] - c[r][0], sc[1] - c[r][1], top - box[r][0][2]])

    def beside(r, other, side):
        # side: +x, -x, +y, -y relative to other
        t = [0.0, 0.0, 0.0]
        o, b = box[other], box[r]
        if side == "+x":
            t = [o[1][0] + NEXT_TO_GAP - b[0][0], c[other][1] - c[r][1], 0.0]
        elif side == "-x":
            t = [o[0][0] - NEXT_TO_GAP - b[1][0], c[other][1] - c[r][1], 0.0]
        elif side == "+y":
            t = [c[other][0] - c[r][0], o[1][1] + NEXT_TO_GAP - b[0][1], 0.0]
        else:
            t = [c[other][0] - c[r][0], o[0][1] - NEXT_TO_GAP - b[1][1], 0.0]
        return Motion().translate(t)

    # fuzzy
    add_case("fuzzy", 1, "place the {F} on top of the {A}", {"F": onto("F", "A")}, [("on_top_of", "F", "A")])
    add_case("fuzzy", 2, "put the {E} on top of the {B}", {"E": onto("E", "B")}, [("on_top_of", "E", "B")])
    add_case("fuzzy", 3, "move the {C} next to the {D}", {"C": beside("C", "D", "-x")}, [("next_to", "C", "D")])
    add_case("fuzzy", 4, "place the {F} next to the {H}", {"F": beside("F", "H", "+x")}, [("next_to", "F", "H")])
    add_case("fuzzy", 5, "put the {E} on top of the {A}", {"E": onto("E", "A")}, [("on_top_of", "E", "A")])

    # compositional fuzzy
    add_case("compositional_fuzzy", 1, "place the {F} on top of the {B} and move the {C} to the right by 0.5 meters",
             {"F": onto("F", "B"), "C": Motion().translate([0.5, 0, 0])}, [("on_top_of", "F", "B")])
    add_case("compositional_fuzzy", 2, "put the {E} on top of the {A} and move the {D} next to the {B}",
             {"E": onto("E", "A"), "D": beside("D", "B", "-y")}, [("on_top_of", "E", "A"), ("next_to", "D", "B")])
    add_case("compositional_fuzzy", 3, "move the {C} next to the {H} and rotate the {A} by 90 degrees",
             {"C": beside("C", "H", "+y"), "A": Motion().rotate(90, c["A"])}, [("next_to", "C", "H")])
    add_case("compositional_fuzzy", 4, "put the {E} on top of the {B} and move the {F} forward by 0.5 meters",
             {"E": onto("E", "B"), "F": Motion().translate([0, 0.5, 0])}, [("on_top_of", "E", "B")])
    d_next = beside("D", "A", "+x")
    d_final = moved_box(box["D"], d_next)
    f_onto = Motion().translate([
        center(d_final)[0] - c["F"][0], center(d_final)[1] - c["F"][1], d_final[1][2] - box["F"][0][2]])
    add_case("compositional_fuzzy", 5, "move the {D} next to the {A} and put the {F} on top of the {D}",
             {"D": d_next, "F": f_onto}, [("next_to", "D", "A"), ("on_top_of", "F", "D")])

    def swap(a, b):
        ta = [c[b][0] - c[a][0], c[b][1] - c[a][1], 0.0]
        tb = [c[a][0] - c[b][0], c[a][1] - c[b][1], 0.0]
        return {a: Motion().translate(ta), b: Motion().translate(tb)}

    # hard
    add_case("hard", 1, "swap the positions of the {C} and the {D}", swap("C", "D"))
    add_case("hard", 2, "swap the positions of the {F} and the {D}", swap("F", "D"))
    add_case("hard", 3, "swap the positions of the {C} and the {F}", swap("C", "F"))
    add_case("hard", 4, "rotate the {A} by 90 degrees and move it to the left by 1 meter",
             {"A": Motion().rotate(90, c["A"]).translate([-1.0, 0, 0])})
    add_case("hard", 5, "rotate the {B} by 45 degrees", {"B": Motion().rotate(45, c["B"])})
    return specs


def queried_roles(query, names):
    found = []
    for r, n in names.items():
        pos = query.find(f"'{n}'")
        if pos >= 0:
            found.append((pos, r))
    return [r for _, r in sorted(found)]


def build_cases(scene):
    objs = scene["objects"]
    box = {r: b for r, (_, b) in objs.items()}
    names = {r: n for r, (n, _) in objs.items()}
    cases, expectations = [], []
    for cat, var, query, motions, fuzzy, _ in case_specs(scene):
        roles = queried_roles(query, names)
        assert set(motions) <= set(roles), (query, motions.keys(), roles)
        final = dict(box)
        for r, m in motions.items():
            final[r] = moved_box(box[r], m)
        # every moved object must be valid where the reply puts it
        for r in motions:
            assert inside_room(final[r]), (scene["id"], query, r)
            for o in final:
                if o != r:
                    assert not collides(final[r], final[o]), (scene["id"], query, r, o)
        predicate_roles = {f[1] for f in fuzzy}
        checks = []
        for kind, r, other in fuzzy:
            if kind == "on_top_of":
                assert on_top_of(final[r], final[other]), (query, r)
                checks.append({"check": "on_top_of", "object": names[r], "support": names[other]})
            else:
                assert horizontal_gap(final[r], final[other]) <= NEXT_TO_MAX, (query, r)
                checks.append({"check": "next_to", "object": names[r], "other": names[other], "max_gap": NEXT_TO_MAX})
        for r in roles:
            if r not in predicate_roles:
                checks.append({"check": "exact", "object": names[r], "min": final[r][0], "max": final[r][1], "tolerance": 1e-3})

        mock = {}
        outcome = {}
        for strategy in STRATEGIES:
            failure = FAILURES.get((strategy, cat, var))
            entries = []
            for i, r in enumerate(roles):
                m = motions.get(r, Motion())
                if failure == "partial" and i > 0:
                    m = Motion()
                elif failure == "delta" and r in motions and fuzzy:
                    m = Motion()
                    for step in motions[r].steps:
                        m.translate(step[1])
                    m.translate([0.0, 0.0, -0.01])
                entries.append({"name": f"X{i + 1}", "transformation": payload(strategy, box[r], m)})
            delay = BASE_DELAY_MS + 125 * var + 250 * CATEGORIES.index(cat)
            rule = {"responses": [{"delay_ms": delay, "body": {"objects": entries}}]}
            passed, latency_ms, retries = True, delay, 0
            if failure == "retry2":
                rule.update(failures=2, failure_delay_ms=FAILURE_DELAY_MS, failure_body=FAILURE_BODY)
                latency_ms, retries = delay + 2 * FAILURE_DELAY_MS, 2
            elif failure == "exhaust":
                rule.update(failures=MAX_ATTEMPTS, failure_delay_ms=FAILURE_DELAY_MS, failure_body=FAILURE_BODY)
                passed, latency_ms, retries = False, MAX_ATTEMPTS * FAILURE_DELAY_MS, MAX_ATTEMPTS - 1
            elif failure == "partial":
                # the second object stays put, so its exact check cannot pass
                assert not boxes_close(box[roles[1]], final[roles[1]], 1e-3)
                passed = False
            mock[strategy] = rule
            outcome[strategy] = {"passed": passed, "latency_s": latency_ms / 1000.0, "retries": retries}
        case_id = f"{scene['id']}/{cat}/{var}"
        cases.append({
            "id": case_id,
            "scene": scene["id"],
            "query": query,
            "category": cat,
            "variation": var,
            "oracle": checks,
            "mock": mock,
        })
        expectations.append((case_id, cat, outcome))
    return cases, expectations


def expected_metrics(all_expectations):
    groups = {}
    overall = {}
    for strategy in STRATEGIES:
        rows = [(cat, o[strategy]) for _, cat, o in all_expectations]
        for cat in CATEGORIES:
            sel = [r for c, r in rows if c == cat]
            m = len(sel)
            passes = sum(1 for r in sel if r["passed"])
            total = sum(sorted(r["latency_s"] for r in sel))
            groups.setdefault(strategy, {})[cat] = {
                "m": m,
                "success_rate": passes / m,
                "mean_latency_s": total / m,
            }
        m = len(rows)
        overall[strategy] = {
            "m": m,
            "success_rate": sum(1 for _, r in rows if r["passed"]) / m,
            "mean_latency_s": sum(sorted(r["latency_s"] for _, r in rows)) / m,
        }
    cases = {cid: o for cid, _, o in all_expectations}
    return {"groups": groups, "overall": overall, "cases": cases}


def write_suite(name, scene_ids):
    root = HERE / name
    if root.exists():
        shutil.rmtree(root)
    (root / "scenes").mkdir(parents=True)
    (root / "cases").mkdir()
    all_expectations = []
    for index, (scene_id, names) in enumerate(THEMES):
        if scene_id not in scene_ids:
            continue
        scene = build_scene(index, scene_id, names)
        (root / "scenes" / f"{scene_id}.json").write_text(json.dumps(scene_json(scene), indent=2) + "\n")
        cases, expectations = build_cases(scene)
        (root / "cases" / f"{scene_id}.json").write_text(json.dumps(cases, indent=2) + "\n")
        all_expectations.extend(expectations)
    manifest = {
        "buffer": BUFFER,
        "scenes": [
            {"id": sid, "objects": len(names)} for sid, names in THEMES if sid in scene_ids
        ],
        "cases": len(all_expectations),
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (root / "expected.json").write_text(json.dumps(expected_metrics(all_expectations), indent=2) + "\n")


def main():
    write_suite("full", [sid for sid, _ in THEMES])
    write_suite("subset", SUBSET)


if __name__ == "__main__":
    main()
