"""The benchmark domains: input documents, instance generators, references.

Each domain ships its document text, a seeded instance generator, the
search configuration it is solved with (line count and pointer budget),
and a reference program in the canonical text form.  Generators are pure
functions of (size, seed): same spec, same bytes.

Reference programs follow the published solution shapes where the
instruction set allows; pointer-assignment idioms are replaced by
trailing-pointer or precondition-pair equivalents (see the guarded
decrement note in :mod:`gpsynth.program`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

from .model import (Assignment, Domain, FluentRef, Instance, parse_domain)
from .program import ProgramLimits


@dataclass(frozen=True)
class GeneratorSpec:
    domain_id: str
    size: int | tuple
    seed: int = 0

    def instance_name(self) -> str:
        size = self.size
        tag = "x".join(str(s) for s in size) if isinstance(size, tuple) \
            else str(size)
        return f"{self.domain_id}-{tag}-s{self.seed}"


class _Builder:
    """Assembles a validated Instance from object names."""

    def __init__(self, dom: Domain, name: str):
        self.dom = dom
        self.name = name
        self.objects: dict[str, list[str]] = {t: [] for t in dom.types}
        self.index: dict[str, tuple[str, int]] = {}
        self.init: list[Assignment] = []
        self.goal: list[tuple[FluentRef, int]] = []

    def add_objects(self, type_name: str, names):
        for n in names:
            self.index[n] = (type_name, len(self.objects[type_name]))
            self.objects[type_name].append(n)

    def _ref(self, pred, names):
        return FluentRef(pred, tuple(self.index[n][1] for n in names))

    def set_init(self, pred, *names, value=1):
        self.init.append(Assignment(self._ref(pred, names), "assign", value))

    def set_goal(self, pred, *names, value=1):
        self.goal.append((self._ref(pred, names), value))

    def build(self) -> Instance:
        return Instance(self.name, self.dom.name,
                        {t: tuple(v) for t, v in self.objects.items()},
                        tuple(self.init), tuple(self.goal))


# ---------------------------------------------------------------------------
# domain documents

_DOMAIN_TEXT: dict[str, str] = {}

_DOMAIN_TEXT["blocks-ontable"] = """\
(define (domain blocks-ontable)
  (:types block)
  (:predicates (clear ?x - block) (handempty) (holding ?x - block)
               (on ?x - block ?y - block) (ontable ?x - block))
  (:action pickup
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (clear ?x)) (not (ontable ?x))
                 (not (handempty))))
  (:action putdown
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (clear ?x) (ontable ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (clear ?x) (handempty) (on ?x ?y) (not (holding ?x))
                 (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty))
                 (not (on ?x ?y)))))
"""

_DOMAIN_TEXT["gripper"] = """\
(define (domain gripper)
  (:types ball room gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room)
               (free ?g - gripper) (carry ?b - ball ?g - gripper))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from))
    :effect (and (not (at-robby ?from)) (at-robby ?to)))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
"""

_DOMAIN_TEXT["corridor"] = """\
(define (domain corridor)
  (:types location)
  (:predicates (at ?l - location) (goal-at ?l - location)
               (adj ?a - location ?b - location))
  (:action right
    :parameters (?a - location ?b - location)
    :precondition (and (at ?a) (adj ?a ?b))
    :effect (and (not (at ?a)) (at ?b)))
  (:action left
    :parameters (?a - location ?b - location)
    :precondition (and (at ?a) (adj ?b ?a) (not (goal-at ?a)))
    :effect (and (not (at ?a)) (at ?b))))
"""

_DOMAIN_TEXT["visitall"] = """\
(define (domain visitall)
  (:types row col)
  (:predicates (visited ?r - row ?c - col) (at-row ?r - row)
               (at-col ?c - col) (row-next ?a - row ?b - row)
               (col-next ?a - col ?b - col) (col-first ?c - col))
  (:action scan-right
    :parameters (?r - row ?a - col ?b - col)
    :precondition (and (at-row ?r) (at-col ?a) (col-next ?a ?b))
    :effect (and (not (at-col ?a)) (at-col ?b) (visited ?r ?b)))
  (:action up-return
    :parameters (?a - row ?b - row ?c - col ?h - col)
    :precondition (and (at-row ?a) (row-next ?a ?b) (at-col ?c)
                       (col-first ?h))
    :effect (and (not (at-row ?a)) (at-row ?b) (not (at-col ?c))
                 (at-col ?h) (visited ?b ?h))))
"""

_DOMAIN_TEXT["intrusion"] = """\
(define (domain intrusion)
  (:types host)
  (:predicates (recon-done ?h - host) (broken ?h - host) (cleaned ?h - host)
               (rooted ?h - host) (downloaded ?h - host) (stolen ?h - host))
  (:action recon
    :parameters (?h - host)
    :precondition (and (not (recon-done ?h)))
    :effect (and (recon-done ?h)))
  (:action break-into
    :parameters (?h - host)
    :precondition (and (recon-done ?h) (not (broken ?h)))
    :effect (and (broken ?h)))
  (:action clean
    :parameters (?h - host)
    :precondition (and (broken ?h) (not (cleaned ?h)))
    :effect (and (cleaned ?h)))
  (:action gain-root
    :parameters (?h - host)
    :precondition (and (cleaned ?h) (not (rooted ?h)))
    :effect (and (rooted ?h)))
  (:action download-files
    :parameters (?h - host)
    :precondition (and (rooted ?h) (not (downloaded ?h)))
    :effect (and (downloaded ?h)))
  (:action steal-data
    :parameters (?h - host)
    :precondition (and (downloaded ?h) (not (stolen ?h)))
    :effect (and (stolen ?h))))
"""

_DOMAIN_TEXT["spanner"] = """\
(define (domain spanner)
  (:types location spanner nut man)
  (:predicates (at-man ?m - man ?l - location)
               (at-spanner ?s - spanner ?l - location)
               (at-nut ?n - nut ?l - location)
               (link ?a - location ?b - location)
               (carrying ?m - man ?s - spanner)
               (usable ?s - spanner) (loose ?n - nut) (tightened ?n - nut))
  (:action pickup-spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at-man ?m ?l) (at-spanner ?s ?l))
    :effect (and (not (at-spanner ?s ?l)) (carrying ?m ?s)))
  (:action tighten-nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at-man ?m ?l) (at-nut ?n ?l) (carrying ?m ?s)
                       (usable ?s) (loose ?n))
    :effect (and (not (loose ?n)) (tightened ?n) (not (usable ?s))))
  (:action walk
    :parameters (?a - location ?b - location ?m - man)
    :precondition (and (at-man ?m ?a) (link ?a ?b))
    :effect (and (not (at-man ?m ?a)) (at-man ?m ?b))))
"""

_DOMAIN_TEXT["floyd"] = """\
(define (domain floyd)
  (:types node)
  (:predicates (edge ?a - node ?b - node))
  (:action connect
    :parameters (?k - node ?i - node ?j - node)
    :precondition (and (edge ?i ?k) (edge ?k ?j))
    :effect (and (edge ?i ?j))))
"""

_DOMAIN_TEXT["sorting"] = """\
(define (domain sorting)
  (:types position)
  (:functions (value ?p - position) (rank ?p - position))
  (:action swap
    :parameters (?a - position ?b - position)
    :precondition (and (< (rank ?a) (rank ?b)) (> (value ?a) (value ?b)))
    :effect (and (assign (value ?a) (value ?b))
                 (assign (value ?b) (value ?a)))))
"""

_DOMAIN_TEXT["reverse"] = """\
(define (domain reverse)
  (:types position)
  (:predicates (mirror ?a - position ?b - position) (done ?p - position))
  (:functions (value ?p - position))
  (:action swap
    :parameters (?a - position ?b - position)
    :precondition (and (mirror ?a ?b) (not (done ?a)))
    :effect (and (assign (value ?a) (value ?b))
                 (assign (value ?b) (value ?a))
                 (done ?a) (done ?b))))
"""

_DOMAIN_TEXT["select"] = """\
(define (domain select)
  (:types position)
  (:predicates (marked ?p - position))
  (:functions (value ?p - position))
  (:action move-mark
    :parameters (?a - position ?b - position)
    :precondition (and (marked ?b) (< (value ?a) (value ?b)))
    :effect (and (not (marked ?b)) (marked ?a))))
"""

_DOMAIN_TEXT["find"] = """\
(define (domain find)
  (:types position)
  (:functions (value ?p - position) (hits))
  (:action accumulate
    :parameters (?p - position ?t - position)
    :precondition (and (= (value ?p) (value ?t)))
    :effect (and (increase (hits) 1))))
"""

_DOMAIN_TEXT["fibonacci"] = """\
(define (domain fibonacci)
  (:types position)
  (:predicates (half ?p - position) (full ?p - position)
               (next ?a - position ?b - position)
               (next2 ?a - position ?b - position))
  (:functions (value ?p - position))
  (:action add-prev
    :parameters (?a - position ?b - position)
    :precondition (and (next ?a ?b) (half ?b) (not (full ?b)))
    :effect (and (increase (value ?b) (value ?a)) (full ?b)))
  (:action add-prev2
    :parameters (?a - position ?b - position)
    :precondition (and (next2 ?a ?b) (not (half ?b)))
    :effect (and (increase (value ?b) (value ?a)) (half ?b))))
"""

_DOMAIN_TEXT["triangular-sum"] = """\
(define (domain triangular-sum)
  (:types position)
  (:predicates (next ?a - position ?b - position))
  (:functions (value ?p - position))
  (:action push-next
    :parameters (?a - position ?b - position)
    :precondition (and (next ?a ?b))
    :effect (and (increase (value ?b) (value ?a)))))
"""


# ---------------------------------------------------------------------------
# instance generators (pure functions of size and seed)


def _gen_blocks(dom, name, size, rng):
    # any legal blocksworld state: towers, and possibly a block in hand
    # (held block declared first, so it sits at pointer index 0)
    b = _Builder(dom, name)
    blocks = [f"b{i}" for i in range(size)]
    held = rng.random() < 0.5 and size > 1
    if held:
        b.add_objects("block", blocks)
        stacked = blocks[1:]
    else:
        b.add_objects("block", blocks)
        stacked = blocks[:]
    order = list(stacked)
    rng.shuffle(order)
    towers: list[list[str]] = []
    for blk in order:
        if towers and rng.random() < 0.6:
            towers[-1].append(blk)
        else:
            towers.append([blk])
    if held:
        b.set_init("holding", blocks[0])
    else:
        b.set_init("handempty")
    for tower in towers:
        # tower[0] is the top block
        b.set_init("clear", tower[0])
        for above, below in zip(tower, tower[1:]):
            b.set_init("on", above, below)
        b.set_init("ontable", tower[-1])
    for blk in blocks:
        b.set_goal("ontable", blk)
    b.set_goal("handempty")  # implied by every block resting on the table
    return b.build()


def _gen_gripper(dom, name, size, rng):
    b = _Builder(dom, name)
    balls = [f"ball{i}" for i in range(size)]
    b.add_objects("ball", balls)
    b.add_objects("room", ["roomA", "roomB"])
    b.add_objects("gripper", ["left"])
    b.set_init("at-robby", "roomA")
    b.set_init("free", "left")
    for ball in balls:
        b.set_init("at", ball, "roomA")
        b.set_goal("at", ball, "roomB")
    return b.build()


def _gen_corridor(dom, name, size, rng):
    b = _Builder(dom, name)
    locs = [f"loc{i}" for i in range(size)]
    b.add_objects("location", locs)
    start = rng.randrange(size)
    goal = rng.randrange(size)
    b.set_init("at", locs[start])
    b.set_init("goal-at", locs[goal])
    for a, c in zip(locs, locs[1:]):
        b.set_init("adj", a, c)
    b.set_goal("at", locs[goal])
    return b.build()


def _gen_visitall(dom, name, size, rng):
    rows, cols = size if isinstance(size, tuple) else (size, size)
    b = _Builder(dom, name)
    rnames = [f"r{i}" for i in range(rows)]
    cnames = [f"c{i}" for i in range(cols)]
    b.add_objects("row", rnames)
    b.add_objects("col", cnames)
    b.set_init("at-row", rnames[0])
    b.set_init("at-col", cnames[0])
    b.set_init("col-first", cnames[0])
    b.set_init("visited", rnames[0], cnames[0])  # the start cell
    for a, c in zip(rnames, rnames[1:]):
        b.set_init("row-next", a, c)
    for a, c in zip(cnames, cnames[1:]):
        b.set_init("col-next", a, c)
    for r in rnames:
        for c in cnames:
            b.set_goal("visited", r, c)
    return b.build()


def _gen_intrusion(dom, name, size, rng):
    b = _Builder(dom, name)
    hosts = [f"host{i}" for i in range(size)]
    b.add_objects("host", hosts)
    for h in hosts:
        for flag in ("recon-done", "broken", "cleaned", "rooted",
                     "downloaded", "stolen"):
            b.set_goal(flag, h)
    return b.build()


def _gen_spanner(dom, name, size, rng):
    if isinstance(size, tuple):
        nloc, nspan, nnuts = size
    else:
        nloc, nspan, nnuts = size, size, size
    b = _Builder(dom, name)
    locs = [f"loc{i}" for i in range(nloc)]
    spanners = [f"spanner{i}" for i in range(nspan)]
    nuts = [f"nut{i}" for i in range(nnuts)]
    b.add_objects("location", locs)
    b.add_objects("spanner", spanners)
    b.add_objects("nut", nuts)
    b.add_objects("man", ["bob"])
    b.set_init("at-man", "bob", locs[0])
    for a, c in zip(locs, locs[1:]):
        b.set_init("link", a, c)
    gate = locs[-1]
    for s in spanners:
        home = locs[rng.randrange(nloc)]
        b.set_init("at-spanner", s, home)
        b.set_init("usable", s)
        b.set_goal("at-spanner", s, home, value=0)  # collected
    for n in nuts:
        b.set_init("at-nut", n, gate)
        b.set_init("loose", n)
        b.set_goal("tightened", n)
    b.set_goal("at-man", "bob", gate)
    return b.build()


def _gen_floyd(dom, name, size, rng):
    b = _Builder(dom, name)
    nodes = [f"n{i}" for i in range(size)]
    b.add_objects("node", nodes)
    edges = set()
    # a random chain plus extra arcs keeps the closure interesting
    order = list(range(size))
    rng.shuffle(order)
    for a, c in zip(order, order[1:]):
        edges.add((a, c))
    extra = max(1, size // 2)
    for _ in range(extra):
        a, c = rng.randrange(size), rng.randrange(size)
        if a != c:
            edges.add((a, c))
    for a, c in sorted(edges):
        b.set_init("edge", nodes[a], nodes[c])
    # goal: full directed reachability (paths of length >= 1)
    adj = {i: [] for i in range(size)}
    for a, c in edges:
        adj[a].append(c)
    for src in range(size):
        seen = set()
        stack = list(adj[src])
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v])
        for dst in sorted(seen):
            b.set_goal("edge", nodes[src], nodes[dst])
    return b.build()


def _vector_instance(dom, name, values, extras=None, goals=None):
    b = _Builder(dom, name)
    names = [f"p{i}" for i in range(len(values))]
    b.add_objects("position", names)
    for i, v in enumerate(values):
        b.set_init("value", names[i], value=v)
    if extras:
        extras(b, names)
    for i, v in goals(values):
        b.set_goal("value", names[i], value=v)
    return b, names


def _gen_sorting(dom, name, size, rng):
    values = [rng.randrange(0, max(10, size)) for _ in range(size)]
    target = sorted(values)

    def extras(b, names):
        for i, _ in enumerate(names):
            b.set_init("rank", names[i], value=i)

    b, _ = _vector_instance(dom, name, values, extras,
                            lambda vals: enumerate(target))
    return b.build()


def _gen_reverse(dom, name, size, rng):
    values = [rng.randrange(0, max(10, size)) for _ in range(size)]

    def extras(b, names):
        for i in range(size):
            j = size - 1 - i
            if i != j:
                b.set_init("mirror", names[i], names[j])

    b, _ = _vector_instance(dom, name, values, extras,
                            lambda vals: enumerate(vals[::-1]))
    return b.build()


def _gen_select(dom, name, size, rng):
    values = [rng.randrange(1, 9 + size) for _ in range(size)]
    argmin = rng.randrange(1, size) if size > 1 else 0
    values[argmin] = 0  # unique minimum away from the marked start cell
    b = _Builder(dom, name)
    names = [f"p{i}" for i in range(size)]
    b.add_objects("position", names)
    for i, v in enumerate(values):
        b.set_init("value", names[i], value=v)
    b.set_init("marked", names[0])
    for i, _ in enumerate(names):
        b.set_goal("marked", names[i], value=1 if i == argmin else 0)
    return b.build()


def _gen_find(dom, name, size, rng):
    # the target value (cell 0) appears 1 or 2 times: distinct multiplanes
    # of the hit counter keep one-step progress distinguishable
    multiplicity = 1 + (size % 2)
    target = rng.randrange(0, 4)
    others = [v for v in range(0, 6) if v != target]
    values = [rng.choice(others) for _ in range(size)]
    values[0] = target
    for pos in rng.sample(range(1, size), multiplicity - 1):
        values[pos] = target
    hits = values.count(values[0])
    b = _Builder(dom, name)
    names = [f"p{i}" for i in range(size)]
    b.add_objects("position", names)
    for i, v in enumerate(values):
        b.set_init("value", names[i], value=v)
    b.set_goal("hits", value=hits)
    return b.build()


def _fib(n):
    seq = [1, 1]
    while len(seq) < n:
        seq.append(seq[-1] + seq[-2])
    return seq[:n]


def _gen_fibonacci(dom, name, size, rng):
    if size > 92:
        raise ValueError("fibonacci beyond the 92nd value overflows int64")
    size = max(size, 2)
    seq = _fib(size)
    b = _Builder(dom, name)
    names = [f"p{i}" for i in range(size)]
    b.add_objects("position", names)
    b.set_init("value", names[0], value=1)
    b.set_init("value", names[1], value=1)
    for p in names[:2]:
        b.set_init("half", p)
        b.set_init("full", p)
    for a, c in zip(names, names[1:]):
        b.set_init("next", a, c)
    for a, c in zip(names, names[2:]):
        b.set_init("next2", a, c)
    for i, v in enumerate(seq):
        b.set_goal("value", names[i], value=v)
        b.set_goal("half", names[i])
        b.set_goal("full", names[i])
    return b.build()


def _gen_tsum(dom, name, size, rng):
    b = _Builder(dom, name)
    names = [f"p{i}" for i in range(size)]
    b.add_objects("position", names)
    for i in range(size):
        b.set_init("value", names[i], value=i)
    for a, c in zip(names, names[1:]):
        b.set_init("next", a, c)
    for i in range(size):
        b.set_goal("value", names[i], value=i * (i + 1) // 2)
    return b.build()


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class DomainSpec:
    domain_id: str
    lines: int
    pointers: dict[str, int]
    generator: object
    train_sizes: tuple
    heldout_sizes: tuple
    extended: bool = False  # long-running synthesis, outside the gating set

    def limits(self) -> ProgramLimits:
        return ProgramLimits(self.lines, dict(self.pointers))


DOMAINS: dict[str, DomainSpec] = {
    "blocks-ontable": DomainSpec(
        "blocks-ontable", 9, {"block": 3}, _gen_blocks,
        (2, 3, 3, 4, 4, 5, 5, 6, 6, 7), (5, 6, 7, 8, 8, 9, 10, 11, 12, 14)),
    "gripper": DomainSpec(
        "gripper", 8, {"ball": 1, "room": 2, "gripper": 1}, _gen_gripper,
        (1, 2, 2, 3, 3, 4, 4, 5, 6, 7), (5, 8, 10, 12, 15, 18, 20, 24, 30, 40),
        extended=True),
    "corridor": DomainSpec(
        "corridor", 11, {"location": 2}, _gen_corridor,
        (2, 3, 3, 4, 4, 5, 5, 6, 7, 8), (6, 8, 10, 12, 14, 16, 20, 24, 28, 32),
        extended=True),
    "visitall": DomainSpec(
        "visitall", 15, {"row": 2, "col": 2}, _gen_visitall,
        ((2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2), (3, 4), (4, 3),
         (4, 4), (5, 5)),
        ((4, 4), (5, 5), (5, 6), (6, 5), (6, 6), (7, 7), (8, 8), (9, 9),
         (10, 10), (12, 12))),
    "intrusion": DomainSpec(
        "intrusion", 9, {"host": 1}, _gen_intrusion,
        (1, 2, 2, 3, 3, 4, 4, 5, 5, 6), (4, 6, 8, 10, 12, 16, 20, 30, 40, 50),
        extended=True),
    "spanner": DomainSpec(
        "spanner", 12, {"location": 2, "spanner": 1, "nut": 1, "man": 1},
        _gen_spanner,
        ((2, 1, 1), (3, 2, 1), (3, 2, 2), (4, 2, 2), (4, 3, 2), (4, 3, 3),
         (5, 3, 3), (5, 4, 3), (5, 4, 4), (6, 4, 4)),
        ((4, 3, 2), (5, 4, 3), (6, 4, 4), (6, 5, 5), (7, 5, 4), (8, 6, 6),
         (8, 7, 5), (9, 7, 7), (10, 8, 8), (12, 9, 9))),
    "floyd": DomainSpec(
        "floyd", 8, {"node": 3}, _gen_floyd,
        (3, 3, 4, 4, 4, 5, 5, 5, 6, 6), (5, 6, 7, 8, 9, 10, 12, 14, 16, 20)),
    "sorting": DomainSpec(
        "sorting", 8, {"position": 2}, _gen_sorting,
        (2, 3, 3, 4, 4, 5, 5, 6, 6, 7), (8, 9, 10, 11, 12, 13, 14, 15, 16, 20)),
    "reverse": DomainSpec(
        "reverse", 7, {"position": 2}, _gen_reverse,
        (2, 3, 3, 4, 4, 5, 5, 6, 6, 7), (8, 9, 10, 11, 12, 13, 14, 15, 16, 20)),
    "select": DomainSpec(
        "select", 7, {"position": 2}, _gen_select,
        (2, 3, 3, 4, 4, 5, 5, 6, 6, 7), (8, 9, 10, 11, 12, 13, 14, 15, 16, 20)),
    "find": DomainSpec(
        "find", 6, {"position": 3}, _gen_find,
        (3, 4, 4, 5, 5, 6, 6, 7, 7, 8), (8, 9, 10, 11, 12, 13, 14, 15, 16, 20)),
    "fibonacci": DomainSpec(
        "fibonacci", 7, {"position": 2}, _gen_fibonacci,
        (3, 4, 5, 6, 7, 8, 9, 10, 11, 12),
        (8, 10, 12, 15, 18, 21, 25, 30, 38, 44)),
    "triangular-sum": DomainSpec(
        "triangular-sum", 5, {"position": 2}, _gen_tsum,
        (2, 3, 4, 5, 6, 7, 8, 9, 10, 11),
        (8, 10, 12, 15, 18, 21, 25, 30, 40, 50)),
}

_DOMAIN_CACHE: dict[str, Domain] = {}


def domain_ids() -> list[str]:
    return list(DOMAINS)


def domain_text(domain_id: str) -> str:
    return _DOMAIN_TEXT[domain_id]


def load_domain(domain_id: str) -> Domain:
    if domain_id not in _DOMAIN_CACHE:
        _DOMAIN_CACHE[domain_id] = parse_domain(_DOMAIN_TEXT[domain_id])
    return _DOMAIN_CACHE[domain_id]


def generate_instance(spec: GeneratorSpec) -> Instance:
    """Deterministic instance for (domain, size, seed)."""
    ds = DOMAINS[spec.domain_id]
    dom = load_domain(spec.domain_id)
    rng = random.Random(f"{spec.domain_id}/{spec.size}/{spec.seed}")
    return ds.generator(dom, spec.instance_name(), spec.size, rng)


def training_instances(domain_id: str, seed: int = 0) -> list[Instance]:
    """The ten instances of increasing difficulty used for synthesis."""
    ds = DOMAINS[domain_id]
    return [generate_instance(GeneratorSpec(domain_id, size, seed * 1000 + k))
            for k, size in enumerate(ds.train_sizes)]


def heldout_instances(domain_id: str, seed: int = 7) -> list[Instance]:
    ds = DOMAINS[domain_id]
    return [generate_instance(
        GeneratorSpec(domain_id, size, 900000 + seed * 1000 + k))
        for k, size in enumerate(ds.heldout_sizes)]


def reference_program_text(domain_id: str) -> str:
    path = resources.files("gpsynth").joinpath("fixtures",
                                               f"{domain_id}.prog")
    return path.read_text()
