"""Stabilizers in SL(2,Z) of subgroup classes: the layered path for Lambda and
the table path for origamis (finite-index subgroups of pi_{1,1})."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable

import numpy as np

from .mcg import (IDENTITY, MINUS_I, S, T, FreeAut, Mat2, aut_lift, gamma2_word,
                  klein_conjugation, lift_of_matrix)
from .pipeline import DeltaSpec, LayeredSubgroup, check_guards
from .subgroups import CosetAction, conjugacy_equal, induce_up
from .surface_atlas import F11, F14B, build_atlas
from .words import FreeWord

GENERATORS = (("S", S), ("T", T))


class DegreeBoundExceeded(ValueError):
    pass


# --- transport and keys ---------------------------------------------------------

@dataclass(frozen=True)
class LayeredImage:
    source: LayeredSubgroup
    matrix: Mat2
    image: LayeredSubgroup
    puncture_perm: tuple[int, ...]
    beta: FreeWord | None     # K-conjugacy witness: psi(K) = beta^-1 K beta

    @property
    def signature_moved(self) -> bool:
        return self.puncture_perm != (0, 1, 2, 3)


def restriction_of(m: Mat2) -> FreeAut:
    return aut_lift(m).restriction


def theta_image(lam: LayeredSubgroup, m: Mat2) -> LayeredImage:
    lift = aut_lift(m)
    image = lam.transport(lift.restriction)
    beta = conjugacy_equal(lam.K, image.K)
    return LayeredImage(lam, m, image, lift.puncture_perm, beta)


def _conjugators(lam: LayeredSubgroup) -> list[FreeAut]:
    """Automorphisms of pi14 by which pi11 conjugates it, one per class of
    conjugators modulo the normalizer of Lambda inside K."""
    out = []
    for k in range(4):
        ck = klein_conjugation(k)
        for p in range(lam.K.degree):
            t = lam.K.transversal(p)
            out.append(ck @ FreeAut.inner(t.inverse()))
    return out


def class_key(lam: LayeredSubgroup) -> tuple:
    """Lexicographic minimum of the layered keys of all pi11-conjugates."""
    return min(lam.transport(c).key() for c in _conjugators(lam))


def layered_equal(a: LayeredSubgroup, b: LayeredSubgroup, delta_index: int = 1) -> bool:
    """Whether a and b are conjugate in pi11.  Refuses when a prime guard fails,
    since the layered key is then not known to determine the subgroup."""
    check_guards(a, delta_index)
    check_guards(b, delta_index)
    if a.K.degree != b.K.degree or a.primes != b.primes:
        return False
    target = b.key()
    return any(a.transport(c).key() == target for c in _conjugators(a))


# --- orbit-stabilizer ---------------------------------------------------------

@dataclass
class VeechGroupResult:
    orbit_size: int
    coset_table: dict[str, list[int]]
    schreier_generators: list[Mat2]
    equals_delta: bool | None = None
    minus_one_stabilizes: bool = True
    closed: bool = True

    def contains(self, m: Mat2) -> bool:
        """Membership by tracing a word in S, T through the coset table."""
        from .mcg import sl2_word
        word, _ = sl2_word(m)
        p = 0
        perms = (self.coset_table["S"], self.coset_table["T"])
        inv = [list(np.argsort(q)) for q in perms]
        for x in word.letters:
            p = perms[x - 1][p] if x > 0 else int(inv[-x - 1][p])
        return p == 0

    def to_json(self) -> dict:
        return {"orbit_size": self.orbit_size, "coset_table": self.coset_table,
                "schreier_generators": [g.as_list() for g in self.schreier_generators],
                "equals_delta": self.equals_delta,
                "minus_one_stabilizes": self.minus_one_stabilizes, "closed": self.closed}


def orbit_stabilizer(start, act: Callable, key: Callable[..., Hashable] | None = None,
                     equal: Callable[..., bool] | None = None,
                     limit: int = 100_000) -> VeechGroupResult:
    """Orbit of ``start`` under S and T acting by ``act(obj, matrix)``.

    Orbit elements are identified by ``key`` (a canonical hashable) or, when
    only a decision procedure is available, by ``equal`` (linear scan).
    Node i carries a matrix m_i with node_i = m_i . start; an edge i -g-> j
    gives the stabilizer element m_j^-1 g m_i."""
    if (key is None) == (equal is None):
        raise ValueError("give exactly one of key and equal")
    index: dict = {}
    objs = [start]

    def find(obj):
        if key is not None:
            return index.get(key(obj))
        return next((i for i, o in enumerate(objs) if equal(o, obj)), None)

    def add(obj):
        if key is not None:
            index[key(obj)] = len(objs) - 1

    add(start)
    mats = [IDENTITY]
    table = {"S": [], "T": []}
    gens: list[Mat2] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name, g in GENERATORS:
            img = act(objs[i], g)
            j = find(img)
            if j is None:
                if len(objs) >= limit:
                    raise RuntimeError("orbit exceeds the configured limit")
                j = len(objs)
                objs.append(img)
                add(img)
                mats.append(g @ mats[i])
                queue.append(j)
            else:
                h = mats[j].inverse() @ g @ mats[i]
                if not h.proj_equal(IDENTITY) and not any(h.proj_equal(x) for x in gens):
                    gens.append(h)
            table[name].append(j)
    # orbit closure: the tables are permutations
    closed = all(sorted(v) == list(range(len(objs))) for v in table.values())
    minus = find(act(start, MINUS_I)) == 0
    return VeechGroupResult(len(objs), table, gens, None, minus, closed)


def stabilizer(lam: LayeredSubgroup, delta_index: int = 1) -> VeechGroupResult:
    check_guards(lam, delta_index)
    act = lambda L, m: L.transport(restriction_of(m))
    return orbit_stabilizer(lam, act, key=class_key)


@dataclass
class TheoremReport:
    generators_in_delta: bool
    orbit_size_ok: bool
    delta_generators_stabilize: bool
    failures: list[str] = field(default_factory=list)
    degenerate: bool = False

    @property
    def ok(self) -> bool:
        return self.generators_in_delta and self.orbit_size_ok and self.delta_generators_stabilize

    def to_json(self) -> dict:
        return {"ok": self.ok, "generators_in_delta": self.generators_in_delta,
                "orbit_size_ok": self.orbit_size_ok,
                "delta_generators_stabilize": self.delta_generators_stabilize,
                "degenerate": self.degenerate, "failures": self.failures}


def in_delta(m: Mat2, d: DeltaSpec) -> bool:
    if not m.is_gamma2():
        return False
    word, _ = gamma2_word(m)
    return d.contains(word)


def delta_generators(d: DeltaSpec) -> list[Mat2]:
    from .mcg import evaluate
    return [evaluate(g) for g in d.action.schreier.generators]


def verify_theorem(result: VeechGroupResult, d: DeltaSpec, lam: LayeredSubgroup) -> TheoremReport:
    failures = []
    bad = [g for g in result.schreier_generators if not in_delta(g, d)]
    if bad:
        failures.append(f"stabilizer element {bad[0]} is not in Delta")
    expected = 6 * d.index
    if result.orbit_size != expected:
        failures.append(f"orbit size {result.orbit_size} differs from 6*[Gamma(2):Delta] = {expected}")
    key = class_key(lam)
    nonstab = [m for m in delta_generators(d)
               if class_key(lam.transport(restriction_of(m))) != key]
    if nonstab:
        failures.append(f"Delta generator {nonstab[0]} does not stabilize Lambda")
    return TheoremReport(not bad, result.orbit_size == expected, not nonstab, failures,
                         degenerate=d.index == 1)


# --- materialization ------------------------------------------------------------

def materialize(lam: LayeredSubgroup, bound: int = 10_000) -> CosetAction:
    """Lambda as a coset action over basis-B, when its index is at most ``bound``."""
    idx = lam.index()
    if idx > bound:
        raise DegreeBoundExceeded(f"[pi14 : Lambda] = {lam.factored_index()} exceeds {bound}")
    K = lam.K
    edge = K._edge_index
    # points: (K point, reduced vector per layer)
    start = (0,) + tuple(W.reduce([0] * W.dim_ambient) for W in lam.layers)
    index = {start: 0}
    pts = [start]
    perms: list[list[int]] = [[] for _ in range(F14B.rank)]
    i = 0
    while i < len(pts):
        p, *vs = pts[i]
        for x in range(F14B.rank):
            q = K.perms[x][p]
            j = edge.get((p, x + 1))
            nv = []
            for W, v in zip(lam.layers, vs):
                if j is None:
                    nv.append(v)
                else:
                    u = list(v)
                    u[j] = (u[j] + 1) % W.q
                    nv.append(W.reduce(u))
            pt = (q,) + tuple(nv)
            if pt not in index:
                index[pt] = len(pts)
                pts.append(pt)
            perms[x].append(index[pt])
        i += 1
    c = CosetAction(F14B, tuple(tuple(p) for p in perms))
    if c.degree != idx:
        raise RuntimeError(f"materialized degree {c.degree} differs from the index {idx}")
    return c


def induce_to_pi11(c: CosetAction) -> CosetAction:
    at = build_atlas()
    return induce_up(c, at.F14_in_F11, at.F11_to_B.rewrite)


def table_conjugate(a: CosetAction, b: CosetAction) -> bool:
    return conjugacy_equal(a, b) is not None


# --- origamis -------------------------------------------------------------------

@dataclass(frozen=True)
class Origami:
    """Square-tiled surface: sigma_a moves a square right, sigma_b up."""

    sigma_a: tuple[int, ...]
    sigma_b: tuple[int, ...]

    def __post_init__(self):
        CosetAction(F11, (self.sigma_a, self.sigma_b))  # validates permutations
        if not self.action.is_transitive():
            raise ValueError("origami permutations must generate a transitive group")

    @property
    def action(self) -> CosetAction:
        return CosetAction(F11, (self.sigma_a, self.sigma_b))

    @property
    def degree(self) -> int:
        return len(self.sigma_a)

    def commutator(self) -> tuple[int, ...]:
        return self.action.permutation_of(F11.parse("abAB"))

    @property
    def punctures(self) -> int:
        return len(self.action.cycles(F11.parse("abAB")))

    @property
    def genus(self) -> int:
        # 2 - 2g - n = -d
        g2 = 2 + self.degree - self.punctures
        if g2 % 2:
            raise ValueError("inconsistent Euler characteristic")
        return g2 // 2

    def to_text(self) -> str:
        return (f"{self.degree}\n" + " ".join(map(str, self.sigma_a)) + "\n"
                + " ".join(map(str, self.sigma_b)) + "\n")

    @classmethod
    def from_text(cls, text: str) -> "Origami":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) != 3 or len(lines[0]) != 1:
            raise ValueError("origami text needs a degree line and two permutation lines")
        d = int(lines[0][0])
        a, b = (tuple(int(x) for x in ln) for ln in lines[1:])
        if len(a) != d or len(b) != d:
            raise ValueError("permutation length differs from the degree")
        return cls(a, b)

    def to_json(self) -> dict:
        return {"degree": self.degree, "sigma_a": list(self.sigma_a), "sigma_b": list(self.sigma_b),
                "genus": self.genus, "punctures": self.punctures}

    @classmethod
    def from_json(cls, d: dict) -> "Origami":
        o = cls(tuple(d["sigma_a"]), tuple(d["sigma_b"]))
        if "degree" in d and d["degree"] != o.degree:
            raise ValueError("degree field disagrees with permutations")
        return o


def origami_export(c: CosetAction, bound: int = 10_000) -> Origami:
    if c.mark != F11:
        raise ValueError("origami export needs a subgroup of pi11")
    if c.degree > bound:
        raise DegreeBoundExceeded(f"degree {c.degree} exceeds {bound}")
    return Origami(*c.perms)


def conjugacy_class_key(c: CosetAction) -> tuple:
    """Canonical key of the conjugacy class: the least based relabeling."""
    return min(c.relabel_from(p) for p in range(c.degree))


def act_on_table(c: CosetAction, m: Mat2) -> CosetAction:
    """psi_m(K) for the lift psi_m of m."""
    return c.image_under_automorphism(lift_of_matrix(m).inverse_images)


def veech_of_origami(o: Origami) -> VeechGroupResult:
    return orbit_stabilizer(o.action, act_on_table, equal=table_conjugate)
