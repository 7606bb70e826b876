"""Finite-index subgroups as transitive coset actions.

A :class:`CosetAction` over a mark (a :class:`~teichforge.words.Basis`) holds
one permutation of ``range(degree)`` per basis letter.  Cosets are right
cosets ``Kg`` and letters act on the right, so a word ``w`` sends point ``p``
to ``p.w`` by composing letter permutations left to right.  The subgroup
represented is the stabilizer of point 0.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .words import (REFLECTION_LETTERS, Basis, BasisMismatch, FreeWord,
                    ReflectionWord, reduce_free, reduce_reflection)


class NotAMember(ValueError):
    pass


class MarkMismatch(ValueError):
    pass


def signed_letters(word, mark: Basis) -> tuple[int, ...]:
    """Letters of ``word`` as signed 1-based indices over ``mark``."""
    if isinstance(word, ReflectionWord):
        if not mark.involutive:
            raise BasisMismatch(f"reflection word over free mark {mark.name}")
        return tuple(REFLECTION_LETTERS.index(c) + 1 for c in word.letters)
    if isinstance(word, FreeWord):
        if word.basis != mark:
            raise BasisMismatch(f"word over {word.basis.name}, action over {mark.name}")
        return word.letters
    raise TypeError(f"not a word: {word!r}")


def word_from_letters(letters: Sequence[int], mark: Basis):
    if mark.involutive:
        return reduce_reflection(REFLECTION_LETTERS[abs(x) - 1] for x in letters)
    return reduce_free(letters, mark)


def _inv_perm(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True)
class SchreierData:
    """Reidemeister-Schreier data for a subgroup of a free mark.

    ``tree`` maps each point to its transversal word; ``edges`` lists the
    non-tree (point, letter) pairs in canonical order, and ``generators`` the
    corresponding free basis words ``t_p x t_{p.x}^-1``.
    """

    tree: tuple
    edges: tuple[tuple[int, int], ...]
    generators: tuple
    basis: Basis

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass(frozen=True, eq=False)
class CosetAction:
    mark: Basis
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.perms) != self.mark.rank:
            raise MarkMismatch(f"{len(self.perms)} permutations for mark {self.mark.name}")
        n = len(self.perms[0]) if self.perms else 1
        for p in self.perms:
            if len(p) != n or sorted(p) != list(range(n)):
                raise ValueError("not a permutation of the right degree")
            if self.mark.involutive and any(p[p[i]] != i for i in range(n)):
                raise ValueError("involutive letter must act as an involution")

    # --- basics ------------------------------------------------------------

    @classmethod
    def whole(cls, mark: Basis) -> "CosetAction":
        return cls(mark, tuple((0,) for _ in range(mark.rank)))

    @property
    def degree(self) -> int:
        return len(self.perms[0])

    def index(self) -> int:
        return self.degree

    def rank(self) -> int:
        if self.mark.involutive:
            raise ValueError("rank undefined for the ambient (non-free) mark")
        return 1 + self.degree * (self.mark.rank - 1)

    @cached_property
    def inverse_perms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_inv_perm(p) for p in self.perms)

    def step(self, p: int, x: int) -> int:
        return self.perms[x - 1][p] if x > 0 else self.inverse_perms[-x - 1][p]

    def _step_signed(self, p, x):
        return self.step(p, x)

    def apply(self, p: int, word) -> int:
        perms, inv = self.perms, self.inverse_perms
        for x in signed_letters(word, self.mark):
            p = perms[x - 1][p] if x > 0 else inv[-x - 1][p]
        return p

    def permutation_of(self, word) -> tuple[int, ...]:
        return tuple(self.apply(p, word) for p in range(self.degree))

    def contains(self, word) -> bool:
        return self.apply(0, word) == 0

    def is_transitive(self) -> bool:
        return len(self._orbit(0)) == self.degree

    def _signed_range(self):
        r = self.mark.rank
        if self.mark.involutive:
            return [i + 1 for i in range(r)]
        out = []
        for i in range(r):
            out += [i + 1, -(i + 1)]
        return out

    def _orbit(self, start: int) -> list[int]:
        seen = {start}
        order = [start]
        dq = deque([start])
        letters = self._signed_range()
        while dq:
            p = dq.popleft()
            for x in letters:
                q = self.step(p, x)
                if q not in seen:
                    seen.add(q)
                    order.append(q)
                    dq.append(q)
        return order

    # --- canonical forms ---------------------------------------------------

    def relabel_from(self, start: int) -> tuple[tuple[int, ...], ...]:
        """Permutations relabeled by breadth-first order from ``start``,
        visiting letters in basis order (each letter before its inverse)."""
        order = self._orbit(start)
        if len(order) != self.degree:
            raise ValueError("action is not transitive")
        new = {p: i for i, p in enumerate(order)}
        return tuple(tuple(new[perm[p]] for p in order) for perm in self.perms)

    def rebased(self, start: int) -> "CosetAction":
        return CosetAction(self.mark, self.relabel_from(start))

    @cached_property
    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return self.relabel_from(0)

    def canonical_form(self) -> "CosetAction":
        return CosetAction(self.mark, self.canonical)

    def key(self) -> tuple:
        return (self.mark.name, self.canonical)

    def same_subgroup(self, other: "CosetAction") -> bool:
        return self.mark == other.mark and self.canonical == other.canonical

    # --- transversal and Reidemeister-Schreier -----------------------------

    @cached_property
    def _tree(self) -> tuple[list, set]:
        """BFS spanning tree from 0: (parent links, tree edge set).

        parent[p] = (q, x) with q.x = p; tree edges are stored as positive
        (point, letter) pairs."""
        parent: list = [None] * self.degree
        seen = {0}
        dq = deque([0])
        tree_edges = set()
        letters = self._signed_range()
        while dq:
            p = dq.popleft()
            for x in letters:
                q = self.step(p, x)
                if q in seen:
                    continue
                seen.add(q)
                parent[q] = (p, x)
                tree_edges.add((p, x) if x > 0 else (q, -x))
                dq.append(q)
        if len(seen) != self.degree:
            raise ValueError("action is not transitive")
        return parent, tree_edges

    @cached_property
    def transversal_letters(self) -> tuple[tuple[int, ...], ...]:
        parent, _ = self._tree
        out: list = [None] * self.degree
        out[0] = ()
        order = self._orbit(0)
        for p in order[1:]:
            q, x = parent[p]
            out[p] = out[q] + (x,)
        return tuple(out)

    def transversal(self, p: int):
        return word_from_letters(self.transversal_letters[p], self.mark)

    @cached_property
    def schreier(self) -> SchreierData:
        if self.mark.involutive:
            raise ValueError("Schreier generators of the ambient mark are not a free basis")
        _, tree_edges = self._tree
        edges = []
        gens = []
        for p in range(self.degree):
            for i in range(self.mark.rank):
                if (p, i + 1) in tree_edges:
                    continue
                edges.append((p, i + 1))
                q = self.perms[i][p]
                w = (self.transversal(p) * self.mark.gen(i) * self.transversal(q).inverse())
                gens.append(w)
        sub = Basis(f"{self.mark.name}>{len(gens)}",
                    tuple(f"g{j}" for j in range(len(gens))))
        return SchreierData(tuple(self.transversal(p) for p in range(self.degree)),
                            tuple(edges), tuple(gens), sub)

    @cached_property
    def _edge_index(self) -> dict:
        return {e: j for j, e in enumerate(self.schreier.edges)}

    def express_letters(self, word) -> list[int]:
        """Signed basis indices of ``word`` in the Schreier basis."""
        idx = self._edge_index
        out = []
        p = 0
        for x in signed_letters(word, self.mark):
            if x > 0:
                j = idx.get((p, x))
                if j is not None:
                    out.append(j + 1)
                p = self.perms[x - 1][p]
            else:
                q = self.inverse_perms[-x - 1][p]
                j = idx.get((q, -x))
                if j is not None:
                    out.append(-(j + 1))
                p = q
        if p != 0:
            raise NotAMember(f"{word} is not in the subgroup")
        return out

    def express_in_basis(self, word) -> FreeWord:
        return reduce_free(self.express_letters(word), self.schreier.basis)

    def abelianize_mod(self, word, q: int) -> np.ndarray:
        v = np.zeros(self.rank(), dtype=np.int64)
        for x in self.express_letters(word):
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v % q

    # --- constructions -----------------------------------------------------

    def pullback(self, images: Sequence, source: Basis) -> "CosetAction":
        """Preimage of this subgroup under the homomorphism sending letter i of
        ``source`` to ``images[i]`` (words over this action's mark)."""
        if len(images) != source.rank:
            raise ValueError("one image per source letter required")
        perms = tuple(self.permutation_of(w) for w in images)
        raw = _RawAction(perms, source)
        return raw.orbit_action(0)

    def intersect(self, other: "CosetAction") -> "CosetAction":
        if self.mark != other.mark:
            raise MarkMismatch("intersect needs a common mark")
        m = other.degree
        prod = tuple(tuple(a[p // m] * m + b[p % m] for p in range(self.degree * m))
                     for a, b in zip(self.perms, other.perms))
        return _RawAction(prod, self.mark).orbit_action(0)

    def conjugate_subgroup(self, g) -> "CosetAction":
        """The subgroup g^-1 K g, i.e. the stabilizer of 0.g."""
        return self.rebased(self.apply(0, g))

    def image_under_automorphism(self, inverse_images: Sequence) -> "CosetAction":
        """psi(K) where ``inverse_images[i]`` is psi^-1 of letter i."""
        return CosetAction(self.mark, tuple(self.permutation_of(w) for w in inverse_images))

    def cycles(self, word) -> list[list[int]]:
        perm = self.permutation_of(word)
        seen = set()
        out = []
        for p in range(self.degree):
            if p in seen:
                continue
            cyc = [p]
            seen.add(p)
            q = perm[p]
            while q != p:
                cyc.append(q)
                seen.add(q)
                q = perm[q]
            out.append(cyc)
        return out

    # --- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"mark": self.mark.name, "degree": self.degree, "basepoint": 0,
                "perms": {name: list(p) for name, p in zip(self.mark.letters, self.perms)}}

    @classmethod
    def from_json(cls, d: dict, marks: dict[str, Basis] | None = None) -> "CosetAction":
        from .surface_atlas import MARKS
        marks = marks or MARKS
        if d.get("mark") not in marks:
            raise ValueError(f"unknown mark {d.get('mark')!r}")
        mark = marks[d["mark"]]
        perms = tuple(tuple(int(x) for x in d["perms"][name]) for name in mark.letters)
        c = cls(mark, perms)
        if d.get("degree", c.degree) != c.degree:
            raise ValueError("degree field disagrees with permutations")
        base = d.get("basepoint", 0)
        return c.rebased(base) if base else c

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"CosetAction({self.mark.name}, degree={self.degree})"


@dataclass
class _RawAction:
    """Possibly intransitive permutation data; used to cut out an orbit."""

    perms: tuple
    mark: Basis

    def orbit_action(self, start: int) -> CosetAction:
        letters = ([i + 1 for i in range(self.mark.rank)] if self.mark.involutive
                   else [s * (i + 1) for i in range(self.mark.rank) for s in (1, -1)])
        inv = [None] * len(self.perms)
        seen = {start: 0}
        order = [start]
        dq = deque([start])
        while dq:
            p = dq.popleft()
            for x in letters:
                if x > 0:
                    q = self.perms[x - 1][p]
                else:
                    if inv[-x - 1] is None:
                        inv[-x - 1] = _inv_perm(self.perms[-x - 1])
                    q = inv[-x - 1][p]
                if q not in seen:
                    seen[q] = len(order)
                    order.append(q)
                    dq.append(q)
        return CosetAction(self.mark, tuple(tuple(seen[perm[p]] for p in order)
                                            for perm in self.perms))


# --- folding -----------------------------------------------------------------

@dataclass
class FoldedGraph:
    mark: Basis
    edges: dict  # vertex -> {signed letter: vertex}
    complete: bool

    @property
    def vertices(self) -> int:
        return len(self.edges)

    def action(self) -> CosetAction:
        if not self.complete:
            raise ValueError("graph is not complete: subgroup has infinite index")
        verts = sorted(self.edges)
        pos = {v: i for i, v in enumerate(verts)}
        perms = tuple(tuple(pos[self.edges[v][i + 1]] for v in verts)
                      for i in range(self.mark.rank))
        return CosetAction(self.mark, perms).canonical_form()


def fold(generators: Sequence, mark: Basis) -> FoldedGraph:
    """Stallings folding of the bouquet of generator loops at vertex 0."""
    parent: dict[int, int] = {}
    out: dict[int, dict[int, int]] = {0: {}}
    inv = (lambda x: x) if mark.involutive else (lambda x: -x)

    def find(v):
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    pending: list[tuple[int, int]] = []

    def add_edge(a, x, b):
        a, b = find(a), find(b)
        for (p, y, q) in ((a, x, b), (b, inv(x), a)):
            cur = out[p].get(y)
            if cur is None:
                out[p][y] = q
            elif find(cur) != find(q):
                pending.append((cur, q))

    counter = 1
    for w in generators:
        ls = signed_letters(w, mark)
        if not ls:
            continue
        v = 0
        for k, x in enumerate(ls):
            if k == len(ls) - 1:
                nxt = 0
            else:
                nxt = counter
                counter += 1
                out[nxt] = {}
            add_edge(v, x, nxt)
            v = nxt
    while pending:
        a, b = pending.pop()
        a, b = find(a), find(b)
        if a == b:
            continue
        if b == 0:
            a, b = b, a
        parent[b] = a
        for y, q in list(out.pop(b).items()):
            add_edge(a, y, q)
        # edges into b are redirected lazily through find()
    edges = {}
    for v, nbrs in out.items():
        if find(v) != v:
            continue
        edges[v] = {y: find(q) for y, q in nbrs.items()}
    letters = ([i + 1 for i in range(mark.rank)] if mark.involutive
               else [s * (i + 1) for i in range(mark.rank) for s in (1, -1)])
    complete = all(all(x in nb for x in letters) for nb in edges.values())
    # keep only the component of the base vertex
    seen = {0}
    dq = deque([0])
    while dq:
        v = dq.popleft()
        for q in edges[v].values():
            if q not in seen:
                seen.add(q)
                dq.append(q)
    edges = {v: edges[v] for v in seen}
    return FoldedGraph(mark, edges, complete)


def subgroup_from_generators(generators: Sequence, mark: Basis) -> CosetAction:
    return fold(generators, mark).action()


# --- refinement and conjugacy ----------------------------------------------

def color_refinement(actions: Sequence[CosetAction]) -> list[list[int]]:
    """Stable coloring of the disjoint union of several actions over one mark.

    Colors are canonical integers, comparable across the input actions."""
    mark = actions[0].mark
    letters = ([i + 1 for i in range(mark.rank)] if mark.involutive
               else [s * (i + 1) for i in range(mark.rank) for s in (1, -1)])
    colors = [[0] * c.degree for c in actions]
    ncolors = 1
    while True:
        sigs = []
        for c, col in zip(actions, colors):
            sigs.append([(col[p],) + tuple(col[c.step(p, x)] for x in letters)
                         for p in range(c.degree)])
        palette = {s: i for i, s in enumerate(sorted({s for ss in sigs for s in ss}))}
        new = [[palette[s] for s in ss] for ss in sigs]
        if len(palette) == ncolors:
            return new
        colors, ncolors = new, len(palette)


def conjugacy_equal(c1: CosetAction, c2: CosetAction):
    """Return a word ``g`` with ``K2 == g^-1 K1 g``, or None if not conjugate."""
    if c1.mark != c2.mark or c1.degree != c2.degree:
        return None
    col1, col2 = color_refinement([c1, c2])
    if sorted(col1) != sorted(col2):
        return None
    for p in range(c1.degree):
        if col1[p] == col2[0] and _based_isomorphic(c1, p, c2):
            return c1.transversal(p)
    return None


def _based_isomorphic(c1: CosetAction, p: int, c2: CosetAction) -> bool:
    """Whether the action c1 based at p is isomorphic to c2 based at 0.
    Extends the point map along a search and stops at the first conflict."""
    f = {p: 0}
    used = {0}
    stack = [p]
    while stack:
        u = stack.pop()
        fu = f[u]
        for a, b in zip(c1.perms, c2.perms):
            v, w = a[u], b[fu]
            fv = f.get(v)
            if fv is None:
                if w in used:
                    return False
                f[v] = w
                used.add(w)
                stack.append(v)
            elif fv != w:
                return False
    return len(f) == c1.degree


def normalizer_points(c: CosetAction) -> list[int]:
    """Points p whose stabilizer equals the stabilizer of 0 (cosets of N(K)/K)."""
    (col,) = color_refinement([c])
    target = c.canonical
    return [p for p in range(c.degree) if col[p] == col[0] and c.relabel_from(p) == target]


def normalizer(c: CosetAction) -> CosetAction:
    """The normalizer of K as a coset action (a quotient of K's action)."""
    pts = normalizer_points(c)
    if len(pts) == 1:
        return c
    # the points equivalent to 0 form a block; close it to a block system
    parent = list(range(c.degree))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)
            return True
        return False

    for p in pts[1:]:
        union(0, p)
    changed = True
    letters = list(range(1, c.mark.rank + 1))
    while changed:
        changed = False
        for p in range(c.degree):
            r = find(p)
            for x in letters:
                if union(c.step(p, x), c.step(r, x)):
                    changed = True
    reps = sorted({find(p) for p in range(c.degree)})
    pos = {r: i for i, r in enumerate(reps)}
    perms = tuple(tuple(pos[find(c.step(r, x))] for r in reps) for x in letters)
    return CosetAction(c.mark, perms).canonical_form()


def is_self_normalizing(c: CosetAction) -> bool:
    return len(normalizer_points(c)) == 1


def cyclic_class_decomposition(c: CosetAction, w) -> list[tuple[object, int]]:
    """One entry per cycle of ``w`` on the cosets of K.

    For a cycle of length m through point p (transversal word r), the entry is
    ``(r w^m r^-1, m)``; for fixed points this is the K-conjugacy class
    representative ``r w r^-1`` of a conjugate of ``w`` lying in K.
    """
    out = []
    for cyc in c.cycles(w):
        p = cyc[0]
        r = c.transversal(p)
        m = len(cyc)
        out.append((r * (w ** m) * r.inverse(), m))
    return out


def induce_up(sub: CosetAction, inner: CosetAction, rewrite: Callable) -> CosetAction:
    """View a subgroup of a finite-index subgroup ``K <= F`` inside ``F``.

    ``inner`` is the action of F on cosets of K; ``rewrite`` maps a word of F
    lying in K to a word over ``sub.mark`` (K's free basis)."""
    n, m = inner.degree, sub.degree
    mark = inner.mark
    perms = []
    for i in range(mark.rank):
        x = mark.gen(i) if not mark.involutive else ReflectionWord((REFLECTION_LETTERS[i],))
        perm = [0] * (n * m)
        for cpt in range(n):
            d = inner.perms[i][cpt]
            s = rewrite(inner.transversal(cpt) * x * inner.transversal(d).inverse())
            sp = sub.permutation_of(s)
            for p in range(m):
                perm[cpt * m + p] = d * m + sp[p]
        perms.append(tuple(perm))
    return _RawAction(tuple(perms), mark).orbit_action(0)


def random_transitive_action(mark: Basis, degree: int, rng) -> CosetAction:
    """Uniformly random permutations, resampled until transitive."""
    while True:
        perms = tuple(tuple(int(x) for x in rng.permutation(degree)) for _ in range(mark.rank))
        if mark.involutive:
            raise ValueError("random involutions not supported")
        raw = _RawAction(perms, mark)
        c = raw.orbit_action(0)
        if c.degree == degree:
            return c
