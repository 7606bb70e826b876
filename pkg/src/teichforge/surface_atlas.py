"""The concrete groups of the construction, embedded in C2*C2*C2 = <t, u, v>.

Marks (free bases) used throughout the package:

``G``      the ambient group <t,u,v | t^2 = u^2 = v^2 = 1>; s = vut
``F11``    pi_{1,1} = <a, b> with a = tv, b = uv
``F04``    pi_{0,4} = <x, y, z> with z = s, y = tzt, x^-1 = y (uzu) y^-1
``F03``    pi_{0,3} = <xb, yb>, the quotient of F04 killing z
``F14B``   pi_{1,4} with basis e1..e5 = a^2, b^2, (ab)^2, (ba)^2, [a,b]
``F14A``   pi_{1,4} with basis f1..f5 = x^2, y^2, z^2, xy, xz
``Gamma2`` projective Gamma(2) = <G1, G2>
``SL2``    words in S, T

Membership in the three graded subgroups is decided by the grading
``phi_grade``; each inclusion also carries a rewriting table built from a
breadth-first transversal whose Schreier elements are expressed in the inner
basis by a short exhaustive search and verified in the ambient normal form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .subgroups import (CosetAction, NotAMember, fold, signed_letters,
                        word_from_letters)
from .words import (AMBIENT, REFLECTION_IDENTITY, Basis, FreeWord, ReflectionWord,
                    commutator, conjugate_in_free, conjugate_in_reflection, parse_reflection, phi_grade,
                    reduce_free, substitute)

F11 = Basis("F11", ("a", "b"))
F04 = Basis("F04", ("x", "y", "z"))
F03 = Basis("F03", ("xb", "yb"))
F14B = Basis("F14B", ("e1", "e2", "e3", "e4", "e5"))
F14A = Basis("F14A", ("f1", "f2", "f3", "f4", "f5"))
GAMMA2 = Basis("Gamma2", ("G1", "G2"))
SL2 = Basis("SL2", ("S", "T"))

MARKS = {m.name: m for m in (AMBIENT, F11, F04, F03, F14B, F14A, GAMMA2, SL2)}

_r = parse_reflection
AMBIENT_WORDS = {
    "F11": (_r("tv"), _r("uv")),
    "F04": (_r("tvtut"), _r("tvu"), _r("vut")),
}


class AtlasError(AssertionError):
    pass


def _check(cond, what):
    if not cond:
        raise AtlasError(f"atlas consistency check failed: {what}")


def grade_action(kernel_coords: tuple[int, ...]) -> CosetAction:
    """Coset action of G on the preimage under phi of the subgroup where the
    listed coordinates vanish; points are the values of those coordinates."""
    pts = list(itertools.product((0, 1), repeat=len(kernel_coords)))
    pos = {p: i for i, p in enumerate(pts)}
    perms = []
    for c in "tuv":
        g = phi_grade(ReflectionWord((c,)))
        perms.append(tuple(pos[tuple(p[k] ^ g[j] for k, j in enumerate(kernel_coords))]
                           for p in pts))
    return CosetAction(AMBIENT, tuple(perms)).canonical_form()


def to_word(mark: Basis, letters) -> object:
    return word_from_letters(letters, mark)


class RewritingTable:
    """Rewrites words of an outer mark lying in a finite-index subgroup into
    a fixed free basis of that subgroup.

    ``action`` is the outer mark's action on the cosets of the subgroup and
    ``basis_words`` the inner basis letters written as outer words.
    """

    def __init__(self, action: CosetAction, inner: Basis, basis_words, max_len: int = 4):
        self.action = action
        self.inner = inner
        self.outer = action.mark
        self.basis_words = tuple(basis_words)
        self.table: dict[tuple[int, int], FreeWord] = {}
        index = self._search_index(max_len)
        outer = self.outer
        for p in range(action.degree):
            for i in range(outer.rank):
                x = to_word(outer, (i + 1,))
                q = action.perms[i][p]
                elt = action.transversal(p) * x * action.transversal(q).inverse()
                if elt.is_identity():
                    continue
                expr = index.get(elt)
                if expr is None:
                    raise AtlasError(f"no expression of {elt} in basis {inner.name} "
                                     f"up to length {max_len}")
                self.table[(p, i + 1)] = expr
        for (p, x), expr in self.table.items():
            q = action.perms[x - 1][p]
            elt = action.transversal(p) * to_word(outer, (x,)) * action.transversal(q).inverse()
            _check(self.to_outer(expr) == elt, f"Schreier element {elt} in {inner.name}")

    def _search_index(self, max_len):
        index = {}
        letters = [s * (i + 1) for i in range(self.inner.rank) for s in (1, -1)]
        frontier = [()]
        index[self.to_outer(self.inner.identity)] = self.inner.identity
        for _ in range(max_len):
            nxt = []
            for w in frontier:
                for x in letters:
                    if w and w[-1] == -x:
                        continue
                    ww = w + (x,)
                    nxt.append(ww)
                    fw = FreeWord(self.inner, ww)
                    index.setdefault(self.to_outer(fw), fw)
            frontier = nxt
        return index

    def to_outer(self, w: FreeWord):
        ident = REFLECTION_IDENTITY if self.outer.involutive else self.outer.identity
        return substitute(w, self.basis_words, ident)

    def contains(self, word) -> bool:
        return self.action.contains(word)

    def rewrite(self, word) -> FreeWord:
        act = self.action
        out: list[int] = []
        p = 0
        for x in signed_letters(word, self.outer):
            if x > 0:
                e = self.table.get((p, x))
                if e is not None:
                    out.extend(e.letters)
                p = act.perms[x - 1][p]
            else:
                q = act.inverse_perms[-x - 1][p]
                e = self.table.get((q, -x))
                if e is not None:
                    out.extend(e.inverse().letters)
                p = q
        if p != 0:
            raise NotAMember(f"{word} does not lie in {self.inner.name}")
        return reduce_free(out, self.inner)


@dataclass(frozen=True)
class PunctureClass:
    name: str
    ambient: ReflectionWord
    word: FreeWord  # representative in F14B


class Atlas:
    """All marked subgroups, rewriting tables and puncture data; every
    invariant is verified on construction."""

    def __init__(self):
        r = parse_reflection
        self.a, self.b = AMBIENT_WORDS["F11"]
        self.x, self.y, self.z = AMBIENT_WORDS["F04"]
        self.s = r("s")
        # z, x^-1, y, w are the four puncture loops, all conjugate to s;
        # x itself is the inverse loop so that Push(xb) acts on H as G1
        self.w = (self.z * self.x.inverse() * self.y).inverse()

        self.ker_phi = grade_action((0, 1, 2))
        self.pi11_in_G = grade_action((0,))
        self.pi04_in_G = grade_action((1, 2))

        self.G_to_F11 = RewritingTable(self.pi11_in_G, F11, AMBIENT_WORDS["F11"])
        self.G_to_F04 = RewritingTable(self.pi04_in_G, F04, AMBIENT_WORDS["F04"])

        a, b = F11.gens()
        self.basis_B = (a * a, b * b, (a * b) ** 2, (b * a) ** 2, commutator(a, b))
        x, y, z = F04.gens()
        self.basis_A = (x * x, y * y, z * z, x * y, x * z)

        self.F14_in_F11 = CosetAction(F11, ((1, 0, 3, 2), (2, 3, 0, 1))).canonical_form()
        self.F14_in_F04 = CosetAction(F04, ((1, 0), (1, 0), (1, 0)))
        self.F11_to_B = RewritingTable(self.F14_in_F11, F14B, self.basis_B)
        self.F04_to_A = RewritingTable(self.F14_in_F04, F14A, self.basis_A)
        self.ambient_B = tuple(self.to_ambient(F11, w) for w in self.basis_B)
        self.ambient_A = tuple(self.to_ambient(F04, w) for w in self.basis_A)

        self._verify_structure()
        self._build_punctures()

    # --- conversions -------------------------------------------------------

    def to_ambient(self, mark: Basis, w) -> ReflectionWord:
        if mark == AMBIENT:
            return w
        if mark in (F11, F04):
            return substitute(w, AMBIENT_WORDS[mark.name], REFLECTION_IDENTITY)
        if mark == F14B:
            return substitute(w, self.ambient_B, REFLECTION_IDENTITY)
        if mark == F14A:
            return substitute(w, self.ambient_A, REFLECTION_IDENTITY)
        raise ValueError(f"mark {mark.name} has no ambient embedding")

    def rewrite(self, inner: Basis, w, outer: Basis | None = None) -> FreeWord:
        """Express ``w`` (a word of ``outer``, default: inferred) in ``inner``."""
        if outer is None:
            outer = AMBIENT if isinstance(w, ReflectionWord) else w.basis
        if outer == inner:
            return w
        if inner == F11:
            return self.G_to_F11.rewrite(self.to_ambient(outer, w))
        if inner == F04:
            return self.G_to_F04.rewrite(self.to_ambient(outer, w))
        if inner == F14B:
            if outer != F11:
                w = self.G_to_F11.rewrite(self.to_ambient(outer, w))
            return self.F11_to_B.rewrite(w)
        if inner == F14A:
            if outer != F04:
                w = self.G_to_F04.rewrite(self.to_ambient(outer, w))
            return self.F04_to_A.rewrite(w)
        raise ValueError(f"no rewriting into {inner.name}")

    def coordinate_change(self, w: FreeWord) -> FreeWord:
        """Basis-A word to basis-B word for the same element (and back)."""
        if w.basis == F14A:
            return self.rewrite(F14B, w)
        if w.basis == F14B:
            return self.rewrite(F14A, w)
        raise ValueError("coordinate_change expects a pi_{1,4} word")

    def in_pi14(self, w: ReflectionWord) -> bool:
        return phi_grade(w) == (0, 0, 0)

    def in_pi11(self, w: ReflectionWord) -> bool:
        return phi_grade(w)[0] == 0

    def in_pi04(self, w: ReflectionWord) -> bool:
        g = phi_grade(w)
        return g[1] == 0 and g[2] == 0

    def forget(self, w: FreeWord) -> FreeWord:
        """pi_{0,4} -> pi_{0,3}: x -> xb, y -> yb, z -> 1."""
        xb, yb = F03.gens()
        return substitute(w, (xb, yb, F03.identity))

    # --- verification ------------------------------------------------------

    def _verify_structure(self):
        _check(self.ker_phi.degree == 8, "[G : ker phi] = 8")
        _check(self.pi11_in_G.degree == 2 and self.pi04_in_G.degree == 4,
               "[G : pi11] = 2 and [G : pi04] = 4")
        pi14_in_11 = fold(self.basis_B, F11)
        pi14_in_04 = fold(self.basis_A, F04)
        _check(pi14_in_11.complete and pi14_in_11.vertices == 4, "[pi11 : pi14] = 4")
        _check(pi14_in_04.complete and pi14_in_04.vertices == 2, "[pi04 : pi14] = 2")
        _check(fold(AMBIENT_WORDS["F11"], AMBIENT).action().same_subgroup(self.pi11_in_G),
               "<tv, uv> = phi^-1(0 x Z/2 x Z/2)")
        _check(fold(AMBIENT_WORDS["F04"], AMBIENT).action().same_subgroup(self.pi04_in_G),
               "<x, y, z> = phi^-1(Z/2 x 0 x 0)")
        A = fold(self.ambient_A, AMBIENT).action()
        B = fold(self.ambient_B, AMBIENT).action()
        _check(A.same_subgroup(self.ker_phi), "<x^2, y^2, z^2, xy, xz> = ker phi")
        _check(B.same_subgroup(self.ker_phi), "<a^2, b^2, (ab)^2, (ba)^2, [a,b]> = ker phi")
        for i, w in enumerate(self.basis_B):
            _check(self.F11_to_B.rewrite(w) == F14B.gen(i), f"basis-B letter {i+1}")
        for i, w in enumerate(self.basis_A):
            _check(self.F04_to_A.rewrite(w) == F14A.gen(i), f"basis-A letter {i+1}")
        v = parse_reflection("v")
        _check(self.w == v * self.z * v, "w = vzv")
        _check((self.w * self.z * self.x.inverse() * self.y).is_identity(),
               "w z x^-1 y = 1 in pi04")
        for g in (self.x.inverse(), self.y, self.w):
            _check(conjugate_in_reflection(self.z, g) is not None,
                   f"puncture loop {g} conjugate to z")

    def _build_punctures(self):
        xi = self.x.inverse()
        reps = [("alpha", self.z * self.z), ("beta1", xi * xi),
                ("beta2", self.y * self.y), ("beta3", self.w * self.w)]
        self.punctures = tuple(PunctureClass(n, amb, self.rewrite(F14B, amb)) for n, amb in reps)
        words = [p.word for p in self.punctures]
        for i in range(4):
            for j in range(i + 1, 4):
                _check(conjugate_in_free(words[i], words[j]) is None,
                       "puncture classes pairwise non-conjugate")
        a, b = F11.gens()
        self.klein_reps = (F11.identity, a, b, a * b)
        table = []
        for k in self.klein_reps:
            table.append(tuple(self.puncture_index(self.conjugate_in_pi14(k, w)) for w in words))
        self.klein_table = tuple(table)
        _check(table[0] == (0, 1, 2, 3), "identity acts trivially on punctures")
        for row in table[1:]:
            _check(all(row[i] != i for i in range(4)) and
                   all(row[row[i]] == i for i in range(4)),
                   "pi11/pi14 acts on punctures by double transpositions")
        # abelianization relation among the puncture classes
        vecs = [np.array(w.exponent_sums()) for w in words]
        self.puncture_vectors = tuple(tuple(int(c) for c in v) for v in vecs)
        _check(not any(vecs[0] + vecs[1] + vecs[2] + vecs[3]),
               "alpha + beta1 + beta2 + beta3 = 0 in H_1(pi14)")
        _check(np.linalg.matrix_rank(np.array(vecs[1:])) == 3, "betas independent")
        # tau: conjugation by z on pi14
        zB = [self.rewrite(F14B, self.z * e * self.z.inverse()) for e in self.ambient_B]
        self.tau_images = tuple(zB)
        tau2 = [substitute(w, zB) for w in zB]
        z2 = self.punctures[0].word
        _check(all(t == z2 * F14B.gen(i) * z2.inverse() for i, t in enumerate(tau2)),
               "tau^2 is conjugation by z^2")
        _check(all(conjugate_in_free(substitute(w, zB), w) is not None for w in words),
               "tau fixes every puncture class")

    def conjugate_in_pi14(self, k: FreeWord, w: FreeWord) -> FreeWord:
        """k w k^-1 for k in pi11 and w in pi14 (F14B word)."""
        amb = self.to_ambient(F11, k) * self.to_ambient(F14B, w) * self.to_ambient(F11, k).inverse()
        return self.rewrite(F14B, amb)

    def puncture_index(self, w: FreeWord) -> int | None:
        """Index (0 = alpha, 1..3 = beta_i) of the puncture class containing w."""
        for i, p in enumerate(self.punctures):
            if conjugate_in_free(p.word, w) is not None:
                return i
        return None

    @cached_property
    def klein_conjugations(self) -> tuple[tuple[FreeWord, ...], ...]:
        """For each Klein representative k, images of e1..e5 under w -> k w k^-1."""
        return tuple(tuple(self.conjugate_in_pi14(k, e) for e in F14B.gens())
                     for k in self.klein_reps)

    def h_vector(self, w: FreeWord) -> tuple[int, int]:
        """Image of a pi14 element in H = H_1(S_{1,4}) / <punctures> = Z^2."""
        if w.basis == F14B:
            w = substitute(w, self.basis_B)
        va, vb = w.exponent_sums()
        _check(va % 2 == 0 and vb % 2 == 0, "pi14 element has even exponents")
        return (va // 2, vb // 2)

    def dump(self) -> dict:
        return {
            "ambient": "<t,u,v | t^2=u^2=v^2=1>, s = vut",
            "phi": {"t": [1, 1, 0], "u": [1, 0, 1], "v": [1, 1, 1], "s": [1, 0, 0]},
            "pi11": {"a": str(self.a), "b": str(self.b), "index_in_G": 2},
            "pi04": {"x": str(self.x), "y": str(self.y), "z": str(self.z), "w": str(self.w),
                     "index_in_G": 4},
            "pi14": {"index_in_G": 8, "index_in_pi11": 4, "index_in_pi04": 2,
                     "basis_B": [str(w) for w in self.ambient_B],
                     "basis_B_in_F11": [str(w) for w in self.basis_B],
                     "basis_A": [str(w) for w in self.ambient_A],
                     "basis_A_in_F04": [str(w) for w in self.basis_A]},
            "punctures": [{"name": p.name, "ambient": str(p.ambient), "F14B": str(p.word),
                           "vector": list(v)}
                          for p, v in zip(self.punctures, self.puncture_vectors)],
            "klein": {"reps": [str(k) for k in self.klein_reps],
                      "table": [list(r) for r in self.klein_table]},
            "tau": [str(w) for w in self.tau_images],
        }


@lru_cache(maxsize=1)
def build_atlas() -> Atlas:
    return Atlas()


def rewrite(inner: Basis, w, outer: Basis | None = None) -> FreeWord:
    return build_atlas().rewrite(inner, w, outer)


def coordinate_change(w: FreeWord) -> FreeWord:
    return build_atlas().coordinate_change(w)


def puncture_classes() -> tuple[tuple[PunctureClass, ...], tuple[tuple[int, ...], ...]]:
    """The four pi14 puncture classes and the Klein table (rows: 1, a, b, ab)."""
    at = build_atlas()
    return at.punctures, at.klein_table
