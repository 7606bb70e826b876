"""SL(2,Z) and Gamma(2) arithmetic, automorphism lifts and point pushes.

Automorphisms of free groups act on the left and compose like functions:
``(f @ g)(w) = f(g(w))``.  A mapping class m lifts to an automorphism of
pi_{1,1} whose abelianization is m in the basis (a, b); lifts compose in the
same order as the matrices.
"""
from __future__ import annotations

import math

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .surface_atlas import F03, F04, F11, F14B, GAMMA2, SL2, build_atlas
from .words import (Basis, FreeWord, conjugate_in_free, parse_reflection, reduce_free,
                    simultaneous_conjugator, substitute)


class NotInGamma2(ValueError):
    pass


class LiftError(AssertionError):
    pass


# --- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class Mat2:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.as_list()} is not 1")

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "Mat2":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def as_list(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=object)

    def is_gamma2(self) -> bool:
        return self.a % 2 == 1 and self.d % 2 == 1 and self.b % 2 == 0 and self.c % 2 == 0

    def projective_key(self) -> tuple[int, int, int, int]:
        """Representative of {m, -m}: first nonzero entry positive."""
        v = self.as_list()
        first = next(x for x in v if x)
        return tuple(v) if first > 0 else tuple(-x for x in v)

    def proj_equal(self, other: "Mat2") -> bool:
        return self.projective_key() == other.projective_key()

    @classmethod
    def from_list(cls, v: Sequence[int]) -> "Mat2":
        if len(v) != 4:
            raise ValueError("a matrix is given as [a, b, c, d]")
        return cls(*(int(x) for x in v))

    def __str__(self):
        return f"[{self.a} {self.b}; {self.c} {self.d}]"


IDENTITY = Mat2(1, 0, 0, 1)
MINUS_I = Mat2(-1, 0, 0, -1)
G1 = Mat2(1, 2, 0, 1)
G2 = Mat2(1, 0, 2, 1)
S = Mat2(0, -1, 1, 0)
T = Mat2(1, 1, 0, 1)

_GAMMA2_MATS = (G1, G2)
_SL2_MATS = (S, T)


def evaluate(word: FreeWord) -> Mat2:
    gens = {"Gamma2": _GAMMA2_MATS, "SL2": _SL2_MATS}[word.basis.name]
    out = IDENTITY
    for x in word.letters:
        g = gens[abs(x) - 1]
        out = out @ (g if x > 0 else g.inverse())
    return out


def gamma2_word(m: Mat2) -> tuple[FreeWord, int]:
    """Reduced word w in G1, G2 and a sign with m = sign * evaluate(w).

    Reduces the first column by left multiplication: whichever of |a|, |c| is
    larger is reduced modulo twice the other; the parities (a odd, c even)
    keep every step strictly decreasing."""
    if not m.is_gamma2():
        raise NotInGamma2(f"{m} is not congruent to I mod 2")
    applied: list[int] = []  # letters L with current = L^-1 ... m
    cur = m
    while cur.c != 0:
        a, c = cur.a, cur.c
        if abs(a) > abs(c):
            k = _nearest(a, 2 * c)
            cur = (G1 ** -k) @ cur
            applied.extend([1 if k > 0 else -1] * abs(k))
        else:
            k = _nearest(c, 2 * a)
            cur = (G2 ** -k) @ cur
            applied.extend([2 if k > 0 else -2] * abs(k))
    sign = cur.a
    k = cur.b * sign // 2
    applied.extend([1 if k > 0 else -1] * abs(k))
    return reduce_free(applied, GAMMA2), sign


def _nearest(x: int, y: int) -> int:
    """Integer k nearest to x / y (y != 0), so |x - k y| <= |y| / 2."""
    if y < 0:
        x, y = -x, -y
    return (2 * x + y) // (2 * y)


def sl2_word(m: Mat2) -> tuple[FreeWord, int]:
    """Word w in S, T and a sign with m = sign * evaluate(w)."""
    applied: list[int] = []
    cur = m
    while cur.c != 0:
        k = _nearest(cur.a, cur.c)
        if k:
            cur = (T ** -k) @ cur
            applied.extend([2 if k > 0 else -2] * abs(k))
        if cur.c != 0:
            cur = S.inverse() @ cur
            applied.append(1)
    sign = cur.a
    k = cur.b * sign
    applied.extend([2 if k > 0 else -2] * abs(k))
    return reduce_free(applied, SL2), sign


# --- free group automorphisms -------------------------------------------------

@dataclass(frozen=True)
class FreeAut:
    """Automorphism of the free group on ``basis`` given by letter images."""

    basis: Basis
    images: tuple[FreeWord, ...]
    inverse_images: tuple[FreeWord, ...]
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.check:
            self.verify()

    def verify(self) -> None:
        gens = self.basis.gens()
        for i, g in enumerate(gens):
            if substitute(self.inverse_images[i], self.images) != g:
                raise LiftError(f"inverse images do not invert on letter {g}")
            if substitute(self.images[i], self.inverse_images) != g:
                raise LiftError(f"images do not invert on letter {g}")

    def __call__(self, w: FreeWord) -> FreeWord:
        return substitute(w, self.images)

    def __matmul__(self, other: "FreeAut") -> "FreeAut":
        return FreeAut(self.basis, tuple(self(w) for w in other.images),
                       tuple(substitute(w, other.inverse_images) for w in self.inverse_images),
                       check=False)

    def inverse(self) -> "FreeAut":
        return FreeAut(self.basis, self.inverse_images, self.images, check=False)

    @classmethod
    def identity(cls, basis: Basis) -> "FreeAut":
        g = tuple(basis.gens())
        return cls(basis, g, g)

    @classmethod
    def parse(cls, basis: Basis, images: Sequence[str], inverse_images: Sequence[str]) -> "FreeAut":
        return cls(basis, tuple(basis.parse(s) for s in images),
                   tuple(basis.parse(s) for s in inverse_images))

    @classmethod
    def inner(cls, g: FreeWord) -> "FreeAut":
        gi = g.inverse()
        return cls(g.basis, tuple(g * x * gi for x in g.basis.gens()),
                   tuple(gi * x * g for x in g.basis.gens()))

    def abelianization(self) -> np.ndarray:
        return np.array([w.exponent_sums() for w in self.images], dtype=np.int64).T

    def equal_up_to_inner(self, other: "FreeAut") -> FreeWord | None:
        """g with self(x) = g other(x) g^-1 for every letter, or None."""
        return simultaneous_conjugator(list(other.images), list(self.images))


# Fixed lifts.  T: a -> a, b -> ba.  S: a -> b, b -> a^-1.
LIFT_T = FreeAut.parse(F11, ["a", "ba"], ["a", "bA"])
LIFT_S = FreeAut.parse(F11, ["b", "A"], ["B", "a"])
LIFT_MINUS_I = LIFT_S @ LIFT_S


@dataclass(frozen=True)
class AutLift:
    """Lift of a mapping class of S_{1,1} to Aut(pi_{1,1}) with its
    restriction to pi_{1,4} (basis-B), Klein-corrected when m is in Gamma(2)."""

    matrix: Mat2
    aut: FreeAut
    restriction: FreeAut
    klein: int | None
    puncture_perm: tuple[int, ...]

    @cached_property
    def homology(self) -> np.ndarray:
        return homology_matrix(self.restriction)


def restrict_f11(aut: FreeAut) -> FreeAut:
    """Restriction of an automorphism of pi_{1,1} to pi_{1,4} in basis-B."""
    at = build_atlas()
    imgs = tuple(at.F11_to_B.rewrite(aut(w)) for w in at.basis_B)
    inv = tuple(at.F11_to_B.rewrite(substitute(w, aut.inverse_images)) for w in at.basis_B)
    return FreeAut(F14B, imgs, inv, check=False)


def restrict_f04(aut: FreeAut) -> FreeAut:
    """Restriction of an automorphism of pi_{0,4} to pi_{1,4} in basis-B."""
    at = build_atlas()
    words04 = [at.rewrite(F04, w) for w in at.ambient_B]
    imgs = tuple(at.rewrite(F14B, aut(w)) for w in words04)
    inv = tuple(at.rewrite(F14B, substitute(w, aut.inverse_images)) for w in words04)
    return FreeAut(F14B, imgs, inv, check=False)


@lru_cache(maxsize=None)
def klein_conjugation(k: int) -> FreeAut:
    at = build_atlas()
    kw = at.klein_reps[k]
    imgs = at.klein_conjugations[k]
    inv = tuple(at.conjugate_in_pi14(kw.inverse(), e) for e in F14B.gens())
    return FreeAut(F14B, imgs, inv)


def puncture_permutation(aut: FreeAut) -> tuple[int, ...]:
    """perm[i] = index of the class containing aut(rep of class i)."""
    at = build_atlas()
    out = tuple(at.puncture_index(aut(p.word)) for p in at.punctures)
    if None in out or sorted(out) != [0, 1, 2, 3]:
        raise LiftError("automorphism does not permute the puncture classes")
    return out


def homology_matrix(aut: FreeAut) -> np.ndarray:
    """Action on H = H_1(pi_{1,4}) / <punctures>, in the basis (a^2, b^2)."""
    at = build_atlas()
    cols = [at.h_vector(aut(F14B.gen(i))) for i in range(2)]
    return np.array(cols, dtype=np.int64).T


def projectively_equal(m: np.ndarray, target: Mat2) -> bool:
    t = np.array([[target.a, target.b], [target.c, target.d]], dtype=np.int64)
    return bool((m == t).all() or (m == -t).all())


@lru_cache(maxsize=4096)
def lift_of_matrix(m: Mat2) -> FreeAut:
    """Automorphism of pi_{1,1} with abelianization exactly m."""
    word, sign = sl2_word(m)
    out = FreeAut.identity(F11)
    gens = (LIFT_S, LIFT_T)
    for x in word.letters:
        g = gens[abs(x) - 1]
        out = out @ (g if x > 0 else g.inverse())
    if sign < 0:
        out = out @ LIFT_MINUS_I
    out.verify()
    ab = out.abelianization()
    if not (ab == np.array([[m.a, m.b], [m.c, m.d]])).all():
        raise LiftError(f"lift of {m} has abelianization {ab.tolist()}")
    return out


def aut_lift(m: Mat2) -> AutLift:
    aut = lift_of_matrix(m)
    comm = F11.parse("abAB")
    if conjugate_in_free(aut(comm), comm) is None:
        raise LiftError("lift does not preserve the boundary class [a,b]")
    res = restrict_f11(aut)
    klein = None
    if m.is_gamma2():
        good = [k for k in range(4)
                if puncture_permutation(klein_conjugation(k) @ res) == (0, 1, 2, 3)]
        if len(good) != 1:
            raise LiftError(f"Klein correction for {m} is not unique: {good}")
        klein = good[0]
        res = klein_conjugation(klein) @ res
    return AutLift(m, aut, res, klein, puncture_permutation(res))


def homology_action(lift) -> np.ndarray:
    res = lift.restriction if isinstance(lift, (AutLift, PushLift)) else lift
    return homology_matrix(res)


# --- point pushes -------------------------------------------------------------

# Point pushes of the forgotten puncture z, normalized to fix z exactly.
# Push(xb): x, z fixed, y -> (x z^-1) y (x z^-1)^-1.  Push(yb): y, z fixed,
# x -> (yz) x (yz)^-1.  Each projects to conjugation by its loop on pi_{0,3}.
PUSH_XB = FreeAut.parse(F04, ["x", "xZyzX", "z"], ["x", "zXyxZ", "z"])
PUSH_YB = FreeAut.parse(F04, ["yzxZY", "y", "z"], ["ZYxyz", "y", "z"])


@dataclass(frozen=True)
class PushLift:
    word: FreeWord
    aut: FreeAut
    restriction: FreeAut

    @cached_property
    def homology(self) -> np.ndarray:
        return homology_matrix(self.restriction)


def _forget_projects_to_inner(aut: FreeAut, c: FreeWord) -> bool:
    at = build_atlas()
    ci = c.inverse()
    for g in F04.gens()[:2]:
        if at.forget(aut(g)) != c * at.forget(g) * ci:
            return False
    return at.forget(aut(F04.gen(2))).is_identity()


def verify_push(aut: FreeAut, c: FreeWord) -> None:
    """Check the point-push invariants for an automorphism over c in F03."""
    z = F04.gen(2)
    if conjugate_in_free(aut(z), z) is None:
        raise LiftError("push does not fix the class of z")
    if not _forget_projects_to_inner(aut, c):
        raise LiftError(f"push does not project to conjugation by {c}")
    x, y = F04.gens()[:2]
    w = build_atlas().rewrite(F04, build_atlas().w)
    for g in (x, y, w):  # x is an inverse puncture loop; conjugacy is unaffected
        if conjugate_in_free(aut(g), g) is None:
            raise LiftError(f"push does not send {g} to a conjugate of itself")


def push_lift(word: FreeWord) -> PushLift:
    if word.basis != F03:
        raise ValueError("push_lift expects a word in pi_{0,3}")
    out = FreeAut.identity(F04)
    gens = (PUSH_XB, PUSH_YB)
    for x in word.letters:
        g = gens[abs(x) - 1]
        out = out @ (g if x > 0 else g.inverse())
    verify_push(out, word)
    return PushLift(word, out, restrict_f04(out))


def gamma2_to_pi03(word: FreeWord) -> FreeWord:
    """The identification of projective Gamma(2) with pi_{0,3}: G1 -> xb, G2 -> yb."""
    return F03.word(word.letters)


def pi03_to_gamma2(word: FreeWord) -> FreeWord:
    return GAMMA2.word(word.letters)


def parabolic_rotation(m: Mat2) -> int:
    """Conjugacy invariant k of a parabolic +-(I + k u u^T J) in PSL(2,Z);
    T^n has k = n, its conjugates share it."""
    a, b, c, d = m.as_list()
    if abs(a + d) != 2:
        raise ValueError(f"{m} is not parabolic")
    if a + d < 0:
        a, b, c, d = -a, -b, -c, -d
    # m - I = k u u^T J with J = [[0,1],[-1,0]] and u primitive:
    # b = k u1^2, c = -k u2^2, a - 1 = -k u1 u2, so |k| is the gcd
    k = math.gcd(b, c, a - 1)
    return k if (b > 0 or c < 0) else -k


@lru_cache(maxsize=None)
def tau() -> FreeAut:
    at = build_atlas()
    zi = at.z.inverse()
    inv = tuple(at.rewrite(F14B, zi * e * at.z) for e in at.ambient_B)
    return FreeAut(F14B, at.tau_images, inv)


@dataclass
class DiagramReport:
    matrix: Mat2
    gamma2: str
    pi03: str
    agrees: bool
    tau_used: bool
    witness: str | None

    def to_json(self) -> dict:
        return {"matrix": self.matrix.as_list(), "gamma2_word": self.gamma2,
                "pi03_word": self.pi03, "agrees": self.agrees,
                "tau_used": self.tau_used, "witness": self.witness}


def compare_outer(f: FreeAut, g: FreeAut) -> tuple[bool, bool, FreeWord | None]:
    """Whether f and g agree in Out(pi_{1,4}) up to tau: (agree, tau_used, witness)."""
    w = f.equal_up_to_inner(g)
    if w is not None:
        return True, False, w
    w = f.equal_up_to_inner(g @ tau())
    if w is not None:
        return True, True, w
    return False, False, None


def verify_diagram2(sample: Sequence[Mat2]) -> list[DiagramReport]:
    out = []
    for m in sample:
        gw, _ = gamma2_word(m)
        pw = gamma2_to_pi03(gw)
        lift = aut_lift(m)
        push = push_lift(pw)
        ok, used, wit = compare_outer(lift.restriction, push.restriction)
        out.append(DiagramReport(m, str(gw), str(pw), ok, used,
                                 None if wit is None else str(wit)))
    return out


def random_gamma2(rng, max_len: int) -> Mat2:
    n = int(rng.integers(0, max_len + 1))
    letters = []
    while len(letters) < n:
        x = int(rng.choice([1, -1, 2, -2]))
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return evaluate(GAMMA2.word(tuple(letters)))


# --- the conjugation identities of the ambient group --------------------------

LEMMA1_IDENTITIES = (
    # (conjugator, generator of pi11, expected, exact?)
    ("S", "tv", "vt", False),
    ("S", "uv", "vu", False),
    ("t", "tv", "vt", True),
    ("t", "uv", "vu", False),
    ("u", "tv", "vt", False),
    ("u", "uv", "vu", True),
    ("v", "tv", "vt", True),
    ("v", "uv", "vu", True),
)


def lemma1_identities() -> list[dict]:
    """The nine identities: s = vut with stuv = 1, and each ambient generator
    conjugates a, b to elements conjugate in pi_{1,1} to a^-1, b^-1."""
    at = build_atlas()
    r = parse_reflection
    rows = [{"identity": "s t u v = 1", "holds": (r("s") * r("tuv")).is_identity(),
             "witness": None}]
    for g, x, expected, exact in LEMMA1_IDENTITIES:
        gw = r(g)
        lhs = gw * r(x) * gw.inverse()
        rhs = r(expected)
        if exact:
            holds, wit = lhs == rhs, None
        else:
            c = conjugate_in_free(at.rewrite(F11, rhs), at.rewrite(F11, lhs))
            holds, wit = c is not None, (None if c is None else str(c))
        gname = "s^-1" if g == "S" else g
        rows.append({"identity": f"{gname}({x}){gname if g != 'S' else 's'} "
                                 f"{'=' if exact else '=_c'} {expected}",
                     "holds": bool(holds), "witness": wit})
    return rows
