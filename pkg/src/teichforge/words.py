"""Normal forms for free-group words and for the reflection group C2*C2*C2.

Free words are stored as tuples of signed, 1-based generator indices
(``+i`` for the i-th basis letter, ``-i`` for its inverse) together with the
:class:`Basis` they live over.  Reflection words are tuples over the three
involutive letters ``t``, ``u``, ``v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class BasisMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    """A named free basis.  Letter names are tokens; the inverse of a letter
    is written with the case of its first character swapped."""

    name: str
    letters: tuple[str, ...]
    involutive: bool = False

    @property
    def rank(self) -> int:
        return len(self.letters)

    def word(self, letters: Iterable[int]) -> "FreeWord":
        return reduce_free(letters, self)

    def gen(self, i: int) -> "FreeWord":
        return FreeWord(self, (i + 1,))

    def gens(self) -> list["FreeWord"]:
        return [self.gen(i) for i in range(self.rank)]

    @property
    def identity(self) -> "FreeWord":
        return FreeWord(self, ())

    def _tokens(self):
        toks = {}
        for i, name in enumerate(self.letters):
            toks[name] = i + 1
            toks[name[0].swapcase() + name[1:]] = -(i + 1)
        return toks

    def parse(self, text: str) -> "FreeWord":
        toks = self._tokens()
        text = text.replace(" ", "").replace("*", "").replace(".", "")
        if text in ("", "1", "e"):
            return self.identity
        out = []
        pos = 0
        names = sorted(toks, key=len, reverse=True)
        while pos < len(text):
            for tok in names:
                if text.startswith(tok, pos):
                    out.append(toks[tok])
                    pos += len(tok)
                    break
            else:
                raise ValueError(f"cannot parse {text[pos:]!r} over basis {self.name}")
        return reduce_free(out, self)

    def format(self, w: "FreeWord") -> str:
        if not w.letters:
            return "1"
        parts = []
        for x in w.letters:
            name = self.letters[abs(x) - 1]
            parts.append(name if x > 0 else name[0].swapcase() + name[1:])
        sep = "" if all(len(n) == 1 for n in self.letters) else " "
        return sep.join(parts)


@dataclass(frozen=True)
class FreeWord:
    basis: Basis
    letters: tuple[int, ...]

    def __post_init__(self):
        ls = self.letters
        for i in range(len(ls) - 1):
            if ls[i] == -ls[i + 1]:
                raise ValueError("FreeWord letters must be freely reduced")

    def _check(self, other: "FreeWord"):
        if not isinstance(other, FreeWord) or other.basis != self.basis:
            raise BasisMismatch(f"cannot combine words over {self.basis.name} and "
                                f"{getattr(other, 'basis', type(other)).__class__.__name__}")

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        self._check(other)
        return reduce_free(self.letters + other.letters, self.basis)

    @classmethod
    def _trusted(cls, basis: Basis, letters: tuple) -> "FreeWord":
        # skips the reducedness check for letters known to be reduced
        w = object.__new__(cls)
        object.__setattr__(w, "basis", basis)
        object.__setattr__(w, "letters", letters)
        return w

    def inverse(self) -> "FreeWord":
        return FreeWord._trusted(self.basis, tuple(-x for x in reversed(self.letters)))

    def __pow__(self, k: int) -> "FreeWord":
        base = self if k >= 0 else self.inverse()
        out = self.basis.identity
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self):
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def exponent_sums(self) -> list[int]:
        v = [0] * self.basis.rank
        for x in self.letters:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v

    def __str__(self):
        return self.basis.format(self)

    def __repr__(self):
        return f"FreeWord({self.basis.name}: {self})"


def reduce_free(letters: Iterable[int], basis: Basis) -> FreeWord:
    if not isinstance(basis, Basis):
        raise BasisMismatch(f"unknown basis {basis!r}")
    stack: list[int] = []
    push, pop = stack.append, stack.pop
    for x in letters:
        if stack and stack[-1] == -x:
            pop()
        else:
            push(x)
    if stack:
        r = basis.rank
        if max(stack) > r or min(stack) < -r or 0 in stack:
            raise BasisMismatch(f"letter out of range for basis {basis.name}")
    return FreeWord._trusted(basis, tuple(stack))


def commutator(x, y):
    return x * y * x.inverse() * y.inverse()


# --- the reflection group <t, u, v | t^2 = u^2 = v^2 = 1> -----------------

REFLECTION_LETTERS = ("t", "u", "v")


@dataclass(frozen=True)
class ReflectionWord:
    letters: tuple[str, ...]

    def __post_init__(self):
        ls = self.letters
        for i, c in enumerate(ls):
            if c not in REFLECTION_LETTERS:
                raise ValueError(f"bad reflection letter {c!r}")
            if i and ls[i - 1] == c:
                raise ValueError("ReflectionWord letters must be reduced")

    def __mul__(self, other: "ReflectionWord") -> "ReflectionWord":
        return reduce_reflection(self.letters + other.letters)

    def inverse(self) -> "ReflectionWord":
        return ReflectionWord(tuple(reversed(self.letters)))

    def __pow__(self, k: int) -> "ReflectionWord":
        base = self if k >= 0 else self.inverse()
        out = REFLECTION_IDENTITY
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self):
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self):
        return "".join(self.letters) or "1"

    def __repr__(self):
        return f"ReflectionWord({self})"


REFLECTION_IDENTITY = ReflectionWord(())

# the ambient mark: coset actions over it use these letters
AMBIENT = Basis("G", REFLECTION_LETTERS, involutive=True)


def reduce_reflection(letters: Iterable[str]) -> ReflectionWord:
    stack: list[str] = []
    for c in letters:
        if c == "s":
            # stuv = 1 forces s = v.u.t
            for d in "vut":
                if stack and stack[-1] == d:
                    stack.pop()
                else:
                    stack.append(d)
            continue
        if c not in REFLECTION_LETTERS:
            raise ValueError(f"bad reflection letter {c!r}")
        if stack and stack[-1] == c:
            stack.pop()
        else:
            stack.append(c)
    return ReflectionWord(tuple(stack))


def parse_reflection(text: str) -> ReflectionWord:
    """Parse a word over t, u, v (and s, expanded to vut).  ``S`` denotes
    s^-1 = tuv; the involutions are their own inverses, so ``T`` = ``t``."""
    out = []
    for c in text.replace(" ", "").replace("*", "").replace(".", ""):
        if c in "1e":
            continue
        if c == "S":
            out.extend("tuv")
        else:
            out.append(c.lower())
    return reduce_reflection(out)


Grade = tuple[int, int, int]

_PHI = {"t": (1, 1, 0), "u": (1, 0, 1), "v": (1, 1, 1)}


def phi_grade(w: ReflectionWord) -> Grade:
    g = [0, 0, 0]
    for c in w.letters:
        for i, x in enumerate(_PHI[c]):
            g[i] ^= x
    return (g[0], g[1], g[2])


# --- homomorphisms and conjugacy --------------------------------------------

def substitute(w: FreeWord, images: Sequence, identity=None):
    """Apply the homomorphism sending basis letter i of ``w`` to ``images[i]``."""
    if len(images) < w.basis.rank:
        raise KeyError(f"missing image: {len(images)} images for rank {w.basis.rank}")
    if identity is None:
        identity = _identity_like(images[0]) if images else w.basis.identity
    inv = {}
    out_letters: list = []
    kind = type(identity)
    if kind is FreeWord:
        target = identity.basis
        for x in w.letters:
            img = images[x - 1] if x > 0 else inv.setdefault(x, images[-x - 1].inverse())
            if img.basis != target:
                raise BasisMismatch("images over mixed bases")
            out_letters.extend(img.letters)
        return reduce_free(out_letters, target)
    for x in w.letters:
        img = images[x - 1] if x > 0 else inv.setdefault(x, images[-x - 1].inverse())
        out_letters.extend(img.letters)
    return reduce_reflection(out_letters)


def _identity_like(w):
    if isinstance(w, FreeWord):
        return w.basis.identity
    return REFLECTION_IDENTITY


def cyclic_reduce(w: FreeWord) -> tuple[FreeWord, FreeWord]:
    """Return ``(p, c)`` with ``w = p c p^-1`` and ``c`` cyclically reduced."""
    ls = w.letters
    i, j = 0, len(ls) - 1
    while i < j and ls[i] == -ls[j]:
        i += 1
        j -= 1
    return FreeWord(w.basis, ls[:i]), FreeWord(w.basis, ls[i:j + 1])


def _rotation_index(a: tuple, b: tuple) -> int | None:
    """Smallest k with b == a[k:] + a[:k], or None."""
    if len(a) != len(b):
        return None
    if not a:
        return 0
    doubled = a + a
    n = len(a)
    for k in range(n):
        if doubled[k:k + n] == b:
            return k
    return None


def conjugate_in_free(w1: FreeWord, w2: FreeWord) -> FreeWord | None:
    """Return ``g`` with ``g w1 g^-1 == w2`` if the words are conjugate."""
    w1._check(w2)
    p1, c1 = cyclic_reduce(w1)
    p2, c2 = cyclic_reduce(w2)
    k = _rotation_index(c1.letters, c2.letters)
    if k is None:
        return None
    # c2 = r^-1 c1 r with r = c1[:k]
    r = FreeWord(w1.basis, c1.letters[:k])
    return p2 * r.inverse() * p1.inverse()


def conjugate_in_reflection(w1: ReflectionWord, w2: ReflectionWord) -> ReflectionWord | None:
    """Conjugacy in C2*C2*C2: returns ``g`` with ``g w1 g^-1 == w2`` or None."""
    def creduce(w):
        ls = w.letters
        pre = []
        while len(ls) >= 2 and ls[0] == ls[-1]:
            pre.append(ls[0])
            ls = ls[1:-1]
        return reduce_reflection(pre), ls

    p1, c1 = creduce(w1)
    p2, c2 = creduce(w2)
    k = _rotation_index(c1, c2)
    if k is None:
        return None
    r = ReflectionWord(c1[:k])
    return p2 * r.inverse() * p1.inverse()


def root(w: FreeWord) -> FreeWord:
    """Primitive root of ``w``: the word ``r`` with ``w = r^k`` and ``k`` maximal."""
    if w.is_identity():
        return w
    p, c = cyclic_reduce(w)
    ls = c.letters
    n = len(ls)
    for d in range(1, n + 1):
        if n % d == 0 and ls[:d] * (n // d) == ls:
            return p * FreeWord(w.basis, ls[:d]) * p.inverse()
    raise AssertionError("unreachable")


def simultaneous_conjugator(us: Sequence[FreeWord], vs: Sequence[FreeWord]) -> FreeWord | None:
    """Return ``g`` with ``g u_i g^-1 == v_i`` for every i, or None.

    The conjugators of the first nontrivial pair form a coset ``g0 <r>`` of the
    centralizer; a later pair that does not commute with ``r`` pins down the
    power of ``r`` by a bounded search (conjugating a non-commuting element by
    r^k grows linearly in |k|).
    """
    if len(us) != len(vs):
        raise ValueError("tuples of different length")
    if not us:
        return None
    basis = us[0].basis
    g = basis.identity
    free = True      # no constraint yet
    cent = None      # root generating the remaining freedom g <cent>; None = fixed
    for u, v in zip(us, vs):
        if u.is_identity() or v.is_identity():
            if u != v:
                return None
            continue
        if free:
            h = conjugate_in_free(u, v)
            if h is None:
                return None
            g, cent, free = h, root(u), False
            continue
        target = g.inverse() * v * g  # need c u c^-1 == target with c in <cent>
        if u == target:
            continue
        if cent is None:
            return None
        bound = len(target) + len(u) + 2 * len(cent) + 4
        pos, neg = basis.identity, basis.identity
        found = None
        for _ in range(bound):
            pos = pos * cent
            neg = neg * cent.inverse()
            if pos * u * pos.inverse() == target:
                found = pos
                break
            if neg * u * neg.inverse() == target:
                found = neg
                break
        if found is None:
            return None
        g = g * found
        cent = None
    for u, v in zip(us, vs):
        if g * u * g.inverse() != v:
            return None
    return g
