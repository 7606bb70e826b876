"""Exact linear algebra over Z/q for small primes q.

Matrices are numpy int64 arrays with entries in [0, q); q must stay below
2**31 so that products of two residues fit in int64.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    m = n + 1
    while not is_prime(m):
        m += 1
    return m


def rref(mat, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod q; returns (nonzero rows, pivot columns)."""
    a = np.array(mat, dtype=np.int64) % q
    if a.ndim == 1:
        a = a.reshape(1, -1)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, q)) % q
        col = a[:, c].copy()
        col[r] = 0
        mask = np.nonzero(col)[0]
        if mask.size:
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % q
        pivots.append(c)
        r += 1
    return a[:r], pivots


def nullspace(mat, q: int) -> np.ndarray:
    """Basis (as rows) of {x : mat @ x == 0 mod q}."""
    a = np.array(mat, dtype=np.int64) % q
    if a.ndim == 1:
        a = a.reshape(1, -1)
    n = a.shape[1]
    red, piv = rref(a, q)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = np.zeros(n, dtype=np.int64)
        x[f] = 1
        for i, pc in enumerate(piv):
            x[pc] = (-red[i, f]) % q
        basis.append(x)
    if not basis:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


@dataclass(frozen=True)
class ModSubspace:
    """A subspace of (Z/q)^dim in canonical reduced echelon form."""

    q: int
    dim_ambient: int
    basis: tuple[tuple[int, ...], ...] = field(default=())

    @classmethod
    def span(cls, q: int, dim_ambient: int, vectors) -> "ModSubspace":
        vecs = [list(v) for v in vectors]
        if not vecs:
            return cls(q, dim_ambient, ())
        red, _ = rref(np.array(vecs, dtype=np.int64), q)
        return cls(q, dim_ambient, tuple(tuple(int(x) for x in row) for row in red))

    @classmethod
    def zero(cls, q: int, dim_ambient: int) -> "ModSubspace":
        return cls(q, dim_ambient, ())

    @classmethod
    def full(cls, q: int, dim_ambient: int) -> "ModSubspace":
        return cls.span(q, dim_ambient, np.eye(dim_ambient, dtype=np.int64))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.dim_ambient - self.dim

    def matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.dim_ambient), dtype=np.int64)
        return np.array(self.basis, dtype=np.int64)

    def pivots(self) -> list[int]:
        out = []
        for row in self.basis:
            out.append(next(i for i, x in enumerate(row) if x))
        return out

    def reduce(self, v) -> tuple[int, ...]:
        """Canonical representative of v modulo the subspace."""
        x = np.array(v, dtype=np.int64) % self.q
        for row, p in zip(self.basis, self.pivots()):
            if x[p]:
                x = (x - x[p] * np.array(row, dtype=np.int64)) % self.q
        return tuple(int(c) for c in x)

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __le__(self, other: "ModSubspace") -> bool:
        return all(other.contains(r) for r in self.basis)

    def intersect(self, other: "ModSubspace") -> "ModSubspace":
        # x in both iff x = sum c_i a_i and x reduces to 0 modulo other
        if not self.basis or not other.basis:
            return ModSubspace.zero(self.q, self.dim_ambient)
        a = self.matrix()
        images = np.array([other.reduce(r) for r in a], dtype=np.int64)
        coeffs = nullspace(images.T, self.q)
        vecs = (coeffs @ a) % self.q if len(coeffs) else []
        return ModSubspace.span(self.q, self.dim_ambient, vecs)

    def preimage(self, mat) -> "ModSubspace":
        """{v : mat @ v in self}, for mat of shape (dim_ambient, n)."""
        m = np.array(mat, dtype=np.int64) % self.q
        n = m.shape[1]
        # columns of m reduced modulo self; kernel of the reduced map
        reduced = np.array([self.reduce(m[:, j]) for j in range(n)], dtype=np.int64).T
        if reduced.size == 0:
            return ModSubspace.full(self.q, n)
        return ModSubspace.span(self.q, n, nullspace(reduced, self.q))

    def image(self, mat) -> "ModSubspace":
        """{mat @ v : v in self}, for mat of shape (m, dim_ambient)."""
        m = np.array(mat, dtype=np.int64) % self.q
        vecs = [(m @ np.array(r, dtype=np.int64)) % self.q for r in self.basis]
        return ModSubspace.span(self.q, m.shape[0], vecs)

    def to_json(self) -> dict:
        return {"q": self.q, "dim": self.dim_ambient, "basis": [list(r) for r in self.basis]}

    @classmethod
    def from_json(cls, d: dict) -> "ModSubspace":
        return cls.span(d["q"], d["dim"], d["basis"])
