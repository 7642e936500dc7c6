"""Exact linear algebra over the prime field F_p.

Matrices are 2-D ``int64`` numpy arrays whose entries are residues in
``[0, p)``; the modulus travels alongside as a plain ``int``.  Products of two
residues fit comfortably in 64 bits for every modulus below 2**31, and all
reductions are done immediately after each multiply.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, ZeroToNegativePower

# (p-1)^2 * rows must stay below 2**63 in the elimination update.
MAX_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Fp:
    """A single residue modulo an odd prime, for scalar bookkeeping."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise DimensionMismatch(f"moduli differ: {self.p} vs {other.p}")
            return other.value
        return int(other)

    def __add__(self, other):
        return Fp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Fp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value, self.p)

    def __pow__(self, exponent: int):
        return Fp(fp_pow(self.value, exponent, self.p), self.p)

    def inverse(self) -> "Fp":
        return self ** -1

    def __truediv__(self, other):
        return self * Fp(self._coerce(other), self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Fp({self.value} mod {self.p})"


def fp_pow(base: int, exponent: int, p: int) -> int:
    """Return ``base**exponent mod p``; negative exponents go through the inverse."""
    base %= p
    if exponent < 0 and base == 0:
        raise ZeroToNegativePower(f"0 has no inverse modulo {p}")
    if exponent < 0:
        # Fermat: reduce the exponent so only a non-negative power is taken.
        exponent %= p - 1
    return pow(base, exponent, p)


def as_matrix(m, p: int) -> np.ndarray:
    """Copy ``m`` into a fresh 2-D int64 array of residues mod ``p``."""
    if p >= MAX_MODULUS:
        raise ValueError(f"modulus {p} too large for int64 elimination")
    if isinstance(m, np.ndarray) and m.dtype.kind in "iu":
        a = m.astype(np.int64) % p
    else:
        # Arbitrary Python ints: reduce before narrowing to int64.
        a = (np.array(m, dtype=object) % p).astype(np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``m`` over F_p and its pivot columns.

    Pivoting takes the first row (in order) with a nonzero entry in the
    leftmost remaining column, so the result is fully deterministic.
    """
    a = as_matrix(m, p)
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = a[r, c:] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, p: int) -> int:
    return len(rref(m, p)[1])


def kernel_basis(m, p: int, cols: Optional[int] = None) -> list[np.ndarray]:
    """Basis of the right kernel ``{x : m x = 0}``.

    One vector per free column ``f``: it has a 1 in position ``f``, zeros in
    the other free positions, and pivot entries read off the RREF.  ``cols``
    is only needed when ``m`` has no rows.
    """
    a = as_matrix(m, p)
    if a.size == 0:
        n = cols if cols is not None else a.shape[1]
        return [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    if cols is not None and a.shape[1] != cols:
        raise DimensionMismatch(f"matrix has {a.shape[1]} columns, expected {cols}")
    red, pivots = rref(a, p)
    n = red.shape[1]
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for row, c in enumerate(pivots):
            v[c] = (-red[row, f]) % p
        basis.append(v)
    return basis


def in_span(basis: Sequence, v, p: int) -> Optional[list[int]]:
    """Coefficients ``c`` with ``sum(c_j * basis_j) == v``, or ``None``.

    When ``basis`` is linearly dependent the returned coefficients are the
    ones with zeros on the dependent members.
    """
    v = np.asarray(v, dtype=np.int64) % p
    vectors = [np.asarray(b, dtype=np.int64) % p for b in basis]
    for b in vectors:
        if b.shape != v.shape:
            raise DimensionMismatch(f"basis vector of length {b.shape} vs target {v.shape}")
    if not vectors:
        return [] if not v.any() else None
    # Solve B c = v with B having the basis vectors as columns.
    aug = np.column_stack(vectors + [v])
    red, pivots = rref(aug, p)
    n = len(vectors)
    if n in pivots:
        return None
    coeffs = [0] * n
    for row, c in enumerate(pivots):
        coeffs[c] = int(red[row, n])
    return coeffs


def matmul(a, b, p: int) -> np.ndarray:
    """Product of two residue arrays mod ``p``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    # Chunk the inner dimension so partial sums cannot overflow.
    step = max(1, ((1 << 62) // ((p - 1) ** 2 or 1)))
    if inner <= step:
        return (a @ b) % p
    out = (a[..., :step] @ b[:step]) % p
    for s in range(step, inner, step):
        out = (out + (a[..., s:s + step] @ b[s:s + step]) % p) % p
    return out
