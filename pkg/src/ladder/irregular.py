"""Bernoulli numbers modulo p and the irregular pairs they single out."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CompositeModulus
from .fp_linalg import is_prime


@dataclass(frozen=True, order=True)
class IrregularPair:
    p: int
    k: int

    def __post_init__(self):
        if self.k % 2 or not 12 <= self.k <= self.p - 3:
            raise ValueError(f"({self.p},{self.k}) is outside 12 <= k <= p-3, k even")

    def as_tuple(self) -> tuple[int, int]:
        return (self.p, self.k)


def _check_prime(p: int) -> None:
    if p < 5 or not is_prime(p):
        raise CompositeModulus(f"{p} is not a prime >= 5")


def bernoulli_table(p: int, skip_odd: bool = True) -> np.ndarray:
    """``B_0 .. B_(p-3)`` mod p via ``sum_{j<=m} C(m+1, j) B_j = 0``.

    Every ``B_j`` with ``j <= p-3`` is p-integral, so no step divides by p.
    Binomial rows are advanced by Pascal's rule mod p.  With ``skip_odd``
    the odd indices past 1 are left at zero instead of being computed.
    """
    _check_prime(p)
    top = p - 3
    b = np.zeros(top + 1, dtype=np.int64)
    b[0] = 1
    if top >= 1:
        b[1] = (p - 1) * pow(2, -1, p) % p  # B_1 = -1/2
    row = np.array([1, 2, 1], dtype=np.int64)  # C(m+1, j) at m = 1
    for m in range(2, top + 1):
        nxt = np.empty(m + 2, dtype=np.int64)
        nxt[0] = nxt[-1] = 1
        nxt[1:-1] = (row[:-1] + row[1:]) % p
        row = nxt
        if skip_odd and m % 2:
            continue
        s = int(np.dot(row[:m], b[:m]) % p)
        b[m] = (-s) * pow(m + 1, -1, p) % p
    return b


def bernoulli_mod_p(p: int) -> dict[int, int]:
    """Residues ``B_k mod p`` for even ``2 <= k <= p-3``."""
    b = bernoulli_table(p)
    return {k: int(b[k]) for k in range(2, p - 2, 2)}


def irregular_indices(p: int) -> list[int]:
    """Even ``k`` in ``[2, p-3]`` with ``p | B_k``.

    For such ``k`` we have ``p`` coprime to ``k``, so this is the same as
    ``p`` dividing the numerator of ``B_k / k``.
    """
    return [k for k, r in bernoulli_mod_p(p).items() if r == 0]


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def scan_irregular(p_max: int) -> list[IrregularPair]:
    """All irregular pairs with ``p <= p_max``, ordered by ``(p, k)``."""
    pairs = []
    for p in primes_up_to(p_max):
        if p < 5:
            continue
        for k in irregular_indices(p):
            # B_2..B_10 have numerators +-1, so k < 12 would mean a broken table.
            assert k >= 12, f"impossible irregular pair ({p},{k})"
            pairs.append(IrregularPair(p, k))
    return pairs


def is_irregular_pair(p: int, k: int) -> bool:
    if p < 5 or not is_prime(p) or k % 2 or not 2 <= k <= p - 3:
        return False
    return bernoulli_mod_p(p)[k] == 0
