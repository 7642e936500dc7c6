"""Linear constraints on cup-product values of cyclotomic p-units.

Write u_c = 1 - zeta^c and f(c) = <u_1, u_c>, valued in a one-dimensional
F_p-space on which sigma_a acts by a^(2-k).  Equivariance gives
<u_a, u_b> = a^(2-k) f(b/a), antisymmetry gives f(1) = 0, and the relation
<x, 1-x> = 0 applied to x = (1-zeta^a)/(1-zeta^c) gives one row per
t = c/a.  The derivation is written out in ``docs/steinberg_rows.md``.

Those rows are exactly the Manin relations for weight-2 symbols on
Gamma_1(p) under [u:v] -> <u_u, u_v>, so on their own they leave a solution
space of dimension roughly p/12.  The pairing values are further cut out by
the Eisenstein condition on that functional: for each prime l != p,
sum over Merel's determinant-l matrices of F(au+cv, bu+dv) equals
(l + l^(2-k)) F(u, v), where F(u, v) = <u_u, u_v>.  ``solve`` imposes those
rows after the Steinberg kernel is known.

Solution vectors are length-``p`` integer arrays indexed by ``c``; entries
0 and 1 are always zero.
"""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import EvenIndex, NotIrregular
from .fp_linalg import fp_pow, is_prime, kernel_basis, rref
from .irregular import is_irregular_pair

STEINBERG, INVERSION, NEGATION = "steinberg", "inversion", "negation"


@dataclass(frozen=True, eq=False)
class SteinbergSystem:
    p: int
    k: int
    rows: tuple[dict, ...]
    families: tuple[str, ...] = field(repr=False)

    @property
    def n_unknowns(self) -> int:
        return self.p - 2  # f(2), ..., f(p-1)

    def restrict(self, keep: Iterable[str]) -> "SteinbergSystem":
        keep = set(keep)
        picked = [(r, fam) for r, fam in zip(self.rows, self.families) if fam in keep]
        return SteinbergSystem(self.p, self.k, tuple(r for r, _ in picked), tuple(f for _, f in picked))

    def dense(self) -> np.ndarray:
        """Rows over the unknowns f(2..p-1) (column c-2)."""
        m = np.zeros((len(self.rows), self.n_unknowns), dtype=np.int64)
        for r, row in enumerate(self.rows):
            for c, coeff in row.items():
                m[r, c - 2] = coeff
        return m

    def residual(self, f) -> list[int]:
        f = np.asarray(f, dtype=np.int64)
        return [sum(coeff * int(f[c]) for c, coeff in row.items()) % self.p for row in self.rows]


@dataclass(frozen=True, eq=False)
class SolutionSpace:
    """Kernel basis; ``steinberg_dimension`` is the size before Hecke rows."""

    p: int
    k: int
    basis: tuple[np.ndarray, ...]
    steinberg_dimension: int = 0
    hecke_primes: tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _add(row: dict, c: int, coeff: int, p: int) -> None:
    c %= p
    if c == 1:
        return  # f(1) = 0
    v = (row.get(c, 0) + coeff) % p
    if v:
        row[c] = v
    else:
        row.pop(c, None)


def steinberg_row(t: int, p: int, k: int) -> dict:
    """f(t-1) - f(t) - t^(2-k) f((t-1)/t) as a sparse row."""
    row: dict = {}
    _add(row, t - 1, 1, p)
    _add(row, t, -1, p)
    _add(row, (t - 1) * pow(t, -1, p), -fp_pow(t, (2 - k) % (p - 1), p), p)
    return row


def build_system(p: int, k: int, check_irregular: bool = True) -> SteinbergSystem:
    if check_irregular and not is_irregular_pair(p, k):
        raise NotIrregular(f"({p},{k}) is not an irregular pair")
    if k % 2 or not 2 <= k <= p - 3:
        raise NotIrregular(f"({p},{k}) is outside the range 2 <= k <= p-3, k even")
    rows, fams = [], []
    for t in range(2, p):
        rows.append(steinberg_row(t, p, k))
        fams.append(STEINBERG)
    for t in range(2, p):
        row: dict = {}
        _add(row, pow(t, -1, p), 1, p)
        _add(row, t, fp_pow(t, (k - 2) % (p - 1), p), p)
        rows.append(row)
        fams.append(INVERSION)
    for t in range(1, p):
        row = {}
        _add(row, -t, 1, p)
        _add(row, t, -1, p)
        rows.append(row)
        fams.append(NEGATION)
    return SteinbergSystem(p, k, tuple(rows), tuple(fams))


class _ScaledUnionFind:
    """Tracks f(x) = coef * f(root) and roots forced to zero."""

    def __init__(self, p: int):
        self.p = p
        self.parent: dict = {}
        self.coef: dict = {}
        self.zero: set = set()

    def find(self, x: int) -> tuple[int, int]:
        if x not in self.parent:
            return x, 1
        root, c = self.find(self.parent[x])
        c = c * self.coef[x] % self.p
        self.parent[x], self.coef[x] = root, c
        return root, c

    def constrain(self, row: dict) -> None:
        terms = list(row.items())
        if len(terms) == 1:
            (x, a), = terms
            root, c = self.find(x)
            if a * c % self.p:
                self.zero.add(root)
            return
        (x, a), (y, b) = terms
        rx, cx = self.find(x)
        ry, cy = self.find(y)
        A, B = a * cx % self.p, b * cy % self.p
        if rx == ry:
            if (A + B) % self.p:
                self.zero.add(rx)
            return
        if A == 0 or B == 0:
            if A:
                self.zero.add(rx)
            if B:
                self.zero.add(ry)
            return
        # A f(rx) + B f(ry) = 0  =>  f(rx) = -B/A f(ry)
        self.parent[rx] = ry
        self.coef[rx] = (-B) * pow(A, -1, self.p) % self.p
        if rx in self.zero:
            self.zero.add(ry)


def solve(system: SteinbergSystem, eisenstein: bool = True, min_prime: int = 0) -> SolutionSpace:
    """Deterministic kernel basis of the system, as full f-vectors.

    With ``eisenstein`` set, the Hecke rows for l = 2, 3, 5, ... are then
    imposed until the dimension has not moved for three primes in a row
    (and the last prime is at least ``min_prime``).
    """
    basis = _steinberg_kernel(system)
    steinberg_dim = len(basis)
    used: list[int] = []
    if eisenstein and basis:
        basis, used = _impose_hecke(system.p, system.k, basis, min_prime)
    return SolutionSpace(system.p, system.k, tuple(basis), steinberg_dim, tuple(used))


def _steinberg_kernel(system: SteinbergSystem) -> list[np.ndarray]:
    # One- and two-term rows are absorbed by substitution first; the rest is
    # row reduced densely over the surviving variables.
    p = system.p
    uf = _ScaledUnionFind(p)
    for row in system.rows:
        if 1 <= len(row) <= 2:
            uf.constrain(row)
    subst = {x: uf.find(x) for x in range(2, p)}
    live = sorted({r for r, _ in subst.values() if r not in uf.zero})
    col = {r: j for j, r in enumerate(live)}

    reduced = []
    for row in system.rows:
        out = np.zeros(len(live), dtype=np.int64)
        for x, a in row.items():
            r, c = subst[x]
            if r in col:
                out[col[r]] = (out[col[r]] + a * c) % p
        if out.any():
            reduced.append(out)
    if reduced:
        kernel = kernel_basis(np.array(reduced), p, cols=len(live))
    else:
        kernel = [np.eye(len(live), dtype=np.int64)[j] for j in range(len(live))]

    basis = []
    for g in kernel:
        f = np.zeros(p, dtype=np.int64)
        for x, (r, c) in subst.items():
            if r in col:
                f[x] = c * g[col[r]] % p
        basis.append(f)
    return basis


@functools.lru_cache(maxsize=None)
def merel_matrices(l: int) -> tuple[tuple[int, int, int, int], ...]:
    """[[a, b], [c, d]] with ad - bc = l, a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, l + 1):
        for d in range(1, l + 1):
            excess = a * d - l
            if excess < 0:
                continue
            if excess == 0:
                out.extend((a, 0, c, d) for c in range(d))
                out.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                c, rem = divmod(excess, b)
                if rem == 0 and c < d:
                    out.append((a, b, c, d))
    return tuple(sorted(out))


def hecke_eigenvalue(l: int, p: int, k: int) -> int:
    return (l + fp_pow(l, (2 - k) % (p - 1), p)) % p


def _add_pairing(row: dict, x: int, y: int, coeff: int, p: int, k: int) -> None:
    # <u_x, u_y> = x^(2-k) f(y/x); symbols with a zero entry pair to 0.
    x %= p
    y %= p
    if x == 0 or y == 0:
        return
    _add(row, y * pow(x, -1, p), coeff * fp_pow(x, (2 - k) % (p - 1), p), p)


def hecke_row(t: int, l: int, p: int, k: int) -> dict:
    """Sparse row of sum_M F((1,t)M) - (l + l^(2-k)) F(1, t)."""
    row: dict = {}
    for a, b, c, d in merel_matrices(l):
        _add_pairing(row, a + c * t, b + d * t, 1, p, k)
    _add_pairing(row, 1, t, -hecke_eigenvalue(l, p, k), p, k)
    return row


def _hecke_block(p: int, k: int, l: int, kernel: np.ndarray) -> np.ndarray:
    """All hecke_row(t, l) for t = 1..p-1, evaluated on the columns of ``kernel``."""
    t = np.arange(1, p, dtype=np.int64)
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    pw = _power_table(p, 2 - k)
    out = (-hecke_eigenvalue(l, p, k) * kernel[t]) % p
    for a, b, c, d in merel_matrices(l):
        x = (a + c * t) % p
        y = (b + d * t) % p
        live = (x != 0) & (y != 0)
        idx = y * inv[x] % p
        term = pw[x][:, None] * kernel[idx] % p
        out = (out + np.where(live[:, None], term, 0)) % p
    return out


def _impose_hecke(p: int, k: int, basis: list[np.ndarray], min_prime: int):
    kernel = np.array(basis, dtype=np.int64).T  # p x d
    used = []
    unchanged = 0
    l = 1
    while kernel.shape[1] and not (unchanged >= 3 and l >= min_prime):
        l += 1
        if l == p or not is_prime(l):
            continue
        block = _hecke_block(p, k, l, kernel)
        used.append(l)
        block = block[block.any(axis=1)]
        if not block.size:
            unchanged += 1
            continue
        coeffs = kernel_basis(block, p, cols=kernel.shape[1])
        if len(coeffs) == kernel.shape[1]:
            unchanged += 1
            continue
        unchanged = 0
        kernel = (kernel @ np.array(coeffs, dtype=np.int64).T) % p if coeffs \
            else np.zeros((p, 0), dtype=np.int64)
    return [kernel[:, j].copy() for j in range(kernel.shape[1])], used


def _power_table(p: int, exponent: int) -> np.ndarray:
    """c^exponent mod p for c = 0..p-1 (entry 0 unused)."""
    exponent %= p - 1
    return np.array([0] + [pow(c, exponent, p) for c in range(1, p)], dtype=np.int64)


def e_value(f, i: int, p: int, k: int) -> int:
    """e_{i,k} = -sum_c c^(j-1) f(c) with j = k - i mod p-1."""
    if i % 2 == 0:
        raise EvenIndex(f"e_{{i,k}} needs odd i, got {i}")
    f = np.asarray(f, dtype=np.int64) % p
    powers = _power_table(p, k - i - 1)
    return int(-(powers[1:] @ f[1:p]) % p)


def e_vector(f, p: int, k: int, indices: Optional[Iterable[int]] = None) -> list[int]:
    if indices is None:
        indices = range(3, k - 2, 2)
    return [e_value(f, i, p, k) for i in indices]


def e_subspace(solutions: SolutionSpace) -> list[np.ndarray]:
    """Row-reduced basis of span{(e_3, e_5, ..., e_{k-3})(f) : f in the kernel}."""
    p, k = solutions.p, solutions.k
    if not solutions.basis or k < 6:
        return []
    red, pivots = rref(np.array([e_vector(f, p, k) for f in solutions.basis]), p)
    return [red[r].copy() for r in range(len(pivots))]


def pairing_value(f, a: int, b: int, p: int, k: int) -> int:
    """<u_a, u_b> = a^(2-k) f(b/a)."""
    return fp_pow(a, (2 - k) % (p - 1), p) * int(f[b * pow(a, -1, p) % p]) % p


def audit_relations(system: SteinbergSystem, solutions: SolutionSpace, samples: int = 200,
                    seed: int = 0) -> int:
    """Re-expand <x, 1-x> = 0 for random (a, c) and test it on every solution.

    x = u_a / u_c and 1 - x = zeta^a u_(c-a) / u_c; the zeta terms pair to
    zero.  Returns the number of sampled pairs that hold for all solutions.
    """
    p, k = system.p, system.k
    rng = random.Random(seed)
    passed = 0
    for _ in range(samples):
        a = rng.randrange(1, p)
        c = rng.randrange(1, p)
        while c == a:
            c = rng.randrange(1, p)
        terms = [(1, a, c - a), (-1, a, c), (-1, c, c - a), (1, c, c)]
        ok = True
        for f in solutions.basis:
            total = sum(s * pairing_value(f, x, y % p, p, k) for s, x, y in terms) % p
            ok = ok and total == 0
        passed += ok
    return passed
