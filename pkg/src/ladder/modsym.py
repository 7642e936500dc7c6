"""Weight-k modular symbols for SL_2(Z) over F_p, plus quotient.

A degree ``n = k-2`` homogeneous polynomial ``P = sum_e c_e X^e Y^(n-e)`` is
stored as the length ``k-1`` coefficient vector ``c`` indexed by the
X-exponent ``e``.  The generator ``X^(i-1) Y^(k-1-i) {0,oo}`` is therefore
coordinate ``e = i-1``.

Integer matrices act on polynomials by ``(g.P)(X, Y) = P(dX - bY, -cX + aY)``
for ``g = [[a, b], [c, d]]``; this is a left action of M_2(Z)^+ and is used
unchanged for the determinant-l matrices of the Hecke operators.

The space is the quotient of the free module on the ``k-1`` generators by

* ``x + sigma.x``                  with sigma = [[0,-1],[1,0]],
* ``x + tau.x + tau^2.x``          with tau   = [[0,-1],[1,-1]],
* ``x - iota.x``                   with iota: P(X,Y) -> P(-X,Y),

which is the plus quotient of the SL_2(Z)-coinvariants of V_{k-2} (x) Delta_0
written on Manin symbols.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import BadPrime, BoundaryDegenerate, MultiplicityFailure, NoEisensteinCongruence
from .fp_linalg import fp_pow, is_prime, kernel_basis, matmul, rref

Matrix2 = tuple[int, int, int, int]  # (a, b, c, d)

SIGMA: Matrix2 = (0, -1, 1, 0)
TAU: Matrix2 = (0, -1, 1, -1)


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "oo"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Cusp = Union[Fraction, int, _Infinity]


def cusp_dimension(k: int) -> int:
    """dim S_k(SL_2(Z)) for even ``k >= 4``."""
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    return k // 12 - (1 if k % 12 == 2 else 0)


def mat_mul(g: Matrix2, h: Matrix2) -> Matrix2:
    a, b, c, d = g
    e, f, gg, hh = h
    return (a * e + b * gg, a * f + b * hh, c * e + d * gg, c * f + d * hh)


def sl2_inverse(g: Matrix2) -> Matrix2:
    a, b, c, d = g
    assert a * d - b * c == 1, g
    return (d, -b, -c, a)


def apply_to_cusp(g: Matrix2, z: Cusp) -> Cusp:
    a, b, c, d = g
    if z is INF:
        num, den = a, c
    else:
        z = Fraction(z)
        num, den = a * z.numerator + b * z.denominator, c * z.numerator + d * z.denominator
    return INF if den == 0 else Fraction(num, den)


@functools.lru_cache(maxsize=64)
def _binomials(n: int, p: int) -> np.ndarray:
    table = np.zeros((n + 1, n + 1), dtype=np.int64)
    for r in range(n + 1):
        table[r, 0] = 1
        for s in range(1, r + 1):
            table[r, s] = (table[r - 1, s - 1] + table[r - 1, s]) % p
    return table


def _linear_power(alpha: int, beta: int, e: int, p: int, binom: np.ndarray) -> np.ndarray:
    """Coefficients of X^s (s = 0..e) in (alpha X + beta Y)^e mod p."""
    steps = np.arange(e + 1, dtype=np.int64)
    a, b = _powers(np.array([alpha, beta], dtype=np.int64), steps, p)
    return binom[e, : e + 1] * a % p * b[::-1] % p


def act_monomial(g: Matrix2, e: int, n: int, p: int) -> np.ndarray:
    """g . X^e Y^(n-e) as a coefficient vector of length n+1."""
    a, b, c, d = (x % p for x in g)
    binom = _binomials(n, p)
    first = _linear_power(d, -b % p, e, p, binom)       # (dX - bY)^e
    second = _linear_power(-c % p, a, n - e, p, binom)  # (-cX + aY)^(n-e)
    return np.convolve(first, second) % p


def act(g: Matrix2, poly, p: int) -> np.ndarray:
    poly = np.asarray(poly, dtype=np.int64) % p
    n = len(poly) - 1
    out = np.zeros(n + 1, dtype=np.int64)
    for e in np.flatnonzero(poly):
        out = (out + int(poly[e]) * act_monomial(g, int(e), n, p)) % p
    return out


def action_matrix(g: Matrix2, n: int, p: int) -> np.ndarray:
    """Matrix of P -> g.P on the monomial basis (columns = images)."""
    return np.column_stack([act_monomial(g, e, n, p) for e in range(n + 1)])


def unimodular_path(a: Cusp, b: Cusp) -> list[tuple[int, Matrix2]]:
    """Write {a, b} as sum(sign * g{0, oo}) with g in SL_2(Z).

    Goes through oo: {a, b} = {oo, b} - {oo, a}, and each {oo, x} is split
    along the continued-fraction convergents of x.
    """
    return [(-s, g) for s, g in _from_infinity(a)] + _from_infinity(b)


def _from_infinity(x: Cusp) -> list[tuple[int, Matrix2]]:
    if x is INF:
        return []
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    p_prev, q_prev = 1, 0  # convergent p_{-1}/q_{-1} = oo
    p_pp, q_pp = 0, 1
    terms = []
    while True:
        a_j, rem = divmod(num, den)
        p_cur, q_cur = a_j * p_prev + p_pp, a_j * q_prev + q_pp
        # segment {p_prev/q_prev, p_cur/q_cur} = g{0, oo}
        det = p_cur * q_prev - p_prev * q_cur
        g = (p_cur, p_prev, q_cur, q_prev) if det == 1 else (-p_cur, p_prev, -q_cur, q_prev)
        terms.append((1, g))
        if rem == 0:
            break
        p_pp, q_pp, p_prev, q_prev = p_prev, q_prev, p_cur, q_cur
        num, den = den, rem
    return terms


def lift_path(poly, a: Cusp, b: Cusp, p: int) -> np.ndarray:
    """A generator-coordinate vector representing the class of P{a, b}.

    Uses class(P (x) g{0,oo}) = class(g^-1.P (x) {0,oo}).
    """
    poly = np.asarray(poly, dtype=np.int64) % p
    out = np.zeros(len(poly), dtype=np.int64)
    for sign, g in unimodular_path(a, b):
        out = (out + sign * act(sl2_inverse(g), poly, p)) % p
    return out


@dataclass(frozen=True)
class MonomialSymbol:
    """The generator X^(i-1) Y^(k-1-i) {0, oo}."""

    i: int
    k: int

    def __post_init__(self):
        if not 1 <= self.i <= self.k - 1:
            raise ValueError(f"generator index {self.i} outside 1..{self.k - 1}")

    @property
    def exponent(self) -> int:
        return self.i - 1

    def polynomial(self) -> np.ndarray:
        v = np.zeros(self.k - 1, dtype=np.int64)
        v[self.i - 1] = 1
        return v


@dataclass(frozen=True, eq=False)
class SymbolSpace:
    """Presentation of M_k(F_p)^+ with its cuspidal subspace.

    ``projection`` is a ``dim_M_plus x (k-1)`` matrix sending generator
    coordinates to coordinates on ``basis``.  ``basis`` lists generator
    indices ``i``: first the cuspidal ones (a basis of S_k(F_p)^+), then
    ``k-1`` for X^(k-2){0,oo}.
    """

    p: int
    k: int
    projection: np.ndarray
    basis: tuple[int, ...]
    dim_M_plus: int
    dim_S_plus: int
    relations: np.ndarray = field(repr=False)

    @property
    def cuspidal_basis(self) -> tuple[int, ...]:
        return self.basis[: self.dim_S_plus]

    @property
    def expected_cusp_dim(self) -> int:
        return cusp_dimension(self.k)

    @property
    def dimension_guard_ok(self) -> bool:
        return self.dim_S_plus == self.expected_cusp_dim

    def coords(self, vec) -> np.ndarray:
        return self.projection @ (np.asarray(vec, dtype=np.int64) % self.p) % self.p

    def generator_coords(self, i: int) -> np.ndarray:
        return self.projection[:, i - 1].copy()

    def involution(self, vec) -> np.ndarray:
        """iota on generator coordinates: X^e Y^(n-e) -> (-1)^e X^e Y^(n-e)."""
        vec = np.asarray(vec, dtype=np.int64)
        signs = np.where(np.arange(len(vec)) % 2 == 0, 1, -1)
        return vec * signs % self.p


def build_space(p: int, k: int) -> SymbolSpace:
    """Present M_k(F_p)^+ on the k-1 Manin generators."""
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    if not is_prime(p) or p <= k:
        raise ValueError(f"need a prime p > k, got p={p}, k={k}")
    n = k - 2
    ident = np.eye(n + 1, dtype=np.int64)
    rho_sigma = action_matrix(SIGMA, n, p)
    rho_tau = action_matrix(TAU, n, p)
    rho_tau2 = action_matrix(mat_mul(TAU, TAU), n, p)
    iota = np.diag([1 if e % 2 == 0 else p - 1 for e in range(n + 1)]).astype(np.int64)
    # Column j of each operator below is the relation attached to generator j.
    rels = np.vstack([
        ((ident + rho_sigma) % p).T,
        ((ident + rho_tau + rho_tau2) % p).T,
        ((ident - iota) % p).T,
    ])

    # The iota rows say 2 x_e = 0 for odd e, so only the sigma and tau rows
    # on even exponents need reducing.  Priority for basis selection:
    # cuspidal generators in index order, then X^(k-2), then Y^(k-2).  Row
    # reduction with columns in reverse priority leaves exactly the greedy
    # choice as free columns.
    priority = [e for e in range(1, n) if e % 2 == 0] + [n, 0]  # exponents e
    order = priority[::-1]
    red, pivots = rref(rels[: 2 * (n + 1), order], p)
    pivot_pos = set(pivots)
    free_pos = [j for j in range(len(order)) if j not in pivot_pos]
    free_exps = sorted((order[j] for j in free_pos), key=priority.index)
    free_index = {e: idx for idx, e in enumerate(free_exps)}
    dim_m = len(free_exps)

    projection = np.zeros((dim_m, n + 1), dtype=np.int64)
    for e in free_exps:
        projection[free_index[e], e] = 1
    for row, pos in enumerate(pivots):
        e = order[pos]
        for j in free_pos:
            projection[free_index[order[j]], e] = (-red[row, j]) % p

    if n not in free_index:
        raise BoundaryDegenerate(f"X^{n}{{0,oo}} is dependent on cuspidal generators for (p,k)=({p},{k})")
    dim_s = sum(1 for e in free_exps if 1 <= e <= n - 1)
    if 0 in free_index or dim_m != dim_s + 1:
        raise BoundaryDegenerate(f"boundary is not one-dimensional for (p,k)=({p},{k})")
    return SymbolSpace(
        p=p,
        k=k,
        projection=projection,
        basis=tuple(e + 1 for e in free_exps),
        dim_M_plus=dim_m,
        dim_S_plus=dim_s,
        relations=rels,
    )


def path_reduce(space: SymbolSpace, poly, a: Cusp, b: Cusp) -> np.ndarray:
    """Coordinates of the class of P{a, b} on ``space.basis``."""
    return space.coords(lift_path(poly, a, b, space.p))


def hecke_coset_reps(l: int) -> list[Matrix2]:
    return [(1, j, 0, l) for j in range(l)] + [(l, 0, 0, 1)]


def hecke_lift(space: SymbolSpace, l: int, poly) -> np.ndarray:
    """T_l applied to P{0, oo}, as a generator-coordinate vector (unprojected)."""
    p, n = space.p, space.k - 2
    poly = np.asarray(poly, dtype=np.int64) % p
    out = np.zeros(n + 1, dtype=np.int64)
    for m in hecke_coset_reps(l):
        start, end = apply_to_cusp(m, 0), apply_to_cusp(m, INF)
        for sign, g in unimodular_path(start, end):
            out = (out + sign * act(mat_mul(sl2_inverse(g), m), poly, p)) % p
    return out


@dataclass(frozen=True, eq=False)
class HeckeMatrix:
    """T_l on ``space.basis``; column j is the image of basis element j."""

    l: int
    matrix: np.ndarray
    dim_S_plus: int

    @property
    def cuspidal(self) -> np.ndarray:
        s = self.dim_S_plus
        return self.matrix[:s, :s]


def _check_hecke_prime(space: SymbolSpace, l: int) -> None:
    if not is_prime(l) or l == space.p:
        raise BadPrime(f"T_{l} needs a prime different from p={space.p}")


def hecke_image(space: SymbolSpace, l: int, vec) -> np.ndarray:
    """T_l of an arbitrary generator-coordinate vector, in basis coordinates."""
    _check_hecke_prime(space, l)
    return space.coords(hecke_lift(space, l, vec))


LOG_TABLE_LIMIT = 1 << 22


@functools.lru_cache(maxsize=8)
def _log_tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Discrete log and antilog tables for a primitive root mod p."""
    order = p - 1
    factors = [q for q in range(2, order + 1) if order % q == 0 and is_prime(q)]
    g = next(x for x in range(2, p) if all(pow(x, order // q, p) != 1 for q in factors))
    exp = np.empty(order, dtype=np.int64)
    exp[0] = 1
    for j in range(1, order):
        exp[j] = exp[j - 1] * g % p
    log = np.zeros(p, dtype=np.int64)
    log[exp] = np.arange(order, dtype=np.int64)
    return log, exp


def _powers(base: np.ndarray, exps: np.ndarray, p: int) -> np.ndarray:
    """Table base[t] ** exps[j] mod p (with 0 ** 0 = 1)."""
    base = base % p
    if p <= LOG_TABLE_LIMIT:
        log, exp = _log_tables(p)
        out = exp[np.outer(log[base], exps) % (p - 1)]
        zero = base == 0
        out[zero] = np.where(exps == 0, 1, 0)
        return out
    out = np.ones((len(base), len(exps)), dtype=np.int64)
    sq = base
    bit = 0
    while (exps >> bit).any():
        mask = ((exps >> bit) & 1).astype(bool)
        out[:, mask] = out[:, mask] * sq[:, None] % p
        sq = sq * sq % p
        bit += 1
    return out


@functools.lru_cache(maxsize=16)
def _evaluation_weights(space: SymbolSpace) -> np.ndarray:
    """mu with space.coords(P) = mu @ [P(t, 1) for t = 0..n].

    Column t of mu is the coordinate vector of the Lagrange polynomial that is
    1 at x = t and 0 at the other points 0..n.  Needs n + 1 <= p.
    """
    p, n = space.p, space.k - 2
    pts = np.arange(n + 1, dtype=np.int64)
    master = np.array([1], dtype=np.int64)  # prod (x - t), low degree first
    for t in range(n + 1):
        master = (np.concatenate([[0], master]) - t * np.concatenate([master, [0]])) % p
    # synthetic division of master by (x - t), all t at once
    quot = np.zeros((n + 1, n + 1), dtype=np.int64)  # quot[j, t] = coeff of x^j
    quot[n] = master[n + 1]
    for j in range(n, 0, -1):
        quot[j - 1] = (master[j] + pts * quot[j]) % p
    # prod_{s != t} (t - s) = t! (n-t)! (-1)^(n-t)
    fact = np.ones(n + 1, dtype=np.int64)
    for j in range(1, n + 1):
        fact[j] = fact[j - 1] * j % p
    denom = fact * fact[::-1] % p * np.where((n - pts) % 2, p - 1, 1) % p
    inv = np.array([pow(int(x), -1, p) for x in denom], dtype=np.int64)
    lagrange = quot * inv[None, :] % p
    return matmul(space.projection, lagrange, p)


def _hecke_by_evaluation(space: SymbolSpace, l: int) -> np.ndarray:
    # Sum (h . X^e Y^(n-e))(t, 1) = (d t - b)^e (-c t + a)^(n-e) over every
    # term h of the lifted cosets, then apply the coordinate weights once.
    p, n = space.p, space.k - 2
    exps = np.array([i - 1 for i in space.basis], dtype=np.int64)
    pts = np.arange(n + 1, dtype=np.int64)
    acc = np.zeros((n + 1, len(exps)), dtype=np.int64)
    for m in hecke_coset_reps(l):
        for sign, g in unimodular_path(apply_to_cusp(m, 0), apply_to_cusp(m, INF)):
            a, b, c, d = mat_mul(sl2_inverse(g), m)
            acc += sign * _product_powers((d * pts - b) % p, (a - c * pts) % p, exps, n, p)
        acc %= p
    return matmul(_evaluation_weights(space), acc, p)


def _product_powers(left: np.ndarray, right: np.ndarray, exps: np.ndarray, n: int, p: int) -> np.ndarray:
    """Table left[t] ** e * right[t] ** (n - e) mod p for e in exps."""
    if p > LOG_TABLE_LIMIT:
        return _powers(left, exps, p) * _powers(right, n - exps, p) % p
    log, exp = _log_tables(p)
    out = exp[(np.outer(log[left], exps) + np.outer(log[right], n - exps)) % (p - 1)]
    zero = (left == 0) | (right == 0)
    if zero.any():
        out[zero] = _powers(left[zero], exps, p) * _powers(right[zero], n - exps, p) % p
    return out


@functools.lru_cache(maxsize=256)
def _hecke_cached(space: SymbolSpace, l: int) -> HeckeMatrix:
    p = space.p
    mat = _hecke_by_evaluation(space, l)
    s = space.dim_S_plus
    if mat[s:, :s].any():
        raise ArithmeticError(f"T_{l} does not preserve the cuspidal subspace")
    return HeckeMatrix(l=l, matrix=mat, dim_S_plus=s)


def hecke_matrix(space: SymbolSpace, l: int) -> HeckeMatrix:
    _check_hecke_prime(space, l)
    return _hecke_cached(space, l)


def eisenstein_eigenvalue(l: int, k: int, p: int) -> int:
    return (1 + fp_pow(l, k - 1, p)) % p


def boundary_functional(space: SymbolSpace) -> np.ndarray:
    """Psi_k on basis coordinates: 1 on X^(k-2){0,oo}, 0 on cusp symbols."""
    psi = np.zeros(space.dim_M_plus, dtype=np.int64)
    if space.basis[-1] != space.k - 1:
        raise BoundaryDegenerate("X^(k-2){0,oo} is not in the basis")
    psi[-1] = 1
    return psi


def boundary_of_polynomial(poly, p: int) -> int:
    """Psi_k on generator coordinates, read straight off P: P(1,0) - P(0,1)."""
    poly = np.asarray(poly, dtype=np.int64)
    return int(poly[-1] - poly[0]) % p


@dataclass(frozen=True, eq=False)
class EisensteinLine:
    """Functional on S_k(F_p)^+ killed by every T_l - 1 - l^(k-1) tested.

    ``w`` holds its values on X^(i-1) Y^(k-1-i){0,oo} for odd i = 3..k-3.
    """

    phi: np.ndarray
    w: tuple[int, ...]
    hecke_primes: tuple[int, ...]


def _prime_stream(skip: int):
    l = 2
    while True:
        if is_prime(l) and l != skip:
            yield l
        l += 1


def eisenstein_space(space: SymbolSpace, min_prime: int = 0) -> tuple[list[np.ndarray], tuple[int, ...]]:
    """Basis of the common kernel of the dual operators T_l* - (1 + l^(k-1)).

    Primes are added until the dimension has not moved for three primes in a
    row and the last prime exceeds k/6 (and ``min_prime``).
    """
    p, k, s = space.p, space.k, space.dim_S_plus
    if s == 0:
        return [], ()
    rows = np.zeros((0, s), dtype=np.int64)
    dim = s
    unchanged = 0
    used = []
    basis = [np.eye(s, dtype=np.int64)[j] for j in range(s)]
    for l in _prime_stream(p):
        t = hecke_matrix(space, l).cuspidal
        shifted = (t - eisenstein_eigenvalue(l, k, p) * np.eye(s, dtype=np.int64)) % p
        rows = np.vstack([rows, shifted.T])
        used.append(l)
        basis = kernel_basis(rows, p, cols=s)
        if len(basis) == dim:
            unchanged += 1
        else:
            dim = len(basis)
            unchanged = 0
        if dim == 0:
            break
        if unchanged >= 3 and 6 * l > k and l >= min_prime:
            break
    return basis, tuple(used)


def eisenstein_line(space: SymbolSpace, min_prime: int = 0) -> EisensteinLine:
    basis, used = eisenstein_space(space, min_prime)
    if not basis:
        raise NoEisensteinCongruence(f"no Eisenstein functional on S_{space.k}(F_{space.p})^+")
    if len(basis) > 1:
        raise MultiplicityFailure(
            f"Eisenstein space has dimension {len(basis)} for (p,k)=({space.p},{space.k})", len(basis)
        )
    phi = basis[0]
    return EisensteinLine(phi=phi, w=tuple(comparison_vector(space, phi)), hecke_primes=used)


def comparison_vector(space: SymbolSpace, phi) -> list[int]:
    """Values of a cuspidal functional on the odd monomial symbols i = 3..k-3."""
    s = space.dim_S_plus
    phi = np.asarray(phi, dtype=np.int64)
    out = []
    for i in range(3, space.k - 2, 2):
        c = space.generator_coords(i)
        out.append(int(np.dot(phi, c[:s]) % space.p))
    return out
