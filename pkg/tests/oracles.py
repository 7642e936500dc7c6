"""Independent reference computations used only by the tests."""
from fractions import Fraction
from itertools import permutations, combinations


def bernoulli_exact(n_max):
    """B_0..B_n_max as Fractions (B_1 = -1/2) by the Akiyama-Tanigawa algorithm."""
    out = []
    a = []
    for m in range(n_max + 1):
        a.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # Akiyama-Tanigawa yields B_1 = +1/2.
    if n_max >= 1:
        out[1] = -out[1]
    return out


def det_mod(m, p):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= m[i][perm[i]]
        total += prod
    return total % p


def minor_rank(m, p):
    """Largest r with a nonzero r x r minor mod p."""
    rows, cols = len(m), len(m[0]) if m else 0
    for r in range(min(rows, cols), 0, -1):
        for rs in combinations(range(rows), r):
            for cs in combinations(range(cols), r):
                if det_mod([[m[i][j] for j in cs] for i in rs], p):
                    return r
    return 0


def delta_coefficients(n):
    """tau(1..n) from q * prod (1 - q^m)^24."""
    c = [0] * n
    c[0] = 1
    for m in range(1, n):
        for _ in range(24):
            for j in range(n - 1, m - 1, -1):
                c[j] -= c[j - m]
    return {i + 1: c[i] for i in range(n)}
