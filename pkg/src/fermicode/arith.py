"""Integer and finite-field helpers used by the codeword constructions.

Primality is decided with a deterministic Miller-Rabin witness set that is
exact for every n < 2^64, which covers any block size this package will ever
derive.  Integer k-th roots are computed by binary search so that no floating
point rounding can leak into parameter derivations.
"""

from __future__ import annotations

from typing import Iterator, Sequence

# Witnesses proven sufficient for all n < 2^64 (Sinclair's set).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2^64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n >= 1 << 64:
        raise ValueError("primality test witness set only certified below 2^64")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    if n <= 2:
        return 2
    cand = n if n % 2 == 1 else n + 1
    while not is_prime(cand):
        cand += 2
    return cand


def kth_next_prime(n: int, k: int) -> int:
    """The k-th prime strictly greater than n (k >= 1)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    p = n
    for _ in range(k):
        p = next_prime(p + 1)
    return p


def ceil_root(n: int, k: int) -> int:
    """Least integer r >= 0 with r**k >= n, by pure-integer binary search."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 1:
        raise ValueError("root index must be positive")
    if n <= 1:
        return n
    lo, hi = 1, 1
    while hi**k < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


def poly_eval_mod(coeffs: Sequence[int], x: int, p: int) -> int:
    """Evaluate a polynomial (coefficients in ascending order) at x mod p."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def mode_to_coeffs(mode: int, p: int, degree: int) -> tuple[int, ...]:
    """Base-p digits of `mode`, least significant first, padded to degree+1.

    This is the canonical mode -> polynomial rule: digit d_k becomes the
    coefficient of x^k, so mode 0 is the zero polynomial and consecutive
    modes first exhaust the constants.
    """
    if not 0 <= mode < p ** (degree + 1):
        raise ValueError(f"mode {mode} out of range for p={p}, degree={degree}")
    digits = []
    m = mode
    for _ in range(degree + 1):
        digits.append(m % p)
        m //= p
    return tuple(digits)


def coeffs_to_mode(coeffs: Sequence[int], p: int) -> int:
    mode = 0
    for c in reversed(coeffs):
        if not 0 <= c < p:
            raise ValueError("coefficient out of range")
        mode = mode * p + c
    return mode


def enumerate_polys(p: int, degree: int, count: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield coefficient tuples for modes 0, 1, ... in canonical order."""
    total = p ** (degree + 1)
    if count is None:
        count = total
    if count > total:
        raise ValueError("cannot enumerate more polynomials than the field allows")
    for mode in range(count):
        yield mode_to_coeffs(mode, p, degree)


def count_intersections(f: Sequence[int], g: Sequence[int], p: int, points: int) -> int:
    """Number of x in {0..points-1} where f and g agree mod p."""
    if points > p:
        raise ValueError("evaluation points must be distinct field elements")
    return sum(
        1 for x in range(points) if poly_eval_mod(f, x, p) == poly_eval_mod(g, x, p)
    )
