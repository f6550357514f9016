"""Hermite interpolation through phase targets at cosine nodes.

Two target families share one construction.  The majority kind places nodes
at cos(m*pi/L) for m = 0..L with value +1 on the right half and -1 on the
left half; the ctrl kind places nodes at cos(pi*w/n) for Hamming weights
w = 0..n with value -1 only at the all-ones node.  Every interior node also
constrains the first derivative to zero, so a target list of N+1 nodes
fixes a unique polynomial of degree 2N-1.

The Newton-form coefficients come from a divided-difference table built in
multiprecision floating point (gmpy2).  Because values only change sign
once along the node list, every two-argument difference is exactly zero
except the single pair straddling the sign flip, which kills cancellation
in the most sensitive table layer.  Nested evaluation of the resulting
Newton form is stable even though individual coefficients reach 2^990 at
the largest sizes scanned -- but only on the half of the domain near the
first node.  Evaluating the descending-node form near x = -1 runs partial
products up to 2^degree before they cancel, which eats the whole working
precision.  The module therefore keeps two coefficient lists, one per node
ordering, and evaluates with whichever starts on the same side as x.

Extremum scanning needs thousands of evaluations, so the polynomial is
resampled once at Chebyshev extrema (multiprecision) and turned into
Chebyshev-basis coefficients by a DCT.  Those coefficients are bounded by
2 whenever the polynomial is bounded by 1 on [-1, 1], so they survive
rounding to doubles; the dense grid search and derivative bisection run
vectorized in numpy, and each located minimum is re-evaluated through the
multiprecision Newton form.  Converting Newton coefficients to the
Chebyshev basis directly (Horner carried in that basis) does not work:
the intermediates grow like 2^degree and cancel to O(1), which no
affordable precision survives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import gmpy2
import numpy as np
from gmpy2 import mpfr

MAX_PRECISION_BITS = 1 << 20


@dataclass(frozen=True)
class InterpolationSpec:
    kind: str                 # "majority" or "ctrl_phase"
    size: int                 # L (majority) or n (ctrl_phase)
    angle_numerators: Tuple[int, ...]  # node m has x = cos(m*pi/size)
    values: Tuple[int, ...]   # +1 / -1 targets


@dataclass
class HermitePoly:
    kind: str
    size: int
    precision_bits: int
    z: List[mpfr]            # node list with interior nodes duplicated
    newton: List[mpfr]       # divided-difference coefficients, degree order
    newton_rev: List[mpfr]   # same polynomial over the reversed node list
    cheb: np.ndarray         # double-precision Chebyshev coefficients

    @property
    def degree(self) -> int:
        return len(self.newton) - 1

    @property
    def z_rev(self) -> List[mpfr]:
        return self.z[::-1]


def majority_spec(L: int) -> InterpolationSpec:
    if L < 1 or L % 2 == 0:
        raise ValueError(
            "majority targets need odd L so the +1 and -1 node counts match"
        )
    values = tuple(1 if m <= L // 2 else -1 for m in range(L + 1))
    return InterpolationSpec("majority", L, tuple(range(L + 1)), values)


def ctrl_phase_spec(n: int) -> InterpolationSpec:
    if n < 1:
        raise ValueError("need at least one controlling qubit")
    values = tuple(1 if w < n else -1 for w in range(n + 1))
    return InterpolationSpec("ctrl_phase", n, tuple(range(n + 1)), values)


def default_precision(degree: int) -> int:
    return max(256, 8 * degree)


def hermite_interpolate(
    spec: InterpolationSpec, precision_bits: Optional[int] = None
) -> HermitePoly:
    """Divided-difference table -> Newton coefficients and a Chebyshev
    resampling of the same polynomial."""
    n_nodes = len(spec.angle_numerators)
    degree = 2 * (n_nodes - 1) - 1 if n_nodes > 1 else 0
    if precision_bits is None:
        precision_bits = default_precision(degree)
    if precision_bits < 64:
        raise ValueError("need at least 64 bits of working precision")
    if precision_bits > MAX_PRECISION_BITS:
        raise ValueError(f"precision beyond the {MAX_PRECISION_BITS}-bit limit")

    with gmpy2.context(precision=precision_bits):
        pi = gmpy2.const_pi()
        nodes = [gmpy2.cos(pi * m / spec.size) for m in spec.angle_numerators]
        vals = [mpfr(v) for v in spec.values]

        z: List[mpfr] = [nodes[0]]
        f: List[mpfr] = [vals[0]]
        for i in range(1, n_nodes - 1):
            z += [nodes[i], nodes[i]]
            f += [vals[i], vals[i]]
        if n_nodes > 1:
            z.append(nodes[-1])
            f.append(vals[-1])

        newton = _newton_table(z, f)
        newton_rev = _newton_table(z[::-1], f[::-1])
        cheb = _resample_chebyshev(z, newton, newton_rev, pi)
    return HermitePoly(
        spec.kind, spec.size, precision_bits, z, newton, newton_rev, cheb
    )


def _newton_table(z: Sequence[mpfr], f: Sequence[mpfr]) -> List[mpfr]:
    """Top edge of the divided-difference triangle, row by row.

    First differences: a duplicated pair carries the prescribed zero
    derivative; a distinct pair divides the (usually zero) value gap.
    """
    m = len(z)
    if m == 1:
        return [f[0]]
    row = []
    for i in range(m - 1):
        if z[i + 1] == z[i]:
            row.append(mpfr(0))
        else:
            row.append((f[i + 1] - f[i]) / (z[i + 1] - z[i]))
    newton = [f[0], row[0]]
    for k in range(2, m):
        row = [(row[i + 1] - row[i]) / (z[i + k] - z[i]) for i in range(m - k)]
        newton.append(row[0])
    return newton


def ctrl_phase_poly(n: int, precision_bits: Optional[int] = None) -> HermitePoly:
    return hermite_interpolate(ctrl_phase_spec(n), precision_bits)


def majority_poly(L: int, precision_bits: Optional[int] = None) -> HermitePoly:
    return hermite_interpolate(majority_spec(L), precision_bits)


def _horner(z: Sequence[mpfr], newton: Sequence[mpfr], x) -> mpfr:
    acc = newton[-1]
    for k in range(len(newton) - 2, -1, -1):
        acc = acc * (x - z[k]) + newton[k]
    return acc


def _resample_chebyshev(
    z: Sequence[mpfr],
    newton: Sequence[mpfr],
    newton_rev: Sequence[mpfr],
    pi: mpfr,
) -> np.ndarray:
    """Chebyshev coefficients via samples at cos(k*pi/M), M = degree.

    A type-I DCT of extrema samples reconstructs any polynomial of degree
    at most M exactly; the even-extension trick routes it through rfft.
    """
    deg = len(newton) - 1
    if deg == 0:
        return np.array([float(newton[0])])
    zr = list(z)[::-1]
    samples = []
    for k in range(deg + 1):
        x = gmpy2.cos(pi * k / deg)
        if x >= 0:
            samples.append(float(_horner(z, newton, x)))
        else:
            samples.append(float(_horner(zr, newton_rev, x)))
    samples = np.array(samples)
    ext = np.concatenate([samples, samples[-2:0:-1]])
    spectrum = np.fft.rfft(ext).real[: deg + 1]
    coeffs = spectrum / deg
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    return coeffs


def _side(p: HermitePoly, x) -> Tuple[List[mpfr], List[mpfr]]:
    if x >= 0:
        return p.z, p.newton
    return p.z_rev, p.newton_rev


def eval_poly(p: HermitePoly, x) -> mpfr:
    """Newton-form nested evaluation at the polynomial's precision."""
    with gmpy2.context(precision=p.precision_bits):
        xx = mpfr(x)
        z, newton = _side(p, xx)
        return _horner(z, newton, xx)


def eval_poly_deriv(p: HermitePoly, x) -> Tuple[mpfr, mpfr]:
    """(value, first derivative) by the nested rule with a running derivative."""
    with gmpy2.context(precision=p.precision_bits):
        xx = mpfr(x)
        z, newton = _side(p, xx)
        acc = newton[-1]
        dacc = mpfr(0)
        for k in range(len(newton) - 2, -1, -1):
            dacc = dacc * (xx - z[k]) + acc
            acc = acc * (xx - z[k]) + newton[k]
        return acc, dacc


# ---------------------------------------------------------------------------
# Extremum scanning


@dataclass(frozen=True)
class Extremum:
    x: float
    value: float


@dataclass(frozen=True)
class ScanRow:
    kind: str
    size: int
    degree: int
    least_local_min: Optional[float]
    x_at_min: Optional[float]
    minima_count: int
    precision_bits: int


def local_minima(p: HermitePoly, lo: float, hi: float) -> List[Extremum]:
    """All strict local minima of p on the open interval (lo, hi).

    Sign changes of the derivative are bracketed on a Chebyshev-angle-
    uniform grid of 64*degree points, refined by bisection to 1e-12 in x;
    the value at each located minimum comes from the multiprecision Newton
    form.  Flatness at a critical point makes the double-precision
    placement error invisible at that tolerance.
    """
    dcoeffs = np.polynomial.chebyshev.chebder(p.cheb)
    count = max(64 * max(p.degree, 1), 256)
    theta = np.linspace(np.arccos(max(min(hi, 1.0), -1.0)),
                        np.arccos(max(min(lo, 1.0), -1.0)), count)
    xs = np.cos(theta)[::-1]  # ascending
    xs = xs[(xs > lo) & (xs < hi)]
    ds = np.polynomial.chebyshev.chebval(xs, dcoeffs)
    sign = np.sign(ds)
    out: List[Extremum] = []
    for i in np.nonzero((sign[:-1] < 0) & (sign[1:] > 0))[0]:
        a, b = xs[i], xs[i + 1]
        for _ in range(60):
            mid = 0.5 * (a + b)
            if np.polynomial.chebyshev.chebval(mid, dcoeffs) < 0:
                a = mid
            else:
                b = mid
            if b - a < 1e-12:
                break
        x_min = 0.5 * (a + b)
        out.append(Extremum(x=float(x_min), value=float(eval_poly(p, x_min))))
    return out


def _scan_interval(kind: str) -> Tuple[float, float]:
    # Majority minima of interest sit between the central node and 1;
    # ctrl minima can fall anywhere left of the rightmost node.
    if kind == "majority":
        return 0.0, 1.0
    if kind == "ctrl_phase":
        return -1.0, 1.0
    raise ValueError(f"unknown kind {kind!r}")


def least_local_min(
    kind: str, size: int, precision_bits: Optional[int] = None
) -> Optional[Extremum]:
    """Least interior local minimum, or None when no interior minimum
    exists (size 1 interpolates to the line A(x) = x)."""
    lo, hi = _scan_interval(kind)
    if kind == "majority":
        p = hermite_interpolate(majority_spec(size), precision_bits)
    else:
        p = hermite_interpolate(ctrl_phase_spec(size), precision_bits)
    minima = local_minima(p, lo, hi)
    if not minima:
        return None
    return min(minima, key=lambda e: e.value)


def scan(kind: str, sizes: Sequence[int], precision_bits: int) -> List[ScanRow]:
    lo, hi = _scan_interval(kind)
    rows = []
    for size in sizes:
        if kind == "majority":
            p = hermite_interpolate(majority_spec(size), precision_bits)
        else:
            p = hermite_interpolate(ctrl_phase_spec(size), precision_bits)
        minima = local_minima(p, lo, hi)
        least = min(minima, key=lambda e: e.value) if minima else None
        rows.append(
            ScanRow(
                kind=kind,
                size=size,
                degree=p.degree,
                least_local_min=None if least is None else least.value,
                x_at_min=None if least is None else least.x,
                minima_count=len(minima),
                precision_bits=precision_bits,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Shape checks


@dataclass
class ShapeReport:
    passed: bool
    tolerance: float
    failures: List[Tuple[str, float, float]]  # (check, x, value)


def lemma_shape_check(p: HermitePoly, grid_size: int = 512) -> ShapeReport:
    """Bounds the polynomial where the phase construction needs it:
    A <= 1 on [0, 1], A >= -1 on [-1, 0], |A| >= 1 on [-2, -1] and [1, 2],
    and a vanishing derivative at every interior node."""
    tol = 2.0 ** (-p.precision_bits / 4)
    failures: List[Tuple[str, float, float]] = []

    for x in np.linspace(0.0, 1.0, grid_size):
        v = float(eval_poly(p, x))
        if v > 1.0 + tol:
            failures.append(("upper bound on [0,1]", float(x), v))
    for x in np.linspace(-1.0, 0.0, grid_size):
        v = float(eval_poly(p, x))
        if v < -1.0 - tol:
            failures.append(("lower bound on [-1,0]", float(x), v))
    for x in np.linspace(1.0, 2.0, grid_size):
        v = float(eval_poly(p, x))
        if abs(v) < 1.0 - tol:
            failures.append(("outer growth on [1,2]", float(x), v))
    for x in np.linspace(-2.0, -1.0, grid_size):
        v = float(eval_poly(p, x))
        if abs(v) < 1.0 - tol:
            failures.append(("outer growth on [-2,-1]", float(x), v))
    scale = max(1.0, float(p.degree) ** 2)
    for i in range(1, len(p.z) - 1, 2):
        # z[1], z[3], ... are the first members of duplicated interior pairs.
        node = p.z[i]
        _, d = eval_poly_deriv(p, node)
        # The derivative of a polynomial bounded by 1 on [-1,1] can reach
        # degree^2, so the zero test scales with that.
        if abs(float(d)) > tol * scale:
            failures.append(("derivative at node", float(node), float(d)))
    return ShapeReport(passed=not failures, tolerance=tol, failures=failures)
