"""Interpolation tests pinned to closed forms and a dense linear solve."""

import numpy as np
import pytest

from fermicode.hermite import (
    Extremum,
    ctrl_phase_poly,
    ctrl_phase_spec,
    default_precision,
    eval_poly,
    eval_poly_deriv,
    hermite_interpolate,
    least_local_min,
    lemma_shape_check,
    local_minima,
    majority_poly,
    majority_spec,
    scan,
)


def closed_form_l3(x):
    # Degree-5 majority interpolant for L = 3, solved by hand.
    return (32 * x**5 - 52 * x**3 + 29 * x) / 9


def closed_form_n2(x):
    # Degree-3 ctrl interpolant for n = 2: nodes 1, 0, -1 with values
    # 1, 1, -1 and a flat point at 0.
    return x**3 - x**2 + 1


def chebyshev_system_solve(kind, size):
    """Independent oracle: solve the interpolation conditions directly in
    the Chebyshev basis with numpy."""
    if kind == "majority":
        spec = majority_spec(size)
    else:
        spec = ctrl_phase_spec(size)
    nodes = np.cos(np.pi * np.array(spec.angle_numerators) / size)
    values = np.array(spec.values, dtype=float)
    deg = 2 * (len(nodes) - 1) - 1
    rows = []
    rhs = []
    for x, v in zip(nodes, values):
        rows.append([np.polynomial.chebyshev.chebval(x, unit(j, deg)) for j in range(deg + 1)])
        rhs.append(v)
    for x in nodes[1:-1]:
        rows.append(
            [
                np.polynomial.chebyshev.chebval(x, np.polynomial.chebyshev.chebder(unit(j, deg)))
                for j in range(deg + 1)
            ]
        )
        rhs.append(0.0)
    return np.linalg.solve(np.array(rows), np.array(rhs))


def unit(j, deg):
    e = np.zeros(deg + 1)
    e[j] = 1.0
    return e


def test_l3_matches_closed_form():
    p = majority_poly(3)
    for x in np.linspace(-1.5, 1.5, 41):
        assert abs(float(eval_poly(p, x)) - closed_form_l3(x)) < 1e-12


def test_n2_matches_closed_form():
    p = ctrl_phase_poly(2)
    for x in np.linspace(-1.2, 1.2, 31):
        assert abs(float(eval_poly(p, x)) - closed_form_n2(x)) < 1e-12


@pytest.mark.parametrize("kind,size", [
    ("majority", 3), ("majority", 5), ("majority", 7),
    ("ctrl_phase", 2), ("ctrl_phase", 4), ("ctrl_phase", 7),
])
def test_against_dense_solve(kind, size):
    coeffs = chebyshev_system_solve(kind, size)
    if kind == "majority":
        p = majority_poly(size)
    else:
        p = ctrl_phase_poly(size)
    assert np.allclose(p.cheb, coeffs, atol=1e-8)


@pytest.mark.parametrize("size", [3, 5, 9, 15])
def test_nodes_reproduced(size):
    p = majority_poly(size)
    for m in range(size + 1):
        x = np.cos(np.pi * m / size)
        want = 1.0 if m <= size // 2 else -1.0
        v, d = eval_poly_deriv(p, x)
        assert abs(float(v) - want) < 1e-10
        if 0 < m < size:
            # interior nodes are flat points
            assert abs(float(d)) < 1e-8 * size**2


def test_majority_is_odd():
    p = majority_poly(7)
    for x in np.linspace(0.05, 1.4, 17):
        assert abs(float(eval_poly(p, x)) + float(eval_poly(p, -x))) < 1e-12


def test_coefficient_counts():
    for L in (1, 3, 5, 11):
        p = majority_poly(L)
        assert len(p.newton) == 2 * L
        assert p.degree == len(p.cheb) - 1
    assert len(majority_poly(5).newton) == 10
    assert len(ctrl_phase_poly(3).newton) == 6


def test_reversed_coefficients_same_polynomial():
    p = ctrl_phase_poly(5)
    for x in np.linspace(-0.99, 0.99, 21):
        v, _ = eval_poly_deriv(p, x)
        assert abs(float(eval_poly(p, x)) - float(v)) < 1e-13
    # both orderings are evaluated through the sign split; cross-check
    # against the double-precision Chebyshev resampling
    for x in np.linspace(-0.95, 0.95, 21):
        assert abs(
            float(eval_poly(p, x)) - np.polynomial.chebyshev.chebval(x, p.cheb)
        ) < 1e-12


def test_least_min_l3():
    m = least_local_min("majority", 3)
    x_star = np.sqrt(0.725)  # root of 160 x^4 - 156 x^2 + 29 in (0.7, 1)
    assert abs(m.x - x_star) < 1e-9
    assert abs(m.value - closed_form_l3(x_star)) < 1e-12


def test_least_min_n2():
    m = least_local_min("ctrl_phase", 2)
    assert abs(m.x - 2 / 3) < 1e-9
    assert abs(m.value - 23 / 27) < 1e-12


def test_no_interior_minimum_at_size_one():
    assert least_local_min("majority", 1) is None
    assert least_local_min("ctrl_phase", 1) is None


def test_small_ctrl_minima_sit_below_plateau():
    # the first few sizes dip well under the large-n plateau near 0.905
    values = {n: least_local_min("ctrl_phase", n).value for n in (2, 3, 4, 5, 6)}
    assert abs(values[2] - 23 / 27) < 1e-12
    assert abs(values[3] - 0.8855867478487971) < 1e-9
    assert abs(values[4] - 0.8949743897208752) < 1e-9
    assert abs(values[5] - 0.8989786527064724) < 1e-9
    assert values[5] < 0.9 < values[6]
    assert all(values[n] < values[n + 1] for n in (2, 3, 4, 5))


def test_ctrl_least_min_is_leftmost():
    for n in (3, 5, 8):
        p = ctrl_phase_poly(n)
        minima = local_minima(p, -1.0, 1.0)
        least = min(minima, key=lambda e: e.value)
        leftmost = min(minima, key=lambda e: e.x)
        assert least == leftmost


def test_scan_rows():
    rows = scan("majority", [3, 5, 7], 256)
    assert [r.size for r in rows] == [3, 5, 7]
    assert rows[0].degree == 5
    assert abs(rows[0].least_local_min - 0.7682145405073465) < 1e-12
    vals = [r.least_local_min for r in rows]
    assert vals == sorted(vals)
    assert all(r.precision_bits == 256 for r in rows)
    assert all(r.minima_count >= 1 for r in rows)


def test_shape_check_passes():
    for L in (3, 5, 9):
        assert lemma_shape_check(majority_poly(L)).passed
    for n in (2, 3, 5):
        assert lemma_shape_check(ctrl_phase_poly(n)).passed


def test_shape_check_catches_perturbation():
    p = majority_poly(5)
    p.newton[4] += 1e-6
    report = lemma_shape_check(p)
    assert not report.passed
    check, x, value = report.failures[0]
    assert isinstance(check, str) and isinstance(value, float)


def test_default_precision():
    assert majority_poly(3).precision_bits == 256
    assert majority_poly(101).precision_bits == default_precision(201) == 1608


def test_invalid_inputs():
    with pytest.raises(ValueError, match="odd"):
        majority_spec(4)
    with pytest.raises(ValueError, match="64"):
        hermite_interpolate(majority_spec(3), precision_bits=32)
    with pytest.raises(ValueError, match="limit"):
        hermite_interpolate(majority_spec(3), precision_bits=1 << 21)
    with pytest.raises(ValueError):
        ctrl_phase_spec(0)
    with pytest.raises(ValueError, match="kind"):
        least_local_min("parity", 3)
