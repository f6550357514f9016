"""Signal-processing synthesis of encoded parity and weight-controlled phases.

The workhorse is a block-encoding of the support Hamiltonian
H = cos G, G = (pi/2)(1 - (1/L) sum_j Z_j), whose eigenvalue on a basis
state with w ones in the support is cos(pi w / L).  A product of 2L-1
phased iterates of that block-encoding applies the majority interpolant
A(H), which is exactly the encoded parity (+1 on minority-ones states,
-1 on majority-ones states) with the ancilla returned to |0>.

Each iterate is decomposed into one controlled Z-rotation per support
qubit plus single-qubit gates.  Writing the middle of the sandwich as a
diagonal, R_pi * prod_j ctrl-e^{-i pi Z_j / L} * prod_j e^{+i pi Z_j / 2L}
equals i * e^{-i G x Z_a}; conjugating by ancilla Hadamards and the
ancilla phases R_phi gives i * W_phi.  (Note the sign in the single-qubit
factors: e^{-i pi Z_j / 2L} in their place produces the conjugate
generator, off by e^{2iG}.)  The stray factor of i per iterate is an
overall phase on the full register and is not tracked.

Angle finding follows the layer-stripping route: complete the target A
with a polynomial Q satisfying |A|^2 + (1-x^2)|Q|^2 = 1 (its root
structure is known up to a quartet selection), then strip one iterate at
a time off the pair (A, Q), reading each phase from the ratio of leading
coefficients.  Everything runs at the interpolant's working precision;
a double-precision reconstruction residual at Chebyshev nodes gates the
output, with a Gauss-Newton fallback before giving up.

The weight-n controlled phase cannot come from phased iterates alone:
the upper block of any iterate product is a fixed-parity polynomial in
cos G, while the degree-(2n-1) interpolant through the weight targets
mixes parities (already at n = 2 it is x^3 - x^2 + 1).  Interleaving
general ancilla unitaries V_k restores full generality at the same query
count, so the controlled-phase program is
V_0 * prod_{k=1..2n-1} (e^{-i G X} * V_k), which costs n(2n-1)
controlled phases and O(n) single-qubit gates.  The V_k come from a
Laurent-polynomial factorization: writing the product as
e^{-i(2n-1)g} F(e^{2ig}) for a 2x2 polynomial F, the diagonal targets
pin F at the n-th roots of unity, the off-diagonal entry is completed by
spectral factorization on the unit circle, and F is peeled one linear
factor at a time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .circuits import Angle, GateProgram, negate_angle
from .config import ANGLE_FINDER_MAX_ITER, PHASE_DIGITS
from .hermite import HermitePoly


class AngleFindingError(RuntimeError):
    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class InfeasiblePolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class SupportSet:
    """Qubit indices carrying one encoded operator, plus its ancilla."""

    qubits: Tuple[int, ...]
    ancilla: Optional[int] = None
    register_size: Optional[int] = None

    def __post_init__(self):
        seen = set(self.qubits)
        if len(seen) != len(self.qubits):
            raise ValueError("support indices must be distinct")
        if self.ancilla is not None and self.ancilla in seen:
            raise ValueError("ancilla cannot sit inside the support")
        used = seen | ({self.ancilla} if self.ancilla is not None else set())
        if any(q < 0 for q in used):
            raise ValueError("qubit indices must be non-negative")
        if self.register_size is not None and used and max(used) >= self.register_size:
            raise ValueError("register too small for the given indices")

    @property
    def size(self) -> int:
        return len(self.qubits)

    @property
    def total(self) -> int:
        if self.register_size is not None:
            return self.register_size
        used = self.qubits + (() if self.ancilla is None else (self.ancilla,))
        return max(used) + 1 if used else 0


@dataclass(frozen=True)
class AngleSequence:
    """Iterate phases in gate-application order (first listed, first run),
    as decimal strings so programs serialize reproducibly."""

    phases: Tuple[str, ...]
    convention: str = "upper-block, application order"

    def __len__(self) -> int:
        return len(self.phases)


def _as_angle(phi) -> Angle:
    if isinstance(phi, (tuple, str)):
        return phi
    return f"{float(phi):.17g}"


def build_phased_iterate(
    s: SupportSet, phi, *, control: Optional[int] = None
) -> GateProgram:
    """One phased iterate (equal to i * W_phi as a matrix).

    With ``control`` set, the diagonal middle of the sandwich is lifted to
    one more control; the outer ancilla gates cancel on their own when the
    control is off, so they stay uncontrolled.
    """
    if s.size % 2 == 0:
        raise ValueError("invalid support: size must be odd")
    if s.ancilla is None:
        raise ValueError("invalid support: iterate needs an ancilla")
    size = s.total if control is None else max(s.total, control + 1)
    prog = GateProgram(size, ancillas=(s.ancilla,))
    _append_iterate(prog, s, _as_angle(phi), control)
    return prog


def _append_iterate(
    prog: GateProgram, s: SupportSet, phi: Angle, control: Optional[int]
) -> None:
    L = s.size
    a = s.ancilla
    prog.add("phase", a, angle=negate_angle(phi))
    prog.add("h", a)
    for j in s.qubits:
        if control is None:
            prog.add("rz", j, angle=(-1, L))
        else:
            prog.add("ctrl_rz", j, controls=control, angle=(-1, L))
    for j in s.qubits:
        if control is None:
            prog.add("ctrl_rz", j, controls=a, angle=(2, L))
        else:
            prog.add("cctrl_rz", j, controls=(a, control), angle=(2, L))
    if control is None:
        prog.add("phase", a, angle=(1, 1))
    else:
        prog.add("ctrl_phase", a, controls=control, angle=(1, 1))
    prog.add("h", a)
    prog.add("phase", a, angle=phi)


def synth_parity(
    s: SupportSet, angles: AngleSequence, *, control: Optional[int] = None
) -> GateProgram:
    """Encoded parity on the support: phase -1 exactly on majority-ones
    basis states, ancilla restored.  Global phase i^(2L-1) untracked; with
    ``control`` set the phase is compensated so the controlled program is
    exact."""
    if len(angles) != 2 * s.size - 1:
        raise ValueError(
            f"angle sequence of length {len(angles)} does not fit support "
            f"size {s.size} (need {2 * s.size - 1})"
        )
    size = s.total if control is None else max(s.total, control + 1)
    prog = GateProgram(size, ancillas=(s.ancilla,) if s.ancilla is not None else ())
    for phi in angles.phases:
        _append_iterate(prog, s, phi, control)
    if control is not None:
        # cancel the i per iterate, which is now conditioned on the control
        comp = (-(2 * s.size - 1)) % 4
        if comp:
            prog.add("phase", control, angle=(comp, 2))
    return prog


def synth_encoded_x(s: SupportSet) -> GateProgram:
    """Bit flips across the support; the encoded X string."""
    prog = GateProgram(s.total)
    for j in s.qubits:
        prog.add("x", j)
    return prog


# ---------------------------------------------------------------------------
# Angle finding for definite-parity targets


def find_qsp_angles(p: HermitePoly) -> AngleSequence:
    """Phases realizing p as the ancilla-|0> block of an iterate product."""
    if p.degree < 1:
        raise InfeasiblePolynomialError("constant targets have no iterate product")
    _check_feasible(p)
    prec = max(256, p.precision_bits)
    with mpmath.workprec(prec):
        coeffs = _monomial_coeffs(p)
        qpoly = _complete(p, coeffs)
        phis = _strip_layers(coeffs, qpoly)
    phis_f = [float(x) for x in phis]
    residual = _reconstruction_residual(p, phis_f)
    if residual > 1e-9:
        phis_f = _refine_angles(p, phis_f)
        residual = _reconstruction_residual(p, phis_f)
        if residual > 1e-8:
            raise AngleFindingError("angle finding failed to converge", residual)
        phases = tuple(f"{x:.17g}" for x in phis_f)
    else:
        phases = tuple(mpmath.nstr(x, PHASE_DIGITS) for x in phis)
    return AngleSequence(phases=phases)


def _check_feasible(p: HermitePoly) -> None:
    xs = np.cos(np.linspace(0.0, np.pi, 1024))
    vals = np.polynomial.chebyshev.chebval(xs, p.cheb)
    if np.max(np.abs(vals)) > 1 + 1e-8:
        raise InfeasiblePolynomialError(
            "polynomial exceeds 1 in magnitude on [-1, 1]"
        )
    n = len(p.cheb) - 1
    scale = np.max(np.abs(p.cheb))
    wrong = p.cheb[(n - 1) % 2 :: 2]
    if wrong.size and np.max(np.abs(wrong)) > 1e-8 * scale:
        raise InfeasiblePolynomialError(
            "mixed-parity polynomial cannot come from an iterate product"
        )


def _mpf_of(x) -> mpmath.mpf:
    num, den = x.as_integer_ratio()
    return mpmath.mpf(num) / den


def _monomial_coeffs(p: HermitePoly) -> List[mpmath.mpf]:
    """Expand the Newton form; enforce the target parity exactly."""
    z = [_mpf_of(v) for v in p.z]
    newton = [_mpf_of(v) for v in p.newton]
    coeffs = [newton[-1]]
    for k in range(len(newton) - 2, -1, -1):
        nxt = [mpmath.mpf(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= z[k] * c
        nxt[0] += newton[k]
        coeffs = nxt
    n = len(coeffs) - 1
    for i in range(len(coeffs)):
        if (n - i) % 2:
            coeffs[i] = mpmath.mpf(0)
    return coeffs


def _deflate(poly: Sequence, root) -> Tuple[list, object]:
    """Divide by (x - root); ascending coefficients, returns remainder."""
    acc = poly[-1]
    out = [acc]
    for c in reversed(list(poly[:-1])):
        acc = c + root * acc
        out.append(acc)
    rem = out.pop()
    return out[::-1], rem


def _complete(p: HermitePoly, a: List[mpmath.mpf]) -> List[mpmath.mpc]:
    """Q with |A|^2 + (1-x^2)|Q|^2 = 1: known real roots at the interior
    nodes, the rest one negation-closed half of a quartet structure."""
    n = len(a) - 1
    one_minus = [-c for c in _poly_mul(a, a)]
    one_minus[0] += 1
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 3)
    q1, r1 = _deflate(one_minus, mpmath.mpf(1))
    q2, r2 = _deflate(q1, mpmath.mpf(-1))
    if abs(r1) > tol or abs(r2) > tol:
        raise AngleFindingError(
            "target does not reach +-1 at the edges", float(abs(r1) + abs(r2))
        )
    s_poly = [-c for c in q2]
    size = p.size
    for m in range(1, size):
        node = mpmath.cos(mpmath.pi * m / size)
        for _ in range(2):
            s_poly, rem = _deflate(s_poly, node)
            if abs(rem) > tol * max(1, abs(s_poly[0])):
                raise AngleFindingError(
                    "interior node is not a double root", float(abs(rem))
                )
    lead = a[-1]
    if s_poly:
        roots = mpmath.polyroots(
            [mpmath.mpc(c) for c in reversed(s_poly)],
            maxsteps=200,
            extraprec=mpmath.mp.prec // 2,
        )
    else:
        roots = []
    selected = _select_half(roots)
    q = [mpmath.mpc(abs(lead))]
    for m in range(1, size):
        q = _poly_mul_linear(q, mpmath.mpc(mpmath.cos(mpmath.pi * m / size)))
    for r in selected:
        q = _poly_mul_linear(q, r)
    _norm_identity_check(a, q)
    return q


def _select_half(roots: List[mpmath.mpc]) -> List[mpmath.mpc]:
    pool = list(roots)
    real_tol = mpmath.mpf(10) ** (-mpmath.mp.dps // 3)
    for r in pool:
        if abs(mpmath.im(r)) < real_tol * (1 + abs(r)):
            raise InfeasiblePolynomialError(
                "completion has a real root; |A| dips below 1 outside [-1, 1]"
            )
    selected: List[mpmath.mpc] = []

    def pop_near(target):
        best = min(range(len(pool)), key=lambda i: abs(pool[i] - target))
        if abs(pool[best] - target) > 1e-6 * (1 + abs(target)):
            raise AngleFindingError("completion roots do not pair into quartets")
        return pool.pop(best)

    while pool:
        z = pool.pop(0)
        minus = pop_near(-z)
        pop_near(mpmath.conj(z))
        pop_near(mpmath.conj(minus))
        selected += [z, minus]
    return selected


def _poly_mul(a: Sequence, b: Sequence) -> list:
    out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_mul_linear(poly: list, root) -> list:
    out = [mpmath.mpc(0)] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] += c
        out[i] -= root * c
    return out


def _norm_identity_check(a, q) -> None:
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 4)
    for x in (mpmath.mpf("0.31"), mpmath.mpf("-0.77")):
        av = mpmath.polyval([mpmath.mpf(c) for c in reversed(a)], x)
        qv = mpmath.polyval(list(reversed(q)), x)
        total = av * av + (1 - x * x) * abs(qv) ** 2
        if abs(total - 1) > tol:
            raise AngleFindingError(
                "completion does not satisfy the norm identity",
                float(abs(total - 1)),
            )


def _strip_layers(a: List[mpmath.mpf], q: List[mpmath.mpc]) -> List[mpmath.mpf]:
    """Remove one iterate per step; collected phases are in application
    order (last factor of the matrix product comes off first)."""
    P = [mpmath.mpc(c) for c in a]
    Q = list(q)
    phis: List[mpmath.mpf] = []
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec // 3)
    for k in range(len(a) - 1, 0, -1):
        if abs(Q[-1]) < tol * max(1, abs(P[-1])):
            raise AngleFindingError("leading coefficient vanished while stripping")
        e = P[-1] / Q[-1]
        e = e / abs(e)
        phis.append(mpmath.arg(e))
        newP = [mpmath.mpc(0)] * (k + 2)
        for i, c in enumerate(P):
            newP[i + 1] += c
        for i, c in enumerate(Q):
            newP[i] += e * c
            newP[i + 2] -= e * c
        newQ = [mpmath.mpc(0)] * (k + 1)
        for i, c in enumerate(Q):
            newQ[i + 1] += c
        for i, c in enumerate(P):
            newQ[i] -= mpmath.conj(e) * c
        scale = max(1, max(abs(c) for c in P))
        if abs(newP[-1]) > 1e-6 * scale or abs(newP[-2]) > 1e-6 * scale:
            raise AngleFindingError(
                "degree did not drop while stripping", float(abs(newP[-1]))
            )
        P = newP[:k]
        Q = newQ[: k - 1]
    if abs(P[0] - 1) > 1e-6:
        raise AngleFindingError("stripping left a nontrivial phase", float(abs(P[0] - 1)))
    return phis


def _iterate_matrix(phi: float, lam: float) -> np.ndarray:
    s = math.sqrt(max(0.0, 1.0 - lam * lam))
    return np.array(
        [
            [lam, -1j * s * cmath.exp(-1j * phi)],
            [-1j * s * cmath.exp(1j * phi), lam],
        ]
    )


def _block_values(phis_applied: Sequence[float], lams: np.ndarray) -> np.ndarray:
    out = np.empty(len(lams), dtype=complex)
    for i, lam in enumerate(lams):
        u = np.eye(2, dtype=complex)
        for phi in phis_applied:
            u = _iterate_matrix(phi, lam) @ u
        out[i] = u[0, 0]
    return out


def _reconstruction_residual(p: HermitePoly, phis: Sequence[float]) -> float:
    lams = np.cos(np.linspace(0.05, np.pi - 0.05, 64))
    target = np.polynomial.chebyshev.chebval(lams, p.cheb)
    got = _block_values(phis, lams)
    return float(np.max(np.abs(got - target)))


def _refine_angles(p: HermitePoly, phis: List[float]) -> List[float]:
    lams = np.cos(np.linspace(0.05, np.pi - 0.05, 64))
    target = np.polynomial.chebyshev.chebval(lams, p.cheb)

    def residvec(ph):
        diff = _block_values(ph, lams) - target
        return np.concatenate([diff.real, diff.imag])

    ph = np.array(phis, dtype=float)
    for _ in range(ANGLE_FINDER_MAX_ITER):
        r = residvec(ph)
        if np.max(np.abs(r)) < 1e-12:
            break
        jac = np.empty((len(r), len(ph)))
        for k in range(len(ph)):
            bumped = ph.copy()
            bumped[k] += 1e-7
            jac[:, k] = (residvec(bumped) - r) / 1e-7
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        ph = ph + step
    return list(ph)


# ---------------------------------------------------------------------------
# Weight-controlled phase via interleaved ancilla unitaries


def synth_multi_ctrl_phase(n: int) -> GateProgram:
    """Phase -1 exactly when all n qubits are 1, built from 2n-1 queries
    to the weight block-encoding with general ancilla unitaries between
    them: n(2n-1) controlled phases, O(n) single-qubit gates, one
    ancilla (qubit n)."""
    if n < 1:
        raise ValueError("need at least one controlling qubit")
    if n == 1:
        return GateProgram(1).add("phase", 0, angle=(1, 1))
    vs, residual = _interleaved_unitaries(n)
    if residual > 1e-10:
        raise AngleFindingError("controlled-phase synthesis did not converge", residual)
    prog = GateProgram(n + 1, ancillas=(n,))
    a = n
    total_phase = 0.0
    # The per-query single-qubit support rotations commute with everything
    # else in the program, so all 2n-1 copies are merged into one layer.
    for j in range(n):
        prog.add("rz", j, angle=(-(2 * n - 1), n))
    total_phase += _emit_su2(prog, a, vs[2 * n - 1])
    for k in range(2 * n - 2, -1, -1):
        prog.add("h", a)
        for j in range(n):
            prog.add("ctrl_rz", j, controls=a, angle=(2, n))
        prog.add("phase", a, angle=(1, 1))
        prog.add("h", a)
        total_phase += math.pi / 2  # the i in i * e^{-iGX}
        total_phase += _emit_su2(prog, a, vs[k])
    # exact global-phase cancellation: rz and phase on the ancilla combine
    # to a multiple of the identity
    if abs(total_phase) > 1e-15:
        prog.add("rz", a, angle=f"{2 * total_phase:.17g}")
        prog.add("phase", a, angle=f"{-2 * total_phase:.17g}")
    return prog


def _emit_su2(prog: GateProgram, a: int, v: np.ndarray) -> float:
    """Append v (2x2 unitary) as Rz-Rx-Rz on qubit a; returns the global
    phase left for the caller to fold in."""
    delta, alpha, beta, gamma = _euler_zxz(v)
    for angle, flank in ((gamma, False), (beta, True), (alpha, False)):
        if abs(angle) < 1e-15:
            continue
        if flank:
            prog.add("h", a)
        prog.add("rz", a, angle=f"{angle:.17g}")
        if flank:
            prog.add("h", a)
    return delta


def _euler_zxz(v: np.ndarray) -> Tuple[float, float, float, float]:
    delta = 0.5 * cmath.phase(np.linalg.det(v))
    su = v * cmath.exp(-1j * delta)
    av, bv = su[0, 0], su[0, 1]
    beta = 2 * math.atan2(abs(bv), abs(av))
    total = -2 * cmath.phase(av) if abs(av) > 1e-12 else 0.0
    diff = (-2 * (cmath.phase(bv) + math.pi / 2)) if abs(bv) > 1e-12 else 0.0
    alpha = (total + diff) / 2
    gamma = (total - diff) / 2
    rz = lambda t: np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t)])
    rx = lambda t: np.array(
        [
            [math.cos(t / 2), -1j * math.sin(t / 2)],
            [-1j * math.sin(t / 2), math.cos(t / 2)],
        ]
    )
    rebuilt = cmath.exp(1j * delta) * rz(alpha) @ rx(beta) @ rz(gamma)
    if np.max(np.abs(rebuilt - v)) > 1e-9:
        raise AngleFindingError("Euler decomposition failed")
    return delta, alpha, beta, gamma


def _interleaved_unitaries(n: int) -> Tuple[List[np.ndarray], float]:
    b = _minimax_diagonal(n)
    c = _circle_completion(n, b)
    vs = _peel_factors(n, b, c)
    return _polish(n, vs)


def _minimax_diagonal(n: int) -> np.ndarray:
    """Degree-(2n-1) polynomial with B(zeta_w) = e^{-i pi w / n} at the
    n-th roots of unity and max |B| on the circle pushed down to 1.

    |B| = 1 at the nodes by construction, so those are maxima of the
    minimax solution and |B|^2 must be tangent there; the tangency is
    enforced exactly (it is real-linear in the free coefficients, and the
    completion step divides by the node factors twice), with a
    Lawson-weighted least squares handling the rest of the circle."""
    j = np.arange(n)
    b0 = np.zeros(2 * n, dtype=complex)
    b0[:n] = (2.0 / n) / (1.0 - np.exp(-1j * np.pi * (2 * j + 1) / n))
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    tau = np.exp(-1j * np.pi * np.arange(n) / n)
    db0 = np.array(
        [sum(k * b0[k] * z ** (k - 1) for k in range(1, 2 * n)) for z in nodes]
    )
    kappa = 1j * nodes * np.conj(tau)
    # d|B|^2/dtheta = 0 at each node, as rows over (Re T, Im T)
    coef = n * kappa[:, None] * nodes[:, None] ** (n + np.arange(n)[None, :] - 1)
    constraint = np.concatenate([coef.real, -coef.imag], axis=1)
    rhs = -(kappa * db0).real
    x_part, *_ = np.linalg.lstsq(constraint, rhs, rcond=None)
    _, sv, vh = np.linalg.svd(constraint)
    null = vh[len(sv) :].T if len(sv) < 2 * n else vh[np.sum(sv > 1e-10 * sv[0]) :].T
    grid = np.exp(2j * np.pi * (np.arange(128 * n) + 0.5) / (128 * n))
    vander = grid[:, None] ** np.arange(2 * n)[None, :]
    factor = grid**n - 1.0
    cols = factor[:, None] * grid[:, None] ** np.arange(n)[None, :]
    cmap = np.concatenate([cols, 1j * cols], axis=1)  # real params -> values
    base = vander @ b0 + cmap @ x_part
    reduced = cmap @ null
    w = np.ones(len(grid))
    u = np.zeros(null.shape[1])
    for _ in range(300):
        sw = np.sqrt(w)
        design = np.concatenate([sw[:, None] * reduced.real, sw[:, None] * reduced.imag])
        target = -np.concatenate([sw * base.real, sw * base.imag])
        u, *_ = np.linalg.lstsq(design, target, rcond=None)
        resid = np.abs(base + reduced @ u)
        w = w * np.maximum(resid, 1e-14)
        w = w / np.sum(w)
    x = x_part + null @ u
    t = x[:n] + 1j * x[n:]
    return b0 + _shift_mul(t, n)


def _shift_mul(t: np.ndarray, n: int) -> np.ndarray:
    """(zeta^n - 1) * T as length-2n ascending coefficients."""
    out = np.zeros(2 * n, dtype=complex)
    out[: len(t)] -= t
    out[n : n + len(t)] += t
    return out


def _conj_reversal(poly: np.ndarray) -> np.ndarray:
    return np.conj(poly)[::-1]


def _circle_completion(n: int, b: np.ndarray) -> np.ndarray:
    """C with B B~ + C C~ = zeta^(2n-1): the known (zeta^n - 1) factor is
    divided out first so the remaining spectral factorization has no
    roots pinned on the circle."""
    s = -np.convolve(b, _conj_reversal(b))
    s[2 * n - 1] += 1.0
    zn1 = np.zeros(n + 1, dtype=complex)
    zn1[0], zn1[n] = -1.0, 1.0
    quot, rem = _polydiv_asc(s, zn1)
    if np.max(np.abs(rem)) > 1e-6:
        raise AngleFindingError(
            "diagonal target misses its interpolation nodes",
            float(np.max(np.abs(rem))),
        )
    quot2, rem2 = _polydiv_asc(quot, zn1)
    if np.max(np.abs(rem2)) > 1e-6:
        raise AngleFindingError(
            "circle tangency is not second order", float(np.max(np.abs(rem2)))
        )
    target = -quot2  # equals C_r C_r~ as polynomials
    trimmed = target.copy()
    top = np.max(np.abs(trimmed))
    while len(trimmed) > 1 and abs(trimmed[-1]) < 1e-10 * top:
        trimmed = trimmed[:-1]
    roots = np.roots(trimmed[::-1])
    inside = [r for r in roots if abs(r) < 1.0]
    if len(inside) != (len(trimmed) - 1) // 2:
        raise AngleFindingError("completion root selection is unbalanced")
    cr_monic = np.poly(inside)[::-1].astype(complex) if inside else np.ones(1, complex)
    probes = np.exp(1j * np.array([0.37, 1.91, 3.3, 5.1]))
    ratios = []
    for z in probes:
        denom = abs(np.polyval(cr_monic[::-1], z)) ** 2
        num = -np.polyval(quot2[::-1], z) / z ** (len(cr_monic) - 1)
        ratios.append((num / denom).real)
    scale = float(np.median(ratios))
    if scale <= 0:
        raise AngleFindingError("completion scale came out non-positive", scale)
    cr = math.sqrt(scale) * cr_monic
    c = np.convolve(zn1, cr)
    out = np.zeros(2 * n, dtype=complex)
    out[: len(c)] = c
    return out


def _polydiv_asc(num: np.ndarray, den: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    q, r = np.polydiv(num[::-1], den[::-1])
    return np.atleast_1d(q)[::-1].astype(complex), np.atleast_1d(r)[::-1].astype(complex)


_P_PLUS = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
_P_MINUS = 0.5 * np.array([[1, -1], [-1, 1]], dtype=complex)


def _peel_factors(n: int, b: np.ndarray, c: np.ndarray) -> List[np.ndarray]:
    """Factor F(zeta) = V_0 (P+ + zeta P-) V_1 ... V_(2n-1)."""
    bt = _conj_reversal(b)
    ct = _conj_reversal(c)
    f = np.zeros((2 * n, 2, 2), dtype=complex)
    f[:, 0, 0] = b
    f[:, 0, 1] = c
    f[:, 1, 0] = -ct
    f[:, 1, 1] = bt
    vs: List[np.ndarray] = []
    for j in range(2 * n - 1, 0, -1):
        a0, atop = f[0], f[j]
        v_minus = np.linalg.svd(a0)[0][:, 1]
        v_plus = np.linalg.svd(atop)[0][:, 1]
        v_plus = v_plus - (v_minus.conj() @ v_plus) * v_minus
        norm = np.linalg.norm(v_plus)
        if norm < 1e-8:
            raise AngleFindingError("peeling produced parallel kernel vectors")
        v_plus /= norm
        plus = np.array([1, 1]) / math.sqrt(2)
        minus = np.array([1, -1]) / math.sqrt(2)
        v = np.outer(v_plus, plus) + np.outer(v_minus, minus)
        vs.append(v)
        g = np.einsum("ab,kbc->kac", v.conj().T, f[: j + 1])
        nf = np.zeros((j, 2, 2), dtype=complex)
        for k in range(j):
            nf[k] = _P_PLUS @ g[k] + _P_MINUS @ g[k + 1]
        f = nf
    u, _, vh = np.linalg.svd(f[0])
    vs.append(u @ vh)
    return vs


def _query_matrix(g: float) -> np.ndarray:
    return np.array(
        [
            [math.cos(g), -1j * math.sin(g)],
            [-1j * math.sin(g), math.cos(g)],
        ]
    )


def _chain(vs: List[np.ndarray], g: float) -> np.ndarray:
    u = vs[0]
    for v in vs[1:]:
        u = u @ _query_matrix(g) @ v
    return u


def _polish(n: int, vs: List[np.ndarray]) -> Tuple[List[np.ndarray], float]:
    """Gauss-Newton on the Euler parameters, pinning the product to
    t_w * identity at every weight."""
    params = []
    for v in vs:
        params.extend(_euler_zxz(v))
    params = np.array(params)

    def rebuild(p):
        out = []
        rz = lambda t: np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t)])
        for i in range(0, len(p), 4):
            d, al, be, ga = p[i : i + 4]
            rx = np.array(
                [
                    [math.cos(be / 2), -1j * math.sin(be / 2)],
                    [-1j * math.sin(be / 2), math.cos(be / 2)],
                ]
            )
            out.append(cmath.exp(1j * d) * (rz(al) @ rx @ rz(ga)))
        return out

    def residvec(p):
        mats = rebuild(p)
        r = []
        for w in range(n + 1):
            g = math.pi * w / n
            t = 1.0 if w < n else -1.0
            diff = _chain(mats, g) - t * np.eye(2)
            r.append(diff.ravel())
        vecs = np.concatenate(r)
        return np.concatenate([vecs.real, vecs.imag])

    r = residvec(params)
    for _ in range(ANGLE_FINDER_MAX_ITER):
        if np.max(np.abs(r)) < 1e-13:
            break
        jac = np.empty((len(r), len(params)))
        for k in range(len(params)):
            bumped = params.copy()
            bumped[k] += 1e-7
            jac[:, k] = (residvec(bumped) - r) / 1e-7
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        new_params = params + step
        new_r = residvec(new_params)
        if np.max(np.abs(new_r)) >= np.max(np.abs(r)):
            step *= 0.5
            new_params = params + step
            new_r = residvec(new_params)
            if np.max(np.abs(new_r)) >= np.max(np.abs(r)):
                break
        params, r = new_params, new_r
    return rebuild(params), float(np.max(np.abs(r)))
