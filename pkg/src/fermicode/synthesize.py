"""Second-quantized term ingestion and whole-operator gate synthesis.

This module turns a textual fermionic Hamiltonian into encoded gate
programs.  The pipeline is

    parse_hamiltonian -> majorana_decompose -> encode_term -> synth_*

Each creation/annihilation operator is rewritten in terms of the two
Hermitian unitaries per mode,

    even_j = a_j^dag + a_j        odd_j = i (a_j^dag - a_j),

so a_j = (even_j + i odd_j) / 2 and a_j^dag = (even_j - i odd_j) / 2.
Products of these expand into monomials in the even/odd operators, which
are canonically ordered (ascending mode, even before odd) by tracking
anticommutation signs and cancelling squared factors.  A worked example:
a_0^dag a_0 collects to (identity + i even_0 odd_0) / 2, which the dense
2x2 check confirms is the number operator.

Each surviving monomial maps to a Pauli support on the stored bits, and
the support lowers to gates: a parity block per Z bit (see qsp) and a
codeword-wide X string per X bit.  Rotations exp(i theta T) use one extra
ancilla b: H_b, ctrl-T, H_b realizes a reflection that, together with a
phase on b and a second ctrl-T sandwich, gives exp(i theta T) up to the
global phase exp(-i theta).  Every singly-controlled gate inside T picks
up one more control, so the rotation costs exactly twice the controlled
count of T in doubly-controlled gates.

The hop gate on modes (i, j) composes a controlled phase (-1 on doubly
occupied states; three controlled fermionic-Z applications and four
Hadamards on b) with six rotations generated by fermionic Z_i, Z_j and
X_i X_j.  Under the stored-bit mapping these generators are phase-free:
fermionic Z_i is Z on {i} union children(i), and X_i X_j flips the
symmetric difference of the two update sets.  Sign care: conjugating X by
exp(i pi Z / 4) yields -Y, so the Z_j-conjugated block needs angles
(-pi/4, +pi/4) and the Z_i block (+pi/4, -pi/4) for the two cross terms
to come out as exp(i phi XY/2) exp(-i phi YX/2), the phased swap.  The
intermediate states of the X-string rotations can hold two extra
fermions, which is why codes meant for hop synthesis should be derived
with the add_four_margin flag.

Register layout: code qubits [0, Q), QSP ancilla a = Q, rotation/hop
ancilla b = Q + 1.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from .circuits import Angle, CostRecord, GateProgram, angle_value, count_gates, parse_angle
from .codes import CodeParams, elementary_codeword, iter_bits
from .fenwick import (
    PauliSupport,
    children_set,
    fenwick_tree,
    majorana_support,
    pauli_product,
    update_set,
)
from .hermite import majority_poly
from .qsp import AngleSequence, SupportSet, find_qsp_angles, synth_encoded_x, synth_parity

COLLECT_TOL = 1e-12


@dataclass(frozen=True)
class FermionTerm:
    """One normal-ordered term: coefficient * prod(a^dag) * prod(a)."""

    coefficient: float
    creators: Tuple[int, ...]
    annihilators: Tuple[int, ...]

    def conjugate_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return (
            tuple(reversed(self.annihilators)),
            tuple(reversed(self.creators)),
        )


@dataclass(frozen=True)
class MajoranaMonomial:
    """A complex multiple of an ordered product of even/odd operators."""

    coefficient: complex
    factors: Tuple[Tuple[int, str], ...]


@dataclass(frozen=True)
class EncodedTerm:
    """A Pauli term h_P * P lowered to gates.

    ``pauli.phase`` is the unit i^k that makes the support Hermitian;
    ``coefficient`` is the real h_P.  The program implements the bare
    X/Z action (the unit phase is a global factor there; the controlled
    lowering in synth_rotation tracks it exactly).
    """

    pauli: PauliSupport
    coefficient: float
    program: GateProgram


_OP_TOKEN = re.compile(r"(\d+)(\^?)$")


def parse_hamiltonian(text: str, *, audit: bool = False) -> List[FermionTerm]:
    """Parse lines of the form ``coeff : i^ j^ k l`` (carets mark creators).

    Blank lines and ``#`` comments are skipped.  With ``audit`` set, every
    term's Hermitian conjugate must appear with the same coefficient.
    """
    terms: List[FermionTerm] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'coeff : operators'")
        try:
            coeff = float(head.strip())
        except ValueError:
            raise ValueError(
                f"line {lineno}: bad coefficient {head.strip()!r}"
            ) from None
        creators: List[int] = []
        annihilators: List[int] = []
        for tok in tail.split():
            m = _OP_TOKEN.match(tok)
            if m is None:
                raise ValueError(f"line {lineno}: bad operator token {tok!r}")
            mode = int(m.group(1))
            if m.group(2):
                if annihilators:
                    raise ValueError(
                        f"line {lineno}: creators must precede annihilators"
                    )
                creators.append(mode)
            else:
                annihilators.append(mode)
        terms.append(FermionTerm(coeff, tuple(creators), tuple(annihilators)))
    if audit:
        _audit_hermiticity(terms)
    return terms


def _audit_hermiticity(terms: Sequence[FermionTerm]) -> None:
    table: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], float] = {}
    for t in terms:
        key = (t.creators, t.annihilators)
        table[key] = table.get(key, 0.0) + t.coefficient
    offenders = []
    for key, coeff in table.items():
        partner = table.get((key[1][::-1], key[0][::-1]), 0.0)
        if abs(coeff - partner) > 1e-9:
            offenders.append(f"{key[0]}^ {key[1]}: {coeff} vs conjugate {partner}")
    if offenders:
        raise ValueError(
            "Hermiticity audit failed: " + "; ".join(sorted(offenders))
        )


# ---------------------------------------------------------------------------
# Majorana decomposition


def majorana_decompose(terms: Sequence[FermionTerm]) -> List[MajoranaMonomial]:
    """Expand terms into collected, canonically ordered monomials."""
    acc: Dict[Tuple[Tuple[int, str], ...], complex] = {}
    for term in terms:
        # (mode, sign of the i*odd/2 branch): a -> +, a^dag -> -.
        slots = [(m, -1) for m in term.creators] + [(m, 1) for m in term.annihilators]
        for branch in range(1 << len(slots)):
            coeff = complex(term.coefficient)
            seq: List[Tuple[int, str]] = []
            for pos, (mode, sgn) in enumerate(slots):
                if branch >> pos & 1:
                    coeff *= 0.5j * sgn
                    seq.append((mode, "odd"))
                else:
                    coeff *= 0.5
                    seq.append((mode, "even"))
            sign, canon = _canonical_order(seq)
            key = tuple(canon)
            acc[key] = acc.get(key, 0j) + sign * coeff
    out = [
        MajoranaMonomial(c, k)
        for k, c in acc.items()
        if abs(c) > COLLECT_TOL
    ]
    out.sort(key=lambda m: (len(m.factors), m.factors))
    return out


_KIND_RANK = {"even": 0, "odd": 1}


def _canonical_order(
    seq: Sequence[Tuple[int, str]]
) -> Tuple[int, List[Tuple[int, str]]]:
    """Sort factors ascending, tracking anticommutation; cancel squares."""
    lst = list(seq)
    sign = 1
    for end in range(len(lst) - 1, 0, -1):
        for i in range(end):
            a, b = lst[i], lst[i + 1]
            if (a[0], _KIND_RANK[a[1]]) > (b[0], _KIND_RANK[b[1]]):
                lst[i], lst[i + 1] = b, a
                sign = -sign
    squashed: List[Tuple[int, str]] = []
    for f in lst:
        if squashed and squashed[-1] == f:
            squashed.pop()
        else:
            squashed.append(f)
    return sign, squashed


# ---------------------------------------------------------------------------
# Lowering supports to gates


@lru_cache(maxsize=None)
def _parity_angles(L: int) -> AngleSequence:
    return find_qsp_angles(majority_poly(L))


def _code_support(
    bit: int, params: CodeParams, register: int, *, with_ancilla: bool = True
) -> SupportSet:
    mask = elementary_codeword(bit, params)
    return SupportSet(
        tuple(iter_bits(mask)),
        ancilla=params.Q if with_ancilla else None,
        register_size=register,
    )


def encode_pauli(p: PauliSupport, params: CodeParams) -> GateProgram:
    """Lower a stored-bit Pauli to gates on the code register.

    Parity blocks come first (they are the Z factor, applied before the
    X strings, matching the X^x Z^z matrix convention).  The support's
    unit phase is a global factor and is not emitted here.
    """
    for b in p.x_bits | p.z_bits:
        if not 0 <= b < params.M:
            raise ValueError(f"support bit {b} outside [0, {params.M})")
    has_z = bool(p.z_bits)
    register = params.Q + 1 if has_z else params.Q
    prog = GateProgram(register, ancillas=(params.Q,) if has_z else ())
    if has_z:
        angles = _parity_angles(params.L)
        for zbit in sorted(p.z_bits):
            prog.extend(
                synth_parity(_code_support(zbit, params, register), angles).gates
            )
    for xbit in sorted(p.x_bits):
        sup = _code_support(xbit, params, register, with_ancilla=has_z)
        prog.extend(synth_encoded_x(sup).gates)
    return prog


def encode_term(mono: MajoranaMonomial, params: CodeParams) -> EncodedTerm:
    """Multiply out a monomial's supports and lower the result."""
    sups = [majorana_support(m, kind, params.M) for m, kind in mono.factors]
    prod = pauli_product(sups)
    overlap_odd = len(prod.x_bits & prod.z_bits) & 1
    unit = 1j if overlap_odd else 1
    coeff = mono.coefficient * prod.phase / unit
    if abs(coeff.imag) > 1e-9 * max(1.0, abs(coeff)):
        raise ValueError(
            f"monomial {mono.factors} has non-real weight {coeff}; "
            "input Hamiltonian is not Hermitian"
        )
    pauli = PauliSupport(prod.x_bits, prod.z_bits, unit)
    return EncodedTerm(pauli, float(coeff.real), encode_pauli(pauli, params))


def compile_terms(
    terms: Sequence[FermionTerm], params: CodeParams
) -> List[EncodedTerm]:
    """Full pipeline: decompose, then encode every surviving monomial."""
    return [encode_term(m, params) for m in majorana_decompose(terms)]


def one_norm(encoded: Iterable[EncodedTerm]) -> float:
    """lambda = sum |h_P| over non-identity terms (offsets excluded)."""
    return sum(
        abs(t.coefficient) for t in encoded if t.pauli.x_bits or t.pauli.z_bits
    )


def term_cost(term: EncodedTerm, params: CodeParams) -> CostRecord:
    """Exact gate counts of the term's program."""
    del params  # the program already fixes the instance
    return count_gates(term.program)


def asymptotic_term_cost(params: CodeParams) -> int:
    """Reference growth (DG)^2 log M for cross-checking exact counts."""
    return params.D ** 2 * params.G ** 2 * params.M.bit_length()


# ---------------------------------------------------------------------------
# Rotations and hop gates


def _phase_power(c: complex) -> int:
    k = round(cmath.phase(c) / (math.pi / 2)) % 4
    if abs(1j ** k - c) > 1e-9:
        raise ValueError(f"support phase {c} is not a power of i")
    return k


def _append_ctrl_pauli(
    prog: GateProgram, sup: PauliSupport, params: CodeParams, control: int
) -> None:
    """Append ctrl-(phase * X^x Z^z), exact including the unit phase."""
    register = prog.qubit_count
    if sup.z_bits:
        angles = _parity_angles(params.L)
        for zbit in sorted(sup.z_bits):
            sub = synth_parity(
                _code_support(zbit, params, register), angles, control=control
            )
            prog.extend(sub.gates)
    for xbit in sorted(sup.x_bits):
        mask = elementary_codeword(xbit, params)
        for q in iter_bits(mask):
            prog.add("h", q)
            prog.add("ctrl_phase", q, controls=control, angle=(1, 1))
            prog.add("h", q)
    k = _phase_power(sup.phase)
    if k:
        prog.add("phase", control, angle=(k, 2))


def _scaled_angle(theta: Angle, num_factor: int, den_factor: int = 1) -> Angle:
    """theta * num_factor / den_factor, exact for pi-rational tuples."""
    if isinstance(theta, str):
        theta = parse_angle(theta)
    if isinstance(theta, tuple):
        num, den = theta
        num *= num_factor
        den *= den_factor
        g = math.gcd(num, den)
        if g > 1:
            num //= g
            den //= g
        return (num, den)
    value = angle_value(theta) * num_factor / den_factor
    return f"{value:.17g}"


def _append_rotation(
    prog: GateProgram,
    sup: PauliSupport,
    theta: Angle,
    params: CodeParams,
    b: int,
) -> None:
    """exp(i theta T) for Hermitian unitary T, up to global exp(-i theta)."""
    prog.add("h", b)
    _append_ctrl_pauli(prog, sup, params, b)
    prog.add("h", b)
    prog.add("phase", b, angle=_scaled_angle(theta, -2))
    prog.add("h", b)
    _append_ctrl_pauli(prog, sup, params, b)
    prog.add("h", b)


def synth_rotation(
    term: EncodedTerm, theta: Angle, params: CodeParams
) -> GateProgram:
    """exp(i theta T) for the term's Hermitian unitary T.

    Exactly two controlled applications of T; global phase exp(-i theta).
    """
    sup = term.pauli
    overlap = len(sup.x_bits & sup.z_bits) & 1
    if abs(sup.phase.conjugate() * (-1) ** overlap - sup.phase) > 1e-9:
        raise ValueError(f"support {sup} is not Hermitian")
    register = params.Q + 2
    prog = GateProgram(register, ancillas=(params.Q, params.Q + 1))
    _append_rotation(prog, sup, theta, params, params.Q + 1)
    return prog


def synth_hop(i: int, j: int, phi: Angle, params: CodeParams) -> GateProgram:
    """Hop gate on modes (i, j): controlled phase then the phased swap.

    Acts on the encoded two-mode subspace as
    [[1,0,0,0],[0,cos,-sin,0],[0,sin,cos,0],[0,0,0,-1]] in the
    (n_i, n_j) = 00,01,10,11 basis, times the global phase exp(-i phi).
    """
    if i == j:
        raise ValueError("hop needs two distinct modes")
    for m in (i, j):
        if not 0 <= m < params.M:
            raise ValueError(f"mode {m} out of range [0, {params.M})")
    tree = fenwick_tree(params.M)
    z_i = PauliSupport(frozenset(), frozenset({i}) | children_set(tree, i), 1)
    z_j = PauliSupport(frozenset(), frozenset({j}) | children_set(tree, j), 1)
    flips = (update_set(tree, i) | {i}) ^ (update_set(tree, j) | {j})
    xx = PauliSupport(frozenset(flips), frozenset(), 1)

    b = params.Q + 1
    prog = GateProgram(params.Q + 2, ancillas=(params.Q, b))
    # Controlled phase: -1 exactly on (n_i, n_j) = (1, 1).
    prog.add("h", b)
    _append_ctrl_pauli(prog, z_i, params, b)
    prog.add("h", b)
    _append_ctrl_pauli(prog, z_j, params, b)
    prog.add("h", b)
    _append_ctrl_pauli(prog, z_i, params, b)
    prog.add("h", b)
    # Phased swap, rightmost rotation first.
    half = _scaled_angle(phi, 1, 2)
    _append_rotation(prog, z_i, (-1, 4), params, b)
    _append_rotation(prog, xx, half, params, b)
    _append_rotation(prog, z_i, (1, 4), params, b)
    _append_rotation(prog, z_j, (1, 4), params, b)
    _append_rotation(prog, xx, half, params, b)
    _append_rotation(prog, z_j, (-1, 4), params, b)
    return prog
