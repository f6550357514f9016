"""Gate programs, statevector simulation, gate counts, and line routing.

Qubit 0 is the least significant bit of a computational basis index.  The
gate set is deliberately small: everything the synthesizers emit is either
a Hadamard, an X, a (possibly controlled) Z-rotation or phase, or a swap.
All of those except Hadamard map basis states to basis states up to phase,
which is what makes the sparse propagator below workable on registers far
beyond the dense cap.

Angles are carried exactly when they are rational multiples of pi, as a
(numerator, denominator) pair meaning num*pi/den; any other angle is a
decimal string, so serialized programs are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import SIM_QUBIT_CAP, UNITARY_QUBIT_CAP

Angle = Union[Tuple[int, int], str, None]

GATE_KINDS = (
    "h",
    "x",
    "rz",
    "phase",
    "ctrl_rz",
    "ctrl_phase",
    "cctrl_rz",
    "cctrl_phase",
    "swap",
)
_CONTROL_COUNT = {
    "h": 0, "x": 0, "rz": 0, "phase": 0, "swap": 0,
    "ctrl_rz": 1, "ctrl_phase": 1, "cctrl_rz": 2, "cctrl_phase": 2,
}
_HAS_ANGLE = {"rz", "phase", "ctrl_rz", "ctrl_phase", "cctrl_rz", "cctrl_phase"}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    angle: Angle = None


@dataclass(frozen=True)
class CostRecord:
    single_qubit: int = 0
    controlled: int = 0
    doubly_controlled: int = 0
    swaps: int = 0


@dataclass
class GateProgram:
    qubit_count: int
    gates: List[Gate] = field(default_factory=list)
    ancillas: Tuple[int, ...] = ()
    # After routing: final_layout[wire] = logical qubit sitting on that wire.
    final_layout: Optional[Tuple[int, ...]] = None

    def add(self, kind: str, targets, controls=(), angle: Angle = None) -> "GateProgram":
        if isinstance(targets, int):
            targets = (targets,)
        if isinstance(controls, int):
            controls = (controls,)
        gate = Gate(kind, tuple(targets), tuple(controls), angle)
        _check_gate(gate, self.qubit_count)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "GateProgram":
        for g in gates:
            _check_gate(g, self.qubit_count)
            self.gates.append(g)
        return self

    def adjoint(self) -> "GateProgram":
        rev = []
        for g in reversed(self.gates):
            if g.kind in _HAS_ANGLE:
                rev.append(replace(g, angle=negate_angle(g.angle)))
            else:
                rev.append(g)
        return GateProgram(self.qubit_count, rev, self.ancillas)


def _check_gate(gate: Gate, qubit_count: int) -> None:
    if gate.kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    want_targets = 2 if gate.kind == "swap" else 1
    if len(gate.targets) != want_targets:
        raise ValueError(f"{gate.kind} takes {want_targets} target(s)")
    if len(gate.controls) != _CONTROL_COUNT[gate.kind]:
        raise ValueError(f"{gate.kind} takes {_CONTROL_COUNT[gate.kind]} control(s)")
    seen = gate.targets + gate.controls
    if len(set(seen)) != len(seen):
        raise ValueError("target and control qubits must be distinct")
    for q in seen:
        if not 0 <= q < qubit_count:
            raise ValueError(f"qubit {q} outside register of {qubit_count}")
    if (gate.angle is not None) != (gate.kind in _HAS_ANGLE):
        raise ValueError(f"angle mismatch for {gate.kind}")


# ---------------------------------------------------------------------------
# Angles


def angle_value(angle: Angle) -> float:
    if angle is None:
        return 0.0
    if isinstance(angle, tuple):
        num, den = angle
        return num * math.pi / den
    return float(angle)


def negate_angle(angle: Angle) -> Angle:
    if angle is None:
        return None
    if isinstance(angle, tuple):
        return (-angle[0], angle[1])
    text = angle.strip()
    return text[1:] if text.startswith("-") else "-" + text


def format_angle(angle: Angle) -> str:
    if angle is None:
        return "-"
    if isinstance(angle, tuple):
        return f"{angle[0]}/{angle[1]} pi"
    return angle


def parse_angle(text: str) -> Angle:
    text = text.strip()
    if text == "-":
        return None
    if text.endswith("pi"):
        frac = text[:-2].strip()
        num, _, den = frac.partition("/")
        return (int(num), int(den if den else "1"))
    float(text)  # validate format; keep the exact string
    return text


# ---------------------------------------------------------------------------
# Simulation


def simulate(
    prog: GateProgram,
    initial: Union[int, Sequence[complex]],
    cap: int = SIM_QUBIT_CAP,
) -> np.ndarray:
    """Apply the program to an initial basis index or amplitude vector."""
    n = prog.qubit_count
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the simulation cap of {cap}")
    dim = 1 << n
    if isinstance(initial, (int, np.integer)):
        state = np.zeros(dim, dtype=complex)
        state[int(initial)] = 1.0
    else:
        state = np.asarray(initial, dtype=complex).copy()
        if state.shape != (dim,):
            raise ValueError("initial amplitude vector has wrong length")
    idx = np.arange(dim)
    for gate in prog.gates:
        _apply(state, idx, gate, n)
    return state


def _apply(state: np.ndarray, idx: np.ndarray, gate: Gate, n: int) -> None:
    kind = gate.kind
    if kind == "h":
        q = gate.targets[0]
        view = state.reshape(1 << (n - 1 - q), 2, 1 << q)
        v0 = view[:, 0, :].copy()
        v1 = view[:, 1, :].copy()
        rt = 1 / math.sqrt(2)
        view[:, 0, :] = rt * (v0 + v1)
        view[:, 1, :] = rt * (v0 - v1)
        return
    if kind == "x":
        q = gate.targets[0]
        view = state.reshape(1 << (n - 1 - q), 2, 1 << q)
        v0 = view[:, 0, :].copy()
        view[:, 0, :] = view[:, 1, :]
        view[:, 1, :] = v0
        return
    if kind == "swap":
        a, b = gate.targets
        bits_differ = ((idx >> a) ^ (idx >> b)) & 1
        perm = idx ^ (bits_differ * ((1 << a) | (1 << b)))
        state[:] = state[perm]
        return
    # Remaining kinds are diagonal.
    theta = angle_value(gate.angle)
    t = gate.targets[0]
    tbit = (idx >> t) & 1
    if kind in ("rz", "ctrl_rz", "cctrl_rz"):
        factor = np.where(tbit == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    else:
        factor = np.where(tbit == 1, np.exp(1j * theta), 1.0)
    for c in gate.controls:
        factor = np.where(((idx >> c) & 1) == 1, factor, 1.0)
    state *= factor


def propagate_basis(prog: GateProgram, initial: int) -> Dict[int, complex]:
    """Sparse simulation keyed by basis state.

    Exact for any program in this gate set; cost grows with the number of
    distinct branches, which stays tiny when Hadamards touch only a few
    qubits (the ancilla of a phase-kickback program), so registers far past
    the dense cap are verifiable.
    """
    rt = 1 / math.sqrt(2)
    amps: Dict[int, complex] = {int(initial): 1.0 + 0.0j}
    for gate in prog.gates:
        kind = gate.kind
        if kind == "h":
            q = gate.targets[0]
            nxt: Dict[int, complex] = {}
            for bits, a in amps.items():
                lo = bits & ~(1 << q)
                hi = bits | (1 << q)
                sign = -1.0 if (bits >> q) & 1 else 1.0
                nxt[lo] = nxt.get(lo, 0.0) + rt * a
                nxt[hi] = nxt.get(hi, 0.0) + sign * rt * a
            amps = nxt
        elif kind == "x":
            q = gate.targets[0]
            amps = {bits ^ (1 << q): a for bits, a in amps.items()}
        elif kind == "swap":
            qa, qb = gate.targets
            nxt = {}
            for bits, a in amps.items():
                if ((bits >> qa) ^ (bits >> qb)) & 1:
                    bits ^= (1 << qa) | (1 << qb)
                nxt[bits] = a
            amps = nxt
        else:
            theta = angle_value(gate.angle)
            t = gate.targets[0]
            rotation = kind in ("rz", "ctrl_rz", "cctrl_rz")
            for bits in list(amps):
                if any(not (bits >> c) & 1 for c in gate.controls):
                    continue
                if rotation:
                    sign = 0.5 if (bits >> t) & 1 else -0.5
                    amps[bits] *= complex(math.cos(sign * theta), math.sin(sign * theta))
                elif (bits >> t) & 1:
                    amps[bits] *= complex(math.cos(theta), math.sin(theta))
    return amps


def matrix_of(prog: GateProgram, cap: int = UNITARY_QUBIT_CAP) -> np.ndarray:
    """Dense unitary; columns are simulate() on each basis state."""
    n = prog.qubit_count
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the dense-matrix cap of {cap}")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        mat[:, col] = simulate(prog, col)
    return mat


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Equality of normalized states up to a global phase."""
    return abs(abs(np.vdot(a, b)) - 1.0) < tol


# ---------------------------------------------------------------------------
# Accounting


def count_gates(prog: GateProgram) -> CostRecord:
    single = controlled = doubly = swaps = 0
    for g in prog.gates:
        if g.kind == "swap":
            swaps += 1
        elif _CONTROL_COUNT[g.kind] == 0:
            single += 1
        elif _CONTROL_COUNT[g.kind] == 1:
            controlled += 1
        else:
            doubly += 1
    return CostRecord(single, controlled, doubly, swaps)


# ---------------------------------------------------------------------------
# Serialization


def serialize_program(prog: GateProgram) -> str:
    lines = [f"qubits {prog.qubit_count}"]
    lines.append(
        "ancilla " + (",".join(map(str, prog.ancillas)) if prog.ancillas else "-")
    )
    if prog.final_layout is not None:
        lines.append("layout " + ",".join(map(str, prog.final_layout)))
    for g in prog.gates:
        ctrl = ",".join(map(str, g.controls)) if g.controls else "-"
        tgt = ",".join(map(str, g.targets))
        lines.append(f"{g.kind} {ctrl} {tgt} {format_angle(g.angle)}")
    return "\n".join(lines) + "\n"


def parse_program(text: str) -> GateProgram:
    qubit_count = None
    ancillas: Tuple[int, ...] = ()
    layout = None
    gates: List[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split(None, 3)
        try:
            key = tokens[0]
            if key == "qubits":
                qubit_count = int(tokens[1])
            elif key == "ancilla":
                ancillas = _parse_index_list(tokens[1])
            elif key == "layout":
                layout = _parse_index_list(tokens[1])
            elif key in GATE_KINDS:
                controls = _parse_index_list(tokens[1])
                targets = _parse_index_list(tokens[2])
                angle = parse_angle(tokens[3]) if len(tokens) > 3 else None
                gates.append(Gate(key, targets, controls, angle))
            else:
                raise ValueError(f"unknown record {key!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if qubit_count is None:
        raise ValueError("missing qubits header")
    prog = GateProgram(qubit_count, [], ancillas, layout)
    prog.extend(gates)
    return prog


def _parse_index_list(token: str) -> Tuple[int, ...]:
    if token == "-":
        return ()
    return tuple(int(t) for t in token.split(","))


# ---------------------------------------------------------------------------
# Linear-architecture routing


def route_linear(
    prog: GateProgram, line_order: Optional[Sequence[int]] = None
) -> GateProgram:
    """Insert swaps so every two-qubit gate acts on adjacent line positions.

    ``line_order[w]`` is the logical qubit initially sitting on wire w
    (identity when omitted).  Two-qubit gates must come in runs sharing one
    control; for each run the control walks to the nearer end of the line
    and then sweeps across, serving each target from an adjacent wire, the
    worst case of which is Q/2 + Q - 1 < 3Q/2 swaps per run.

    The routed program acts on wires; ``final_layout`` records where each
    logical qubit ends up.
    """
    n = prog.qubit_count
    if line_order is None:
        line_order = tuple(range(n))
    if sorted(line_order) != list(range(n)):
        raise ValueError("line order must be a permutation of the qubits")
    wire_of = {q: w for w, q in enumerate(line_order)}  # logical -> wire
    on_wire = list(line_order)  # wire -> logical
    routed = GateProgram(n, [], prog.ancillas)

    def emit_swap(w: int) -> None:
        routed.add("swap", (w, w + 1))
        a, b = on_wire[w], on_wire[w + 1]
        on_wire[w], on_wire[w + 1] = b, a
        wire_of[a], wire_of[b] = w + 1, w

    i = 0
    gates = prog.gates
    while i < len(gates):
        g = gates[i]
        if len(g.controls) + len(g.targets) == 1:
            routed.add(g.kind, wire_of[g.targets[0]], angle=g.angle)
            i += 1
            continue
        if g.kind == "swap" or len(g.controls) != 1:
            raise ValueError(
                "unsupported topology: routing expects runs of singly-"
                "controlled gates"
            )
        # Collect the maximal run sharing this control.
        control = g.controls[0]
        run = []
        while (
            i < len(gates)
            and len(gates[i].controls) == 1
            and gates[i].controls[0] == control
        ):
            run.append(gates[i])
            i += 1
        pending: Dict[int, List[Gate]] = {}
        for r in run:
            pending.setdefault(r.targets[0], []).append(r)

        def serve_neighbors() -> None:
            w = wire_of[control]
            for nb in (w - 1, w + 1):
                if 0 <= nb < n and on_wire[nb] in pending:
                    for r in pending.pop(on_wire[nb]):
                        routed.add(r.kind, nb, controls=w, angle=r.angle)

        serve_neighbors()
        if pending:
            w = wire_of[control]
            # Walk to the nearer end, then sweep to the other.
            if w <= n - 1 - w:
                path = list(range(w - 1, -1, -1)) + list(range(1, n))
            else:
                path = list(range(w + 1, n)) + list(range(n - 2, -1, -1))
            for dest in path:
                if not pending:
                    break
                cur = wire_of[control]
                emit_swap(min(cur, dest))
                serve_neighbors()
        if pending:
            raise ValueError("routing failed to serve all targets")
    routed.final_layout = tuple(on_wire)
    return routed
