"""Resource estimation: qubit floors, degree optimization, encoding
comparison, the prime-threshold scan, and simulation-cost projections.

Gate columns report the cost of encoding one conjugate pair (the even and
odd operators of one mode).  For the stored-bit mapping the dominant count
is (z-support of the pair) * L(2L-1) controlled phases; the worst-case
z-support is computed exactly by enumeration up to 2^18 modes and by the
closed form 2t-1 (t = floor(log2(M+1)), attained at j = 2^t - 2) beyond,
where the enumeration confirms the closed form holds from M = 16 on.

The qdrift / rpe projections multiply rotation counts by that per-rotation
cost.  Their leading constants are configuration (config.COST_C and
config.COST_C_PRIME), not derived quantities.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .arith import next_prime
from .codes import CodeParams, derive_params, segment_params
from . import config
from .fenwick import fenwick_tree, parity_set, remainder_set, update_set

_ENUM_CAP = 1 << 18


def min_qubits(M: int, F: int) -> float:
    """log2 binomial(M, F): the information-theoretic qubit floor."""
    if M < 0 or F < 0:
        raise ValueError("mode and fermion counts must be nonnegative")
    if F > M:
        raise ValueError(f"cannot place {F} fermions in {M} modes")
    return (
        math.lgamma(M + 1) - math.lgamma(F + 1) - math.lgamma(M - F + 1)
    ) / math.log(2)


def degree_scan_range(M: int) -> range:
    return range(0, math.ceil(math.log2(M)) + 3)


def optimal_degree(M: int, F: int) -> Tuple[int, CodeParams]:
    """Brute-force argmin of Q over the degree scan range; ties go low."""
    if M < 2:
        raise ValueError("need at least two modes")
    if F < 1:
        raise ValueError("fermion count must be positive")
    best: Optional[Tuple[int, CodeParams]] = None
    for D in degree_scan_range(M):
        try:
            p = derive_params(M, D, F=F, q_limit=None)
        except ValueError:
            continue
        if best is None or p.Q < best[1].Q:
            best = (D, p)
    assert best is not None, "degree scan found no valid parameters"
    return best


@lru_cache(maxsize=None)
def bk_pair_weights(M: int) -> Tuple[int, int]:
    """Worst-case (z-support, total support) of one conjugate pair."""
    if M <= _ENUM_CAP:
        tree = fenwick_tree(M)
        z = total = 0
        for j in range(M):
            zc = len(parity_set(tree, j)) + len(remainder_set(tree, j)) + 1
            z = max(z, zc)
            total = max(total, zc + 2 * len(update_set(tree, j) | {j}))
        return z, total
    t = (M + 1).bit_length() - 1
    return 2 * t - 1, 2 * t + 3


def pair_gate_cost(params: CodeParams) -> int:
    """Controlled-phase count to encode the worst conjugate pair."""
    z, _ = bk_pair_weights(params.M)
    return z * params.L * (2 * params.L - 1)


# ---------------------------------------------------------------------------
# Encoding comparison


@dataclass(frozen=True)
class EstimateRow:
    encoding: str
    qubits: int
    gates: Union[int, str]
    best: bool
    parameters: str


def compare_encodings(M: int, F: int) -> List[EstimateRow]:
    """Qubit/gate table over the known encodings at (M, F)."""
    entries: List[Tuple[str, int, Union[int, str], str]] = []
    entries.append(("jordan-wigner", M, M, f"M={M}"))
    entries.append(("bravyi-kitaev", M, bk_pair_weights(M)[1], f"M={M}"))
    try:
        seg = segment_params(M, F)
        entries.append(
            (
                "segment",
                seg.Q,
                2 * F + 2,
                f"L={seg.L}, segments={seg.segment_count}, leftover={seg.remainder}",
            )
        )
    except ValueError:
        pass
    degree_rows: Dict[int, CodeParams] = {}
    for D in degree_scan_range(M):
        try:
            p = derive_params(M, D, F=F, q_limit=None)
        except ValueError:
            continue
        degree_rows[D] = p
        entries.append(
            (
                f"degree-{D}",
                p.Q,
                pair_gate_cost(p),
                f"L={p.L}, L'={p.Lprime}, G={p.G}",
            )
        )
    d_star, p_star = optimal_degree(M, F)
    entries.append(
        (
            "optimal-degree",
            p_star.Q,
            pair_gate_cost(p_star),
            f"D*={d_star}, L={p_star.L}, L'={p_star.Lprime}",
        )
    )
    floor = min(q for _, q, _, _ in entries)
    return [
        EstimateRow(name, q, gates, q == floor, info)
        for name, q, gates, info in entries
    ]


def rows_to_csv(rows: Sequence[EstimateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["encoding", "qubits", "gates", "best", "parameters"])
    for r in rows:
        w.writerow([r.encoding, r.qubits, r.gates, int(r.best), r.parameters])
    return buf.getvalue()


def rows_to_text(rows: Sequence[EstimateRow]) -> str:
    head = ("encoding", "qubits", "gates", "", "parameters")
    table = [head] + [
        (r.encoding, str(r.qubits), str(r.gates), "*" if r.best else "", r.parameters)
        for r in rows
    ]
    widths = [max(len(row[c]) for row in table) for c in range(5)]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    lines.insert(1, "  ".join("-" * w for w in widths).rstrip())
    return "\n".join(lines) + "\n"


def qubit_series(
    M_values: Sequence[int], F: int
) -> Dict[str, List[Tuple[int, int]]]:
    """(M, Q) series per encoding, for plotting or delimited export."""
    series: Dict[str, List[Tuple[int, int]]] = {
        "jordan-wigner": [],
        "segment": [],
        "optimal-degree": [],
    }
    for M in sorted(M_values):
        series["jordan-wigner"].append((M, M))
        try:
            series["segment"].append((M, segment_params(M, F).Q))
        except ValueError:
            pass
        series["optimal-degree"].append((M, optimal_degree(M, F)[1].Q))
    return series


# ---------------------------------------------------------------------------
# Prime-threshold scan


@dataclass(frozen=True)
class ThresholdRow:
    G: int
    L: int
    k_max: int


def threshold_scan(L_max: int) -> List[ThresholdRow]:
    """Largest k with p_k^2 < L p_{k+1} (primes p after L), per G."""
    if L_max % 2 == 0:
        raise ValueError("L_max must be odd")
    rows = []
    for G in range(1, (L_max - 1) // 2 + 1):
        L = 2 * G + 1
        k_max = 0
        k = 0
        prev = next_prime(L + 1)
        # Once p_k >= 2L the square dwarfs L p_{k+1}; no later k qualifies.
        while prev < 2 * L or k < 4:
            nxt = next_prime(prev + 1)
            k += 1
            if prev * prev < L * nxt:
                k_max = k
            prev = nxt
        rows.append(ThresholdRow(G, L, k_max))
    return rows


def threshold_to_csv(rows: Sequence[ThresholdRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["G", "L", "k_max"])
    for r in rows:
        w.writerow([r.G, r.L, r.k_max])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Simulation-cost projections


@dataclass(frozen=True)
class SimCost:
    kind: str
    rotations: int
    circuits: int
    cctrl_per_rotation: int

    @property
    def total_cctrl(self) -> int:
        return self.rotations * self.circuits * self.cctrl_per_rotation


def sim_cost(
    kind: str, lam: float, t_or_delta: float, eps_or_eta: float, params: CodeParams
) -> SimCost:
    """Rotation-count projection times the exact per-rotation cost.

    qdrift: N = ceil(c (lam t)^2 / eps) rotations in one circuit.
    rpe:    N = ceil(c lam^2 / delta^2) per circuit, ceil(c' / eta^2)
            circuits.  c and c' are config constants, not derived values.
    """
    if lam <= 0 or t_or_delta <= 0 or eps_or_eta <= 0:
        raise ValueError("lambda, time/precision and error must be positive")
    per_rotation = 2 * pair_gate_cost(params)
    if kind == "qdrift":
        n = math.ceil(config.COST_C * (lam * t_or_delta) ** 2 / eps_or_eta)
        return SimCost("qdrift", n, 1, per_rotation)
    if kind == "rpe":
        n = math.ceil(config.COST_C * lam ** 2 / t_or_delta ** 2)
        circuits = math.ceil(config.COST_C_PRIME / eps_or_eta ** 2)
        return SimCost("rpe", n, circuits, per_rotation)
    raise ValueError(f"unknown projection kind {kind!r}")


def sim_cost_text(c: SimCost) -> str:
    lines = [
        f"kind:               {c.kind}",
        f"rotations/circuit:  {c.rotations}",
        f"circuits:           {c.circuits}",
        f"cctrl/rotation:     {c.cctrl_per_rotation}",
        f"total cctrl:        {c.total_cctrl}",
    ]
    return "\n".join(lines) + "\n"
