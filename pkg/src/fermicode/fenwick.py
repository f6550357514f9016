"""Partial-sum (Fenwick tree) occupation storage and Majorana supports.

Stored bit j holds the parity of the occupations over the contiguous range
lo(j)..j with lo(j) = j+1 - lowbit(j+1): the classic Fenwick indexing,
which for M not a power of two is the power-of-two tree truncated to its
first M nodes (a forest).  This choice matters: along an update path the
lowest set bit doubles at every step, so flipping a mode touches at most
floor(log2 M) + 1 = ceil(log2(M+1)) stored bits, which is the weight bound
the parameter derivations rely on.  Naive recursive bisection of [0, M-1]
breaks that bound already at M = 6.

Majorana conventions.  With U(j) the ancestors of j, P(j) the prefix-parity
nodes of [0, j), F(j) the children of j and C(j) = P(j) - F(j):

    even kind (a_j + a_j^dag):     X on U(j)+{j},  Z on P(j),      phase +1
    odd kind  i(a_j^dag - a_j):    X on U(j)+{j},  Z on C(j)+{j},  phase +i

The odd phase comes from Y = iXZ once the Y on node j is split into the
fixed normal order (all X factors to the left of all Z factors).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Sequence, Tuple

import numpy as np

PHASE_NAMES = {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}


@dataclass(frozen=True)
class FenwickTree:
    M: int
    parent: Tuple[int, ...]  # parent[j], -1 where the parent index is >= M
    lo: Tuple[int, ...]      # subtree of j covers modes lo[j] .. j
    children: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class PauliSupport:
    x_bits: FrozenSet[int]
    z_bits: FrozenSet[int]
    phase: complex = 1

    def __str__(self) -> str:
        parts = [PHASE_NAMES[self.phase]]
        if self.x_bits:
            parts.append("X{%s}" % ",".join(map(str, sorted(self.x_bits))))
        if self.z_bits:
            parts.append("Z{%s}" % ",".join(map(str, sorted(self.z_bits))))
        if not self.x_bits and not self.z_bits:
            parts.append("I")
        return " ".join(parts)


@lru_cache(maxsize=None)
def fenwick_tree(M: int) -> FenwickTree:
    if M < 1:
        raise ValueError("need at least one mode")
    parent = []
    lo = []
    kids = []
    for j in range(M):
        i = j + 1  # classic 1-based Fenwick index
        lowbit = i & -i
        lo.append(j + 1 - lowbit)
        up = i + lowbit
        parent.append(up - 1 if up - 1 < M else -1)
        kids.append(tuple(sorted(j - (1 << t) for t in range(lowbit.bit_length() - 1))))
    return FenwickTree(M=M, parent=tuple(parent), lo=tuple(lo), children=tuple(kids))


def update_set(tree: FenwickTree, j: int) -> FrozenSet[int]:
    """Strict ancestors of node j."""
    out = []
    k = tree.parent[j]
    while k >= 0:
        out.append(k)
        k = tree.parent[k]
    return frozenset(out)


def children_set(tree: FenwickTree, j: int) -> FrozenSet[int]:
    return frozenset(tree.children[j])


def parity_set(tree: FenwickTree, j: int) -> FrozenSet[int]:
    """Nodes whose disjoint ranges tile the prefix [0, j)."""
    out = []
    x = j - 1
    while x >= 0:
        out.append(x)
        x = tree.lo[x] - 1
    return frozenset(out)


def remainder_set(tree: FenwickTree, j: int) -> FrozenSet[int]:
    return parity_set(tree, j) - children_set(tree, j)


def bk_encode(occ: int, M: int) -> int:
    """Occupation bits -> stored parity bits (linear over XOR)."""
    if occ < 0 or occ >> M:
        raise ValueError("occupation vector out of range")
    tree = fenwick_tree(M)
    out = 0
    for j in range(M):
        width = j - tree.lo[j] + 1
        seg = (occ >> tree.lo[j]) & ((1 << width) - 1)
        out |= (seg.bit_count() & 1) << j
    return out


def bk_decode(bits: int, M: int) -> int:
    """Inverse map: occupation j = stored j XOR its children's stored bits."""
    if bits < 0 or bits >> M:
        raise ValueError("bit string out of range")
    tree = fenwick_tree(M)
    occ = 0
    for j in range(M):
        n = (bits >> j) & 1
        for c in tree.children[j]:
            n ^= (bits >> c) & 1
        occ |= n << j
    return occ


def transform_matrix(M: int) -> np.ndarray:
    """The M x M GF(2) matrix B with stored = B @ occupation (mod 2)."""
    tree = fenwick_tree(M)
    B = np.zeros((M, M), dtype=np.uint8)
    for i in range(M):
        B[i, tree.lo[i] : i + 1] = 1
    return B


def majorana_support(mode: int, kind: str, M: int) -> PauliSupport:
    """Pauli support of one Majorana operator on the stored bits."""
    if not 0 <= mode < M:
        raise ValueError(f"mode {mode} out of range [0, {M})")
    tree = fenwick_tree(M)
    xs = update_set(tree, mode) | {mode}
    if kind == "even":
        return PauliSupport(x_bits=xs, z_bits=parity_set(tree, mode), phase=1)
    if kind == "odd":
        zs = remainder_set(tree, mode) | {mode}
        return PauliSupport(x_bits=xs, z_bits=zs, phase=1j)
    raise ValueError(f"kind must be 'even' or 'odd', not {kind!r}")


def pauli_product(factors: Sequence[PauliSupport]) -> PauliSupport:
    """Multiply supports left to right under the fixed normal order."""
    xs: FrozenSet[int] = frozenset()
    zs: FrozenSet[int] = frozenset()
    phase = complex(1)
    for f in factors:
        # Commute the accumulated Z block past the incoming X block.
        phase *= f.phase * (-1) ** len(zs & f.x_bits)
        xs = xs ^ f.x_bits
        zs = zs ^ f.z_bits
    return PauliSupport(x_bits=xs, z_bits=zs, phase=phase)


def support_matrix(sup: PauliSupport, n_qubits: int) -> np.ndarray:
    """Dense matrix of phase * X(x_bits) * Z(z_bits), qubit 0 = least
    significant bit of the computational index."""
    dim = 1 << n_qubits
    xmask = 0
    for b in sup.x_bits:
        xmask |= 1 << b
    zmask = 0
    for b in sup.z_bits:
        zmask |= 1 << b
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        sign = -1 if ((col & zmask).bit_count() & 1) else 1
        mat[col ^ xmask, col] = sign * sup.phase
    return mat
