"""Degree-bounded polynomial codewords: parameters, encoding, decoding.

A register of Q = L'·L qubits is split into L blocks of L' qubits each.
Mode m is assigned the polynomial y(x) over Z_{L'} whose coefficients are
the base-L' digits of m (least significant digit = constant term), and its
elementary codeword places a single 1 in each block x at position y(x).
Distinct polynomials of degree at most D agree on at most D of the L
evaluation points, so any two elementary codewords overlap in at most D
positions.  A general codeword is the XOR of at most G elementary ones, and
each contributing bit can be read back by majority vote: the overlap with a
member is at least L - (G-1)D > L/2 while the overlap with a non-member is
at most GD < L/2.

Codewords are plain integers; bit x·L' + y is the qubit at position y of
block x, position 0 being the leftmost character of the block when printed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .arith import ceil_root, is_prime, mode_to_coeffs, next_prime, poly_eval_mod
from .config import Q_LIMIT

Codeword = int
BitString = int


def iter_bits(b: int):
    """Positions of the set bits of b, ascending."""
    while b:
        low = b & -b
        yield low.bit_length() - 1
        b ^= low


class NotACodewordError(ValueError):
    """Raised when a word fails to re-encode to itself after majority decoding.

    ``mismatch`` is the XOR of the offending word with the re-encoding of its
    decoded bit pattern, i.e. the positions that majority voting cannot
    explain.
    """

    def __init__(self, message: str, mismatch: int):
        super().__init__(message)
        self.mismatch = mismatch


@dataclass(frozen=True)
class CodeParams:
    """Derived parameters of one degree-D code instance.

    ``F`` is None when G was supplied directly instead of being derived from
    a fermion count.
    """

    M: int
    F: Optional[int]
    D: int
    G: int
    L: int
    Lprime: int
    Q: int


@dataclass(frozen=True)
class SegmentParams:
    """Parameters of the segment encoding: one saved qubit per full segment
    of L+1 = 2F+2 modes, leftover modes stored positionally."""

    M: int
    F: int
    L: int
    segment_count: int
    remainder: int
    Q: int

    @property
    def advantage(self) -> bool:
        return self.Q < self.M


def derive_params(
    M: int,
    D: int,
    *,
    F: Optional[int] = None,
    G: Optional[int] = None,
    add_four_margin: bool = False,
    q_limit: Optional[int] = Q_LIMIT,
) -> CodeParams:
    """Derive code parameters for M modes at degree D.

    Exactly one of F (fermion count) or G (raw weight bound) must be given.
    With F, the weight bound is G = F·⌈log2(M+1)⌉; ``add_four_margin``
    replaces F by F+4 first, which Hamiltonian compilation needs because
    intermediate states inside a compiled term can exceed the particle
    number by up to two excitations.
    """
    if M < 1:
        raise ValueError("mode count must be positive")
    if D < 0:
        raise ValueError("degree must be nonnegative")
    if (F is None) == (G is None):
        raise ValueError("give exactly one of F or G")
    if F is not None:
        if F < 1:
            raise ValueError("fermion count must be positive")
        if add_four_margin:
            F = F + 4
        G = F * M.bit_length()  # bit_length(M) == ceil(log2(M+1))
    else:
        if add_four_margin:
            raise ValueError("the +4 margin applies to fermion counts, not raw G")
        if G < 1:
            raise ValueError("weight bound G must be positive")
    L = 2 * D * G + 1
    Lprime = next_prime(max(ceil_root(M, D + 1), L))
    if D >= Lprime:
        raise ValueError(
            f"degree too large: D={D} is not below the block size L'={Lprime}"
        )
    Q = Lprime * L
    if q_limit is not None and Q > q_limit:
        raise ValueError(
            f"capacity exceeded: Q={Q} is beyond the configured limit {q_limit}"
        )
    return CodeParams(M=M, F=F, D=D, G=G, L=L, Lprime=Lprime, Q=Q)


def validate_params(params: CodeParams) -> None:
    """Raise ValueError naming the first violated structural invariant."""
    p = params
    if p.M < 1:
        raise ValueError("parameter invalid: M must be positive")
    if p.G < 1:
        raise ValueError("parameter invalid: G must be positive")
    if p.D < 0:
        raise ValueError("parameter invalid: D must be nonnegative")
    if p.L != 2 * p.D * p.G + 1:
        raise ValueError(
            f"parameter invalid: L={p.L} violates L = 2DG+1 = {2 * p.D * p.G + 1}"
        )
    if not is_prime(p.Lprime):
        raise ValueError(f"parameter invalid: block size {p.Lprime} is not prime")
    if p.Lprime < p.L:
        raise ValueError(f"parameter invalid: L'={p.Lprime} is below L={p.L}")
    if p.Lprime ** (p.D + 1) < p.M:
        raise ValueError(
            f"parameter invalid: only {p.Lprime ** (p.D + 1)} polynomials for M={p.M} modes"
        )
    if p.D >= p.Lprime:
        raise ValueError("parameter invalid: degree must be below the block size")
    if p.Q != p.Lprime * p.L:
        raise ValueError("parameter invalid: Q must equal L'·L")


def elementary_codeword(mode_index: int, params: CodeParams) -> Codeword:
    """Codeword of a single mode: the graph of its polynomial."""
    if not 0 <= mode_index < params.M:
        raise ValueError(f"mode {mode_index} out of range [0, {params.M})")
    coeffs = mode_to_coeffs(mode_index, params.Lprime, params.D)
    word = 0
    for x in range(params.L):
        y = poly_eval_mod(coeffs, x, params.Lprime)
        word |= 1 << (x * params.Lprime + y)
    return word


def codebook(params: CodeParams, modes: Optional[Sequence[int]] = None) -> List[Codeword]:
    if modes is None:
        modes = range(params.M)
    return [elementary_codeword(m, params) for m in modes]


def encode(b: BitString, params: CodeParams) -> Codeword:
    """XOR of the elementary codewords selected by the set bits of b."""
    if b < 0:
        raise ValueError("bit pattern must be nonnegative")
    if b.bit_count() > params.G:
        raise ValueError(
            f"weight exceeded: {b.bit_count()} set bits, decoding is only "
            f"guaranteed up to G={params.G}"
        )
    if b >> params.M:
        raise ValueError("bit pattern addresses modes beyond M")
    word = 0
    for i in iter_bits(b):
        word ^= elementary_codeword(i, params)
    return word


def decode(w: Codeword, params: CodeParams) -> BitString:
    """Majority-vote decoding: bit i is set iff overlap with codeword i > L/2.

    Raises NotACodewordError when the result does not re-encode to w.
    """
    result = 0
    rebuilt = 0
    for i in range(params.M):
        elem = elementary_codeword(i, params)
        if 2 * (elem & w).bit_count() > params.L:
            result |= 1 << i
            rebuilt ^= elem
    if rebuilt != w:
        raise NotACodewordError(
            "word is not an XOR of at most G elementary codewords", rebuilt ^ w
        )
    return result


# ---------------------------------------------------------------------------
# Verification


@dataclass
class VerifyReport:
    params: CodeParams
    mode: str
    modes_checked: int = 0
    weight_failures: int = 0
    pairs_checked: int = 0
    max_overlap: int = 0
    overlap_counterexample: Optional[Tuple[int, int]] = None
    roundtrips_checked: int = 0
    roundtrip_failures: int = 0
    margins_checked: int = 0
    margin_failures: int = 0

    @property
    def passed(self) -> bool:
        return (
            self.weight_failures == 0
            and self.overlap_counterexample is None
            and self.roundtrip_failures == 0
            and self.margin_failures == 0
        )

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        lines = [
            f"verify {self.mode}: {verdict}",
            f"  modes checked        {self.modes_checked}",
            f"  weight failures      {self.weight_failures}",
            f"  pairs checked        {self.pairs_checked}",
            f"  max pairwise overlap {self.max_overlap} (allowed {self.params.D})",
            f"  round trips checked  {self.roundtrips_checked}",
            f"  round trip failures  {self.roundtrip_failures}",
            f"  margins checked      {self.margins_checked}",
            f"  margin failures      {self.margin_failures}",
        ]
        if self.overlap_counterexample is not None:
            lines.append(f"  overlap counterexample pair {self.overlap_counterexample}")
        return "\n".join(lines)


def _random_pattern(rng: random.Random, M: int, weight: int) -> int:
    b = 0
    for m in rng.sample(range(M), weight):
        b |= 1 << m
    return b


def verify_code(
    params: CodeParams,
    mode: str = "exhaustive",
    *,
    words: Optional[Sequence[Codeword]] = None,
    trials: int = 10**4,
    seed: int = 0,
) -> VerifyReport:
    """Check weights, pairwise overlaps, decoding round trips, and the
    majority-margin inequalities.

    ``exhaustive`` covers every codeword and pair (the parameter space must
    satisfy L'^(D+1) <= 4096); ``sampled`` draws ``trials`` random checks of
    each kind.  ``words`` substitutes an explicit codeword list for the
    generated codebook, which is how a deliberately damaged set can be fed
    in; overlap checks then run over that list as-is.
    """
    validate_params(params)
    report = VerifyReport(params=params, mode=mode)
    rng = random.Random(seed)
    L, D, G, M = params.L, params.D, params.G, params.M

    if mode == "exhaustive":
        if params.Lprime ** (D + 1) > 4096:
            raise ValueError(
                "exhaustive verification budget requires L'^(D+1) <= 4096"
            )
        book = list(words) if words is not None else codebook(params)
        for w in book:
            report.modes_checked += 1
            if w.bit_count() != L:
                report.weight_failures += 1
        for i in range(len(book)):
            for j in range(i + 1, len(book)):
                ov = (book[i] & book[j]).bit_count()
                report.pairs_checked += 1
                if ov > report.max_overlap:
                    report.max_overlap = ov
                if ov > D and report.overlap_counterexample is None:
                    report.overlap_counterexample = (i, j)
        # Round trips: every pattern of weight <= G when that is feasible,
        # otherwise a sample.
        total = sum(math.comb(M, k) for k in range(G + 1))
        if words is None:
            patterns: Sequence[int]
            if total <= 10**5:
                patterns = _all_patterns(M, G)
            else:
                patterns = [
                    _random_pattern(rng, M, rng.randint(0, G)) for _ in range(trials)
                ]
            for b in patterns:
                report.roundtrips_checked += 1
                try:
                    if decode(encode(b, params), params) != b:
                        report.roundtrip_failures += 1
                except NotACodewordError:
                    report.roundtrip_failures += 1
    elif mode == "sampled":
        # Codebook too large to materialize; sample modes directly.
        for _ in range(trials):
            m = rng.randrange(M)
            report.modes_checked += 1
            if elementary_codeword(m, params).bit_count() != L:
                report.weight_failures += 1
        for _ in range(trials):
            i, j = rng.sample(range(M), 2)
            ov = (elementary_codeword(i, params) & elementary_codeword(j, params)).bit_count()
            report.pairs_checked += 1
            if ov > report.max_overlap:
                report.max_overlap = ov
            if ov > D and report.overlap_counterexample is None:
                report.overlap_counterexample = (i, j)
        for _ in range(trials):
            b = _random_pattern(rng, M, rng.randint(0, G))
            w = encode(b, params)
            # Majority margins instead of a full decode scan: members must
            # clear L/2, and a random outsider must fall below it.
            report.margins_checked += 1
            ok = True
            for i in iter_bits(b):
                member = elementary_codeword(i, params)
                if 2 * (member & w).bit_count() <= L:
                    ok = False
            outsider = rng.randrange(M)
            while (b >> outsider) & 1:
                outsider = rng.randrange(M)
            out = elementary_codeword(outsider, params)
            if 2 * (out & w).bit_count() > L:
                ok = False
            if not ok:
                report.margin_failures += 1
    else:
        raise ValueError(f"unknown verification mode {mode!r}")
    return report


def _all_patterns(M: int, G: int) -> List[int]:
    patterns = [0]
    frontier = [0]
    for _ in range(G):
        nxt = []
        for b in frontier:
            for m in range(b.bit_length(), M):
                nxt.append(b | (1 << m))
        patterns.extend(nxt)
        frontier = nxt
    return patterns


# ---------------------------------------------------------------------------
# Segment encoding


def segment_params(M: int, F: int) -> SegmentParams:
    """Parameters of the segment encoding for M modes and F fermions."""
    if F < 1:
        raise ValueError("fermion count must be positive")
    L = 2 * F + 1
    if M < L + 1:
        raise ValueError(
            f"no segment advantage: need M >= 2F+2 = {L + 1} for one full segment"
        )
    segment_count = M // (L + 1)
    remainder = M - segment_count * (L + 1)
    Q = segment_count * L + remainder
    return SegmentParams(
        M=M, F=F, L=L, segment_count=segment_count, remainder=remainder, Q=Q
    )


# ---------------------------------------------------------------------------
# Serialization


def format_codeword(w: Codeword, params: CodeParams) -> str:
    """Render as 0/1 characters with a space between blocks."""
    blocks = []
    for x in range(params.L):
        chars = [
            "1" if (w >> (x * params.Lprime + y)) & 1 else "0"
            for y in range(params.Lprime)
        ]
        blocks.append("".join(chars))
    return " ".join(blocks)


def parse_codeword(text: str, params: CodeParams) -> Codeword:
    flat = text.replace(" ", "")
    if len(flat) != params.Q or set(flat) - {"0", "1"}:
        raise ValueError("malformed codeword string")
    word = 0
    for i, ch in enumerate(flat):
        if ch == "1":
            word |= 1 << i
    return word


def codeword_hex(w: Codeword, params: CodeParams) -> str:
    """Packed form: the 0/1 string (block-major, left to right) read as a
    big-endian binary number, zero-padded on the right to whole nibbles."""
    flat = format_codeword(w, params).replace(" ", "")
    padded = flat + "0" * (-len(flat) % 4)
    return "%0*x" % (len(padded) // 4, int(padded, 2)) if padded else "0"


def parse_codeword_hex(text: str, params: CodeParams) -> Codeword:
    nbits = params.Q + (-params.Q % 4)
    flat = format(int(text, 16), "0%db" % nbits)[: params.Q]
    return parse_codeword(flat, params)


def params_record(params: CodeParams) -> str:
    """Flat key-value text form.  The mode_rule line records the canonical
    mode-to-polynomial assignment baked into this package (base-L' digits,
    least significant digit first)."""
    lines = [
        f"M {params.M}",
        f"F {'-' if params.F is None else params.F}",
        f"D {params.D}",
        f"G {params.G}",
        f"L {params.L}",
        f"Lprime {params.Lprime}",
        f"Q {params.Q}",
        "mode_rule base-Lprime-digits-lsb-first",
    ]
    return "\n".join(lines)


def parse_params_record(text: str) -> CodeParams:
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        fields[key] = value
    try:
        params = CodeParams(
            M=int(fields["M"]),
            F=None if fields["F"] == "-" else int(fields["F"]),
            D=int(fields["D"]),
            G=int(fields["G"]),
            L=int(fields["L"]),
            Lprime=int(fields["Lprime"]),
            Q=int(fields["Q"]),
        )
    except KeyError as missing:
        raise ValueError(f"parameter record is missing field {missing}") from None
    validate_params(params)
    return params
