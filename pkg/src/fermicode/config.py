"""Package-wide tunables.

Everything here is a knob, not a claim: the defaults are chosen so that the
test suite runs in reasonable time on one core, and so that obviously wrong
inputs fail fast instead of grinding.
"""

# Hard ceiling on derived register sizes.  Parameter derivation refuses
# anything larger, so a typo in the mode count fails immediately.
Q_LIMIT = 10**9

# Statevector simulation cap: full state vectors up to this many qubits,
# dense unitaries up to the smaller cap.
SIM_QUBIT_CAP = 24
UNITARY_QUBIT_CAP = 12

# Decimal digits kept when synthesized phase angles are serialized.
PHASE_DIGITS = 30

# Iteration budget for the phase-angle finder before it reports failure.
ANGLE_FINDER_MAX_ITER = 80

# Working precision (bits) for divided-difference tables and extremum scans.
SCAN_PRECISION_BITS = 1024

# Cost-model constants for the qDRIFT / randomized-phase-estimation
# projections.  Only the scaling behind them is principled; the prefactors
# are configuration, and reports label them as such.
COST_C = 2.0
COST_C_PRIME = 1.0


def load_overrides(text: str) -> dict:
    """Parse a flat ``key = value`` override file into a typed dict.

    Keys are the lowercase names of the constants above; ``#`` starts a
    comment.  Unknown keys and untypable values raise ``ValueError`` with the
    offending line, so a misspelled knob never silently does nothing.
    """
    known = {
        name.lower(): type(value)
        for name, value in globals().items()
        if name.isupper()
    }
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip().lower()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown setting {key!r}")
        try:
            overrides[key] = known[key](value.strip())
        except ValueError:
            raise ValueError(
                f"line {lineno}: bad value {value.strip()!r} for {key!r}"
            ) from None
    return overrides


def apply_overrides(overrides: dict) -> None:
    for key, value in overrides.items():
        name = key.upper()
        if name not in globals() or not name.isupper():
            raise ValueError(f"unknown setting {key!r}")
        globals()[name] = value
