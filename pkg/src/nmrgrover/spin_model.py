"""Domain types, physical parameters, and conventions for a two-spin NMR quantum computer.

This module fixes the conventions that every other module relies on:

Basis and operators
    The computational basis is |q1 q2> ordered (|00>, |01>, |10>, |11>),
    with qubit 1 the leftmost label.  |0> is the low-energy state and the
    angular-momentum convention is Iz|0> = +1/2 |0>.

Rotations
    All rotations are active, exp(-i * theta * I_phi).  Hard RF pulses
    rotate both spins identically.

Rotating frame
    The transmitter sits midway between the two resonances, so the spins
    precess at offsets of +/- delta/2.  Under the propagator convention
    above, a single-quantum coherence of a spin with offset ``nu`` evolves
    as exp(-i*2*pi*nu*t); with the usual receiver/display convention its
    spectral line appears at the *negated* offset.  ``qubit1_side`` names
    the display side of qubit 1's multiplet (default "negative", i.e. the
    right-hand side of a conventionally plotted spectrum), which puts
    qubit 1's rotating-frame offset at +delta/2.

Units
    Frequencies are Hz in `SpinSystem`; Hamiltonians are rad/s; durations
    are seconds; pulse and rotation angles are degrees.

All types here are immutable values: dataclasses are frozen and wrapped
numpy arrays are defensive copies marked read-only, so instances can be
shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "POSITIVITY_TOL",
    "UNITARITY_TOL",
    "PULSE_PHASES",
    "BASIS_LABELS",
    "SpinSystem",
    "DensityState",
    "UnitaryOp",
    "HardPulse",
    "Delay",
    "ZRotation",
    "Crush",
    "Acquire",
    "PulseElement",
    "PulseSequence",
    "FractionOfJ",
    "FractionOfDelta",
    "LiteralDuration",
    "DurationExpr",
    "GroverFunction",
    "resolve_duration",
    "ppm_offsets_to_delta",
    "basis_ket",
    "singlet_ket",
]

# Tolerances for matrix invariants, ~100x the accumulation error of
# double-precision products of 4x4 matrices.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
UNITARITY_TOL = 1e-10

PULSE_PHASES = ("x", "-x", "y", "-y")
BASIS_LABELS = ("00", "01", "10", "11")

_SIDES = ("negative", "positive")
_COUPLING_MODELS = ("weak", "isotropic")


def _check_positive(name: str, value: float) -> None:
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class SpinSystem:
    """Physical parameters of the two-proton spin system.

    Defaults describe a 400 MHz system with a 160 Hz shift separation,
    4.8 Hz scalar coupling and equal 0.67 s transverse relaxation times.

    Args:
        delta_hz: frequency separation of the two resonances (Hz).
        j_hz: scalar coupling constant (Hz); may be negative, symbolic
            delays resolve against its magnitude.
        t2_s: spin-spin relaxation time of each spin (s).
        spectrometer_mhz: proton Larmor frequency (MHz).
        qubit1_side: which half of the displayed spectrum carries
            qubit 1's multiplet ("negative" or "positive" offsets).
        coupling_model: "weak" (z-z coupling only, diagonal Hamiltonian)
            or "isotropic" (adds the flip-flop block).
    """

    delta_hz: float = 160.0
    j_hz: float = 4.8
    t2_s: tuple[float, float] = (0.67, 0.67)
    spectrometer_mhz: float = 400.0
    qubit1_side: str = "negative"
    coupling_model: str = "weak"

    def __post_init__(self) -> None:
        # delta_hz = 0 and j_hz = 0 are permitted so that limiting cases
        # (pure Zeeman, pure coupling) can be simulated; the corresponding
        # symbolic delays then fail to resolve (see resolve_duration).
        if not np.isfinite(self.delta_hz) or self.delta_hz < 0:
            raise ValueError(f"delta_hz must be >= 0 and finite, got {self.delta_hz!r}")
        if not np.isfinite(self.j_hz):
            raise ValueError(f"j_hz must be finite, got {self.j_hz!r}")
        if len(self.t2_s) != 2:
            raise ValueError("t2_s must hold one value per spin")
        object.__setattr__(self, "t2_s", (float(self.t2_s[0]), float(self.t2_s[1])))
        _check_positive("t2_s[0]", self.t2_s[0])
        _check_positive("t2_s[1]", self.t2_s[1])
        _check_positive("spectrometer_mhz", self.spectrometer_mhz)
        if self.qubit1_side not in _SIDES:
            raise ValueError(f"qubit1_side must be one of {_SIDES}, got {self.qubit1_side!r}")
        if self.coupling_model not in _COUPLING_MODELS:
            raise ValueError(
                f"coupling_model must be one of {_COUPLING_MODELS}, got {self.coupling_model!r}"
            )

    @property
    def multiplet_centers_hz(self) -> tuple[float, float]:
        """Displayed center frequency of each qubit's multiplet (Hz)."""
        s1 = -0.5 if self.qubit1_side == "negative" else 0.5
        return (s1 * self.delta_hz, -s1 * self.delta_hz)

    @property
    def rotating_frame_offsets_hz(self) -> tuple[float, float]:
        """Rotating-frame precession offset of each spin (Hz).

        Display frequency = -offset under the module's sign conventions.
        """
        c1, c2 = self.multiplet_centers_hz
        return (-c1, -c2)

    def to_config_text(self) -> str:
        """Serialize to the flat key-value config format."""
        lines = [
            f"delta_hz = {self.delta_hz!r}",
            f"j_hz = {self.j_hz!r}",
            f"t2_1_s = {self.t2_s[0]!r}",
            f"t2_2_s = {self.t2_s[1]!r}",
            f"spectrometer_mhz = {self.spectrometer_mhz!r}",
            f"qubit1_side = {self.qubit1_side}",
            f"coupling_model = {self.coupling_model}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_config_text(cls, text: str) -> "SpinSystem":
        """Parse the flat key-value config format ('#' starts a comment)."""
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
        known = {
            "delta_hz", "j_hz", "t2_1_s", "t2_2_s",
            "spectrometer_mhz", "qubit1_side", "coupling_model",
        }
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        defaults = cls()
        try:
            return cls(
                delta_hz=float(values.get("delta_hz", defaults.delta_hz)),
                j_hz=float(values.get("j_hz", defaults.j_hz)),
                t2_s=(
                    float(values.get("t2_1_s", defaults.t2_s[0])),
                    float(values.get("t2_2_s", defaults.t2_s[1])),
                ),
                spectrometer_mhz=float(values.get("spectrometer_mhz", defaults.spectrometer_mhz)),
                qubit1_side=values.get("qubit1_side", defaults.qubit1_side),
                coupling_model=values.get("coupling_model", defaults.coupling_model),
            )
        except ValueError:
            raise
        except Exception as exc:  # malformed numerics
            raise ValueError(f"invalid config value: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_config_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SpinSystem":
        return cls.from_config_text(Path(path).read_text(encoding="utf-8"))


def ppm_offsets_to_delta(shift1_ppm: float, shift2_ppm: float, spectrometer_mhz: float) -> float:
    """Frequency separation |shift1 - shift2| * spectrometer_mhz in Hz.

    1 ppm at f MHz is f Hz, so each shift converts to Hz before the
    subtraction; this keeps decimal ppm inputs exact in floating point.
    """
    _check_positive("spectrometer_mhz", spectrometer_mhz)
    return abs(shift1_ppm * spectrometer_mhz - shift2_ppm * spectrometer_mhz)


# ---------------------------------------------------------------------------
# symbolic delay durations
# ---------------------------------------------------------------------------

def _check_fraction(numerator: int, denominator: int) -> None:
    for name, v in (("numerator", numerator), ("denominator", denominator)):
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class FractionOfJ:
    """Delay of (numerator/denominator) * 1/J seconds."""

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        _check_fraction(self.numerator, self.denominator)


@dataclass(frozen=True)
class FractionOfDelta:
    """Delay of (numerator/denominator) * 1/delta seconds."""

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        _check_fraction(self.numerator, self.denominator)


@dataclass(frozen=True)
class LiteralDuration:
    """Fixed delay in seconds."""

    seconds: float

    def __post_init__(self) -> None:
        _check_positive("seconds", self.seconds)


DurationExpr = Union[FractionOfJ, FractionOfDelta, LiteralDuration]


def resolve_duration(expr: DurationExpr, sys: SpinSystem) -> float:
    """Evaluate a symbolic delay against a spin system, in seconds.

    Symbolic fractions resolve exactly (no pre-rounded constants) against
    the magnitude of the named parameter.
    """
    if isinstance(expr, FractionOfJ):
        if sys.j_hz == 0:
            raise ValueError("cannot resolve a 1/J delay: the system has j_hz = 0")
        return expr.numerator / (expr.denominator * abs(sys.j_hz))
    if isinstance(expr, FractionOfDelta):
        if sys.delta_hz == 0:
            raise ValueError("cannot resolve a 1/delta delay: the system has delta_hz = 0")
        return expr.numerator / (expr.denominator * sys.delta_hz)
    if isinstance(expr, LiteralDuration):
        return expr.seconds
    raise TypeError(f"not a duration expression: {expr!r}")


# ---------------------------------------------------------------------------
# pulse-sequence elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HardPulse:
    """Instantaneous RF pulse rotating both spins by angle_deg about the phase axis."""

    angle_deg: float
    phase: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle_deg", float(self.angle_deg))
        if not np.isfinite(self.angle_deg) or not (0.0 < self.angle_deg < 360.0):
            raise ValueError(f"pulse angle must lie in (0, 360) degrees, got {self.angle_deg!r}")
        if self.phase not in PULSE_PHASES:
            raise ValueError(f"pulse phase must be one of {PULSE_PHASES}, got {self.phase!r}")


@dataclass(frozen=True)
class Delay:
    """Free evolution under the background Hamiltonian for a symbolic duration."""

    duration: DurationExpr

    def __post_init__(self) -> None:
        if not isinstance(self.duration, (FractionOfJ, FractionOfDelta, LiteralDuration)):
            raise ValueError(f"not a duration expression: {self.duration!r}")


@dataclass(frozen=True)
class ZRotation:
    """Instantaneous z rotation, equal or opposite on the two spins."""

    angle_deg: float
    pattern: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle_deg", float(self.angle_deg))
        if not np.isfinite(self.angle_deg):
            raise ValueError(f"z-rotation angle must be finite, got {self.angle_deg!r}")
        if self.pattern not in ("equal", "opposite"):
            raise ValueError(f"z-rotation pattern must be 'equal' or 'opposite', got {self.pattern!r}")


@dataclass(frozen=True)
class Crush:
    """Gradient pulse dephasing every coherence of nonzero total order."""


@dataclass(frozen=True)
class Acquire:
    """End of sequence: start signal acquisition."""


PulseElement = Union[HardPulse, Delay, ZRotation, Crush, Acquire]


@dataclass(frozen=True)
class PulseSequence:
    """Ordered, immutable list of pulse elements.

    An `Acquire` element may only appear as the final element.
    """

    elements: tuple[PulseElement, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        for i, el in enumerate(elements):
            if not isinstance(el, (HardPulse, Delay, ZRotation, Crush, Acquire)):
                raise ValueError(f"element {i + 1} is not a pulse element: {el!r}")
            if isinstance(el, Acquire) and i != len(elements) - 1:
                raise ValueError(
                    f"element {i + 1}: acquire may only appear as the final element"
                )

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, idx):
        return self.elements[idx]

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.elements + other.elements)


# ---------------------------------------------------------------------------
# matrix-valued types
# ---------------------------------------------------------------------------

def _as_readonly_4x4(matrix: NDArray) -> NDArray[np.complex128]:
    arr = np.array(matrix, dtype=complex, copy=True)
    if arr.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False, repr=False)
class DensityState:
    """4x4 density operator on the two-qubit space.

    Construction validates Hermiticity, unit trace, and positive
    semidefiniteness (within `POSITIVITY_TOL`).
    """

    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = _as_readonly_4x4(self.matrix)
        object.__setattr__(self, "matrix", arr)
        herm_dev = np.max(np.abs(arr - arr.conj().T))
        if herm_dev > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian: max deviation {herm_dev:.3e}")
        trace_dev = abs(arr.trace() - 1.0)
        if trace_dev > TRACE_TOL:
            raise ValueError(f"density matrix trace differs from 1 by {trace_dev:.3e}")
        min_eig = float(np.linalg.eigvalsh((arr + arr.conj().T) / 2).min())
        if min_eig < -POSITIVITY_TOL:
            raise ValueError(f"density matrix not positive semidefinite: min eigenvalue {min_eig:.3e}")

    @property
    def populations(self) -> NDArray[np.float64]:
        """Diagonal populations in the computational basis."""
        return np.real(np.diag(self.matrix)).copy()

    def __repr__(self) -> str:
        pops = ", ".join(f"{p:.4f}" for p in self.populations)
        return f"DensityState(populations=[{pops}])"


@dataclass(frozen=True, eq=False, repr=False)
class UnitaryOp:
    """4x4 unitary matrix (gate or compiled sequence propagator)."""

    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = _as_readonly_4x4(self.matrix)
        object.__setattr__(self, "matrix", arr)
        dev = np.max(np.abs(arr.conj().T @ arr - np.eye(4)))
        if dev > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: max |U^dag U - 1| = {dev:.3e}")

    def __repr__(self) -> str:
        return f"UnitaryOp({np.array2string(self.matrix, precision=3, suppress_small=True)})"


# ---------------------------------------------------------------------------
# Grover oracle labels and shared kets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroverFunction:
    """Binary function on two bits with exactly one satisfying input."""

    satisfying_input: str

    def __post_init__(self) -> None:
        if self.satisfying_input not in BASIS_LABELS:
            raise ValueError(
                f"satisfying input must be one of {BASIS_LABELS}, got {self.satisfying_input!r}"
            )

    @property
    def index(self) -> int:
        """Computational-basis index of the satisfying input."""
        return int(self.satisfying_input, 2)

    @property
    def bits(self) -> tuple[int, int]:
        return (int(self.satisfying_input[0]), int(self.satisfying_input[1]))


def basis_ket(label: str) -> NDArray[np.complex128]:
    """Computational basis column vector |q1 q2>."""
    if label not in BASIS_LABELS:
        raise ValueError(f"basis label must be one of {BASIS_LABELS}, got {label!r}")
    ket = np.zeros(4, dtype=complex)
    ket[int(label, 2)] = 1.0
    return ket


def singlet_ket() -> NDArray[np.complex128]:
    """The antisymmetric two-spin state (|01> - |10>)/sqrt(2)."""
    return (basis_ket("01") - basis_ket("10")) / np.sqrt(2.0)
