"""Propagators, non-unitary channels, and the pulse-sequence executor.

Evolution model
    Hard pulses and z rotations are instantaneous unitaries.  Delays evolve
    the state under the rotating-frame Hamiltonian

        H = 2*pi * ( nu1*Iz1 + nu2*Iz2 + J*Iz1*Iz2 )          (weak)
        H_iso = H + 2*pi*J * ( Ix1*Ix2 + Iy1*Iy2 )            (isotropic)

    with offsets nu_k = +/- delta/2 taken from the SpinSystem.  The weak
    Hamiltonian is diagonal, so delay propagators are elementwise phases;
    the isotropic flip-flop term only couples |01> and |10>, and that 2x2
    block is exponentiated in closed form.

Relaxation
    Pure transverse (phase-damping) relaxation is applied after each delay
    when enabled: element rho[a, b] decays by exp(-t/T2_k) for every spin k
    whose basis label differs between a and b.  Populations are untouched.
    This is the composition of one single-spin phase-damping channel per
    spin, hence completely positive and trace preserving.  Longitudinal
    relaxation is not modeled.

The crush gradient is modeled as a total-coherence-order filter: it zeroes
every element whose bra and ket labels differ in total excitation number.
Equivalently it is a uniform twirl over global z rotations (a mixture of
unitaries), so it is also CPTP.  Populations and the zero-quantum pair
rho[01,10] / rho[10,01] survive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np
from numpy.typing import NDArray

from .spin_model import (
    Acquire,
    Crush,
    Delay,
    DensityState,
    FractionOfDelta,
    HardPulse,
    PulseSequence,
    SpinSystem,
    UnitaryOp,
    ZRotation,
    resolve_duration,
)

__all__ = [
    "Hamiltonian",
    "ExecutionOptions",
    "TrajectoryRecord",
    "SequenceResult",
    "SequenceStructureError",
    "hamiltonian",
    "delay_propagator",
    "hard_pulse_propagator",
    "z_rotation_propagator",
    "composite_z_propagator",
    "apply_unitary",
    "crush",
    "dephase",
    "run_sequence",
    "sequence_unitary",
    "write_trajectory",
]

# Iz eigenvalues (+1/2 for |0>) of each spin over the basis (|00>,|01>,|10>,|11>)
_M1 = np.array([0.5, 0.5, -0.5, -0.5])
_M2 = np.array([0.5, -0.5, 0.5, -0.5])

# Pauli matrices for the single-spin rotation formula
_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}

# label-mismatch masks: 1 where spin k's basis label differs between bra and ket
_DIFF1 = np.abs(_M1[:, None] - _M1[None, :])
_DIFF2 = np.abs(_M2[:, None] - _M2[None, :])

# total coherence order of each element; zero-order elements survive a crush
_COHERENCE_ORDER = (_M1 + _M2)[:, None] - (_M1 + _M2)[None, :]
_CRUSH_MASK = (_COHERENCE_ORDER == 0).astype(float)


class SequenceStructureError(ValueError):
    """A pulse sequence cannot be executed or compiled as requested."""


@dataclass(frozen=True, eq=False, repr=False)
class Hamiltonian:
    """Rotating-frame Hamiltonian matrix in rad/s.

    Diagonal under the weak-coupling model; the isotropic model adds the
    flip-flop block coupling |01> and |10>.
    """

    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = np.array(self.matrix, dtype=complex, copy=True)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        herm = np.max(np.abs(arr - arr.conj().T))
        if herm > 1e-12 * max(1.0, np.max(np.abs(arr))):
            raise ValueError(f"Hamiltonian not Hermitian: max deviation {herm:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    def __repr__(self) -> str:
        return f"Hamiltonian({np.array2string(self.matrix, precision=3)})"


@dataclass(frozen=True)
class ExecutionOptions:
    """Knobs for `run_sequence`.

    Args:
        relaxation_enabled: apply T2 phase damping during delays.
        neglect_j_during_short_delays: drop the J coupling during the short
            1/delta-type delays that realize z rotations (the approximation
            under which the canonical sequences are exact).  Delays written
            in 1/J always evolve under the full coupling.
        record_trajectory: keep a state snapshot after every element.
    """

    relaxation_enabled: bool = False
    neglect_j_during_short_delays: bool = False
    record_trajectory: bool = False


@dataclass(frozen=True)
class TrajectoryRecord:
    index: int  # 1-based element position
    element: str  # canonical token for the element
    elapsed_s: float
    state: DensityState


@dataclass(frozen=True)
class SequenceResult:
    """Outcome of executing a pulse sequence."""

    state: DensityState
    total_delay_s: float
    acquired: bool
    trajectory: tuple[TrajectoryRecord, ...] = field(default_factory=tuple)


def hamiltonian(sys: SpinSystem) -> Hamiltonian:
    """Background Hamiltonian of the system in rad/s."""
    return Hamiltonian(_hamiltonian_matrix(sys, include_j=True))


def _hamiltonian_matrix(sys: SpinSystem, include_j: bool) -> NDArray[np.complex128]:
    nu1, nu2 = sys.rotating_frame_offsets_hz
    diag = nu1 * _M1 + nu2 * _M2
    if include_j:
        diag = diag + sys.j_hz * _M1 * _M2
    h = np.diag(diag.astype(complex))
    if include_j and sys.coupling_model == "isotropic":
        # flip-flop term J*(Ix1 Ix2 + Iy1 Iy2): J/2 between |01> and |10>
        h[1, 2] = h[2, 1] = sys.j_hz / 2
    return 2 * np.pi * h


def delay_propagator(sys: SpinSystem, t: float, *, include_j: bool = True) -> UnitaryOp:
    """exp(-i H t) for a free-evolution delay of t seconds.

    The weak model gives elementwise phases; the isotropic central block is
    exponentiated with the exact 2x2 formula.  `include_j` drops the
    coupling term entirely (pure Zeeman evolution).
    """
    if t < 0:
        raise ValueError(f"delay duration must be non-negative, got {t!r}")
    nu1, nu2 = sys.rotating_frame_offsets_hz
    diag = nu1 * _M1 + nu2 * _M2
    if include_j:
        diag = diag + sys.j_hz * _M1 * _M2
    u = np.diag(np.exp(-2j * np.pi * diag * t))
    if include_j and sys.coupling_model == "isotropic":
        # central block: a*E + bz*sigma_z + bx*sigma_x over (|01>, |10>)
        a = 2 * np.pi * (-sys.j_hz / 4)
        bz = 2 * np.pi * (nu1 - nu2) / 2
        bx = 2 * np.pi * sys.j_hz / 2
        b = np.hypot(bx, bz)
        if b == 0.0:
            block = np.exp(-1j * a * t) * np.eye(2)
        else:
            nx, nz = bx / b, bz / b
            sigma = nx * _SIGMA["x"] + nz * np.diag([1.0, -1.0]).astype(complex)
            block = np.exp(-1j * a * t) * (
                np.cos(b * t) * np.eye(2) - 1j * np.sin(b * t) * sigma
            )
        u[1:3, 1:3] = block
    return UnitaryOp(u)


def _single_spin_rotation(angle_rad: float, phase: str) -> NDArray[np.complex128]:
    sign = -1.0 if phase.startswith("-") else 1.0
    sigma = _SIGMA[phase[-1]]
    return np.cos(angle_rad / 2) * np.eye(2) - 1j * np.sin(angle_rad / 2) * sign * sigma


def hard_pulse_propagator(angle_deg: float, phase: str) -> UnitaryOp:
    """exp(-i*theta*(I_phi1 + I_phi2)): identical rotation of both spins."""
    if phase not in ("x", "-x", "y", "-y"):
        raise ValueError(f"pulse phase must be one of ('x', '-x', 'y', '-y'), got {phase!r}")
    r = _single_spin_rotation(np.deg2rad(angle_deg), phase)
    return UnitaryOp(np.kron(r, r))


def z_rotation_propagator(angle_deg: float, pattern: str) -> UnitaryOp:
    """exp(-i*theta*(Iz1 +/- Iz2)) for pattern "equal" / "opposite"."""
    theta = np.deg2rad(angle_deg)
    if pattern == "equal":
        gen = _M1 + _M2
    elif pattern == "opposite":
        gen = _M1 - _M2
    else:
        raise ValueError(f"pattern must be 'equal' or 'opposite', got {pattern!r}")
    return UnitaryOp(np.diag(np.exp(-1j * theta * gen)))


def composite_z_propagator(angle_deg: float, pattern: str = "equal") -> UnitaryOp:
    """Equal z rotation built from three hard pulses.

    Matrix product hard(90, x) @ hard(theta, y) @ hard(90, -x), i.e. the
    pulse-time order 90(-x), theta(y), 90(x); equal to
    `z_rotation_propagator(theta, "equal")` up to global phase.
    """
    if pattern != "equal":
        raise ValueError("composite z pulses are only defined for the 'equal' pattern")
    theta = np.deg2rad(angle_deg)
    u = (
        np.kron(_single_spin_rotation(np.pi / 2, "x"), _single_spin_rotation(np.pi / 2, "x"))
        @ np.kron(_single_spin_rotation(theta, "y"), _single_spin_rotation(theta, "y"))
        @ np.kron(_single_spin_rotation(np.pi / 2, "-x"), _single_spin_rotation(np.pi / 2, "-x"))
    )
    return UnitaryOp(u)


def apply_unitary(state: DensityState, u: UnitaryOp) -> DensityState:
    """U rho U^dag."""
    m = u.matrix @ state.matrix @ u.matrix.conj().T
    return DensityState((m + m.conj().T) / 2)


def crush(state: DensityState) -> DensityState:
    """Zero every element of nonzero total coherence order."""
    return DensityState(state.matrix * _CRUSH_MASK)


def dephase(state: DensityState, t: float, sys: SpinSystem) -> DensityState:
    """Independent per-spin phase damping over t seconds."""
    if t < 0:
        raise ValueError(f"dephasing time must be non-negative, got {t!r}")
    t2_1, t2_2 = sys.t2_s
    factor = np.exp(-t * (_DIFF1 / t2_1 + _DIFF2 / t2_2))
    return DensityState(state.matrix * factor)


def _element_token(el) -> str:
    # local import: the DSL owns the canonical token forms
    from .pulse_dsl import serialize_element

    return serialize_element(el)


def _delay_includes_j(el: Delay, opts: ExecutionOptions) -> bool:
    return not (opts.neglect_j_during_short_delays and isinstance(el.duration, FractionOfDelta))


def run_sequence(
    sys: SpinSystem,
    initial: DensityState,
    seq: PulseSequence,
    opts: Optional[ExecutionOptions] = None,
) -> SequenceResult:
    """Execute a pulse sequence left to right against a density state.

    Hard pulses and z rotations apply instantaneously; each delay applies
    its propagator and then, when relaxation is enabled, phase damping over
    the same duration.  An `Acquire` element ends execution with the state
    marked ready for spectrum synthesis.  The accumulated wall-clock time
    (sum of delays) is reported.
    """
    opts = opts or ExecutionOptions()
    if not isinstance(seq, PulseSequence):
        seq = PulseSequence(tuple(seq))  # re-validates structure
    state = initial
    elapsed = 0.0
    acquired = False
    trajectory: list[TrajectoryRecord] = []
    for i, el in enumerate(seq, start=1):
        if isinstance(el, HardPulse):
            state = apply_unitary(state, hard_pulse_propagator(el.angle_deg, el.phase))
        elif isinstance(el, ZRotation):
            state = apply_unitary(state, z_rotation_propagator(el.angle_deg, el.pattern))
        elif isinstance(el, Delay):
            dur = resolve_duration(el.duration, sys)
            state = apply_unitary(state, delay_propagator(sys, dur, include_j=_delay_includes_j(el, opts)))
            if opts.relaxation_enabled:
                state = dephase(state, dur, sys)
            elapsed += dur
        elif isinstance(el, Crush):
            state = crush(state)
        elif isinstance(el, Acquire):
            acquired = True
        else:  # pragma: no cover - PulseSequence construction excludes this
            raise SequenceStructureError(f"element {i}: unknown element {el!r}")
        if opts.record_trajectory:
            trajectory.append(TrajectoryRecord(i, _element_token(el), elapsed, state))
        if acquired:
            break
    return SequenceResult(state, elapsed, acquired, tuple(trajectory))


def sequence_unitary(
    sys: SpinSystem,
    seq: PulseSequence,
    *,
    neglect_j_during_short_delays: bool = False,
) -> UnitaryOp:
    """Compile a crush- and acquire-free sequence into a single propagator.

    The product runs in left-to-right application order (the first element
    acts first).
    """
    opts = ExecutionOptions(neglect_j_during_short_delays=neglect_j_during_short_delays)
    u = np.eye(4, dtype=complex)
    for i, el in enumerate(seq, start=1):
        if isinstance(el, HardPulse):
            u = hard_pulse_propagator(el.angle_deg, el.phase).matrix @ u
        elif isinstance(el, ZRotation):
            u = z_rotation_propagator(el.angle_deg, el.pattern).matrix @ u
        elif isinstance(el, Delay):
            dur = resolve_duration(el.duration, sys)
            u = delay_propagator(sys, dur, include_j=_delay_includes_j(el, opts)).matrix @ u
        else:
            kind = "crush" if isinstance(el, Crush) else "acquire"
            raise SequenceStructureError(
                f"element {i}: {kind} has no unitary representation"
            )
    return UnitaryOp(u)


def write_trajectory(records: Iterable[TrajectoryRecord], fp: IO[str]) -> None:
    """Write trajectory records as line-delimited JSON.

    One record per line with keys index, element, elapsed_s, state_real,
    state_imag.
    """
    for rec in records:
        payload = {
            "index": rec.index,
            "element": rec.element,
            "elapsed_s": rec.elapsed_s,
            "state_real": np.real(rec.state.matrix).tolist(),
            "state_imag": np.imag(rec.state.matrix).tolist(),
        }
        fp.write(json.dumps(payload) + "\n")
