"""Gate-level circuit engine: the correctness oracle for compiled pulse sequences.

Gates are plain data; `gate_unitary` realizes them as 4x4 matrices in the
|q1 q2> basis.  The pseudo-Hadamard h is a 90 degree y rotation; which sign
of y plays h (and which h^-1) is a documented convention, pinned by
requiring the end-to-end search outcome to land on the satisfying input
under this package's global rotation convention.  Pass
``h_positive_y=False`` to flip it.

`verify_pulse_against_gate` grounds the pulse sequences in the circuits:
each named preparation/oracle sequence is compiled with `sequence_unitary`
(J neglected during the short z-rotation delays, the approximation under
which the sequences are exact) and compared against its gate-level target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .dynamics import hard_pulse_propagator, sequence_unitary
from .pulse_dsl import library
from .spin_model import GroverFunction, SpinSystem, UnitaryOp, singlet_ket

__all__ = [
    "Hadamard",
    "PseudoH",
    "NotGate",
    "CNot",
    "OracleUf",
    "U00",
    "Gate",
    "gate_unitary",
    "compose",
    "grover_circuit",
    "disentangle_circuit",
    "equivalence_up_to_global_phase",
    "verify_pulse_against_gate",
    "gates_to_text",
]

_TARGETS = (1, 2)


def _check_target(target: int) -> None:
    if target not in _TARGETS:
        raise ValueError(f"gate target must be 1 or 2, got {target!r}")


@dataclass(frozen=True)
class Hadamard:
    target: int

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class PseudoH:
    """90 degree y rotation standing in for the Hadamard; `inverse` flips the axis sign."""

    target: int
    inverse: bool = False

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class NotGate:
    target: int

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class CNot:
    control: int
    target: int

    def __post_init__(self) -> None:
        _check_target(self.control)
        _check_target(self.target)
        if self.control == self.target:
            raise ValueError("controlled-not needs distinct control and target")


@dataclass(frozen=True)
class OracleUf:
    """Phase oracle: |x> -> -|x> exactly at the satisfying input."""

    f: GroverFunction


@dataclass(frozen=True)
class U00:
    """Replaces |00> by -|00>, leaving the other basis states unchanged."""


Gate = Union[Hadamard, PseudoH, NotGate, CNot, OracleUf, U00]

_H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X1 = np.array([[0, 1], [1, 0]], dtype=complex)


def _embed(single: NDArray[np.complex128], target: int) -> NDArray[np.complex128]:
    eye = np.eye(2, dtype=complex)
    return np.kron(single, eye) if target == 1 else np.kron(eye, single)


def _rotation_y(angle_deg: float) -> NDArray[np.complex128]:
    th = np.deg2rad(angle_deg)
    return np.array(
        [[np.cos(th / 2), -np.sin(th / 2)], [np.sin(th / 2), np.cos(th / 2)]],
        dtype=complex,
    )


def gate_unitary(g: Gate, *, h_positive_y: bool = True) -> UnitaryOp:
    """4x4 unitary of a gate on the declared target(s)."""
    if isinstance(g, Hadamard):
        return UnitaryOp(_embed(_H1, g.target))
    if isinstance(g, NotGate):
        return UnitaryOp(_embed(_X1, g.target))
    if isinstance(g, PseudoH):
        sign = 1.0 if h_positive_y else -1.0
        if g.inverse:
            sign = -sign
        return UnitaryOp(_embed(_rotation_y(sign * 90.0), g.target))
    if isinstance(g, CNot):
        u = np.eye(4, dtype=complex)
        # swap the target bit within the control=1 subspace
        if g.control == 1:
            u[[2, 3]] = u[[3, 2]]
        else:
            u[[1, 3]] = u[[3, 1]]
        return UnitaryOp(u)
    if isinstance(g, OracleUf):
        diag = np.ones(4, dtype=complex)
        diag[g.f.index] = -1.0
        return UnitaryOp(np.diag(diag))
    if isinstance(g, U00):
        return UnitaryOp(np.diag(np.array([-1.0, 1.0, 1.0, 1.0], dtype=complex)))
    raise TypeError(f"not a gate: {g!r}")


def compose(gates: Sequence[Gate], *, h_positive_y: bool = True) -> UnitaryOp:
    """Product of gate unitaries in circuit order (leftmost gate acts first)."""
    if not gates:
        raise ValueError("cannot compose an empty gate list")
    u = np.eye(4, dtype=complex)
    for g in gates:
        u = gate_unitary(g, h_positive_y=h_positive_y).matrix @ u
    return UnitaryOp(u)


def grover_circuit(f: GroverFunction) -> list[Gate]:
    """Single-query two-qubit search circuit for oracle `f`.

    Layers, leftmost first: h^-1 on both qubits, the oracle, h on both,
    the |00> phase flip, and a final h^-1 on both.
    """
    return [
        PseudoH(1, inverse=True), PseudoH(2, inverse=True),
        OracleUf(f),
        PseudoH(1), PseudoH(2),
        U00(),
        PseudoH(1, inverse=True), PseudoH(2, inverse=True),
    ]


def disentangle_circuit() -> list[Gate]:
    """Circuit converting the singlet into |00>: CNOT(1->2), H(1), NOT both."""
    return [CNot(control=1, target=2), Hadamard(1), NotGate(1), NotGate(2)]


def equivalence_up_to_global_phase(u: UnitaryOp, v: UnitaryOp) -> float:
    """|tr(U^dag V)| / 4: 1 iff U and V agree up to a global phase."""
    return float(abs(np.trace(u.matrix.conj().T @ v.matrix)) / 4.0)


def _oracle_sequence_fidelity(
    sys: SpinSystem, name: str, f: GroverFunction, h_positive_y: bool
) -> float:
    u = sequence_unitary(sys, library(name), neglect_j_during_short_delays=True)
    return equivalence_up_to_global_phase(u, gate_unitary(OracleUf(f), h_positive_y=h_positive_y))


def _prep_state_fidelity(sys: SpinSystem) -> float:
    u = sequence_unitary(sys, library("P_prep"), neglect_j_during_short_delays=True)
    out = u.matrix @ singlet_ket()
    return float(abs(out[0]) ** 2)


def verify_pulse_against_gate(
    sys: SpinSystem,
    seq_name: str,
    f: Optional[GroverFunction] = None,
    *,
    h_positive_y: bool = True,
) -> float:
    """Fidelity of a named pulse sequence against its gate-level target.

    ``P_prep`` is checked on the singlet input only (state fidelity to
    |00>), since that is the only state it is ever applied to.  Each
    ``P_xy`` compiles to a propagator and is compared against the matching
    phase oracle; passing an explicit `f` overrides the implied oracle
    (useful for deliberate-mismatch checks).  ``grover`` (which contains
    crush gradients) is verified piecewise: the stretch before the first
    crush is the P_prep state check, and between the crushes each pulse
    layer is compared against its circuit counterpart - the sandwiching
    90(-y)/90(y) pulses against the pseudo-Hadamard layers, P_f against the
    oracle, P_00 against the |00> phase flip.  The reported fidelity is the
    minimum over pieces.  The trailing 90(y) readout pulse belongs to the
    measurement, not the circuit, and is not checked.
    """
    if seq_name == "P_prep":
        return _prep_state_fidelity(sys)
    if seq_name in ("P_00", "P_01", "P_10", "P_11"):
        implied = GroverFunction(seq_name[2:])
        target = f if f is not None else implied
        return _oracle_sequence_fidelity(sys, seq_name, target, h_positive_y)
    if seq_name == "grover":
        if f is None:
            raise ValueError("verifying the grover sequence requires an oracle (GroverFunction)")
        h_layer = compose([PseudoH(1), PseudoH(2)], h_positive_y=h_positive_y)
        hinv_layer = compose(
            [PseudoH(1, inverse=True), PseudoH(2, inverse=True)], h_positive_y=h_positive_y
        )
        pulse_minus_y = hard_pulse_propagator(90.0, "-y")
        pulse_plus_y = hard_pulse_propagator(90.0, "y")
        pieces = [
            _prep_state_fidelity(sys),
            equivalence_up_to_global_phase(pulse_minus_y, hinv_layer),
            _oracle_sequence_fidelity(sys, f"P_{f.satisfying_input}", f, h_positive_y),
            equivalence_up_to_global_phase(pulse_plus_y, h_layer),
            _oracle_sequence_fidelity(sys, "P_00", GroverFunction("00"), h_positive_y),
            equivalence_up_to_global_phase(pulse_minus_y, hinv_layer),
        ]
        return min(pieces)
    raise ValueError(f"unknown sequence name {seq_name!r}")


def gates_to_text(gates: Sequence[Gate]) -> str:
    """One-gate-per-line text form for display."""
    lines = []
    for g in gates:
        if isinstance(g, Hadamard):
            lines.append(f"H q{g.target}")
        elif isinstance(g, PseudoH):
            lines.append(f"{'h-1' if g.inverse else 'h'} q{g.target}")
        elif isinstance(g, NotGate):
            lines.append(f"NOT q{g.target}")
        elif isinstance(g, CNot):
            lines.append(f"CNOT q{g.control} -> q{g.target}")
        elif isinstance(g, OracleUf):
            lines.append(f"U_f f={g.f.satisfying_input}")
        elif isinstance(g, U00):
            lines.append("U_00")
        else:
            raise TypeError(f"not a gate: {g!r}")
    return "\n".join(lines)
