"""Initial states, full experiment runs, spectrum synthesis, and outcome readout.

Readout model
    The state is analyzed by a hard 90 degree pulse followed by acquisition.
    The canonical sequences carry that readout pulse explicitly, so
    `synthesize_spectrum` normally receives the post-pulse state and simply
    extracts the four single-quantum stick amplitudes; pass `readout_pulse`
    to have it applied first.

    Line (spin k, partner state m) sits at the spin's multiplet center
    plus (m - 1/2)*J and its amplitude is the signed real part, after the
    global receiver phase, of the coherence <0_k m| rho |1_k m>.  The
    receiver phase is a single calibration constant fixed so the pure
    reference experiment yields positive lines; under this package's
    conventions that constant is 0.  One spin's multiplet then sums to at
    most 1/2 (its full transverse magnetization), each line is bounded by
    1/2, and the pure reference shows four lines of +1/4.

    A multiplet pointing up reads the qubit as 0, pointing down as 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .circuits import disentangle_circuit, compose, gates_to_text, grover_circuit
from .dynamics import (
    ExecutionOptions,
    apply_unitary,
    hard_pulse_propagator,
    run_sequence,
)
from .pulse_dsl import library, serialize
from .spin_model import (
    Acquire,
    BASIS_LABELS,
    DensityState,
    GroverFunction,
    HardPulse,
    PulseSequence,
    SpinSystem,
    basis_ket,
    singlet_ket,
)

__all__ = [
    "Singlet",
    "Werner",
    "BasisState",
    "InitialStateSpec",
    "SpectralLine",
    "Spectrum",
    "Classification",
    "ExperimentResult",
    "AmbiguousSpectrumError",
    "IDEAL_MULTIPLET_SUM",
    "RECEIVER_PHASE_RAD",
    "prepare",
    "synthesize_spectrum",
    "calibrate_receiver_phase",
    "classify",
    "run_grover",
    "run_reference",
    "attenuation_report",
    "spectrum_records",
]

# Multiplet sum of one spin at full transverse magnetization; the readout
# normalization against which per-spin confidences are measured.
IDEAL_MULTIPLET_SUM = 0.5

# Global receiver phase (rad) making the pure reference lines positive.
RECEIVER_PHASE_RAD = 0.0

_AMBIGUOUS_ATOL = 1e-12


# ---------------------------------------------------------------------------
# initial states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Singlet:
    """The pure antisymmetric two-spin state."""


@dataclass(frozen=True)
class Werner:
    """(1 - epsilon)/4 * identity + epsilon * singlet projector."""

    epsilon: float

    def __post_init__(self) -> None:
        eps = float(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not np.isfinite(eps) or not (0.0 <= eps <= 1.0):
            raise ValueError(
                f"epsilon must lie in [0, 1], got {eps!r}: epsilon > 1 gives the "
                "smallest eigenvalue (1 - epsilon)/4 < 0, so the state would not "
                "be positive semidefinite"
            )


@dataclass(frozen=True)
class BasisState:
    label: str

    def __post_init__(self) -> None:
        if self.label not in BASIS_LABELS:
            raise ValueError(f"basis label must be one of {BASIS_LABELS}, got {self.label!r}")


InitialStateSpec = Union[Singlet, Werner, BasisState]


def prepare(spec: InitialStateSpec) -> DensityState:
    """Density state for an initial-state specification."""
    if isinstance(spec, Singlet):
        psi = singlet_ket()
        return DensityState(np.outer(psi, psi.conj()))
    if isinstance(spec, Werner):
        psi = singlet_ket()
        m = (1 - spec.epsilon) * np.eye(4, dtype=complex) / 4
        m += spec.epsilon * np.outer(psi, psi.conj())
        return DensityState(m)
    if isinstance(spec, BasisState):
        ket = basis_ket(spec.label)
        return DensityState(np.outer(ket, ket.conj()))
    raise TypeError(f"not an initial-state spec: {spec!r}")


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralLine:
    frequency_hz: float
    amplitude: float
    spin: int  # 1 or 2
    partner: int  # partner spin's basis label, 0 or 1


@dataclass(frozen=True)
class Spectrum:
    """Four signed stick lines, ordered by frequency."""

    lines: tuple[SpectralLine, ...]

    def __post_init__(self) -> None:
        lines = tuple(self.lines)
        object.__setattr__(self, "lines", lines)
        if len(lines) != 4:
            raise ValueError(f"a spectrum holds exactly four lines, got {len(lines)}")
        for ln in lines:
            if abs(ln.amplitude) > IDEAL_MULTIPLET_SUM + 1e-12:
                raise ValueError(
                    f"line amplitude {ln.amplitude!r} exceeds the normalization bound 1/2"
                )

    def multiplet_sum(self, spin: int) -> float:
        return sum(ln.amplitude for ln in self.lines if ln.spin == spin)

    def total_amplitude(self) -> float:
        return sum(abs(ln.amplitude) for ln in self.lines)


def synthesize_spectrum(
    state: DensityState,
    sys: SpinSystem,
    *,
    readout_pulse: Optional[HardPulse] = None,
    receiver_phase_rad: float = RECEIVER_PHASE_RAD,
) -> Spectrum:
    """Stick spectrum of a post-readout-pulse state.

    If `readout_pulse` is given the state is taken as pre-pulse and the
    pulse is applied first.
    """
    if readout_pulse is not None:
        state = apply_unitary(
            state, hard_pulse_propagator(readout_pulse.angle_deg, readout_pulse.phase)
        )
    rho = state.matrix
    phase = np.exp(1j * receiver_phase_rad)
    c1, c2 = sys.multiplet_centers_hz
    j = sys.j_hz
    # coherence <0_k m| rho |1_k m> for spin k with its partner in state m
    raw = [
        (c1 - j / 2, rho[0, 2], 1, 0),
        (c1 + j / 2, rho[1, 3], 1, 1),
        (c2 - j / 2, rho[0, 1], 2, 0),
        (c2 + j / 2, rho[2, 3], 2, 1),
    ]
    lines = [
        SpectralLine(freq, float(np.real(phase * coherence)), spin, partner)
        for freq, coherence, spin, partner in raw
    ]
    lines.sort(key=lambda ln: (ln.frequency_hz, ln.spin, ln.partner))
    return Spectrum(tuple(lines))


def calibrate_receiver_phase(sys: SpinSystem) -> float:
    """Receiver phase that makes the pure reference spectrum positive real.

    Runs the ideal reference experiment and returns the angle that rotates
    the summed readout coherence onto the positive real axis; 0 under the
    package's default conventions.
    """
    result = run_reference(
        sys,
        Werner(1.0),
        ExecutionOptions(neglect_j_during_short_delays=True),
    )
    post = apply_unitary(result.final_state, hard_pulse_propagator(90.0, "y"))
    rho = post.matrix
    total = rho[0, 2] + rho[1, 3] + rho[0, 1] + rho[2, 3]
    if abs(total) < _AMBIGUOUS_ATOL:
        raise ValueError("reference produced no signal; cannot calibrate the receiver phase")
    angle = -float(np.angle(total))
    return 0.0 if angle == -0.0 else angle


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class AmbiguousSpectrumError(ValueError):
    """Both lines of a multiplet cancel; the outcome is unreadable."""


@dataclass(frozen=True)
class Classification:
    bits: tuple[int, int]
    confidence: tuple[float, float]

    @property
    def label(self) -> str:
        return f"{self.bits[0]}{self.bits[1]}"


def classify(spectrum: Spectrum) -> Classification:
    """Read one bit per spin from the multiplet signs.

    A multiplet pointing up (positive sum) reads 0, down reads 1; a zero
    sum raises `AmbiguousSpectrumError` rather than guessing.  Confidence
    is the multiplet magnitude against the ideal pure-state readout.
    """
    bits = []
    confidence = []
    for spin in (1, 2):
        total = spectrum.multiplet_sum(spin)
        if abs(total) <= _AMBIGUOUS_ATOL:
            raise AmbiguousSpectrumError(
                f"qubit {spin}: multiplet lines cancel, outcome is unreadable"
            )
        bits.append(0 if total > 0 else 1)
        confidence.append(min(abs(total) / IDEAL_MULTIPLET_SUM, 1.0))
    return Classification((bits[0], bits[1]), (confidence[0], confidence[1]))


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of one full experiment.

    `final_state` is the computational answer state before the readout
    pulse; `spectrum` comes from the post-readout state.  `outcome` is None
    when the spectrum is ambiguous.  `attenuation` is the ratio of total
    line amplitude to the matching no-relaxation run (1 when relaxation is
    off).
    """

    final_state: DensityState
    spectrum: Spectrum
    outcome: Optional[tuple[int, int]]
    confidence: tuple[float, float]
    total_delay_s: float
    attenuation: float
    sequence_text: str


def _split_readout(seq: PulseSequence) -> tuple[PulseSequence, HardPulse]:
    if len(seq) < 2 or not isinstance(seq[-1], Acquire) or not isinstance(seq[-2], HardPulse):
        raise ValueError("sequence does not end with a readout pulse followed by acquire")
    return PulseSequence(seq.elements[:-2]), seq[-2]


def _classify_or_none(spectrum: Spectrum) -> tuple[Optional[tuple[int, int]], tuple[float, float]]:
    try:
        cls = classify(spectrum)
        return cls.bits, cls.confidence
    except AmbiguousSpectrumError:
        return None, (0.0, 0.0)


def _run_pulse(
    sys: SpinSystem, seq: PulseSequence, initial: DensityState, opts: ExecutionOptions
) -> tuple[DensityState, Spectrum, float]:
    body, readout = _split_readout(seq)
    run = run_sequence(sys, initial, body, opts)
    spectrum = synthesize_spectrum(run.state, sys, readout_pulse=readout)
    return run.state, spectrum, run.total_delay_s


def _pulse_experiment(
    sys: SpinSystem, seq: PulseSequence, spec: InitialStateSpec, opts: ExecutionOptions
) -> ExperimentResult:
    initial = prepare(spec)
    final, spectrum, delay_s = _run_pulse(sys, seq, initial, opts)
    if opts.relaxation_enabled:
        ideal_opts = replace(opts, relaxation_enabled=False, record_trajectory=False)
        _, ideal_spectrum, _ = _run_pulse(sys, seq, initial, ideal_opts)
        ideal_total = ideal_spectrum.total_amplitude()
        attenuation = spectrum.total_amplitude() / ideal_total if ideal_total > 0 else 1.0
    else:
        attenuation = 1.0
    outcome, confidence = _classify_or_none(spectrum)
    return ExperimentResult(
        final, spectrum, outcome, confidence, delay_s, attenuation, serialize(seq)
    )


def run_grover(
    sys: SpinSystem,
    f: GroverFunction,
    spec: InitialStateSpec,
    mode: str = "pulse",
    opts: Optional[ExecutionOptions] = None,
) -> ExperimentResult:
    """Run the full search experiment for oracle `f`.

    Circuit mode disentangles the initial state and applies the gate-level
    search circuit, ideally and instantaneously.  Pulse mode executes the
    compiled pulse sequence under the requested execution options.
    """
    opts = opts or ExecutionOptions()
    if mode == "pulse":
        return _pulse_experiment(sys, library("grover", f), spec, opts)
    if mode == "circuit":
        gates = disentangle_circuit() + grover_circuit(f)
        final = apply_unitary(prepare(spec), compose(gates))
        spectrum = synthesize_spectrum(final, sys, readout_pulse=HardPulse(90.0, "y"))
        outcome, confidence = _classify_or_none(spectrum)
        return ExperimentResult(
            final, spectrum, outcome, confidence, 0.0, 1.0,
            gates_to_text(gates).replace("\n", "; "),
        )
    raise ValueError(f"mode must be 'pulse' or 'circuit', got {mode!r}")


def run_reference(
    sys: SpinSystem,
    spec: InitialStateSpec,
    opts: Optional[ExecutionOptions] = None,
) -> ExperimentResult:
    """Run the phase-reference experiment (preparation, crush, readout)."""
    opts = opts or ExecutionOptions()
    return _pulse_experiment(sys, library("reference"), spec, opts)


def attenuation_report(
    sys: SpinSystem,
    f: GroverFunction,
    spec: InitialStateSpec,
    opts: Optional[ExecutionOptions] = None,
) -> dict[str, float]:
    """Relaxation-induced signal loss of the pulse-mode search experiment.

    Runs the experiment with relaxation off and on and reports the summed
    absolute line amplitudes and their ratio.
    """
    base = opts or ExecutionOptions()
    ideal = run_grover(sys, f, spec, "pulse", replace(base, relaxation_enabled=False))
    relaxed = run_grover(sys, f, spec, "pulse", replace(base, relaxation_enabled=True))
    ideal_total = ideal.spectrum.total_amplitude()
    relaxed_total = relaxed.spectrum.total_amplitude()
    ratio = relaxed_total / ideal_total if ideal_total > 0 else 1.0
    return {"ideal_total": ideal_total, "relaxed_total": relaxed_total, "ratio": ratio}


def spectrum_records(spectrum: Spectrum) -> list[str]:
    """Structured-text records, one line per spectral line, 12 significant digits."""
    return [
        '{"frequency_hz": %s, "amplitude": %s}' % (f"{ln.frequency_hz:.12g}", f"{ln.amplitude:.12g}")
        for ln in spectrum.lines
    ]
