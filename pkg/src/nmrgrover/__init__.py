"""Pulse-level density-matrix simulator for a two-qubit singlet-initialized
NMR quantum computer, with a pulse-notation parser and an independent
gate-level circuit engine used to cross-check the compiled sequences."""

from .spin_model import (
    SpinSystem,
    DensityState,
    UnitaryOp,
    HardPulse,
    Delay,
    ZRotation,
    Crush,
    Acquire,
    PulseElement,
    PulseSequence,
    FractionOfJ,
    FractionOfDelta,
    LiteralDuration,
    DurationExpr,
    GroverFunction,
    resolve_duration,
    ppm_offsets_to_delta,
    basis_ket,
    singlet_ket,
)
from .dynamics import (
    Hamiltonian,
    ExecutionOptions,
    SequenceResult,
    TrajectoryRecord,
    SequenceStructureError,
    hamiltonian,
    delay_propagator,
    hard_pulse_propagator,
    z_rotation_propagator,
    composite_z_propagator,
    apply_unitary,
    crush,
    dephase,
    run_sequence,
    sequence_unitary,
    write_trajectory,
)
from .pulse_dsl import (
    ParseError,
    SequenceLibraryEntry,
    LIBRARY_NAMES,
    parse,
    serialize,
    serialize_element,
    library,
    library_entry,
    duration_of,
)
from .circuits import (
    Hadamard,
    PseudoH,
    NotGate,
    CNot,
    OracleUf,
    U00,
    Gate,
    gate_unitary,
    compose,
    grover_circuit,
    disentangle_circuit,
    equivalence_up_to_global_phase,
    verify_pulse_against_gate,
    gates_to_text,
)
from .experiment import (
    Singlet,
    Werner,
    BasisState,
    InitialStateSpec,
    SpectralLine,
    Spectrum,
    Classification,
    ExperimentResult,
    AmbiguousSpectrumError,
    IDEAL_MULTIPLET_SUM,
    prepare,
    synthesize_spectrum,
    calibrate_receiver_phase,
    classify,
    run_grover,
    run_reference,
    attenuation_report,
    spectrum_records,
)

__version__ = "0.1.0"
