import numpy as np
import pytest

from nmrgrover import (
    CNot,
    DensityState,
    GroverFunction,
    Hadamard,
    NotGate,
    OracleUf,
    PseudoH,
    SpinSystem,
    U00,
    UnitaryOp,
    apply_unitary,
    basis_ket,
    compose,
    disentangle_circuit,
    equivalence_up_to_global_phase,
    gate_unitary,
    gates_to_text,
    grover_circuit,
    verify_pulse_against_gate,
)
from helpers import LABELS, fidelity, oracle_matrix, random_unitary, singlet_density


class TestGateUnitaries:
    def test_oracle_diagonals(self):
        for label in LABELS:
            u = gate_unitary(OracleUf(GroverFunction(label))).matrix
            assert np.allclose(u, oracle_matrix(label))

    def test_u00_flips_only_the_ground_state(self):
        assert np.allclose(gate_unitary(U00()).matrix, np.diag([-1.0, 1, 1, 1]))

    def test_oracles_are_diagonal_involutory_hermitian(self):
        for gate in [U00()] + [OracleUf(GroverFunction(l)) for l in LABELS]:
            u = gate_unitary(gate).matrix
            assert np.allclose(u, np.diag(np.diag(u)))
            assert np.allclose(u @ u, np.eye(4))
            assert np.allclose(u, u.conj().T)

    def test_pseudo_hadamard_pair_cancels(self):
        for target in (1, 2):
            u = gate_unitary(PseudoH(target, inverse=True)).matrix @ gate_unitary(PseudoH(target)).matrix
            assert np.allclose(u, np.eye(4), atol=1e-14)

    def test_hadamard_embedding(self):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.allclose(gate_unitary(Hadamard(1)).matrix, np.kron(h, np.eye(2)))
        assert np.allclose(gate_unitary(Hadamard(2)).matrix, np.kron(np.eye(2), h))

    def test_not_and_cnot_action_on_kets(self):
        x2 = gate_unitary(NotGate(2)).matrix
        assert np.allclose(x2 @ basis_ket("00"), basis_ket("01"))
        cnot = gate_unitary(CNot(control=1, target=2)).matrix
        assert np.allclose(cnot @ basis_ket("10"), basis_ket("11"))
        assert np.allclose(cnot @ basis_ket("01"), basis_ket("01"))
        cnot_rev = gate_unitary(CNot(control=2, target=1)).matrix
        assert np.allclose(cnot_rev @ basis_ket("01"), basis_ket("11"))

    def test_flipped_convention_swaps_the_pseudo_hadamards(self):
        default_h = gate_unitary(PseudoH(1)).matrix
        flipped_h = gate_unitary(PseudoH(1), h_positive_y=False).matrix
        assert np.allclose(flipped_h, gate_unitary(PseudoH(1, inverse=True)).matrix)
        assert not np.allclose(default_h, flipped_h)

    def test_target_validation(self):
        with pytest.raises(ValueError):
            Hadamard(3)
        with pytest.raises(ValueError):
            CNot(control=1, target=1)

    def test_every_gate_is_unitary(self):
        gates = [Hadamard(1), PseudoH(2), PseudoH(1, True), NotGate(2),
                 CNot(1, 2), OracleUf(GroverFunction("01")), U00()]
        for g in gates:
            assert isinstance(gate_unitary(g), UnitaryOp)


class TestCompose:
    def test_self_inverse(self):
        u = compose([NotGate(1), NotGate(1)]).matrix
        assert np.allclose(u, np.eye(4))

    def test_leftmost_gate_acts_first(self):
        u = compose([NotGate(1), CNot(control=1, target=2)]).matrix
        expected = gate_unitary(CNot(1, 2)).matrix @ gate_unitary(NotGate(1)).matrix
        assert np.allclose(u, expected)
        assert np.allclose(u @ basis_ket("00"), basis_ket("11"))

    def test_rejects_empty_list(self):
        with pytest.raises(ValueError):
            compose([])


class TestDisentangleCircuit:
    def test_structure(self):
        gates = disentangle_circuit()
        assert gates == [CNot(control=1, target=2), Hadamard(1), NotGate(1), NotGate(2)]

    def test_maps_singlet_to_ground_exactly(self):
        u = compose(disentangle_circuit())
        out = apply_unitary(DensityState(singlet_density()), u)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = 1.0
        assert np.allclose(out.matrix, expected, atol=1e-15)

    def test_ket_phase_is_plus_one(self):
        psi = (basis_ket("01") - basis_ket("10")) / np.sqrt(2)
        out = compose(disentangle_circuit()).matrix @ psi
        assert out[0] == pytest.approx(1.0, abs=1e-15)

    def test_leaves_maximally_mixed_invariant(self):
        state = DensityState(np.eye(4, dtype=complex) / 4)
        out = apply_unitary(state, compose(disentangle_circuit()))
        assert np.allclose(out.matrix, state.matrix)

    def test_werner_maps_linearly(self):
        eps = 0.7
        mixed = (1 - eps) * np.eye(4, dtype=complex) / 4 + eps * singlet_density()
        out = apply_unitary(DensityState(mixed), compose(disentangle_circuit()))
        expected = (1 - eps) * np.eye(4) / 4
        expected[0, 0] += eps
        assert np.allclose(out.matrix, expected, atol=1e-14)


class TestGroverCircuit:
    def test_gate_count_after_expansion(self):
        assert len(grover_circuit(GroverFunction("00"))) == 8

    def test_finds_the_satisfying_input(self):
        for label in LABELS:
            u = compose(grover_circuit(GroverFunction(label))).matrix
            out = u @ basis_ket("00")
            pops = np.abs(out) ** 2
            assert pops[int(label, 2)] == pytest.approx(1.0, abs=1e-12)

    def test_outputs_mutually_orthogonal(self):
        outs = [compose(grover_circuit(GroverFunction(l))).matrix @ basis_ket("00") for l in LABELS]
        for i in range(4):
            for k in range(i + 1, 4):
                assert abs(np.vdot(outs[i], outs[k])) < 1e-12

    def test_flipped_convention_still_searches(self):
        for label in LABELS:
            u = compose(grover_circuit(GroverFunction(label)), h_positive_y=False).matrix
            pops = np.abs(u @ basis_ket("00")) ** 2
            assert pops[int(label, 2)] == pytest.approx(1.0, abs=1e-12)


class TestEquivalence:
    def test_identical(self, rng):
        u = UnitaryOp(random_unitary(rng))
        assert equivalence_up_to_global_phase(u, u) == pytest.approx(1.0)

    def test_global_sign(self, rng):
        u = random_unitary(rng)
        assert equivalence_up_to_global_phase(UnitaryOp(u), UnitaryOp(-u)) == pytest.approx(1.0)

    def test_partial_overlap(self):
        eye = UnitaryOp(np.eye(4, dtype=complex))
        v = UnitaryOp(np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex))
        assert equivalence_up_to_global_phase(eye, v) == pytest.approx(0.5)

    def test_symmetric_and_phase_invariant(self, rng):
        u = UnitaryOp(random_unitary(rng))
        v = UnitaryOp(random_unitary(rng))
        assert equivalence_up_to_global_phase(u, v) == pytest.approx(
            equivalence_up_to_global_phase(v, u)
        )
        w = UnitaryOp(np.exp(1j * 0.37) * v.matrix)
        assert equivalence_up_to_global_phase(u, w) == pytest.approx(
            equivalence_up_to_global_phase(u, v)
        )


class TestVerifyPulseAgainstGate:
    def test_preparation_state_fidelity(self, system):
        assert verify_pulse_against_gate(system, "P_prep") >= 1 - 1e-9

    def test_every_oracle_sequence(self, system):
        for label in LABELS:
            assert verify_pulse_against_gate(system, f"P_{label}") >= 1 - 1e-9

    def test_deliberate_mismatch_scores_low(self, system):
        fid = verify_pulse_against_gate(system, "P_01", GroverFunction("10"))
        assert fid <= 0.75

    def test_full_search_sequence_piecewise(self, system):
        for label in LABELS:
            fid = verify_pulse_against_gate(system, "grover", GroverFunction(label))
            assert fid >= 1 - 1e-9

    def test_flipped_pseudo_hadamard_fails_the_piecewise_check(self, system):
        fid = verify_pulse_against_gate(
            system, "grover", GroverFunction("01"), h_positive_y=False
        )
        assert fid < 0.5

    def test_isotropic_coupling_degrades_within_the_weak_coupling_budget(self):
        iso = SpinSystem(coupling_model="isotropic")
        for label in LABELS:
            deg = 1 - verify_pulse_against_gate(iso, f"P_{label}")
            assert 1e-5 < deg <= 1e-3
        grover_deg = 1 - verify_pulse_against_gate(iso, "grover", GroverFunction("01"))
        assert 1e-4 < grover_deg <= 2.5e-3

    def test_grover_requires_oracle(self, system):
        with pytest.raises(ValueError):
            verify_pulse_against_gate(system, "grover")

    def test_unknown_name(self, system):
        with pytest.raises(ValueError):
            verify_pulse_against_gate(system, "P_xyz")


class TestGateText:
    def test_one_gate_per_line(self):
        text = gates_to_text(disentangle_circuit())
        assert text.splitlines() == ["CNOT q1 -> q2", "H q1", "NOT q1", "NOT q2"]

    def test_search_circuit_listing(self):
        text = gates_to_text(grover_circuit(GroverFunction("10")))
        assert "U_f f=10" in text
        assert text.count("h-1") == 4
