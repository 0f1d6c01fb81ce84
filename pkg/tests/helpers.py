"""Hand-rolled matrix constructions used as independent oracles in the tests.

Everything here is built from explicit per-basis-label formulas (loops over
bit labels, textbook 2x2 rotation matrices, Kraus operators, discrete
twirls) rather than the package's operator-algebra code paths.
"""

import numpy as np

BITS = [(0, 0), (0, 1), (1, 0), (1, 1)]
LABELS = ["00", "01", "10", "11"]


def mz(bit):
    """Iz eigenvalue of a single-spin basis label (|0> carries +1/2)."""
    return 0.5 if bit == 0 else -0.5


def single_rotation(angle_deg, phase):
    """Textbook 2x2 rotation exp(-i*theta*I_phase)."""
    sign = -1.0 if phase.startswith("-") else 1.0
    th = np.radians(angle_deg) * sign
    c, s = np.cos(th / 2), np.sin(th / 2)
    if phase.endswith("x"):
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pulse_matrix(angle_deg, phase):
    r = single_rotation(angle_deg, phase)
    return np.kron(r, r)


def weak_delay_matrix(t, delta_hz=160.0, j_hz=4.8, include_j=True):
    """Elementwise-phase delay propagator, offsets +delta/2 on spin 1."""
    nu1, nu2 = delta_hz / 2, -delta_hz / 2
    diag = []
    for b1, b2 in BITS:
        freq = nu1 * mz(b1) + nu2 * mz(b2)
        if include_j:
            freq += j_hz * mz(b1) * mz(b2)
        diag.append(np.exp(-2j * np.pi * freq * t))
    return np.diag(diag)


def zrot_matrix(angle_deg, pattern):
    th = np.radians(angle_deg)
    diag = []
    for b1, b2 in BITS:
        gen = mz(b1) + mz(b2) if pattern == "equal" else mz(b1) - mz(b2)
        diag.append(np.exp(-1j * th * gen))
    return np.diag(diag)


def oracle_matrix(label):
    diag = np.ones(4, dtype=complex)
    diag[LABELS.index(label)] = -1.0
    return np.diag(diag)


def fidelity(u, v):
    return abs(np.trace(np.asarray(u).conj().T @ np.asarray(v))) / 4.0


def singlet_density():
    psi = np.zeros(4, dtype=complex)
    psi[1], psi[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def random_density(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = a @ a.conj().T
    return m / np.trace(m)


def random_unitary(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def crush_by_twirl(rho, n=8):
    """Coherence-order filter as a discrete average over global z rotations."""
    acc = np.zeros((4, 4), dtype=complex)
    for k in range(n):
        u = zrot_matrix(np.degrees(2 * np.pi * k / n), "equal")
        acc += u @ rho @ u.conj().T
    return acc / n


def dephase_by_kraus(rho, t, t2_1, t2_2):
    """Per-spin phase damping applied through explicit Kraus operators."""
    eye = np.eye(2, dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    out = np.asarray(rho, dtype=complex)
    for spin, t2 in ((1, t2_1), (2, t2_2)):
        decay = np.exp(-t / t2)
        p = (1 + decay) / 2
        k0 = np.sqrt(p) * eye
        k1 = np.sqrt(1 - p) * sz
        ops = [np.kron(k, eye) if spin == 1 else np.kron(eye, k) for k in (k0, k1)]
        out = sum(k @ out @ k.conj().T for k in ops)
    return out
