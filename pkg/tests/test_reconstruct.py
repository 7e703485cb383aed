import numpy as np
import pytest
from scipy.linalg import expm

from dimerqpt.bath import ProcessTensor, propagate_process_tensor
from dimerqpt.isoaverage import build_m_blocks
from dimerqpt.pulses import build_c_matrix
from dimerqpt.reconstruct import (choi_matrix, invert_signals,
                                  min_choi_eigenvalue, reconstruct,
                                  reconstruct_single, tensor_distance,
                                  validate_tensor)
from dimerqpt.response import SignalTable, iso_pathway_vector


def random_lindblad_tensor(rng, waiting_time=1.0):
    """Oracle: CPTP map on {g, e, ep} from a random Lindblad generator.

    The Hamiltonian and the dissipators act inside the exciton manifold or
    drain it into the ground state, so the exciton block plus ground row is
    closed and trace preserving.
    """
    dim = 3  # basis order: g, e, ep
    h = np.zeros((dim, dim), dtype=complex)
    block = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h[1:, 1:] = 0.5 * (block + block.conj().T)

    jumps = []
    # random jump inside the exciton manifold
    j_in = np.zeros((dim, dim), dtype=complex)
    j_in[1:, 1:] = 0.3 * (rng.normal(size=(2, 2))
                          + 1j * rng.normal(size=(2, 2)))
    jumps.append(j_in)
    # decay to the ground state
    for k in (1, 2):
        j_dec = np.zeros((dim, dim), dtype=complex)
        j_dec[0, k] = 0.4 * rng.normal()
        jumps.append(j_dec)

    eye = np.eye(dim)
    lind = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for j in jumps:
        jdj = j.conj().T @ j
        lind += (np.kron(j, j.conj())
                 - 0.5 * np.kron(jdj, eye)
                 - 0.5 * np.kron(eye, jdj.T))
    super_op = expm(lind * waiting_time)

    chi = super_op.reshape(dim, dim, dim, dim)  # [n, m, nu, mu], row-major vec
    elements = chi[1:, 1:, 1:, 1:].copy()
    ground = chi[0, 0, 1:, 1:].copy()
    return ProcessTensor(waiting_time=waiting_time, elements=elements,
                         ground_row=ground)


def test_lindblad_oracle_is_physical(rng):
    for _ in range(5):
        tensor = random_lindblad_tensor(rng)
        assert tensor.hermiticity_defect() < 1e-12
        assert tensor.trace_defect() < 1e-12
        diag = validate_tensor(tensor)
        assert diag.min_choi_eig > -1e-12


def test_choi_of_identity_is_positive():
    ident = ProcessTensor.identity()
    min_eig, herm = min_choi_eigenvalue(ident)
    assert herm < 1e-15
    assert min_eig == pytest.approx(0.0, abs=1e-14)
    c = choi_matrix(ident)
    assert c.shape == (9, 9)
    # the three preserved diagonal routes g->g, e->e, ep->ep
    assert np.trace(c).real == pytest.approx(3.0, abs=1e-12)


def test_choi_flags_nonpositive_map():
    # transpose map on the exciton block is Hermitian and trace closed but
    # not completely positive
    elems = np.zeros((2, 2, 2, 2), dtype=complex)
    for n in (0, 1):
        for m in (0, 1):
            elems[n, m, m, n] = 1.0
    swap = ProcessTensor(waiting_time=0.0, elements=elems)
    assert swap.hermiticity_defect() < 1e-15
    assert swap.trace_defect() < 1e-15
    min_eig, _ = min_choi_eigenvalue(swap)
    assert min_eig < -0.5


def test_invert_signals_exact_and_ridge(basis, toolbox, rng):
    cmat = build_c_matrix(basis, toolbox)
    p = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = cmat.entries @ p
    assert np.allclose(invert_signals(s, cmat), p, atol=1e-10)
    # a tiny ridge must stay close to the exact solution
    ridged = invert_signals(s, cmat, ridge=1e-30)
    assert np.allclose(ridged, p, atol=1e-6)


def test_closed_loop_single_time(basis, gen, toolbox):
    cmat = build_c_matrix(basis, toolbox)
    for gamma in (0.0, 1.0, 2.0):
        blocks = build_m_blocks(basis, gamma)
        truth = propagate_process_tensor(gen, 340.0)
        signals = cmat.entries @ iso_pathway_vector(basis, gamma, truth)
        rec, residual = reconstruct_single(signals, cmat, blocks, 340.0)
        assert tensor_distance(rec, truth) < 1e-11
        assert residual < 1e-11


def test_random_lindblad_round_trip(basis, toolbox, rng):
    cmat = build_c_matrix(basis, toolbox)
    blocks = {g: build_m_blocks(basis, g) for g in (0.0, 1.0, 2.0)}
    for _ in range(10):
        truth = random_lindblad_tensor(rng)
        for gamma, blk in blocks.items():
            signals = cmat.entries @ iso_pathway_vector(basis, gamma, truth)
            rec, _ = reconstruct_single(signals, cmat, blk,
                                        truth.waiting_time)
            assert tensor_distance(rec, truth) < 1e-10


def test_reconstruct_report(basis, gen, toolbox):
    cmat = build_c_matrix(basis, toolbox)
    blocks = build_m_blocks(basis, 2.0)
    t_grid = np.array([150.0, 300.0, 450.0])
    truth = [propagate_process_tensor(gen, t) for t in t_grid]
    values = np.array([cmat.entries @ iso_pathway_vector(basis, 2.0, tt)
                       for tt in truth])
    table = SignalTable(t_grid=t_grid, values=values)
    report = reconstruct(table, cmat, blocks, reference=truth)
    assert report.max_reference_error() < 1e-11
    assert report.all_physical()
    assert report.c_condition == pytest.approx(cmat.condition_number)
    assert set(report.m_conditions) == {"ee", "epep", "eep"}
    assert len(report.tensors) == 3


def test_validate_tensor_diagnostics(gen):
    truth = propagate_process_tensor(gen, 500.0)
    diag = validate_tensor(truth)
    assert diag.passed()
    # breaking hermiticity is caught
    broken = truth.elements.copy()
    broken[0, 1, 0, 0] += 1e-3
    bad = ProcessTensor(waiting_time=500.0, elements=broken)
    assert not validate_tensor(bad).passed()
