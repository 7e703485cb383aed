"""Tensor reconstruction from measured signals and physicality checks.

Reconstruction is a two-stage linear inversion: the pulse-coefficient
matrix takes the sixteen signals back to the sixteen pathway amplitudes,
and the three dipole-geometry blocks take those back to the real tensor
parameters.  Physicality of the result is judged on the three-level system
(ground plus the two single excitons) through hermiticity, trace closure
and the spectrum of the Choi matrix; optical-coherence blocks of the Choi
matrix are set to zero, which corresponds to composing the map with
complete optical dephasing and cannot spoil complete positivity.
"""

from dataclasses import dataclass, field

import numpy as np

from .bath import ProcessTensor
from .isoaverage import MBlocks, solve_chi_blocks, tensor_to_params
from .pulses import CMatrix

_CHOI_STATES = ("g", "e", "ep")


def choi_matrix(tensor: ProcessTensor):
    """9x9 Choi matrix of the map on span{g, e, ep}.

    Entry [(nu, n), (mu, m)] is the amplitude taking the input element
    |nu><mu| to the output element |n><m|.  The ground population is a fixed
    point; blocks fed by optical coherences are zero (full optical
    dephasing).
    """
    chi = np.zeros((3, 3, 3, 3), dtype=complex)
    chi[0, 0, 0, 0] = 1.0
    chi[0, 0, 1:, 1:] = tensor.ground_row
    chi[1:, 1:, 1:, 1:] = tensor.elements
    # rows indexed by (input ket, output ket), columns by (input bra, output bra)
    return chi.transpose(2, 0, 3, 1).reshape(9, 9)


def min_choi_eigenvalue(tensor: ProcessTensor):
    c = choi_matrix(tensor)
    herm = float(np.max(np.abs(c - c.conj().T)))
    return float(np.min(np.linalg.eigvalsh(0.5 * (c + c.conj().T)))), herm


@dataclass(frozen=True)
class TensorDiagnostics:
    """Physicality figures of merit for one reconstructed tensor."""

    hermiticity_defect: float
    trace_defect: float
    min_choi_eig: float
    choi_hermiticity_defect: float

    def passed(self, herm_tol=1e-10, trace_tol=1e-10, choi_tol=1e-8):
        return (self.hermiticity_defect <= herm_tol
                and self.trace_defect <= trace_tol
                and self.min_choi_eig >= -choi_tol)


def validate_tensor(tensor: ProcessTensor) -> TensorDiagnostics:
    min_eig, choi_herm = min_choi_eigenvalue(tensor)
    return TensorDiagnostics(
        hermiticity_defect=tensor.hermiticity_defect(),
        trace_defect=tensor.trace_defect(),
        min_choi_eig=min_eig,
        choi_hermiticity_defect=choi_herm,
    )


def invert_signals(signal_row, cmatrix: CMatrix, ridge=0.0):
    """Signals (16,) -> pathway amplitudes (16,).

    With zero ridge this is the exact solve; a positive ridge switches to
    Tikhonov-regularized least squares for noisy input.
    """
    b = np.asarray(signal_row, dtype=complex)
    if ridge == 0.0:
        return cmatrix.solve(b)
    a = cmatrix.entries
    lhs = a.conj().T @ a + ridge * np.eye(a.shape[1])
    return np.linalg.solve(lhs, a.conj().T @ b)


def reconstruct_single(signal_row, cmatrix: CMatrix, mblocks: MBlocks,
                       waiting_time, ridge=0.0):
    """One waiting time: signals -> (tensor, pathway residual).

    The residual is the mismatch between the recovered pathway vector and
    the geometry blocks applied to the real parameters actually kept; it is
    nonzero when the input is inconsistent with a Hermitian tensor.
    """
    pathways = invert_signals(signal_row, cmatrix, ridge=ridge)
    tensor = solve_chi_blocks(pathways, mblocks, waiting_time=waiting_time)
    fitted = mblocks.apply(tensor_to_params(tensor))
    residual = float(np.max(np.abs(fitted - pathways)))
    return tensor, residual


@dataclass
class ReconstructionReport:
    """Reconstructed tensors over a waiting-time grid with diagnostics."""

    waiting_times: np.ndarray
    tensors: list
    pathway_residuals: np.ndarray
    diagnostics: list = field(default_factory=list)
    reference_errors: np.ndarray = None
    c_condition: float = None
    m_conditions: dict = None

    def max_reference_error(self):
        if self.reference_errors is None:
            return None
        return float(np.max(self.reference_errors))

    def all_physical(self, herm_tol=1e-10, trace_tol=1e-10, choi_tol=1e-8):
        return all(d.passed(herm_tol, trace_tol, choi_tol)
                   for d in self.diagnostics)


def tensor_distance(a: ProcessTensor, b: ProcessTensor):
    """Max absolute elementwise difference, ground row included."""
    return float(max(np.max(np.abs(a.elements - b.elements)),
                     np.max(np.abs(a.ground_row - b.ground_row))))


def reconstruct(signal_table, cmatrix: CMatrix, mblocks: MBlocks,
                ridge=0.0, reference=None) -> ReconstructionReport:
    """Invert a full signal table, one tensor per waiting time.

    ``reference``, if given, is a list of ground-truth tensors used to fill
    the per-time reconstruction errors.
    """
    n = len(signal_table.t_grid)
    tensors = []
    residuals = np.zeros(n)
    for i in range(n):
        tensor, res = reconstruct_single(signal_table.values[i], cmatrix,
                                         mblocks, signal_table.t_grid[i],
                                         ridge=ridge)
        tensors.append(tensor)
        residuals[i] = res
    diagnostics = [validate_tensor(t) for t in tensors]
    errors = None
    if reference is not None:
        errors = np.array([tensor_distance(t, r)
                           for t, r in zip(tensors, reference)])
    return ReconstructionReport(
        waiting_times=np.asarray(signal_table.t_grid, dtype=float),
        tensors=tensors,
        pathway_residuals=residuals,
        diagnostics=diagnostics,
        reference_errors=errors,
        c_condition=cmatrix.condition_number,
        m_conditions=mblocks.condition_numbers,
    )
