"""Truncated qubit (x) Fock space, operator algebra and Hamiltonian assembly.

Basis ordering: index(q, n) = q*(n_max+1) + n with q in {0 = ground,
1 = excited} and n the Fock occupation, so the lower half of a state vector
is the qubit-ground block.  All operators are dense; at the dimensions used
here (a few tens) dense linear algebra beats sparse bookkeeping.

The instantaneous Hamiltonian, in ordinary-frequency (GHz) units H/h, is

    f_r (a'a + 1/2) + (f_0/2) s_z + g_xx s_x (a'+a) + g_zz s_z (a'+a)^2
        + g_zx s_z (a'+a) + g_xz s_x (a'+a)^2

with the coefficients taken from an InstantParams record.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import InstantParams


@dataclass(frozen=True, eq=False)
class HilbertSpace:
    """Truncated product space with the operator set cached at construction."""

    n_max: int
    dim: int
    a: np.ndarray          # annihilation, tensored to the full space
    adag: np.ndarray
    number: np.ndarray     # a'a
    sx: np.ndarray
    sz: np.ndarray
    sp: np.ndarray         # sigma+ = |e><g|
    sm: np.ndarray
    x: np.ndarray          # a' + a
    x2: np.ndarray         # (a' + a)^2
    # coefficient-ordered basis of the Hamiltonian: N+1/2, s_z/2, s_x X,
    # s_z X^2, s_z X, s_x X^2  (real symmetric matrices)
    h_basis: np.ndarray = field(repr=False)

    def index(self, q: int, n: int) -> int:
        """Basis index of |q, n>."""
        if q not in (0, 1) or not 0 <= n <= self.n_max:
            raise ValueError(f"no basis state (q={q}, n={n})")
        return q * (self.n_max + 1) + n


def build_space(n_max: int) -> HilbertSpace:
    """Build the truncated space and cache its operators.

    a|n> = sqrt(n)|n-1>, a'|n> = sqrt(n+1)|n+1> truncated at n_max.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    nf = n_max + 1
    a_f = np.diag(np.sqrt(np.arange(1.0, nf)), k=1)
    x_f = a_f + a_f.T
    x2_f = x_f @ x_f
    num_f = np.diag(np.arange(nf, dtype=float))
    i2 = np.eye(2)
    i_f = np.eye(nf)
    sx_q = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz_q = np.array([[-1.0, 0.0], [0.0, 1.0]])   # ground first: <g|sz|g> = -1
    sp_q = np.array([[0.0, 0.0], [1.0, 0.0]])
    h_basis = np.stack([
        np.kron(i2, num_f + 0.5 * i_f),
        np.kron(sz_q, i_f) * 0.5,
        np.kron(sx_q, x_f),
        np.kron(sz_q, x2_f),
        np.kron(sz_q, x_f),
        np.kron(sx_q, x2_f),
    ])
    return HilbertSpace(
        n_max=n_max, dim=2 * nf,
        a=np.kron(i2, a_f), adag=np.kron(i2, a_f.T), number=np.kron(i2, num_f),
        sx=np.kron(sx_q, i_f), sz=np.kron(sz_q, i_f),
        sp=np.kron(sp_q, i_f), sm=np.kron(sp_q.T, i_f),
        x=np.kron(i2, x_f), x2=np.kron(i2, x2_f),
        h_basis=h_basis,
    )


def coefficient_vector(p: InstantParams) -> np.ndarray:
    """Coefficients multiplying HilbertSpace.h_basis, in its order."""
    return np.array([p.f_r, p.f_0, p.g_xx, p.g_zz, p.g_zx, p.g_xz])


def assemble(space: HilbertSpace, p: InstantParams) -> np.ndarray:
    """Instantaneous Hamiltonian matrix H/h in GHz (complex128, Hermitian)."""
    h = np.tensordot(coefficient_vector(p), space.h_basis, axes=1)
    return h.astype(np.complex128)


def hermiticity_defect(m: np.ndarray) -> float:
    """max |M - M'| relative to max |M| (0 for an exactly Hermitian matrix)."""
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


def longitudinal_reference_spectrum(space: HilbertSpace, f_0: float,
                                    f_r: float, g_zx: float) -> np.ndarray:
    """Eigenvalues of the displaced longitudinal model, sorted ascending.

    A pure sigma_z (a'+a) coupling is removed by a displacement, leaving the
    bare ladder q*f_0 + n*f_r shifted down uniformly by g_zx^2/f_r.  Zero
    point offsets are excluded; exclude them on the other side of any
    comparison as well.
    """
    if not f_r > 0.0:
        raise ValueError(f"f_r must be positive, got {f_r}")
    n = np.arange(space.n_max + 1)
    shift = g_zx**2 / f_r
    levels = np.concatenate([n * f_r - shift, f_0 + n * f_r - shift])
    return np.sort(levels)
