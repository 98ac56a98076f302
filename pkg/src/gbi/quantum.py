"""Gaussian quantum-state covariance matrices and symplectic diagnostics.

Covariance matrices (CMs) are 2N x 2N real symmetric matrices in xx...pp
ordering (all positions first, then all momenta) with vacuum = identity.
This ordering keeps purifications of the form X (+) X^{-1} block diagonal.

Provides the two-mode squeezed-pair CM, the five-mode purification of the
three-mode PPT-entangled state studied here, symplectic spectra, physicality
and purity tests, momentum-sign partial transposition, and the all-mode
position measurement that maps a CM onto a classical Gaussian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalError
from .gaussian import GaussianVector, _pd_cholesky
from .params import DerivedParams, check_r, pair_block

PHYSICALITY_TOL = 1e-9
PAIRING_TOL = 1e-8


@dataclass(frozen=True)
class QuantumCM:
    """Symmetric 2N x 2N covariance matrix in xx...pp ordering."""

    n_modes: int
    gamma: np.ndarray

    def __post_init__(self):
        m = np.array(self.gamma, dtype=float)
        n = int(self.n_modes)
        if n < 1 or m.shape != (2 * n, 2 * n):
            raise DomainError(f"expected a {2 * n} x {2 * n} matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
            raise DomainError("covariance matrix is not symmetric to 1e-12")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "n_modes", n)
        object.__setattr__(self, "gamma", m)

    @property
    def x_block(self) -> np.ndarray:
        return self.gamma[: self.n_modes, : self.n_modes]

    @property
    def p_block(self) -> np.ndarray:
        return self.gamma[self.n_modes:, self.n_modes:]


@dataclass(frozen=True)
class PPTReport:
    """Outcome of a partial-transpose test across one bipartition."""

    min_nu: float
    is_ppt: bool


def symplectic_form(n_modes: int) -> np.ndarray:
    """Canonical antisymmetric form [[0, I], [-I, 0]] in xx...pp ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def tmsv_cm(m: float) -> QuantumCM:
    """Two-mode squeezed-pair CM: x-block with diagonal m, p-block its inverse."""
    m = float(m)
    omega = np.array(pair_block(m))
    k = omega[0, 1]
    det = m * m - k * k
    omega_inv = np.array([[m, -k], [-k, m]]) / det
    zero = np.zeros((2, 2))
    return QuantumCM(2, np.block([[omega, zero], [zero, omega_inv]]))


def purification_x_matrix(r: float) -> np.ndarray:
    """The 5x5 position-block CCM of the purified source, order (A, B, C, E1, E2)."""
    p = DerivedParams.from_r(r)
    t = p.e2r
    return np.array([
        [p.a, 2 * p.x, p.b, 2 * p.x, 0.5],
        [2 * p.x, p.c, -2 * p.x, 4 * p.x, -t],
        [p.b, -2 * p.x, p.a, -2 * p.x, t - 0.5],
        [2 * p.x, 4 * p.x, -2 * p.x, 4 * p.x, -2 * p.x],
        [0.5, -t, t - 0.5, -2 * p.x, p.y],
    ])


def purification_cm(r: float) -> QuantumCM:
    """Five-mode pure-state CM X (+) X^{-1} whose position marginal is X."""
    x = purification_x_matrix(r)
    x_inv = np.linalg.inv(x)
    zero = np.zeros((5, 5))
    return QuantumCM(5, np.block([[x, zero], [zero, x_inv]]))


def bound_entangled_cm(r: float) -> QuantumCM:
    """Three-mode reduction (modes A, B, C) of the five-mode purification."""
    x = purification_x_matrix(r)
    x_inv = np.linalg.inv(x)
    zero = np.zeros((3, 3))
    return QuantumCM(3, np.block([[x[:3, :3], zero], [zero, x_inv[:3, :3]]]))


def symplectic_eigenvalues(cm: QuantumCM) -> np.ndarray:
    """Moduli of the spectrum of i Omega gamma, one per mode, descending."""
    n = cm.n_modes
    eigs = np.linalg.eigvals(1j * symplectic_form(n) @ cm.gamma)
    mags = np.sort(np.abs(eigs))[::-1]
    nus = np.empty(n)
    for k in range(n):
        hi, lo = mags[2 * k], mags[2 * k + 1]
        if hi - lo > PAIRING_TOL * max(1.0, hi):
            raise NumericalError(f"unpaired symplectic spectrum: {mags}")
        nus[k] = 0.5 * (hi + lo)
    return nus


def is_physical(cm: QuantumCM) -> bool:
    """True when every symplectic eigenvalue is >= 1 (uncertainty principle)."""
    return bool(np.min(symplectic_eigenvalues(cm)) >= 1.0 - PHYSICALITY_TOL)


def is_pure(cm: QuantumCM) -> bool:
    """True when every symplectic eigenvalue equals 1."""
    return bool(np.max(np.abs(symplectic_eigenvalues(cm) - 1.0)) <= PHYSICALITY_TOL)


def partial_transpose(cm: QuantumCM, modes: Sequence[int]) -> QuantumCM:
    """Flip the momentum signs of ``modes``; the result may be unphysical."""
    modes = list(modes)
    if not modes or len(set(modes)) != len(modes):
        raise DomainError(f"modes must be a nonempty set, got {modes}")
    if any(not 0 <= m < cm.n_modes for m in modes):
        raise DomainError(f"mode indices {modes} out of range for {cm.n_modes} modes")
    signs = np.ones(2 * cm.n_modes)
    for m in modes:
        signs[cm.n_modes + m] = -1.0
    return QuantumCM(cm.n_modes, signs[:, None] * cm.gamma * signs[None, :])


def ppt_report(cm: QuantumCM, bipartition: Sequence[int]) -> PPTReport:
    """Partial-transpose test across ``bipartition`` (mode indices of one side)."""
    nu = float(np.min(symplectic_eigenvalues(partial_transpose(cm, bipartition))))
    return PPTReport(min_nu=nu, is_ppt=nu >= 1.0 - PHYSICALITY_TOL)


def homodyne_x_all(cm: QuantumCM, labels: Sequence[str]) -> GaussianVector:
    """Outcome distribution of position measurements on all modes.

    The classical CCM of the outcomes is exactly the x-block of the CM.
    """
    if len(tuple(labels)) != cm.n_modes:
        raise DomainError(f"need {cm.n_modes} labels, got {len(tuple(labels))}")
    block = cm.x_block
    _pd_cholesky(block, "position block")
    return GaussianVector(tuple(labels), block)


def vacuum_cm(n_modes: int) -> QuantumCM:
    """Vacuum state: identity CM."""
    if n_modes < 1:
        raise DomainError("need at least one mode")
    return QuantumCM(n_modes, np.eye(2 * n_modes))
