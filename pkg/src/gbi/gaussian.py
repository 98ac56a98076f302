"""Exact algebra and information theory for labeled zero-mean Gaussian vectors.

Every distribution is stored as a classical covariance matrix (CCM) in the
doubled convention (CCM = 2 x standard covariance; see :mod:`gbi.params`).
Marginals, conditionals, linear images, and group mutual informations are
exact matrix operations; sampling is seeded and reproducible.

All functions are pure and all values immutable, so they are safe to share
across threads.  For parallel sampling, derive substream seeds with the
documented rule ``numpy.random.SeedSequence([seed, stream_index])``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ClampWarning, DomainError, LabelError, NumericalError

_LN2 = math.log(2.0)

# Information values in (-NEG_INFO_FLOOR, 0) are float noise and clamp to 0;
# anything more negative indicates a logic error and raises.
NEG_INFO_FLOOR = 1e-10


@dataclass(frozen=True)
class GaussianVector:
    """Zero-mean multivariate Gaussian with named components and CCM storage.

    Parameters
    ----------
    labels : tuple of str
        Distinct component names, one per row/column of ``ccm``.
    ccm : ndarray
        Symmetric positive-semidefinite matrix in the doubled convention.
    """

    labels: tuple[str, ...]
    ccm: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate labels in {labels}")
        m = np.array(self.ccm, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"ccm must be square, got shape {m.shape}")
        if m.shape[0] != len(labels):
            raise LabelError(f"{len(labels)} labels for a {m.shape[0]}-dim ccm")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
            raise DomainError("ccm is not symmetric to 1e-12 relative tolerance")
        m = 0.5 * (m + m.T)
        if m.size and float(np.min(np.linalg.eigvalsh(m))) < -1e-9 * scale:
            raise DomainError("ccm is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ccm", m)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def indices(self, group: Iterable[str]) -> list[int]:
        """Positions of ``group`` within ``labels`` (order-preserving)."""
        group = list(group)
        if not group:
            raise LabelError("empty label group")
        if len(set(group)) != len(group):
            raise LabelError(f"duplicate labels in group {group}")
        try:
            return [self.labels.index(name) for name in group]
        except ValueError:
            unknown = [name for name in group if name not in self.labels]
            raise LabelError(f"unknown labels {unknown}; have {list(self.labels)}") from None

    def block(self, group: Sequence[str]) -> np.ndarray:
        """Principal CCM submatrix on ``group``."""
        idx = self.indices(group)
        return self.ccm[np.ix_(idx, idx)]


def _pd_cholesky(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor, rejecting pivots below 1e-12 x max diagonal."""
    a = np.array(m, dtype=float)
    n = a.shape[0]
    pivot_tol = 1e-12 * float(np.max(np.diagonal(a))) if n else 0.0
    lower = np.zeros_like(a)
    for k in range(n):
        pivot = a[k, k] - float(lower[k, :k] @ lower[k, :k])
        if not pivot > pivot_tol:
            raise NumericalError(
                f"{what} is not positive definite (pivot {pivot:.3e} at row {k})"
            )
        lower[k, k] = math.sqrt(pivot)
        if k + 1 < n:
            lower[k + 1:, k] = (a[k + 1:, k] - lower[k + 1:, :k] @ lower[k, :k]) / lower[k, k]
    return lower


def _logdet_pd(m: np.ndarray, what: str = "block") -> float:
    lower = _pd_cholesky(m, what)
    return 2.0 * float(np.sum(np.log(np.diagonal(lower))))


def _floor_info(value: float) -> float:
    """Clamp float-noise negatives to zero; larger negatives are logic errors."""
    if value >= 0.0:
        return value
    if value > -NEG_INFO_FLOOR:
        warnings.warn(
            "negative information value clamped to 0 (float noise)", ClampWarning, stacklevel=3
        )
        return 0.0
    raise NumericalError(f"information value {value} below the -{NEG_INFO_FLOOR} noise floor")


def marginalize(g: GaussianVector, keep: Sequence[str]) -> GaussianVector:
    """Restrict to a subset of components (principal submatrix of the CCM)."""
    return GaussianVector(tuple(keep), g.block(keep))


def condition(g: GaussianVector, on: Sequence[str]) -> GaussianVector:
    """Gaussian of the remaining components given the ``on`` components.

    The conditional CCM is the Schur complement of the ``on`` block; it does
    not depend on the observed values, so none are taken.
    """
    on_idx = g.indices(on)
    rest_idx = [i for i in range(g.dim) if i not in on_idx]
    if not rest_idx:
        raise LabelError("conditioning on every component leaves nothing")
    on_block = g.ccm[np.ix_(on_idx, on_idx)]
    _pd_cholesky(on_block, "conditioning block")
    cross = g.ccm[np.ix_(rest_idx, on_idx)]
    schur = g.ccm[np.ix_(rest_idx, rest_idx)] - cross @ np.linalg.solve(on_block, cross.T)
    return GaussianVector(tuple(g.labels[i] for i in rest_idx), schur)


def linear_transform(
    g: GaussianVector, transform: np.ndarray, new_labels: Sequence[str]
) -> GaussianVector:
    """Distribution of ``transform @ components``; the CCM maps as T C T^T."""
    t = np.array(transform, dtype=float)
    if t.ndim != 2 or t.shape[1] != g.dim:
        raise DomainError(f"transform shape {t.shape} does not match dimension {g.dim}")
    if t.shape[0] != len(tuple(new_labels)):
        raise LabelError("one new label per transform row is required")
    return GaussianVector(tuple(new_labels), t @ g.ccm @ t.T)


def mutual_information(g: GaussianVector, u: Sequence[str], v: Sequence[str]) -> float:
    """Mutual information between two disjoint component groups, in bits.

    For Gaussian groups this is ``(1/2) log2(det C_U det C_V / det C_{U+V})``,
    which is invariant under the doubled-CCM convention.
    """
    u_idx = g.indices(u)
    v_idx = g.indices(v)
    if set(u_idx) & set(v_idx):
        raise LabelError(f"groups {list(u)} and {list(v)} overlap")
    ld_u = _logdet_pd(g.ccm[np.ix_(u_idx, u_idx)], "first group block")
    ld_v = _logdet_pd(g.ccm[np.ix_(v_idx, v_idx)], "second group block")
    uv = u_idx + v_idx
    ld_uv = _logdet_pd(g.ccm[np.ix_(uv, uv)], "joint block")
    return _floor_info((ld_u + ld_v - ld_uv) / (2.0 * _LN2))


def conditional_mi(
    g: GaussianVector, u: Sequence[str], v: Sequence[str], w: Sequence[str] = ()
) -> float:
    """I(U;V | W) in bits; empty ``w`` falls through to the unconditional value."""
    w = tuple(w)
    if not w:
        return mutual_information(g, u, v)
    w_idx = set(g.indices(w))
    for group in (u, v):
        if w_idx & set(g.indices(group)):
            raise LabelError("conditioning group overlaps an argument group")
    return mutual_information(condition(g, w), u, v)


def sample(g: GaussianVector, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. rows from the Gaussian (standard scale, covariance = ccm/2).

    Rows are ``Z @ L.T`` with ``L`` the Cholesky factor of ``ccm/2`` and ``Z``
    standard normals from ``numpy.random.default_rng(seed)`` (PCG64).  The
    same seed always reproduces the same matrix; independent substreams come
    from ``SeedSequence([seed, stream_index])``.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 samples, got {n}")
    if not (0 <= int(seed) < 2**64):
        raise DomainError("seed must be an unsigned 64-bit integer")
    lower = _pd_cholesky(g.ccm, "ccm") / math.sqrt(2.0)
    rng = np.random.default_rng(int(seed))
    return rng.standard_normal((int(n), g.dim)) @ lower.T


def empirical_ccm(samples: np.ndarray) -> np.ndarray:
    """Doubled second-moment matrix about zero mean: 2 S^T S / n."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[0] < 2:
        raise DomainError(f"need an (n >= 2) x dim sample matrix, got shape {s.shape}")
    m = 2.0 * (s.T @ s) / s.shape[0]
    return 0.5 * (m + m.T)
