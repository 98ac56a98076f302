"""Squeezing-parameter domain and the derived scalar coefficients.

All covariance-like quantities in this package use the doubled classical
covariance matrix (CCM) convention: the density of a zero-mean Gaussian
vector eta is proportional to exp(-eta^T X^{-1} eta), so X equals twice the
standard covariance matrix and a variable with variance 1/2 has CCM entry 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# e^{8r} enters the closed-form information difference; r <= 5 keeps every
# intermediate well inside double range.
R_MAX = 5.0


def check_r(r: float) -> float:
    """Validate the squeezing parameter, returning it as a float."""
    r = float(r)
    if not (0.0 < r <= R_MAX) or math.isnan(r):
        raise DomainError(f"squeezing parameter must satisfy 0 < r <= {R_MAX}, got {r}")
    return r


@dataclass(frozen=True)
class DerivedParams:
    """Scalar coefficients of the five-variable source distribution at squeezing r.

    ``x, y, a, b, c`` are the distinct CCM entries; ``m_ac`` and ``m_ab`` are
    the correlation parameters of the two private-pair distributions used by
    the splitting protocols.
    """

    r: float
    x: float
    y: float
    a: float
    b: float
    c: float
    m_ac: float
    m_ab: float

    @classmethod
    def from_r(cls, r: float) -> "DerivedParams":
        r = check_r(r)
        t = math.exp(2.0 * r)
        x = (t - 1.0) / 2.0
        y = t * (2.0 * t - 1.0) / (2.0 * (t - 1.0))
        return cls(
            r=r,
            x=x,
            y=y,
            a=math.cosh(2.0 * r) + x,
            b=math.sinh(2.0 * r) - x,
            c=1.0 + 4.0 * x,
            m_ac=math.cosh(2.0 * r),
            m_ab=(1.0 + 2.0 * (t * t - t)) / (2.0 * t - 1.0),
        )

    @property
    def e2r(self) -> float:
        """Convenience: e^{2r}."""
        return math.exp(2.0 * self.r)


def pair_block(m: float) -> "list[list[float]]":
    """2x2 correlated-pair CCM with diagonal m and off-diagonal sqrt(m^2 - 1)."""
    if m < 1.0:
        raise DomainError(f"pair parameter must satisfy m >= 1, got {m}")
    k = math.sqrt(m * m - 1.0)
    return [[m, k], [k, m]]
