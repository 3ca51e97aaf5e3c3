"""Physical and numerical parameters of the convection system.

The geometry is fixed by the streamwise fundamental wavenumber alpha and the
vertical fundamental wavenumber beta.  Everything else (critical Rayleigh
number, geometric factor b, domain length) follows from those two numbers, so
``Params`` stores the derived values once and the rest of the package treats
them as read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Params", "make_params"]


@dataclass(frozen=True)
class Params:
    """Parameter set for the Lorenz / spectral / DNS models.

    Attributes:
        sigma: Prandtl number.
        r: normalized Rayleigh number, Ra / Ra_c.
        Ra: Rayleigh number.
        Ra_c: critical Rayleigh number, (alpha^2 + beta^2)^3 / alpha^2.
        alpha: streamwise fundamental wavenumber, 2*pi / l_x.
        beta: vertical fundamental wavenumber.
        b: geometric factor, 4*beta^2 / (alpha^2 + beta^2).
        l_x: streamwise domain length.
        L: streamwise truncation order (modes l = 0..L are retained).
        M: vertical truncation order (modes m = 1..M are retained).
    """

    sigma: float
    r: float
    Ra: float
    Ra_c: float
    alpha: float
    beta: float
    b: float
    l_x: float
    L: int
    M: int

    @property
    def kappa2_11(self) -> float:
        """alpha^2 + beta^2, the squared wavenumber of the primary mode."""
        return self.alpha**2 + self.beta**2

    def alpha_l(self, l):
        """Streamwise wavenumber of mode l (accepts arrays)."""
        return l * self.alpha

    def beta_m(self, m):
        """Vertical wavenumber of mode m (accepts arrays)."""
        return m * self.beta

    def with_truncation(self, L: int, M: int) -> "Params":
        """Same physics, different truncation orders."""
        return make_params(self.r, L, M, sigma=self.sigma, alpha=self.alpha, beta=self.beta)


def make_params(
    r: float,
    L: int,
    M: int,
    *,
    sigma: float = 10.0,
    alpha: float = math.pi / math.sqrt(2.0),
    beta: float = math.pi,
) -> Params:
    """Build a :class:`Params` from the control parameters (r, L, M).

    Defaults fix sigma = 10, alpha = pi/sqrt(2), beta = pi, which gives
    b = 8/3, Ra_c = 27*pi^4/4, and l_x = 2*sqrt(2).

    Raises:
        ValueError: if r <= 0, L < 1, or M < 2.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    if L < 1:
        raise ValueError(f"L must be a positive integer, got {L}")
    if M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M}")
    kappa2 = alpha**2 + beta**2
    ra_c = kappa2**3 / alpha**2
    return Params(
        sigma=sigma,
        r=float(r),
        Ra=float(r) * ra_c,
        Ra_c=ra_c,
        alpha=alpha,
        beta=beta,
        b=4.0 * beta**2 / kappa2,
        l_x=2.0 * math.pi / alpha,
        L=int(L),
        M=int(M),
    )
