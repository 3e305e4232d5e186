"""Even-power polynomial potentials, 1-D or radial."""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class PolynomialPotential:
    """V(x) = mu x^2 + sigma x^4 + eta x^6 (+ l(l+1)/x^2 when radial).

    ``ell=None`` selects the 1-D problem on the whole line; an integer
    ``ell`` selects the reduced radial problem on [0, inf).
    """

    mu: float = 0.0
    sigma: float = 0.0
    eta: float = 0.0
    ell: Optional[int] = None

    def __post_init__(self):
        if self.mu == 0 and self.sigma == 0 and self.eta == 0:
            raise ValueError("potential needs at least one nonzero coefficient")
        if self.eta < 0:
            raise ValueError(f"eta must be non-negative for confinement, got {self.eta}")
        if self.eta == 0 and self.sigma < 0:
            raise ValueError("sigma must be non-negative when eta = 0")
        if self.eta == 0 and self.sigma == 0 and self.mu <= 0:
            raise ValueError("a pure quadratic potential needs mu > 0")
        if self.ell is not None and (int(self.ell) != self.ell or self.ell < 0):
            raise ValueError(f"ell must be a non-negative integer, got {self.ell}")

    @property
    def radial(self):
        return self.ell is not None

    @property
    def centrifugal(self):
        return 0.0 if self.ell is None else float(self.ell * (self.ell + 1))

    def power_coefficients(self):
        """Coefficients of x^2, x^4, x^6 in that order."""
        return (self.mu, self.sigma, self.eta)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        v = x2 * (self.mu + x2 * (self.sigma + x2 * self.eta))
        if self.radial and self.ell:
            v = v + self.centrifugal / x2
        return v
