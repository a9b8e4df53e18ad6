"""Barotropic phase equations of state.

Each phase closes with a power-law pressure

    p(rho) = A * (rho / rho_ref)**gamma + B

covering the ideal gas (A=1, rho_ref=1, B=0), the stiffened liquid
(B < 0 shifts the curve) and the isothermal gas (gamma = 1).  All
thermodynamic quantities used by the wave and flux machinery derive
from this law:

    a(rho)**2   = dp/drho                     sound speed
    Psi(rho)    with dPsi/drho = a**2 / rho   specific enthalpy (isentropic)
                                              or Gibbs energy (isothermal)
    G(rho)      = 1 + (rho/a) da/drho         fundamental derivative

For the power law these have closed forms; quadrature only appears in
the test oracles.  Only differences of Psi are ever observable, so the
integration constant is fixed to zero.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EosDomainError

MODES = ("isentropic", "isothermal")


@dataclass(frozen=True)
class BarotropicEos:
    """Power-law pressure closure of a single phase.

    Immutable after construction; safe to share between threads.
    The `mode` tag records the thermodynamic regime; both regimes share
    a**2 = dp/drho and dPsi/drho = a**2/rho, so it never changes the
    numerics.
    """

    A: float
    gamma: float
    rho_ref: float = 1.0
    B: float = 0.0
    mode: str = "isentropic"

    def __post_init__(self):
        if self.A <= 0.0:
            raise ConfigError(f"pressure scale A must be positive, got {self.A}")
        if self.gamma < 1.0:
            raise ConfigError(f"adiabatic exponent must be >= 1, got {self.gamma}")
        if self.rho_ref <= 0.0:
            raise ConfigError(f"reference density must be positive, got {self.rho_ref}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        # scale factor A*gamma/rho_ref**gamma reused by every derived
        # quantity; positive by the checks above, so dp/drho > 0 holds
        # for every positive density
        object.__setattr__(self, "_k", self.A * self.gamma / self.rho_ref**self.gamma)
        object.__setattr__(self, "_p_scale", self.A / self.rho_ref**self.gamma)

    @staticmethod
    def _check_density(rho):
        # scalar fast path: these run inside Newton loops
        if np.ndim(rho):
            if not np.all(np.asarray(rho) > 0.0):
                raise EosDomainError(f"density must be positive, got {rho}")
        elif not rho > 0.0:
            raise EosDomainError(f"density must be positive, got {rho}")

    def pressure(self, rho):
        self._check_density(rho)
        return self._p_scale * rho**self.gamma + self.B

    def sound_speed_sq(self, rho):
        """dp/drho = A*gamma*rho**(gamma-1)/rho_ref**gamma, positive for rho > 0."""
        self._check_density(rho)
        return self._k * rho ** (self.gamma - 1.0)

    def sound_speed(self, rho):
        return np.sqrt(self.sound_speed_sq(rho))

    def psi(self, rho):
        """Potential with dPsi/drho = a**2/rho (additive constant zero).

        gamma == 1 takes the logarithmic branch (A/rho_ref)*log(rho).
        """
        self._check_density(rho)
        if self.gamma == 1.0:
            return (self.A / self.rho_ref) * np.log(rho)
        return self._k / (self.gamma - 1.0) * rho ** (self.gamma - 1.0)

    def fundamental_derivative(self, rho):
        """G = 1 + (rho/a) da/drho = (gamma+1)/2 for the power law."""
        self._check_density(rho)
        return np.full_like(np.asarray(rho, dtype=float), 0.5 * (self.gamma + 1.0))[()]

    def riemann_integral(self, rho_from, rho_to):
        """Integral of a(rho)/rho over [rho_from, rho_to].

        Closed form 2*(a_to - a_from)/(gamma-1); antisymmetric under
        swapping the endpoints.  gamma == 1 degenerates to a*log ratio.
        """
        self._check_density(rho_from)
        self._check_density(rho_to)
        if self.gamma == 1.0:
            a = np.sqrt(self._k)  # constant sound speed
            return a * np.log(np.asarray(rho_to, dtype=float) / rho_from)
        return 2.0 * (self.sound_speed(rho_to) - self.sound_speed(rho_from)) / (self.gamma - 1.0)


@dataclass(frozen=True)
class EosPair:
    """The two phase closures of a mixture, indexable as pair[0], pair[1]."""

    phase1: BarotropicEos
    phase2: BarotropicEos

    def __getitem__(self, i):
        if i in (0, 1):
            return (self.phase1, self.phase2)[i]
        raise IndexError(i)

    def __iter__(self):
        return iter((self.phase1, self.phase2))


def ideal_gas_pair(gamma1=1.4, gamma2=2.0):
    """The unit ideal-gas pair p_i = rho_i**gamma_i used by several benchmarks."""
    return EosPair(BarotropicEos(1.0, gamma1), BarotropicEos(1.0, gamma2))
