"""Superconductor closed forms: energy gap, critical current, T_C shift.

Pure functions over immutable parameter records; SI units throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# CODATA 2018 exact values.
K_B = 1.380649e-23  # Boltzmann constant, J/K
Q_E = 1.602176634e-19  # elementary charge, C
HBAR = 1.054571817e-34  # reduced Planck constant, J*s

#: Flux quantum h/(2e), Wb -- sets the Josephson time scale in the RCSJ solver.
PHI_0 = math.pi * 2.0 * HBAR / (2.0 * Q_E)


@dataclass(frozen=True)
class SuperconductorParams:
    """Electrode parameters of one SQUID.

    ``t_c_base`` is the critical temperature at neutral polarization;
    ``delta_tc`` is the full span of the polarization-induced T_C shift
    (remnant fraction -1 raises T_C by ``delta_tc``, +1 lowers it).
    """

    t_c_base: float = 9.2  # K
    r_n: float = 650.0  # ohm, normal-state resistance
    delta_tc: float = 2.4  # K

    def __post_init__(self):
        if self.t_c_base <= 0.0:
            raise DomainError(f"t_c_base must be > 0, got {self.t_c_base}")
        if self.r_n <= 0.0:
            raise DomainError(f"r_n must be > 0, got {self.r_n}")
        if self.delta_tc < 0.0:
            raise DomainError(f"delta_tc must be >= 0, got {self.delta_tc}")


def bcs_gap(t: float, t_c: float) -> float:
    """Superconducting energy gap (J) at temperature ``t`` for critical
    temperature ``t_c``.

    Delta(T) = 1.763 k_B T_C tanh(2.2 sqrt(T_C/T - 1)); zero exactly at
    T = T_C, monotone non-increasing in T.
    """
    if t <= 0.0:
        raise DomainError(f"temperature must be > 0 K, got {t}")
    if t > t_c:
        raise DomainError(
            f"gap undefined above T_C: t={t} K > t_c={t_c} K (normal state)"
        )
    return 1.763 * K_B * t_c * math.tanh(2.2 * math.sqrt(t_c / t - 1.0))


def ab_critical_current(delta: float, t: float, r_n: float) -> float:
    """Ambegaokar-Baratoff critical current (A) from gap ``delta`` (J).

    I_C = pi*Delta/(2 q_e R_N) * tanh(Delta/(2 k_B T)); zero iff delta = 0.
    """
    if delta < 0.0:
        raise DomainError(f"gap must be >= 0, got {delta}")
    if t <= 0.0:
        raise DomainError(f"temperature must be > 0 K, got {t}")
    if r_n <= 0.0:
        raise DomainError(f"r_n must be > 0, got {r_n}")
    return (math.pi * delta) / (2.0 * Q_E * r_n) * math.tanh(delta / (2.0 * K_B * t))


def tc_from_polarization(p: float, params: SuperconductorParams) -> float:
    """Critical temperature (K) at remnant-polarization fraction ``p``.

    Linear map t_c_base - p*delta_tc: p = -1 (negative remnant) gives the
    highest T_C and hence the high critical current; p = +1 the lowest.
    """
    if not -1.0 <= p <= 1.0:
        raise DomainError(f"polarization fraction must be in [-1, 1], got {p}")
    return params.t_c_base - p * params.delta_tc
