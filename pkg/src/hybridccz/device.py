"""Device parameters and derived quantities.

All frequencies, couplings and rates are stored as angular quantities
(rad/s); user-facing configuration enters ordinary frequencies (value/2pi)
and inverse lifetimes, converted at the boundary.
"""

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

# Tolerance for the level-ladder consistency identities.
_LADDER_RTOL = 1e-9


class RegimeError(ValueError):
    """A detuning or hierarchy requirement of the gate scheme is violated."""


class NoGateError(ValueError):
    """Couplings give a vanishing conditional-phase rate; no gate exists."""


@dataclass(frozen=True)
class DeviceFrequencies:
    """Ququart transition frequencies and bare cavity frequencies (rad/s)."""

    omega_gg_prime: float
    omega_eg: float
    omega_eg_prime: float
    omega_fe: float
    omega_fg: float
    omega_c1: float
    omega_c2: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value <= 0:
                raise RegimeError(f"frequency {name} must be positive, got {value}")
        ladder = self.omega_fe + self.omega_eg
        if abs(self.omega_fg - ladder) > _LADDER_RTOL * abs(ladder):
            raise RegimeError(
                "level-ladder inconsistency: omega_fg != omega_fe + omega_eg "
                f"({self.omega_fg} vs {ladder})")
        ladder2 = self.omega_eg + self.omega_gg_prime
        if abs(self.omega_eg_prime - ladder2) > _LADDER_RTOL * abs(ladder2):
            raise RegimeError(
                "level-ladder inconsistency: omega_eg_prime != omega_eg + omega_gg_prime "
                f"({self.omega_eg_prime} vs {ladder2})")


@dataclass(frozen=True)
class Detunings:
    """Wanted/unwanted cavity-transition detunings (rad/s)."""

    delta1: float
    delta2: float
    delta1_prime: float
    delta2_prime: float
    delta1_dprime: float
    delta2_dprime: float
    delta1_tprime: float
    delta2_tprime: float
    big_delta: float       # delta2 - delta1
    delta12: float         # omega_c1 - omega_c2


def detunings(freqs: DeviceFrequencies) -> Detunings:
    """All ten detunings from the frequency set, with regime guards."""
    d1 = freqs.omega_fg - freqs.omega_c1
    d2 = freqs.omega_fe - freqs.omega_c2
    if d1 <= 0:
        raise RegimeError(f"delta1 = omega_fg - omega_c1 must be > 0, got {d1}")
    if d2 <= 0:
        raise RegimeError(f"delta2 = omega_fe - omega_c2 must be > 0, got {d2}")
    big = d2 - d1
    if big <= 0:
        raise RegimeError(f"Delta = delta2 - delta1 must be > 0, got {big}")
    return Detunings(
        delta1=d1,
        delta2=d2,
        delta1_prime=freqs.omega_fe - freqs.omega_c1,
        delta2_prime=freqs.omega_fg - freqs.omega_c2,
        delta1_dprime=freqs.omega_eg - freqs.omega_c1,
        delta2_dprime=freqs.omega_eg - freqs.omega_c2,
        delta1_tprime=freqs.omega_eg_prime - freqs.omega_c1,
        delta2_tprime=freqs.omega_eg_prime - freqs.omega_c2,
        big_delta=big,
        delta12=freqs.omega_c1 - freqs.omega_c2,
    )


@dataclass(frozen=True)
class CouplingSet:
    """Wanted, unwanted and crosstalk coupling strengths (rad/s)."""

    g1: float
    g2: float
    g1_prime: float = 0.0
    g1_dprime: float = 0.0
    g1_tprime: float = 0.0
    g2_prime: float = 0.0
    g2_dprime: float = 0.0
    g2_tprime: float = 0.0
    g12: float = 0.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"coupling {name} must be non-negative, got {value}")
        if self.g12 > self.g_max:
            raise ValueError("crosstalk g12 exceeds the largest device coupling")

    @property
    def g_max(self) -> float:
        return max(self.g1, self.g2, self.g1_prime, self.g1_dprime,
                   self.g1_tprime, self.g2_prime, self.g2_dprime, self.g2_tprime)

    def with_crosstalk_ratio(self, ratio: float) -> "CouplingSet":
        base = dict(self.__dict__)
        base["g12"] = ratio * self.g_max
        return CouplingSet(**base)

    def without_unwanted(self) -> "CouplingSet":
        return CouplingSet(g1=self.g1, g2=self.g2, g12=self.g12)


def dipole_scaled_couplings(g1: float, g2: float, g12: float = 0.0) -> CouplingSet:
    """Unwanted couplings from the dipole-moment ratios of the flux ququart:
    g' = g, g'' = 0.1 g, g''' = g / sqrt(2)."""
    rt2 = math.sqrt(2.0)
    return CouplingSet(
        g1=g1, g2=g2,
        g1_prime=g1, g1_dprime=0.1 * g1, g1_tprime=g1 / rt2,
        g2_prime=g2, g2_dprime=0.1 * g2, g2_tprime=g2 / rt2,
        g12=g12,
    )


@dataclass(frozen=True)
class DecoherenceRates:
    """Cavity decay, level relaxation, and pure-dephasing rates (1/s)."""

    kappa1: float = 0.0
    kappa2: float = 0.0
    gamma_fe: float = 0.0
    gamma_fg: float = 0.0
    gamma_fg_prime: float = 0.0
    gamma_eg: float = 0.0
    gamma_eg_prime: float = 0.0
    gamma_gg_prime: float = 0.0
    gamma_f_phi: float = 0.0
    gamma_e_phi: float = 0.0
    gamma_g_phi: float = 0.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"rate {name} must be non-negative, got {value}")

    def all_zero(self) -> bool:
        return all(v == 0.0 for v in self.__dict__.values())


@dataclass(frozen=True)
class DerivedCouplings:
    """Effective rates and schedule quantities implied by the device parameters."""

    lambda1: float         # g1^2 / delta1 : photon-number Stark rate, cavity 1
    lambda2: float         # g2^2 / delta2 : photon-number Stark rate, cavity 2
    lam: float             # (g1 g2 / 2)(1/delta1 + 1/delta2) : two-cavity Raman rate
    chi: float             # lam^2 / Delta : conditional cross-Kerr rate
    eta: float             # -lambda1 + chi : net linear phase rate on |g>
    t_gate: float          # pi / chi
    k: int                 # odd-multiple index: lambda1 * t = (2k+1) pi at closure
    s: int                 # round(eta * t / 2 pi)
    q1: float              # omega_c1 / kappa1 (inf if lossless)
    q2: float
    dispersive_ratios: dict = field(default_factory=dict)


def derived_couplings(freqs: DeviceFrequencies, couplings: CouplingSet,
                      rates: DecoherenceRates, k: int) -> DerivedCouplings:
    det = detunings(freqs)
    lambda1 = couplings.g1 ** 2 / det.delta1
    lambda2 = couplings.g2 ** 2 / det.delta2
    lam = 0.5 * couplings.g1 * couplings.g2 * (1.0 / det.delta1 + 1.0 / det.delta2)
    chi = lam ** 2 / det.big_delta
    if chi == 0.0:
        raise NoGateError("chi = 0: no conditional phase accumulates (is g1 or g2 zero?)")
    eta = -lambda1 + chi
    t_gate = math.pi / chi
    s = round(eta * t_gate / TWO_PI)
    q1 = freqs.omega_c1 / rates.kappa1 if rates.kappa1 > 0 else math.inf
    q2 = freqs.omega_c2 / rates.kappa2 if rates.kappa2 > 0 else math.inf
    ratios = {
        "g1/delta1": couplings.g1 / det.delta1,
        "g2/delta2": couplings.g2 / det.delta2,
        "lam/Delta": lam / det.big_delta,
        "lambda1/Delta": lambda1 / det.big_delta,
        "lambda2/Delta": lambda2 / det.big_delta,
    }
    return DerivedCouplings(lambda1=lambda1, lambda2=lambda2, lam=lam, chi=chi,
                            eta=eta, t_gate=t_gate, k=k, s=s, q1=q1, q2=q2,
                            dispersive_ratios=ratios)


def required_g2(delta1: float, delta2: float, k: int) -> float:
    """Cavity-2 coupling closing both phase conditions simultaneously:

        g2 = (2 delta2 / (delta1 + delta2)) sqrt(Delta delta1 / (2k+1)),
        Delta = delta2 - delta1.

    Independent of g1. With this g2 the schedule satisfies chi*t = pi and
    lambda1*t = (2k+1) pi.
    """
    if delta1 <= 0 or delta2 <= 0:
        raise RegimeError("required_g2 needs positive detunings")
    if delta2 <= delta1:
        raise RegimeError("required_g2 needs delta2 > delta1 (Delta must be positive)")
    if k < 0 or int(k) != k:
        raise ValueError("k must be a non-negative integer")
    big = delta2 - delta1
    return (2.0 * delta2 / (delta1 + delta2)) * math.sqrt(big * delta1 / (2 * k + 1))


@dataclass(frozen=True)
class DeviceModel:
    """Validated bundle of every physical parameter plus derived quantities."""

    freqs: DeviceFrequencies
    couplings: CouplingSet
    rates: DecoherenceRates
    k: int
    det: Detunings = None
    derived: DerivedCouplings = None

    def __post_init__(self):
        object.__setattr__(self, "det", detunings(self.freqs))
        object.__setattr__(self, "derived",
                           derived_couplings(self.freqs, self.couplings, self.rates, self.k))

    def replace_couplings(self, couplings: CouplingSet) -> "DeviceModel":
        return DeviceModel(self.freqs, couplings, self.rates, self.k)

    def replace_rates(self, rates: DecoherenceRates) -> "DeviceModel":
        return DeviceModel(self.freqs, self.couplings, rates, self.k)

    def scaled_couplings(self, factor: float) -> "DeviceModel":
        c = self.couplings
        scaled = CouplingSet(
            g1=factor * c.g1, g2=factor * c.g2,
            g1_prime=factor * c.g1_prime, g1_dprime=factor * c.g1_dprime,
            g1_tprime=factor * c.g1_tprime, g2_prime=factor * c.g2_prime,
            g2_dprime=factor * c.g2_dprime, g2_tprime=factor * c.g2_tprime,
            g12=factor * c.g12)
        return self.replace_couplings(scaled)
