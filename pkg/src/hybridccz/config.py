"""Flat ``key = value`` run configuration.

Keys mirror the device symbols; frequencies are entered as ordinary
frequencies (value/2pi) in GHz or MHz and lifetimes as inverse rates in
microseconds, converted to angular rad/s on model construction. ``auto``
asks the loader to derive a value: g2 from the gate-closure condition, the
unwanted couplings from the dipole-moment scaling.
"""

import math
from dataclasses import dataclass, fields

from .device import (CouplingSet, DecoherenceRates, DeviceFrequencies,
                     DeviceModel, TWO_PI, detunings, required_g2)
from .encodings import CatSpec, cat_pair, fock_pair
from .spaces import CompositeSpace

GHZ_TO_RAD = TWO_PI * 1e9
MHZ_TO_RAD = TWO_PI * 1e6

AUTO = "auto"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; message carries a line number
    when the problem is tied to one."""


@dataclass
class RunConfig:
    # ququart transition frequencies, /2pi, GHz
    omega_gg_prime_ghz: float = 1.0
    omega_eg_ghz: float = 7.0
    omega_eg_prime_ghz: float = 8.0
    omega_fe_ghz: float = 12.0
    omega_fg_ghz: float = 19.0
    # cavity frequencies, /2pi, GHz
    omega_c1_ghz: float = 18.3
    omega_c2_ghz: float = 11.2
    # couplings, /2pi, MHz ('auto': g2 from closure, unwanted from dipole scaling)
    g1_mhz: float = 95.7
    g2_mhz: float | str = AUTO
    g1_prime_mhz: float | str = AUTO
    g1_dprime_mhz: float | str = AUTO
    g1_tprime_mhz: float | str = AUTO
    g2_prime_mhz: float | str = AUTO
    g2_dprime_mhz: float | str = AUTO
    g2_tprime_mhz: float | str = AUTO
    g12_ratio: float = 0.0
    # closure integer
    k: int = 5
    # decoherence lifetimes, microseconds (inf disables a channel)
    kappa_inv_us: float = 10.0
    gamma_gg_prime_inv_us: float = 80.0
    gamma_eg_inv_us: float = 40.0
    gamma_fg_prime_inv_us: float = 10.0
    gamma_fg_inv_us: float = 10.0
    gamma_fe_inv_us: float = 10.0
    gamma_eg_prime_inv_us: float = 20.0
    gamma_f_phi_inv_us: float = 5.0
    gamma_e_phi_inv_us: float = 5.0
    gamma_g_phi_inv_us: float = 5.0
    # encodings
    alpha: float = 0.5
    fock_m: int = 0
    fock_n: int = 0
    cat_tail_tol: float = 1e-6
    # truncations
    n_trunc_1: int = 6
    n_trunc_2: int = 6
    # integrator
    steps_per_period: int = 40
    diag_every: int = 2000
    hermitize_every: int = 100
    # experiment behaviour
    include_unwanted_in_experiments: bool = False
    workers: int = 0
    seed: int = 12345

    # ----- parsing ------------------------------------------------------
    @classmethod
    def _field_types(cls):
        return {f.name: f.type for f in fields(cls)}

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        cfg = cls()
        ftypes = cls._field_types()
        seen = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in ftypes:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in seen:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            seen.add(key)
            try:
                setattr(cfg, key, _parse_value(key, value, ftypes[key]))
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    # ----- validation and model construction ----------------------------
    def validate(self):
        if self.n_trunc_1 < 2 or self.n_trunc_2 < 2:
            raise ConfigError("cavity truncations must be at least 2")
        if not 0.0 <= self.g12_ratio <= 1.0:
            raise ConfigError(f"g12_ratio {self.g12_ratio} outside [0, 1]")
        if self.k < 0:
            raise ConfigError("closure integer k must be non-negative")
        if self.alpha <= 0:
            raise ConfigError("cat amplitude alpha must be positive")
        if self.steps_per_period < 4:
            raise ConfigError("steps_per_period below 4 cannot resolve a phase period")

    def space(self) -> CompositeSpace:
        return CompositeSpace(self.n_trunc_1, self.n_trunc_2)

    def frequencies(self) -> DeviceFrequencies:
        return DeviceFrequencies(
            omega_gg_prime=self.omega_gg_prime_ghz * GHZ_TO_RAD,
            omega_eg=self.omega_eg_ghz * GHZ_TO_RAD,
            omega_eg_prime=self.omega_eg_prime_ghz * GHZ_TO_RAD,
            omega_fe=self.omega_fe_ghz * GHZ_TO_RAD,
            omega_fg=self.omega_fg_ghz * GHZ_TO_RAD,
            omega_c1=self.omega_c1_ghz * GHZ_TO_RAD,
            omega_c2=self.omega_c2_ghz * GHZ_TO_RAD,
        )

    def couplings(self) -> CouplingSet:
        freqs = self.frequencies()
        det = detunings(freqs)
        g1 = self.g1_mhz * MHZ_TO_RAD
        if self.g2_mhz == AUTO:
            g2 = required_g2(det.delta1, det.delta2, self.k)
        else:
            g2 = self.g2_mhz * MHZ_TO_RAD
        rt2 = math.sqrt(2.0)
        auto = {"g1_prime_mhz": g1, "g1_dprime_mhz": 0.1 * g1, "g1_tprime_mhz": g1 / rt2,
                "g2_prime_mhz": g2, "g2_dprime_mhz": 0.1 * g2, "g2_tprime_mhz": g2 / rt2}
        resolved = {}
        for key, fallback in auto.items():
            value = getattr(self, key)
            resolved[key] = fallback if value == AUTO else value * MHZ_TO_RAD
        base = CouplingSet(g1=g1, g2=g2,
                           g1_prime=resolved["g1_prime_mhz"],
                           g1_dprime=resolved["g1_dprime_mhz"],
                           g1_tprime=resolved["g1_tprime_mhz"],
                           g2_prime=resolved["g2_prime_mhz"],
                           g2_dprime=resolved["g2_dprime_mhz"],
                           g2_tprime=resolved["g2_tprime_mhz"])
        return base.with_crosstalk_ratio(self.g12_ratio)

    def rates(self, kappa_inv_us: float | None = None) -> DecoherenceRates:
        def rate(inv_us):
            return 0.0 if math.isinf(inv_us) else 1.0 / (inv_us * 1e-6)

        kappa = rate(self.kappa_inv_us if kappa_inv_us is None else kappa_inv_us)
        return DecoherenceRates(
            kappa1=kappa, kappa2=kappa,
            gamma_fe=rate(self.gamma_fe_inv_us),
            gamma_fg=rate(self.gamma_fg_inv_us),
            gamma_fg_prime=rate(self.gamma_fg_prime_inv_us),
            gamma_eg=rate(self.gamma_eg_inv_us),
            gamma_eg_prime=rate(self.gamma_eg_prime_inv_us),
            gamma_gg_prime=rate(self.gamma_gg_prime_inv_us),
            gamma_f_phi=rate(self.gamma_f_phi_inv_us),
            gamma_e_phi=rate(self.gamma_e_phi_inv_us),
            gamma_g_phi=rate(self.gamma_g_phi_inv_us),
        )

    def device_model(self, kappa_inv_us: float | None = None,
                     g12_ratio: float | None = None) -> DeviceModel:
        try:
            couplings = self.couplings()
            if g12_ratio is not None:
                couplings = couplings.with_crosstalk_ratio(g12_ratio)
            return DeviceModel(self.frequencies(), couplings,
                               self.rates(kappa_inv_us), self.k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def experiment_model(self, kappa_inv_us: float | None = None,
                         g12_ratio: float | None = None,
                         include_unwanted: bool | None = None) -> DeviceModel:
        """Model used by the GHZ run and the sweep: wanted couplings plus
        crosstalk, unwanted cavity-atom couplings only on request."""
        model = self.device_model(kappa_inv_us, g12_ratio)
        include = (self.include_unwanted_in_experiments
                   if include_unwanted is None else include_unwanted)
        if not include:
            model = model.replace_couplings(model.couplings.without_unwanted())
        return model

    def encoding_pair(self, kind: str):
        dim = min(self.n_trunc_1, self.n_trunc_2)
        if kind == "fock":
            return fock_pair(self.fock_m, self.fock_n, dim)
        if kind == "cat":
            return cat_pair(CatSpec(self.alpha, dim, tail_tol=self.cat_tail_tol))
        raise ConfigError(f"unknown encoding {kind!r} (expected 'fock' or 'cat')")

    def integrator_options(self) -> dict:
        return {"steps_per_period": self.steps_per_period,
                "diag_every": self.diag_every,
                "hermitize_every": self.hermitize_every}


def _parse_value(key, text, ftype):
    if text == AUTO:
        if "str" in str(ftype):
            return AUTO
        raise ValueError("'auto' is not accepted for this key")
    if ftype == bool or ftype == "bool":
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if ftype == int or ftype == "int":
        return int(text)
    # floats (inf allowed for lifetimes)
    return float(text)


# Reference values printed in the device parameter table, used by the
# --check-table1 consistency gate (ordinary frequencies, GHz / MHz).
TABLE1_REFERENCE = {
    "delta1_ghz": 0.7,
    "delta2_ghz": 0.8,
    "delta1_prime_ghz": -6.3,
    "delta1_dprime_ghz": -11.3,
    "delta1_tprime_ghz": -10.3,
    "delta2_prime_ghz": 7.8,
    "delta2_dprime_ghz": -4.2,
    "delta2_tprime_ghz": -3.2,
    "delta12_ghz": 7.1,
    "g2_mhz": 85.1,
    "g1_prime_mhz": 95.7,
    "g1_dprime_mhz": 9.57,
    "g1_tprime_mhz": 67.7,
    "g2_prime_mhz": 85.1,
    "g2_dprime_mhz": 8.51,
    "g2_tprime_mhz": 60.2,
}


def check_against_table1(model: DeviceModel, rel_tol: float = 0.005):
    """Compare the derived detunings and couplings against the published
    parameter table. Returns a list of (name, derived, expected, rel_err);
    entries exceeding rel_tol are failures."""
    det = model.det
    c = model.couplings
    derived = {
        "delta1_ghz": det.delta1 / GHZ_TO_RAD,
        "delta2_ghz": det.delta2 / GHZ_TO_RAD,
        "delta1_prime_ghz": det.delta1_prime / GHZ_TO_RAD,
        "delta1_dprime_ghz": det.delta1_dprime / GHZ_TO_RAD,
        "delta1_tprime_ghz": det.delta1_tprime / GHZ_TO_RAD,
        "delta2_prime_ghz": det.delta2_prime / GHZ_TO_RAD,
        "delta2_dprime_ghz": det.delta2_dprime / GHZ_TO_RAD,
        "delta2_tprime_ghz": det.delta2_tprime / GHZ_TO_RAD,
        "delta12_ghz": det.delta12 / GHZ_TO_RAD,
        "g2_mhz": c.g2 / MHZ_TO_RAD,
        "g1_prime_mhz": c.g1_prime / MHZ_TO_RAD,
        "g1_dprime_mhz": c.g1_dprime / MHZ_TO_RAD,
        "g1_tprime_mhz": c.g1_tprime / MHZ_TO_RAD,
        "g2_prime_mhz": c.g2_prime / MHZ_TO_RAD,
        "g2_dprime_mhz": c.g2_dprime / MHZ_TO_RAD,
        "g2_tprime_mhz": c.g2_tprime / MHZ_TO_RAD,
    }
    report = []
    for name, expected in TABLE1_REFERENCE.items():
        got = derived[name]
        rel = abs(got - expected) / abs(expected)
        report.append((name, got, expected, rel, rel <= rel_tol))
    return report
