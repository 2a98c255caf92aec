"""CCZ gate logic: closed-form phase factors, truth tables, and Monte Carlo
average gate fidelity under any evolution engine.

The conditional phase on |n1, n2, g> is exp(-i (eta n1 + chi n1 n2) t); the
|g'> sector is untouched. At the closure conditions (chi t = pi and eta t an
even multiple of pi) the phases collapse to +1 everywhere except -1 on
odd-photon-number pairs with the target in |g>, which is exactly the CCZ
truth table for any parity-encoded logical pair.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .device import DeviceModel
from .hamiltonians import (TermSum, h_dispersive_diagonal,
                           h_dispersive_exchange, h_full, h_gate_phase)
from .lindblad import (IntegratorConfig, LindbladModel, evolve_master,
                       evolve_schrodinger, fidelity, standard_channels)
from .operators import Operator
from .spaces import CompositeSpace, level_index
from .states import StateVector, level_population

ENGINES = ("ideal", "eff6", "eff5", "eff4", "full", "lossy")

PHASE_UNDEFINED_OVERLAP = 1e-6


class GateProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class GateSchedule:
    """Gate time and closure integers, plus the engine used to realize it."""

    t_gate: float
    k: int
    s: int
    engine: str = "ideal"

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise GateProtocolError(f"unknown engine {self.engine!r}; pick one of {ENGINES}")
        if self.t_gate < 0:
            raise GateProtocolError("gate time must be non-negative")


def schedule_from_model(model: DeviceModel, engine: str = "ideal",
                        t_override: float | None = None) -> GateSchedule:
    d = model.derived
    t = d.t_gate if t_override is None else t_override
    return GateSchedule(t_gate=t, k=d.k, s=d.s, engine=engine)


def phase_factor(n1: int, n2: int, level, eta: float, chi: float, t: float) -> complex:
    """Diagonal gate phase for one basis state of the logical space."""
    lvl = level_index(level)
    if lvl == 0:
        return 1.0 + 0.0j
    if lvl == 1:
        return complex(np.exp(-1j * (eta * n1 + chi * n1 * n2) * t))
    raise GateProtocolError("phase_factor is defined on the logical levels |g'>, |g> only")


@dataclass(frozen=True)
class PhaseTable:
    """All gate phases on the logical sectors, keyed by (n1, n2, level)."""

    entries: dict

    @classmethod
    def from_rates(cls, space: CompositeSpace, eta: float, chi: float, t: float):
        table = {}
        for n1 in range(space.cavity1_dim):
            for n2 in range(space.cavity2_dim):
                for lvl in (0, 1):
                    table[(n1, n2, lvl)] = phase_factor(n1, n2, lvl, eta, chi, t)
        return cls(table)

    def at(self, n1: int, n2: int, level) -> complex:
        return self.entries[(n1, n2, level_index(level))]


def ideal_gate_unitary(space: CompositeSpace, eta: float, chi: float, t: float) -> Operator:
    """Closed-form diagonal gate: phase_factor on the logical sectors,
    identity on the (unpopulated) |e>, |f> sectors."""
    diag = np.ones(space.dim, dtype=np.complex128)
    for i in range(space.dim):
        n1, n2, lvl = space.unindex(i)
        if lvl <= 1:
            diag[i] = phase_factor(n1, n2, lvl, eta, chi, t)
    return Operator(space.dims, sp.diags(diag, format="csr"), space)


def parity_ccz_unitary(space: CompositeSpace) -> Operator:
    """The exact CCZ target: -1 on odd x odd x |g|, +1 elsewhere."""
    diag = np.ones(space.dim, dtype=np.complex128)
    for i in range(space.dim):
        n1, n2, lvl = space.unindex(i)
        if lvl == 1 and n1 % 2 == 1 and n2 % 2 == 1:
            diag[i] = -1.0
    return Operator(space.dims, sp.diags(diag, format="csr"), space)


# ---------------------------------------------------------------------------
# engine dispatch


def hamiltonian_for_engine(engine: str, model: DeviceModel, space: CompositeSpace) -> TermSum:
    if engine in ("full", "lossy"):
        return h_full(model, space)
    if engine == "eff4":
        return h_dispersive_exchange(model, space)
    if engine == "eff5":
        return h_dispersive_diagonal(model, space)
    if engine == "eff6":
        return h_gate_phase(model, space)
    raise GateProtocolError(f"no Hamiltonian for engine {engine!r}")


def run_engine(psi0: StateVector, engine: str, model: DeviceModel,
               space: CompositeSpace, schedule: GateSchedule,
               integrator: dict | None = None):
    """Evolve a pure input through the chosen engine.

    Returns (final_state, EvolutionResult-or-None). The final state is a
    StateVector for closed engines and a DensityMatrix for the lossy one.
    """
    if engine == "ideal":
        d = model.derived
        if schedule.t_gate == 0.0:
            return psi0, None
        u = ideal_gate_unitary(space, d.eta, d.chi, schedule.t_gate)
        return StateVector(space, u.apply(psi0.amplitudes), normalize=True), None
    opts = dict(integrator or {})
    cfg = IntegratorConfig(t_final=schedule.t_gate, **opts)
    ham = hamiltonian_for_engine(engine, model, space)
    if engine == "lossy":
        lmodel = LindbladModel(ham, standard_channels(model, space))
        result = evolve_master(psi0.to_density_matrix(), lmodel, cfg)
    else:
        result = evolve_schrodinger(psi0, ham, cfg)
    return result.final_state, result


# ---------------------------------------------------------------------------
# truth table


@dataclass
class TruthTableRow:
    label: str
    target_phase: int
    overlap: float
    phase_error_deg: float | None
    leakage: float
    ef_population: float = 0.0      # population of the |e>, |f> levels


@dataclass
class TruthTableReport:
    engine: str
    rows: list = field(default_factory=list)

    def signature(self) -> list:
        return [row.target_phase for row in self.rows]

    def max_phase_error_deg(self) -> float:
        errs = [abs(r.phase_error_deg) for r in self.rows if r.phase_error_deg is not None]
        return max(errs, default=0.0)

    def min_overlap(self) -> float:
        return min((r.overlap for r in self.rows), default=0.0)


def _product_state(space: CompositeSpace, c1: np.ndarray, c2: np.ndarray,
                   atom: np.ndarray) -> np.ndarray:
    """Kron of per-subsystem coefficient vectors in the flat-index order."""
    v = np.einsum("i,j,k->ijk", c1, c2, atom).reshape(space.dim)
    return v


def logical_basis(space: CompositeSpace, pair1, pair2):
    """The 8 computational basis states |l1 l2 l3> with their CCZ phases.

    Order: (e,e,g'), (e,e,g), (e,o,g'), (e,o,g), (o,e,g'), (o,e,g),
    (o,o,g'), (o,o,g); only the last carries -1.
    """
    atoms = {"g_prime": np.array([1, 0, 0, 0], dtype=np.complex128),
             "g": np.array([0, 1, 0, 0], dtype=np.complex128)}
    basis = []
    for s1, c1 in (("e", pair1[0].coefficients), ("o", pair1[1].coefficients)):
        for s2, c2 in (("e", pair2[0].coefficients), ("o", pair2[1].coefficients)):
            for s3 in ("g_prime", "g"):
                label = f"|{s1} {s2} {'g_prime' if s3 == 'g_prime' else 'g'}>"
                target = -1 if (s1 == "o" and s2 == "o" and s3 == "g") else +1
                vec = _product_state(space, _embed(c1, space.cavity1_dim),
                                     _embed(c2, space.cavity2_dim), atoms[s3])
                basis.append((label, target, vec))
    return basis


def _embed(coeffs: np.ndarray, dim: int) -> np.ndarray:
    if coeffs.size > dim:
        raise GateProtocolError(
            f"encoding needs {coeffs.size} Fock levels but the cavity is truncated at {dim}")
    out = np.zeros(dim, dtype=np.complex128)
    out[:coeffs.size] = coeffs
    return out


def truth_table(engine: str, encoding_pair, model: DeviceModel,
                schedule: GateSchedule, space: CompositeSpace,
                integrator: dict | None = None) -> TruthTableReport:
    """Run the 8 computational basis states through the engine.

    Closed engines report the complex overlap with the unsigned basis state,
    split into magnitude and phase error against the target sign; the lossy
    engine reports the fidelity against the signed target instead (phases of
    a mixed state are not separately defined).
    """
    pair1 = pair2 = encoding_pair
    basis = logical_basis(space, pair1, pair2)
    logical_span = np.stack([vec for (_, _, vec) in basis])
    report = TruthTableReport(engine=engine)
    for label, target, vec in basis:
        psi0 = StateVector(space, vec)
        out, result = run_engine(psi0, engine, model, space, schedule, integrator)
        if result is not None and not result.ok:
            raise RuntimeError(f"engine {engine} failed on {label}: {result.failure_reason}")
        if isinstance(out, StateVector):
            amp = complex(np.vdot(vec, out.amplitudes))
            overlap = abs(amp)
            if overlap < PHASE_UNDEFINED_OVERLAP:
                phase_err = None
            else:
                phase_err = math.degrees(math.atan2((amp / target).imag, (amp / target).real))
            inside = np.linalg.norm(logical_span.conj() @ out.amplitudes) ** 2
            leakage = max(0.0, 1.0 - float(inside))
        else:
            rho = out.rho
            overlap = float(np.sqrt(max(np.real(np.vdot(vec, rho @ vec)), 0.0)))
            phase_err = None
            proj = logical_span.conj() @ rho @ logical_span.T
            leakage = max(0.0, 1.0 - float(np.real(np.trace(proj))))
        report.rows.append(TruthTableRow(label, target, overlap, phase_err, leakage,
                                         ef_populations(out, space)))
    return report


# ---------------------------------------------------------------------------
# average gate fidelity


def _haar_qubit(rng) -> np.ndarray:
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def average_gate_fidelity(engine: str, encoding_pair, model: DeviceModel,
                          schedule: GateSchedule, space: CompositeSpace,
                          sample_count: int = 20, seed: int = 0,
                          integrator: dict | None = None,
                          forced_input: StateVector | None = None):
    """Monte Carlo mean fidelity between the engine output and the ideal CCZ
    output over Haar-random logical product inputs.

    This is a stand-in estimator: inputs are product states with each qubit
    an independent Haar-random superposition of its two logical states.
    Deterministic for a given seed. Returns (mean, list of per-sample F).
    """
    if sample_count < 1:
        raise GateProtocolError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    even, odd = encoding_pair
    ccz = parity_ccz_unitary(space)
    atoms = (np.array([1, 0, 0, 0], dtype=np.complex128),
             np.array([0, 1, 0, 0], dtype=np.complex128))
    values = []
    for _ in range(sample_count):
        if forced_input is not None:
            psi0 = forced_input
        else:
            q1, q2, q3 = _haar_qubit(rng), _haar_qubit(rng), _haar_qubit(rng)
            c1 = q1[0] * _embed(even.coefficients, space.cavity1_dim) \
                + q1[1] * _embed(odd.coefficients, space.cavity1_dim)
            c2 = q2[0] * _embed(even.coefficients, space.cavity2_dim) \
                + q2[1] * _embed(odd.coefficients, space.cavity2_dim)
            atom = q3[0] * atoms[0] + q3[1] * atoms[1]
            psi0 = StateVector(space, _product_state(space, c1, c2, atom), normalize=True)
        ideal = StateVector(space, ccz.apply(psi0.amplitudes), normalize=True)
        out, result = run_engine(psi0, engine, model, space, schedule, integrator)
        if result is not None and not result.ok:
            raise RuntimeError(f"engine {engine} failed: {result.failure_reason}")
        values.append(fidelity(out, ideal))
    return float(np.mean(values)), values


def ef_populations(state, space: CompositeSpace) -> float:
    """Total population outside the logical levels."""
    return level_population(state, space, "e") + level_population(state, space, "f")
