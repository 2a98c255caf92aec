"""Time evolution: Schrodinger propagation and the full master equation.

Both engines use fixed-step fourth-order Runge-Kutta. The step size follows
h = 1 / (steps_per_period * f_max) with f_max the fastest phase frequency in
the model, unless an explicit step is configured. Density-matrix runs
re-Hermitize periodically and track numerical-health diagnostics (trace
drift, Hermiticity drift, smallest eigenvalue, top-Fock leakage); a run that
breaches its tolerances is returned marked failed, carrying the timeline.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .device import DeviceModel, TWO_PI
from .hamiltonians import TermSum
from .operators import Operator, annihilation, level_projector, level_transition, lift
from .spaces import CompositeSpace, SpaceMismatchError
from .states import DensityMatrix, StateVector, top_fock_leakage


@dataclass(frozen=True)
class CollapseChannel:
    op: Operator
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"channel rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class LindbladModel:
    """A time-dependent Hamiltonian plus weighted collapse channels."""

    hamiltonian: TermSum
    channels: tuple = ()

    def __post_init__(self):
        dims = self.hamiltonian.space.dims
        for ch in self.channels:
            if ch.op.dims != dims:
                raise SpaceMismatchError(
                    f"channel {ch.label or ch.op} lives on {ch.op.dims}, "
                    f"Hamiltonian on {dims}")

    @property
    def space(self) -> CompositeSpace:
        return self.hamiltonian.space


def standard_channels(model: DeviceModel, space: CompositeSpace) -> tuple:
    """The physical decoherence channels: cavity decay, every level-relaxation
    path, and projector-form pure dephasing of |f>, |e>, |g>."""
    r = model.rates
    chans = []

    def add(op, rate, label):
        if rate > 0:
            chans.append(CollapseChannel(op, rate, label))

    add(lift(annihilation(space.cavity1_dim), "cavity1", space), r.kappa1, "a1")
    add(lift(annihilation(space.cavity2_dim), "cavity2", space), r.kappa2, "a2")
    for hi, lo, rate, label in [
        ("f", "e", r.gamma_fe, "s-_fe"),
        ("f", "g", r.gamma_fg, "s-_fg"),
        ("f", "g_prime", r.gamma_fg_prime, "s-_fg'"),
        ("e", "g", r.gamma_eg, "s-_eg"),
        ("e", "g_prime", r.gamma_eg_prime, "s-_eg'"),
        ("g", "g_prime", r.gamma_gg_prime, "s-_gg'"),
    ]:
        add(lift(level_transition(hi, lo), "atom", space), rate, label)
    for lvl, rate in [("f", r.gamma_f_phi), ("e", r.gamma_e_phi), ("g", r.gamma_g_phi)]:
        add(lift(level_projector(lvl), "atom", space), rate, f"proj_{lvl}")
    return tuple(chans)


@dataclass(frozen=True)
class IntegratorConfig:
    t_final: float
    h: float | None = None
    steps_per_period: int = 40
    diag_every: int = 2000
    hermitize_every: int = 100
    trace_tol: float = 1e-6
    herm_tol: float = 1e-8
    eig_floor: float = -1e-6
    norm_tol: float = 1e-8

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.h is not None and self.h <= 0:
            raise ValueError("step size must be positive")

    def resolve_steps(self, ham: TermSum, max_rate: float = 0.0, refine: int = 1):
        """(h, nsteps) with nsteps * h equal to t_final exactly.

        ``refine`` multiplies the per-period resolution; the closed-system
        engine uses it to hold norm drift well inside its tolerance.
        """
        if self.h is not None:
            h = self.h
        else:
            f_max = max(ham.frequency_scale_hz(), max_rate / TWO_PI, 1.0 / self.t_final)
            h = 1.0 / (self.steps_per_period * refine * f_max)
        n = max(1, math.ceil(self.t_final / h - 1e-12))
        return self.t_final / n, n


@dataclass
class DiagnosticRecord:
    t: float
    trace_error: float
    herm_error: float
    min_eigenvalue: float
    top_fock_leakage: float


@dataclass
class EvolutionResult:
    final_state: object
    ok: bool
    failure_reason: str | None
    diagnostics: list = field(default_factory=list)
    wall_time_s: float = 0.0
    steps: int = 0
    step_size: float = 0.0

    @property
    def max_trace_error(self) -> float:
        return max((d.trace_error for d in self.diagnostics), default=0.0)

    @property
    def min_eigenvalue(self) -> float:
        return min((d.min_eigenvalue for d in self.diagnostics), default=0.0)


def liouvillian_apply(rho, t: float, model: LindbladModel) -> np.ndarray:
    """d(rho)/dt at time t: -i[H(t), rho] + sum_c rate_c L[op_c] rho, with
    L[A] rho = A rho A^dag - (A^dag A rho + rho A^dag A)/2.

    General reference implementation; accepts any square matrix rho.
    """
    mat = rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    dim = model.space.dim
    if mat.shape != (dim, dim):
        raise SpaceMismatchError(f"rho shape {mat.shape} != model dim {dim}")
    channels = [(ch.op.matrix, ch.rate) for ch in model.channels]
    return _kernels.liouvillian_matvec_np(mat, t, model.hamiltonian, channels)


def _pack_for_kernel(model: LindbladModel):
    ham = model.hamiltonian
    h0r, h0c, h0v, orow, ocol, oval, oterm, freqs = ham.pack()
    jst, jrow, jsrc, jamp, jrate, gdiag = _kernels.pack_channels(
        [(ch.op.matrix, ch.rate) for ch in model.channels], model.space.dim)
    return (freqs, h0r, h0c, h0v, orow, ocol, oval, oterm, gdiag,
            jst, jrow, jsrc, jamp, jrate)


MASTER_STEP_REFINE = 2


def evolve_master(rho0: DensityMatrix, model: LindbladModel, cfg: IntegratorConfig,
                  use_numba: bool = True) -> EvolutionResult:
    """Propagate the master equation to cfg.t_final.

    The rule-derived step resolves twice the Hamiltonian's fastest phase:
    density-matrix coherences rotate at difference frequencies up to
    2 f_max, and at the bare rule the closed-limit run drifts out of
    agreement with the Schrodinger engine.
    """
    space = model.space
    if rho0.space.dims != space.dims:
        raise SpaceMismatchError("initial state space does not match the model")
    max_rate = max((ch.rate for ch in model.channels), default=0.0)
    h, nsteps = cfg.resolve_steps(model.hamiltonian, max_rate,
                                  refine=MASTER_STEP_REFINE)
    packed = _pack_for_kernel(model)
    (freqs, h0r, h0c, h0v, orow, ocol, oval, oterm, gdiag,
     jst, jrow, jsrc, jamp, jrate) = packed

    # numpy fallback needs per-term CSR matrices
    if not (use_numba and _kernels.HAVE_NUMBA):
        h0_csr = model.hamiltonian.h0.tocsr()
        oterms = [(term.coeff * term.op.tocsr(), j)
                  for j, term in enumerate(model.hamiltonian.terms)]
        oterms = [(op, j) for op, j in oterms]
        jumps = [(jrow[jst[c]:jst[c + 1]], jsrc[jst[c]:jst[c + 1]],
                  jamp[jst[c]:jst[c + 1]], jrate[c]) for c in range(len(jrate))]

    rho = np.array(rho0.rho, dtype=np.complex128, order="C")
    rho = 0.5 * (rho + rho.conj().T)
    diags = []
    t_start = time.perf_counter()
    ok, reason = True, None

    def record(t, rho):
        tr_err = abs(np.real(np.trace(rho)) - 1.0) + abs(np.imag(np.trace(rho)))
        herm = float(np.abs(rho - rho.conj().T).max())
        mineig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        leak = top_fock_leakage(rho, space)
        diags.append(DiagnosticRecord(t, tr_err, herm, mineig, leak))
        if tr_err > cfg.trace_tol:
            return f"trace drift {tr_err:.3e} exceeds {cfg.trace_tol:.1e}"
        if herm > cfg.herm_tol:
            return f"Hermiticity drift {herm:.3e} exceeds {cfg.herm_tol:.1e}"
        if mineig < cfg.eig_floor:
            return f"smallest eigenvalue {mineig:.3e} below {cfg.eig_floor:.1e}"
        return None

    reason = record(0.0, rho)
    if reason is not None:
        ok = False
    done = 0
    chunk = max(1, min(cfg.diag_every, cfg.hermitize_every))
    while ok and done < nsteps:
        n = min(chunk, nsteps - done)
        t0 = done * h
        if use_numba and _kernels.HAVE_NUMBA:
            _kernels.master_rk4_chunk(rho, t0, h, n, freqs, h0r, h0c, h0v,
                                      orow, ocol, oval, oterm, gdiag,
                                      jst, jrow, jsrc, jamp, jrate)
        else:
            _kernels.master_rk4_chunk_np(rho, t0, h, n, freqs, h0_csr, oterms,
                                         gdiag, jumps)
        done += n
        if done % cfg.hermitize_every == 0 or done == nsteps:
            rho = 0.5 * (rho + rho.conj().T)
        if done % cfg.diag_every == 0 or done == nsteps:
            reason = record(done * h, rho)
            if reason is not None:
                ok = False

    final = DensityMatrix(space, rho, validate=False)
    return EvolutionResult(final_state=final, ok=ok, failure_reason=reason,
                           diagnostics=diags,
                           wall_time_s=time.perf_counter() - t_start,
                           steps=done, step_size=h)


CLOSED_STEP_REFINE = 4


def evolve_schrodinger(psi0: StateVector, ham: TermSum, cfg: IntegratorConfig,
                       use_numba: bool = True) -> EvolutionResult:
    """Closed-system propagation under H(t).

    Constant diagonal Hamiltonians are advanced with exact phase factors;
    everything else goes through the RK4 kernel at four-fold the per-period
    resolution of the master-equation rule (gate-length runs at the coarse
    rule drift to ~1e-7 in norm, past the 1e-8 contract).
    """
    space = ham.space
    if psi0.space.dims != space.dims:
        raise SpaceMismatchError("initial state space does not match the Hamiltonian")
    h, nsteps = cfg.resolve_steps(ham, refine=CLOSED_STEP_REFINE)
    psi = np.array(psi0.amplitudes, dtype=np.complex128)
    diags = []
    t_start = time.perf_counter()
    ok, reason = True, None

    diag = ham.constant_diagonal()
    exact = diag is not None
    if not exact:
        h0r, h0c, h0v, orow, ocol, oval, oterm, freqs = ham.pack()
        if not (use_numba and _kernels.HAVE_NUMBA):
            h0_csr = ham.h0.tocsr()
            oterms = [(term.coeff * term.op.tocsr(), j)
                      for j, term in enumerate(ham.terms)]

    def record(t, psi):
        nerr = abs(np.linalg.norm(psi) - 1.0)
        leak = top_fock_leakage(psi, space)
        diags.append(DiagnosticRecord(t, nerr, 0.0, 0.0, leak))
        if nerr > cfg.norm_tol:
            return f"norm drift {nerr:.3e} exceeds {cfg.norm_tol:.1e}"
        return None

    reason = record(0.0, psi)
    ok = reason is None
    done = 0
    chunk = max(1, cfg.diag_every)
    while ok and done < nsteps:
        n = min(chunk, nsteps - done)
        t0 = done * h
        if exact:
            psi *= np.exp(-1j * diag * (n * h))
        elif use_numba and _kernels.HAVE_NUMBA:
            _kernels.schrodinger_rk4_chunk(psi, t0, h, n, freqs, h0r, h0c, h0v,
                                           orow, ocol, oval, oterm)
        else:
            _kernels.schrodinger_rk4_chunk_np(psi, t0, h, n, freqs, h0_csr, oterms)
        done += n
        if done % cfg.diag_every == 0 or done == nsteps:
            reason = record(done * h, psi)
            if reason is not None:
                ok = False

    final = StateVector(space, psi, normalize=True)
    return EvolutionResult(final_state=final, ok=ok, failure_reason=reason,
                           diagnostics=diags,
                           wall_time_s=time.perf_counter() - t_start,
                           steps=done, step_size=h)


def fidelity(state, psi_id: StateVector) -> float:
    """F = sqrt(<psi_id| rho |psi_id>); for a pure state, |<psi_id|psi>|."""
    target = psi_id.amplitudes
    if isinstance(state, StateVector):
        return float(abs(np.vdot(target, state.amplitudes)))
    if isinstance(state, EvolutionResult):
        return fidelity(state.final_state, psi_id)
    mat = state.rho if isinstance(state, DensityMatrix) else np.asarray(state)
    if mat.ndim == 1:
        return float(abs(np.vdot(target, mat)))
    val = np.real(np.vdot(target, mat @ target))
    return float(math.sqrt(max(val, 0.0)))
