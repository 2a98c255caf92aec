"""Interaction-picture Hamiltonian builders.

Every Hamiltonian here has the form

    H(t) = H0 + sum_j  c_j e^{-i w_j t} T_j  +  h.c.,

with H0 a constant Hermitian (in practice diagonal) part and each T_j a
sparse transition operator. Builders return a ``TermSum`` that can be
evaluated at any time, packed into flat arrays for the integrator kernels,
or reduced to its constant diagonal when it has one.

Free-evolution terms are never constructed: the simulation frame is the
interaction picture, so only detuning phases appear.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .device import DeviceModel, TWO_PI
from .operators import (Operator, annihilation, identity, level_projector,
                        level_transition, lift, number)
from .spaces import CompositeSpace


@dataclass(frozen=True)
class OscillatingTerm:
    coeff: float          # real coupling amplitude (rad/s); sign allowed
    freq: float           # phase factor e^{-i freq t}; rad/s
    op: object            # scipy CSR matrix, the non-Hermitian representative T_j
    label: str = ""


@dataclass(frozen=True)
class TermSum:
    """H(t) = h0 + sum_j coeff_j e^{-i freq_j t} T_j + h.c."""

    space: CompositeSpace
    h0: object                       # scipy CSR, Hermitian constant part
    terms: tuple = ()

    def at(self, t: float) -> Operator:
        h = self.h0.astype(np.complex128, copy=True)
        for term in self.terms:
            z = term.coeff * np.exp(-1j * term.freq * t)
            h = h + z * term.op + np.conj(z) * term.op.conjugate().transpose()
        return Operator(self.space.dims, h, self.space)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def constant_diagonal(self):
        """Diagonal entries if H is constant and diagonal, else None."""
        if self.terms:
            return None
        off = self.h0 - sp.diags(self.h0.diagonal())
        if off.nnz and abs(off).max() > 0:
            return None
        return np.real(self.h0.diagonal().copy())

    def frequency_scale_hz(self) -> float:
        """Largest oscillation frequency in the model (Hz).

        The step-size rule resolves the fastest phase; for constant models
        the energy spread of h0 plays that role.
        """
        f = 0.0
        for term in self.terms:
            f = max(f, abs(term.freq) / TWO_PI)
        diag = self.h0.diagonal()
        if diag.size:
            f = max(f, float(np.abs(diag).max()) / TWO_PI)
        if self.h0.nnz:
            f = max(f, float(abs(self.h0).max()) / TWO_PI)
        return f

    def pack(self):
        """Flatten to arrays for the integrator kernels.

        Returns (h0_rows, h0_cols, h0_vals, rows, cols, vals, term_of, freqs)
        where the oscillating entries carry their coupling folded into vals.
        """
        h0 = self.h0.tocoo()
        freqs = np.array([term.freq for term in self.terms], dtype=np.float64)
        rows, cols, vals, term_of = [], [], [], []
        for j, term in enumerate(self.terms):
            coo = term.op.tocoo()
            rows.append(coo.row.astype(np.int64))
            cols.append(coo.col.astype(np.int64))
            vals.append(term.coeff * coo.data.astype(np.complex128))
            term_of.append(np.full(coo.nnz, j, dtype=np.int64))
        cat = lambda parts, dt: (np.concatenate(parts) if parts else np.zeros(0, dt))
        return (h0.row.astype(np.int64), h0.col.astype(np.int64),
                h0.data.astype(np.complex128),
                cat(rows, np.int64), cat(cols, np.int64),
                cat(vals, np.complex128), cat(term_of, np.int64), freqs)


# ---------------------------------------------------------------------------
# shared lifted operators


def _lifted(space: CompositeSpace):
    a1 = lift(annihilation(space.cavity1_dim), "cavity1", space)
    a2 = lift(annihilation(space.cavity2_dim), "cavity2", space)
    return a1, a2


def _sigma(space: CompositeSpace, hi: str, lo: str):
    """Lifted lowering operator |lo><hi|."""
    return lift(level_transition(hi, lo), "atom", space)


def _num(space: CompositeSpace, which: str):
    d = space.subsystem_dim(which)
    return lift(number(d), which, space)


def _proj(space: CompositeSpace, level: str):
    return lift(level_projector(level), "atom", space)


# ---------------------------------------------------------------------------
# builders


def h_ideal(model: DeviceModel, space: CompositeSpace) -> TermSum:
    """Wanted couplings only: cavity 1 on |g><->|f>, cavity 2 on |e><->|f>."""
    a1, a2 = _lifted(space)
    c = model.couplings
    det = model.det
    zero = sp.csr_matrix((space.dim, space.dim), dtype=np.complex128)
    terms = []
    if c.g1 > 0:
        t1 = a1.dagger().multiply(_sigma(space, "f", "g")).matrix
        terms.append(OscillatingTerm(c.g1, det.delta1, t1, "g1 a1+ s-_fg"))
    if c.g2 > 0:
        t2 = a2.dagger().multiply(_sigma(space, "f", "e")).matrix
        terms.append(OscillatingTerm(c.g2, det.delta2, t2, "g2 a2+ s-_fe"))
    return TermSum(space, zero, tuple(terms))


def h_full(model: DeviceModel, space: CompositeSpace) -> TermSum:
    """All nine couplings: wanted, unwanted cavity-atom, and inter-cavity
    crosstalk (the crosstalk phase rotates as e^{+i Delta12 t})."""
    a1, a2 = _lifted(space)
    c = model.couplings
    det = model.det
    a1d, a2d = a1.dagger(), a2.dagger()
    spec = [
        (c.g1, det.delta1, a1d.multiply(_sigma(space, "f", "g")), "g1 a1+ s-_fg"),
        (c.g2, det.delta2, a2d.multiply(_sigma(space, "f", "e")), "g2 a2+ s-_fe"),
        (c.g1_prime, det.delta1_prime, a1d.multiply(_sigma(space, "f", "e")), "g1' a1+ s-_fe"),
        (c.g1_dprime, det.delta1_dprime, a1d.multiply(_sigma(space, "e", "g")), "g1'' a1+ s-_eg"),
        (c.g1_tprime, det.delta1_tprime, a1d.multiply(_sigma(space, "e", "g_prime")), "g1''' a1+ s-_eg'"),
        (c.g2_prime, det.delta2_prime, a2d.multiply(_sigma(space, "f", "g")), "g2' a2+ s-_fg"),
        (c.g2_dprime, det.delta2_dprime, a2d.multiply(_sigma(space, "e", "g")), "g2'' a2+ s-_eg"),
        (c.g2_tprime, det.delta2_tprime, a2d.multiply(_sigma(space, "e", "g_prime")), "g2''' a2+ s-_eg'"),
        (c.g12, -det.delta12, a1d.multiply(a2), "g12 a1+ a2"),
    ]
    zero = sp.csr_matrix((space.dim, space.dim), dtype=np.complex128)
    terms = tuple(OscillatingTerm(g, f, op.matrix, lbl)
                  for g, f, op, lbl in spec if g > 0)
    return TermSum(space, zero, terms)


def _stark_diagonal(model: DeviceModel, space: CompositeSpace):
    """The four photon-number Stark terms shared by the dispersive forms."""
    d = model.derived
    n1, n2 = _num(space, "cavity1"), _num(space, "cavity2")
    one = identity(space.dims, space)
    pg, pe, pf = _proj(space, "g"), _proj(space, "e"), _proj(space, "f")
    return (
        (-d.lambda1) * n1.multiply(pg)
        + d.lambda1 * (one + n1).multiply(pf)
        + (-d.lambda2) * n2.multiply(pe)
        + d.lambda2 * (one + n2).multiply(pf)
    )


def h_dispersive_exchange(model: DeviceModel, space: CompositeSpace) -> TermSum:
    """Second-order form: Stark shifts plus the Delta-detuned two-cavity
    exchange through the |g><->|e> coherence."""
    a1, a2 = _lifted(space)
    d = model.derived
    exchange = a1.dagger().multiply(a2).multiply(_sigma(space, "e", "g")).matrix
    term = OscillatingTerm(-d.lam, -model.det.big_delta, exchange, "-lam a1+ a2 s-_eg")
    return TermSum(space, _stark_diagonal(model, space).matrix, (term,))


def h_dispersive_diagonal(model: DeviceModel, space: CompositeSpace) -> TermSum:
    """Fully diagonal form: Stark shifts plus the cross-Kerr terms."""
    d = model.derived
    n1, n2 = _num(space, "cavity1"), _num(space, "cavity2")
    one = identity(space.dims, space)
    pg, pe = _proj(space, "g"), _proj(space, "e")
    h = (_stark_diagonal(model, space)
         + d.chi * n1.multiply(one + n2).multiply(pg)
         + (-d.chi) * (one + n1).multiply(n2).multiply(pe))
    return TermSum(space, h.matrix, ())


def h_gate_phase(model: DeviceModel, space: CompositeSpace) -> TermSum:
    """Gate-phase generator on the |g> sector only:
    eta n1 |g><g| + chi n1 n2 |g><g|."""
    d = model.derived
    n1, n2 = _num(space, "cavity1"), _num(space, "cavity2")
    pg = _proj(space, "g")
    h = d.eta * n1.multiply(pg) + d.chi * n1.multiply(n2).multiply(pg)
    return TermSum(space, h.matrix, ())
