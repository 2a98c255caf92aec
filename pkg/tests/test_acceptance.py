"""Acceptance gate.

Each test implements one acceptance criterion at its stated tolerance and
prints a single pass/fail line (run with ``pytest -s`` to see them inline).
The heavy density-matrix runs are shared through session-scoped fixtures.

Criterion 3 asserts the published-fidelity band exactly as specified. The
measured value of the faithful model sits below that band (the decoherence
rates as printed already cap the fidelity at 0.967 before any coherent
error; see notes in the repository README); the test is intentionally left
honest rather than loosened.
"""

import math
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from hybridccz.config import MHZ_TO_RAD, RunConfig, check_against_table1
from hybridccz.device import DecoherenceRates, required_g2
from hybridccz.encodings import CatSpec, cat_pair, fock_pair
from hybridccz.experiments import (SweepSpec, ghz_input_state, ghz_target_state,
                                   run_ghz, run_sweep, validate_effective)
from hybridccz.gate import (ideal_gate_unitary, schedule_from_model, truth_table)
from hybridccz.hamiltonians import h_gate_phase, h_ideal
from hybridccz.lindblad import (CollapseChannel, IntegratorConfig, LindbladModel,
                                evolve_master, evolve_schrodinger, fidelity)
from hybridccz.operators import annihilation, lift
from hybridccz.spaces import CompositeSpace
from hybridccz.states import StateVector, fock_population
from hybridccz.hamiltonians import TermSum
import scipy.sparse as sp


def report(criterion: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    print(line, file=sys.stderr, flush=True)


@pytest.fixture(scope="session")
def cfg():
    return RunConfig()


@pytest.fixture(scope="session")
def anchor(cfg):
    """Full lossy run at the published anchor point: kappa^-1 = 10 us,
    crosstalk at 0.1 g_max, 6x6x4 space."""
    model = cfg.experiment_model(kappa_inv_us=10.0, g12_ratio=0.1)
    pair = cfg.encoding_pair("cat")
    return run_ghz(model, cfg.space(), pair, engine="lossy",
                   integrator=cfg.integrator_options())


class TestCriterion1ParameterIdentities:
    def test_criterion_1(self, cfg):
        model = cfg.device_model()
        checks = []
        table = check_against_table1(model, rel_tol=0.005)
        checks.append(("table detunings/couplings within 0.5%",
                       all(ok for *_, ok in table)))
        g2 = required_g2(model.det.delta1, model.det.delta2, 5)
        checks.append(("g2 = 85.1 MHz within 0.1%",
                       abs(g2 / MHZ_TO_RAD - 85.1) / 85.1 <= 1e-3))
        d = model.derived
        checks.append(("chi = 1.19 MHz within 1%",
                       abs(d.chi / MHZ_TO_RAD - 1.19) / 1.19 <= 0.01))
        checks.append(("t_gate = 0.42 us within 2%",
                       abs(d.t_gate - 0.42e-6) / 0.42e-6 <= 0.02))
        checks.append(("Q1 = 1.15e6 within 1%", abs(d.q1 - 1.15e6) / 1.15e6 <= 0.01))
        checks.append(("Q2 = 7.03e5 within 1%", abs(d.q2 - 7.03e5) / 7.03e5 <= 0.01))
        ok = all(flag for _, flag in checks)
        report("criterion 1 (parameter identities)", ok,
               "; ".join(f"{name}={'ok' if flag else 'FAIL'}" for name, flag in checks))
        assert ok

class TestCriterion2IdealTruthTable:
    def test_criterion_2(self, cfg):
        model = cfg.device_model()
        space = cfg.space()
        schedule = schedule_from_model(model, "eff6")
        worst_overlap_dev = 0.0
        worst_phase_rad = 0.0
        signature_ok = True
        for pair in (fock_pair(0, 0, 6),
                     cat_pair(CatSpec(0.5, 6, tail_tol=cfg.cat_tail_tol))):
            rep = truth_table("eff6", pair, model, schedule, space,
                              integrator=cfg.integrator_options())
            signature_ok &= rep.signature() == [1, 1, 1, 1, 1, 1, 1, -1]
            for row in rep.rows:
                worst_overlap_dev = max(worst_overlap_dev, abs(row.overlap - 1.0))
                worst_phase_rad = max(worst_phase_rad,
                                      abs(math.radians(row.phase_error_deg)))
        d = model.derived
        u = ideal_gate_unitary(space, d.eta, d.chi, d.t_gate).toarray()
        u_ref = expm(-1j * h_gate_phase(model, space).at(0.0).toarray() * d.t_gate)
        unitary_dev = float(np.abs(u - u_ref).max())
        ok = (signature_ok and worst_overlap_dev <= 1e-9
              and worst_phase_rad <= 1e-9 and unitary_dev <= 1e-10)
        report("criterion 2 (ideal gate truth table)", ok,
               f"signature={'ok' if signature_ok else 'FAIL'}, "
               f"max |overlap-1| = {worst_overlap_dev:.2e} (tol 1e-9), "
               f"max phase = {worst_phase_rad:.2e} rad (tol 1e-9), "
               f"unitary vs expm = {unitary_dev:.2e} (tol 1e-10)")
        assert ok


class TestCriterion3AnchorPoint:
    def test_criterion_3(self, anchor):
        ok_band = 0.971 <= anchor.fidelity <= 0.991
        ok_run = anchor.result.ok
        ok_time = anchor.result.wall_time_s <= 600.0
        report("criterion 3 (anchor-point fidelity)", ok_band and ok_run and ok_time,
               f"F = {anchor.fidelity:.6f} (band [0.971, 0.991]), "
               f"wall = {anchor.result.wall_time_s:.0f} s (budget 600 s), "
               f"diagnostics ok = {ok_run}")
        assert ok_run and ok_time
        assert ok_band, (
            f"measured F = {anchor.fidelity:.6f} lies outside [0.971, 0.991]. "
            "The faithful model cannot reach the published value: with the "
            "decoherence rates exactly as printed, a *perfect* coherent gate "
            "already caps F at 0.967 at this point, and the exact "
            "interaction-picture dynamics add a coherent deficit (dispersive "
            "corrections of fourth order in g/delta at g1/delta1 = 0.137). "
            "See the repository notes for the full analysis.")


@pytest.fixture(scope="session")
def sweep_rows(cfg):
    spec = SweepSpec(kappa_inv_us=(5.0, 10.0, 20.0, 50.0),
                     g12_ratios=(0.0, 0.01, 0.1), out_csv="unused.csv")
    model = cfg.experiment_model()
    pair = cfg.encoding_pair("cat")
    return run_sweep(model, cfg.space(), pair, spec, engine="lossy",
                     integrator=cfg.integrator_options(), workers=2)


class TestCriterion4SweepShape:
    def test_criterion_4(self, sweep_rows):
        rows = sweep_rows
        assert all(r.status == "ok" for r in rows)
        by_ratio = {}
        for r in rows:
            by_ratio.setdefault(r.g12_over_gmax, []).append((r.kappa_inv_us, r.fidelity))
        monotone = True
        for ratio, pts in by_ratio.items():
            pts.sort()
            fids = [f for _, f in pts]
            monotone &= all(a <= b + 1e-12 for a, b in zip(fids, fids[1:]))
        ordered = True
        kappas = sorted({r.kappa_inv_us for r in rows})
        for kappa in kappas:
            f = {r.g12_over_gmax: r.fidelity for r in rows if r.kappa_inv_us == kappa}
            ordered &= f[0.0] >= f[0.01] - 0.002 and f[0.01] >= f[0.1] - 0.002
        detail = "; ".join(
            f"ratio {ratio:g}: " + ", ".join(f"F({int(k)})={f:.4f}" for k, f in pts)
            for ratio, pts in sorted(by_ratio.items()))
        ok = monotone and ordered
        report("criterion 4 (sweep shape)", ok,
               f"monotone in lifetime = {monotone}, "
               f"curve order within 0.002 = {ordered}; {detail}")
        assert ok


class TestCriterion5EffectiveValidity:
    def test_criterion_5(self, cfg):
        model = cfg.experiment_model(kappa_inv_us=math.inf)
        model = model.replace_rates(DecoherenceRates())
        pair = cfg.encoding_pair("cat")
        rows = validate_effective(model, cfg.space(), pair,
                                  scales=(1.0, 0.5, 0.25),
                                  integrator=cfg.integrator_options())
        ghz = {r.scale: r.infidelity for r in rows if r.state_label == "ghz_cat_input"}
        decreasing = ghz[1.0] > ghz[0.5] > ghz[0.25]
        small = ghz[0.25] <= 1e-3
        ok = decreasing and small
        report("criterion 5 (effective-Hamiltonian validity trend)", ok,
               f"infidelity: {ghz[1.0]:.3e} -> {ghz[0.5]:.3e} -> {ghz[0.25]:.3e} "
               f"(strictly decreasing = {decreasing}, <= 1e-3 at 0.25 = {small})")
        assert ok


class TestCriterion6NumericalHealth:
    def test_criterion_6a_diagnostics(self, anchor):
        res = anchor.result
        trace_ok = res.max_trace_error < 1e-6
        herm_ok = max(d.herm_error for d in res.diagnostics) < 1e-8
        eig_ok = res.min_eigenvalue >= -1e-6
        ok = trace_ok and herm_ok and eig_ok
        report("criterion 6a (run diagnostics)", ok,
               f"trace drift = {res.max_trace_error:.2e} (< 1e-6), "
               f"herm drift = {max(d.herm_error for d in res.diagnostics):.2e} (< 1e-8), "
               f"min eig = {res.min_eigenvalue:.2e} (>= -1e-6)")
        assert ok

    def test_criterion_6b_step_halving(self, cfg, anchor):
        model = cfg.experiment_model(kappa_inv_us=10.0, g12_ratio=0.1)
        pair = cfg.encoding_pair("cat")
        opts = cfg.integrator_options()
        opts["steps_per_period"] = 2 * cfg.steps_per_period
        fine = run_ghz(model, cfg.space(), pair, engine="lossy", integrator=opts)
        delta = abs(fine.fidelity - anchor.fidelity)
        ok = fine.result.ok and delta < 1e-5
        report("criterion 6b (step-halving convergence)", ok,
               f"|F(h/2) - F(h)| = {delta:.2e} (tol 1e-5)")
        assert ok

    def test_criterion_6c_truncation(self, cfg, anchor):
        big = RunConfig()
        big.n_trunc_1 = cfg.n_trunc_1 + 2
        big.n_trunc_2 = cfg.n_trunc_2 + 2
        model = big.experiment_model(kappa_inv_us=10.0, g12_ratio=0.1)
        pair = big.encoding_pair("cat")
        run = run_ghz(model, big.space(), pair, engine="lossy",
                      integrator=big.integrator_options())
        delta = abs(run.fidelity - anchor.fidelity)
        ok = run.result.ok and delta < 1e-4
        report("criterion 6c (truncation convergence)", ok,
               f"|F(N+2) - F(N)| = {delta:.2e} (tol 1e-4)")
        assert ok

    def test_criterion_6d_closed_engines(self, cfg):
        model = cfg.experiment_model(kappa_inv_us=math.inf, g12_ratio=0.0)
        model = model.replace_rates(DecoherenceRates())
        space = cfg.space()
        pair = cfg.encoding_pair("cat")
        psi0 = ghz_input_state(space, pair)
        target = ghz_target_state(space, pair)
        ham = h_ideal(model, space)
        cfg_i = IntegratorConfig(t_final=model.derived.t_gate,
                                 **cfg.integrator_options())
        r_s = evolve_schrodinger(psi0, ham, cfg_i)
        r_m = evolve_master(psi0.to_density_matrix(), LindbladModel(ham, ()), cfg_i)
        f_s = fidelity(r_s.final_state, target)
        f_m = fidelity(r_m.final_state, target)
        delta = abs(f_s - f_m)
        ok = r_s.ok and r_m.ok and delta < 1e-6
        report("criterion 6d (closed-system engine agreement)", ok,
               f"|F_master - F_schrodinger| = {delta:.2e} (tol 1e-6)")
        assert ok


class TestCriterion7DecayOracle:
    @pytest.mark.parametrize("kappa,t_final", [(1e5, 1e-5), (2e5, 5e-6), (5e4, 3e-5)])
    def test_criterion_7(self, kappa, t_final):
        space = CompositeSpace(3, 2)
        ham = TermSum(space, sp.csr_matrix((space.dim, space.dim), dtype=complex), ())
        chan = (CollapseChannel(lift(annihilation(3), "cavity1", space), kappa),)
        model = LindbladModel(ham, chan)
        rho0 = StateVector.basis(space, 1, 0, "g").to_density_matrix()
        res = evolve_master(rho0, model, IntegratorConfig(t_final=t_final,
                                                          h=t_final / 4000))
        p1 = fock_population(res.final_state, space, "cavity1", 1)
        err = abs(p1 - math.exp(-kappa * t_final))
        ok = res.ok and err < 1e-6
        report("criterion 7 (exponential-decay oracle)", ok,
               f"kappa={kappa:g}/s, T={t_final:g}s: |p1 - exp(-kT)| = {err:.2e} "
               "(tol 1e-6)")
        assert ok
