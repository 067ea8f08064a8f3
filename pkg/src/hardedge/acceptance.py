"""Acceptance checks, one function per criterion.

Each check returns a :class:`CriterionResult` with the measured quantities,
the thresholds they were compared with and the wall time.  ``run_all``
drives the ``selftest`` CLI subcommand and the acceptance test module.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import asymptotics as asy
from . import fredholm as fr
from . import laxham as lh
from . import painleve as pv
from . import parametrix as px
from . import pathsim as ps


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime: float
    limit: float
    measured: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number}. {self.name} ({self.runtime:.1f}s / {self.limit:.0f}s)"
        if self.failures:
            text += " :: " + "; ".join(self.failures)
        return text


class _Checker:
    def __init__(self):
        self.measured = {}
        self.failures = []

    def upper(self, key, value, bound):
        value = float(value)
        self.measured[key] = value
        if not value <= bound:
            self.failures.append(f"{key}={value:.3g} > {bound:g}")

    def within(self, key, value, lo, hi):
        value = float(value)
        self.measured[key] = value
        if not lo <= value <= hi:
            self.failures.append(f"{key}={value:.3g} not in [{lo:g}, {hi:g}]")

    def true(self, key, cond):
        self.measured[key] = bool(cond)
        if not cond:
            self.failures.append(f"{key} failed")


def _run(number, name, limit, body):
    chk = _Checker()
    t0 = time.perf_counter()
    body(chk)
    runtime = time.perf_counter() - t0
    if runtime > limit:
        chk.failures.append(f"runtime {runtime:.1f}s > {limit:g}s")
    return CriterionResult(number, name, not chk.failures, runtime, limit, chk.measured, chk.failures)


PARAMETRIX_ALPHAS = (-0.4, 0.0, 0.5, 1.0, 2.3)


def check_parametrix_suite():
    def body(chk):
        for a in PARAMETRIX_ALPHAS:
            rep = px.check_parametrix(a, samples=300, seed=0)
            chk.upper(f"det[{a}]", rep["max_det_deviation"], 1e-9)
            chk.upper(f"jump[{a}]", rep["max_jump_residual"], 1e-8)
            if rep["asymptotic_slope"] is None:
                # alpha = 1/2: the expansion terminates, the remainder is roundoff
                chk.upper(f"exact_remainder[{a}]", px.asymptotic_residual(a, 1e4), 1e-12)
            else:
                chk.within(f"slope[{a}]", rep["asymptotic_slope"], -1.15, -0.85)
    return _run(1, "parametrix: det, jumps, large-z order", 30, body)


PAINLEVE_NUS = (0.0, 0.25, 1.0, 3.0)


def _u_prime_residual(sol, xs, h=1e-3):
    worst = 0.0
    for x in xs:
        d1 = (pv.hm_hamiltonian(sol, x + h) - pv.hm_hamiltonian(sol, x - h)) / (2 * h)
        d2 = (pv.hm_hamiltonian(sol, x + h / 2) - pv.hm_hamiltonian(sol, x - h / 2)) / h
        worst = max(worst, abs((4 * d2 - d1) / 3 + sol.q_at(x) ** 2))
    return worst


def check_painleve_suite():
    def body(chk):
        xs = np.random.default_rng(2).uniform(-28, 28, 60)
        for nu in PAINLEVE_NUS:
            sol = pv.solve_hm(nu)
            chk.upper(f"residual[{nu}]", pv.ode_residual(sol), 1e-9)
            chk.upper(f"u_prime[{nu}]", _u_prime_residual(sol, xs), 1e-7)
            shot = pv.shoot_hm(nu)
            chk.upper(f"dual_q0[{nu}]", abs(shot.q_at(0.0) - sol.q_at(0.0)), 1e-8)
        right = pv.solve_hm(0.25, L=120, n_nodes=3201)
        chk.upper("right_asym_rel", abs(right.q_at(100.0) / (0.25 / 100) - 1), 0.05)
        left = pv.solve_hm(0.0, L=120, n_nodes=3201)
        chk.upper("left_asym_rel", abs(left.q_at(-100.0) / math.sqrt(50) - 1), 0.01)
    return _run(2, "Painleve: residual, u', boundary, dual solvers", 60, body)


def check_laxham_suite():
    def body(chk):
        consts = lh.ModelConstants.from_m1(pv.m1_entries(0.25, 0.3, 0.0, pv.solve_hm(0.25)))
        rng = np.random.default_rng(2)
        ham = max(lh.hamilton_residual(lh.random_state(rng, s=rng.uniform(0.5, 5)), consts)
                  for _ in range(20))
        chk.upper("hamilton_rel", ham, 1e-6)
        rng = np.random.default_rng(4)
        worst = dict.fromkeys(("dH", "H1", "A1", "A2", "sum14", "sum512"), 0.0)
        for _ in range(10):
            traj = lh.integrate(lh.random_state(rng, s=1.0), consts, 5.0)
            rep = lh.check_identities(traj, consts)
            for k in worst:
                worst[k] = max(worst[k], rep[k])
        for k in ("dH", "H1", "A1", "A2"):
            chk.upper(f"identity_{k}", worst[k], 1e-6)
        chk.upper("conserved_sum14", worst["sum14"], 1e-10)
        chk.upper("conserved_sum512", worst["sum512"], 1e-10)
    return _run(3, "Lax/Hamiltonian: Hamilton equations, conservation, identities", 60, body)


def check_fredholm_suite():
    def body(chk):
        for alpha in (0.0, 0.5):
            k = fr.bessel_reference_kernel(alpha)
            eig = 0.0
            for s in (0.5, 1.0, 4.0):
                g = fr.make_grid(s, 80)
                for gamma in (0.3, 1.0):
                    eig = max(eig, abs(fr.log_det_on_grid(k, gamma, g) - fr.log_det_eigen(k, gamma, g)))
            chk.upper(f"eigen_oracle[{alpha}]", eig, 1e-12)
            a = fr.log_det(k, 1.0, 1.0, map="gauss_legendre_sqrt", tol=1e-12).value
            b = fr.log_det(k, 1.0, 1.0, map="gauss_legendre_linear", tol=1e-9,
                           ladder=(40, 80, 160, 320, 640, 1280)).value
            chk.upper(f"map_agreement[{alpha}]", abs(a - b), 1e-8)
            r = fr.resolvent_on_grid(k, 0.5, fr.make_grid(1.0, 80))
            d = fr.log_det_derivative_s(k, 0.5, 1.0)
            chk.upper(f"dF_ds_rel[{alpha}]", abs(d + r) / abs(r), 1e-5)
            chk.upper(f"integrated[{alpha}]",
                      abs(fr.integrated_resolvent(k, 0.5, 1.0) - fr.log_det(k, 0.5, 1.0).value), 1e-6)
            g = fr.make_grid(1.0, 80)
            tr = np.trace(fr.kernel_matrix(k, g))
            gammas = np.logspace(-5, -3, 5)
            rem = [abs(fr.log_det_on_grid(k, gm, g) + gm * tr) for gm in gammas]
            slope = np.polyfit(np.log(gammas), np.log(rem), 1)[0]
            chk.within(f"trace_slope[{alpha}]", float(slope), 1.95, 2.05)
        chk.upper("closed_form_alpha0", abs(fr.log_det(fr.bessel_reference_kernel(0.0), 1.0, 1.0).value + 0.25),
                  1e-10)
    return _run(4, "Fredholm: eigen oracle, maps, dF/ds, integral, trace slope", 120, body)


def check_asymptotics_suite():
    def body(chk):
        full = 0.0
        for nu, stl in [(0.0, 0.0), (1.0, -0.7), (2.3, 1.25)]:
            p = asy.AsymptoticParams(nu=nu, gamma=1.0, stilde=stl)
            d = asy.collect_terms(asy.differentiate_terms(asy.f_terms(p)))
            h = asy.collect_terms(asy.h_terms(p))
            chk.true(f"term_match[{nu},{stl}]", d.keys() == h.keys()
                     and all(abs(d[key] - h[key]) <= 1e-15 * max(1, abs(h[key])) for key in d))
            for s in (2.0, 10.0, 300.0):
                hs = 1e-3 * s
                f = [asy.f_asymptotic(s + j * hs, p) for j in (-2, -1, 1, 2)]
                df = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * hs)
                full = max(full, abs(df - asy.h_asymptotic(s, p)) / max(1.0, abs(df)))
        chk.upper("dF_ds_equals_H", full, 1e-10)
        m1 = pv.m1_entries(0.5, 0.0, 0.0, pv.solve_hm(0.5))
        small = asy.AsymptoticParams(nu=0.5, gamma=1e-14, m1=m1, m31=1.0 + 1j)
        chk.upper("gamma_to_zero", max(abs(asy.f_asymptotic(s, small)) for s in (10.0, 1e4)), 1e-10)
        p = asy.AsymptoticParams(nu=0.5, gamma=0.5, m1=m1, m31=0.4j)
        rep = asy.gen_fn_expansion_check(1e6, p)
        chk.upper("gen_fn_mean_rel", rep["linear_rel"], 1e-6)
        chk.upper("gen_fn_var_rel", rep["quadratic_rel"], 1e-6)
        for nu in (0.0, 0.5, 2.0):
            zero = pv.MOneEntries(nu=nu, stilde=0.0, tau=0.0, m13=0j, m14=0j)
            d1, d2 = asy.d_constants(asy.AsymptoticParams(nu=nu, gamma=0.5, m1=zero, m31=0.0))
            chk.upper(f"D_trivial[{nu}]", max(abs(d1 + 20 * nu / 9), abs(d2 - 8 * nu / 9)), 1e-15)
        recon = 0.0
        for stl, m31 in [(0.0, 0.3j), (0.8, 1.0 - 2j)]:
            m = pv.MOneEntries(nu=0.5, stilde=stl, tau=0.0, m13=m1.m13, m14=m1.m14)
            for gamma in (0.1, 0.5, 0.95):
                q = asy.AsymptoticParams(nu=0.5, gamma=gamma, stilde=stl, m1=m, m31=m31)
                d1, d2 = asy.d_constants(q)
                b = q.beta
                recon = max(recon, abs(asy.integrate_c_nu(b, q) - (d1 * b * b + d2 * b ** 4)))
        chk.upper("C_nu_integration", recon, 1e-8)
    return _run(5, "asymptotics: F'=H, gamma->0, generating function, D constants", 10, body)


def _integrate(f):
    return quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def check_pathsim_suite():
    def body(chk):
        norm = 0.0
        for alpha, x, t in [(0.0, 1.0, 0.3), (0.5, 2.0, 1.0), (-0.5, 0.0, 0.3), (2.3, 0.0, 0.7)]:
            norm = max(norm, abs(_integrate(lambda y: ps.sbesq_density(alpha, t, x, y)) - 1))
        chk.upper("normalization", norm, 1e-6)
        ck = 0.0
        for alpha, x, y in [(0.7, 1.3, 0.8), (0.0, 0.0, 2.0), (-0.3, 2.0, 0.1)]:
            lhs = _integrate(lambda z: ps.sbesq_density(alpha, 0.2, x, z) * ps.sbesq_density(alpha, 0.5, z, y))
            rhs = ps.sbesq_density(alpha, 0.7, x, y)
            ck = max(ck, abs(lhs - rhs) / rhs)
        chk.upper("chapman_kolmogorov_rel", ck, 1e-6)
        e1 = ps.sample_nonintersecting(3, 0.0, 2.0, 2.0, seed=7)
        e2 = ps.sample_nonintersecting(3, 0.0, 2.0, 2.0, seed=7)
        chk.true("ensemble_ordered", e1.is_ordered())
        chk.true("ensemble_deterministic", np.array_equal(e1.X, e2.X))
        chk.measured["acceptance_rate_n3"] = e1.acceptance_rate
    return _run(6, "paths: density normalization, Chapman-Kolmogorov, n=3 ensemble", 120, body)


def check_end_to_end():
    def body(chk):
        gammas = (0.25, 0.5, 0.75, 1.0)
        svals = (0.5, 1.0, 2.0, 4.0, 8.0)
        for alpha in (0.0, 0.5):
            k = fr.bessel_reference_kernel(alpha)
            table = np.array([[fr.log_det(k, g, s).value for s in svals] for g in gammas])
            chk.true(f"finite[{alpha}]", np.all(np.isfinite(table)))
            chk.true(f"negative[{alpha}]", np.all(table < 0))
            chk.true(f"decreasing_in_gamma[{alpha}]", np.all(np.diff(table, axis=0) < 0))
            chk.true(f"decreasing_in_s[{alpha}]", np.all(np.diff(table, axis=1) < 0))
    return _run(7, "end-to-end: thinned Bessel log det finite, negative, monotone", 120, body)


CHECKS = (check_parametrix_suite, check_painleve_suite, check_laxham_suite, check_fredholm_suite,
          check_asymptotics_suite, check_pathsim_suite, check_end_to_end)


def run_all(report=None):
    """Run every criterion; ``report`` (e.g. ``print``) receives one line per criterion."""
    results = []
    for check in CHECKS:
        res = check()
        results.append(res)
        if report is not None:
            report(res.line())
    return results
