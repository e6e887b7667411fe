"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s`` (the lines are
also repeated in the terminal summary).
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import case_i_momentum, case_ii_momentum
from srse3.cli import EXIT_OK, EXIT_SINGULAR, EXIT_TOLERANCE, EXIT_UNSUPPORTED, EXIT_USAGE, main
from srse3.controls import Case, InitialMomentum, classify, eval_controls, eval_u3_U, first_integrals, period
from srse3.elliptic import complete_K, incomplete_F, jacobi_sn_cn_dn
from srse3.errors import ChartSingularityError
from srse3.geodesic import check_invariants, integrate_geodesic
from srse3.oracle import DEFAULT_STEPS_PER_UNIT, integrate_vertical, integrate_vertical_batch
from srse3.tables import reemit

pytestmark = pytest.mark.acceptance

T1 = 10.0
SAMPLES = 1001  # 1000 intervals on [0, 10]
N_RANDOM, N_CASE_I, N_CASE_II = 100, 10, 10


@pytest.fixture(scope="module")
def suite():
    rng = np.random.default_rng(20261014)
    out = [InitialMomentum(*rng.uniform(-2, 2, 5)) for _ in range(N_RANDOM)]
    out += [case_i_momentum(rng) for _ in range(N_CASE_I)]
    out += [case_ii_momentum(rng) for _ in range(N_CASE_II)]
    return out


@pytest.fixture(scope="module")
def geodesics(suite):
    """Matrix-backend geodesic for every momentum, plus the angles one where the chart holds."""
    out = []
    for m in suite:
        try:
            ang = integrate_geodesic(m, T1, SAMPLES, "angles")
        except ChartSingularityError:
            ang = None
        out.append((m, ang, integrate_geodesic(m, T1, SAMPLES, "matrix")))
    return out


def test_1_oracle_equivalence(suite, acceptance_log):
    cases = {classify(m).case for m in suite}
    intervals = SAMPLES - 1
    stride = DEFAULT_STEPS_PER_UNIT * int(T1) // intervals
    t, states = integrate_vertical_batch([m.as_array() for m in suite], T1, stride * intervals, stride)
    worst = 0.0
    for j, m in enumerate(suite):
        s = eval_controls(t, classify(m), m)
        worst = max(worst, float(np.max(np.abs(s.momenta().T - states[:, j, :5]))))
    ok = worst < 1e-7 and {Case.I, Case.II, Case.III} <= cases
    assert acceptance_log(
        "1 oracle equivalence",
        ok,
        f"{len(suite)} momenta (cases {sorted(c.value for c in cases)}), max |closed - RK4| = {worst:.2e} < 1e-7",
    )


def test_2_first_integrals(suite, geodesics, acceptance_log):
    t = np.linspace(0, T1, SAMPLES)
    hw = 0.0
    for m in suite:
        H, W = first_integrals(eval_controls(t, classify(m), m))
        hw = max(hw, float(np.max(np.abs(H - H[0]))), float(np.max(np.abs(W - W[0]))))
    rho = 0.0
    for _, ang, mat in geodesics:
        for tr in (ang, mat):
            if tr is not None:
                r = check_invariants(tr)
                rho = max(rho, r.rho1, r.rho2, r.rho3)
    ok = hw < 1e-10 and rho < 1e-7
    assert acceptance_log("2 first integrals", ok, f"H, W drift {hw:.2e} < 1e-10; rho drift {rho:.2e} < 1e-7")


def test_3_product_identity(suite, acceptance_log):
    t = np.linspace(0, T1, SAMPLES)
    extra = [InitialMomentum(0, 0, 0.8, 0, 0), InitialMomentum(0.3, -0.7, 0, 0, 0), InitialMomentum(0, 0, 0, 0, 0)]
    worst = 0.0
    for m in list(suite) + extra:
        cp = classify(m)
        s = eval_controls(t, cp, m)
        lhs = s.u1 * s.u5 - s.u2 * s.u4
        rhs = 0.25 * (cp.A * np.exp(-2 * s.U) - cp.B * np.exp(2 * s.U))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert acceptance_log("3 product identity", worst < 1e-9, f"max residual {worst:.2e} < 1e-9")


def _y0(cp):
    _, cn0, dn0 = jacobi_sn_cn_dn(cp.psi0, cp.k, cp.kc)
    ac = abs(cn0)
    # log(1 + X) with X = P cn (P cn + Q dn) / (2 sqrt(AB)); for cn < 0 the
    # reciprocal factor 1 / (1 + X) is evaluated, which has no cancellation
    x = cp.P * ac * (cp.P * ac + cp.Q * dn0) / (2 * math.sqrt(cp.A) * math.sqrt(cp.B))
    return math.copysign(math.log1p(x), cn0)


def test_4_case_III_structure(suite, acceptance_log):
    worst_k, e_u3, e_y0, e_per, n = 0.0, 0.0, 0.0, 0.0, 0
    for m in suite:
        cp = classify(m)
        if cp.case is not Case.III or cp.P == 0.0:
            continue
        n += 1
        worst_k = max(worst_k, cp.k)
        sn0 = jacobi_sn_cn_dn(incomplete_F(cp.p0, cp.k, cp.kc), cp.k, cp.kc).sn
        e_u3 = max(e_u3, abs(-cp.P * sn0 / 2 - m.u3_0))
        e_y0 = max(e_y0, abs(_y0(cp) - 0.5 * math.log(cp.B / cp.A)))
        T = period(cp)
        t = np.linspace(0, 3 * T, 601)
        a, _ = eval_u3_U(t, cp, m)
        b, _ = eval_u3_U(t + T, cp, m)
        e_per = max(e_per, float(np.max(np.abs(a - b))))
    ok = worst_k < 1 and e_u3 < 1e-12 and e_y0 < 1e-10 and e_per < 1e-9
    assert acceptance_log(
        "4 case III structure",
        ok,
        f"{n} momenta: max k {worst_k:.6f} < 1; u3(0) err {e_u3:.1e} < 1e-12; "
        f"y(0) err {e_y0:.1e} < 1e-10; period err {e_per:.1e} < 1e-9",
    )


def test_5_hyperbolic_asymptotes(suite, acceptance_log):
    worst, n, finite = 0.0, 0, True
    for m in suite:
        cp = classify(m)
        if cp.case not in (Case.I, Case.II) or not abs(m.u3_0) < cp.b:
            continue
        n += 1
        target = -cp.b if cp.case is Case.I else cp.b
        u3, _ = eval_u3_U(20 / cp.b, cp, m)
        worst = max(worst, abs(u3 - target))
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            s = eval_controls(np.linspace(0, 1e3 / cp.b, 2001), cp, m)
        finite &= bool(all(np.all(np.isfinite(v)) for v in (*s.momenta(), s.U)))
    ok = n >= 10 and worst < 1e-6 and finite
    assert acceptance_log(
        "5 case I/II asymptotes", ok,
        f"{n} momenta: max |u3(20/b) -+ b| = {worst:.1e} < 1e-6; finite up to b t = 1e3: {finite}",
    )


def _quad_F(phi, k):
    val, _ = quad(lambda p: 1.0 / math.sqrt(1.0 - (k * math.sin(p)) ** 2), 0.0, phi,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def test_6_special_functions(acceptance_log):
    rng = np.random.default_rng(6)
    ident = 0.0
    for _ in range(1000):
        u, k = rng.uniform(-60, 60), rng.uniform(0, 0.999)
        sn, cn, dn = jacobi_sn_cn_dn(u, k)
        ident = max(ident, abs(sn * sn + cn * cn - 1), abs(dn * dn + k * k * sn * sn - 1))
    fk = 0.0
    for k in (0.0, 0.1, 0.5, 0.8, 0.95, 0.99):
        fk = max(fk, abs(complete_K(k) - _quad_F(math.pi / 2, k)))
        for phi in (-2.7, -0.4, 0.3, 1.1, 1.5, 2.9, 4.4):
            fk = max(fk, abs(incomplete_F(phi, k) - _quad_F(phi, k)))
    inv = 0.0
    for _ in range(200):
        phi, k = rng.uniform(-1.5, 1.5), rng.uniform(0, 0.99)
        inv = max(inv, abs(jacobi_sn_cn_dn(incomplete_F(phi, k), k).sn - math.sin(phi)))
    ok = ident < 1e-12 and fk < 1e-11 and inv < 1e-11
    assert acceptance_log(
        "6 special functions", ok,
        f"identities {ident:.1e} < 1e-12; F, K vs quadrature {fk:.1e} < 1e-11; sn(F) - sin {inv:.1e} < 1e-11",
    )


def test_7_geodesic_backends(geodesics, acceptance_log):
    agree, ortho, speed, n = 0.0, 0.0, 0.0, 0
    for m, ang, mat in geodesics:
        R = mat.matrices[:, :3, :3]
        ortho = max(ortho, float(np.max(np.abs(np.einsum("nji,njk->nik", R, R) - np.eye(3)))))
        H0, _ = first_integrals(eval_controls(0.0, mat.params, m))
        c = mat.controls
        speed = max(speed, float(np.max(np.abs(np.sqrt(c.u3 ** 2 + c.u4 ** 2 + c.u5 ** 2) - math.sqrt(2 * H0)))))
        if ang is not None:
            n += 1
            agree = max(agree, float(np.max(np.abs(ang.matrices - mat.matrices))))
    ok = n >= 10 and agree < 1e-7 and ortho < 1e-9 and speed < 1e-10
    assert acceptance_log(
        "7 geodesic backends", ok,
        f"{n} chart-regular trajectories agree to {agree:.1e} < 1e-7; "
        f"orthogonality {ortho:.1e} < 1e-9; speed {speed:.1e} < 1e-10",
    )


def test_8_rk4_order(acceptance_log):
    ratios = []
    for u in [(1, 1, 1, 1, 1), (0.4, -1.3, 0.7, 0.9, -0.2), (-1, 2, 0.5, 2, 1)]:
        m = InitialMomentum(*u)
        exact = eval_controls(1.0, classify(m), m).momenta()
        errs = [np.max(np.abs(integrate_vertical(m, 1.0, n).u[-1, :5] - exact)) for n in (10, 20, 40)]
        ratios += [a / b for a, b in zip(errs, errs[1:])]
    ok = all(12 <= r <= 20 for r in ratios)
    assert acceptance_log("8 RK4 order", ok, "error ratios " + ", ".join(f"{r:.2f}" for r in ratios) + " in [12, 20]")


def test_9_cli_contract(suite, capsys, acceptance_log):
    def run(*argv):
        code = main(list(argv))
        out, _ = capsys.readouterr()
        return code, out

    codes = {
        "ok": run("case-info", "--u0", "1,1,1,1,1")[0] == EXIT_OK,
        "usage": run("controls", "--u0", "1,2,3")[0] == EXIT_USAGE,
        "unsupported": run("controls", "--u0", "1,1,1,1,1,0.5")[0] == EXIT_UNSUPPORTED,
        "singular": run("geodesic", "--u0", "0,0,0,0,1", "--t1", "3")[0] == EXIT_SINGULAR,
        "tolerance": run("check", "--u0", "1,1,1,1,1", "--t1", "1", "--tol", "1e-18")[0] == EXIT_TOLERANCE,
    }
    trips = []
    for cmd in ("controls", "geodesic"):
        for fmt in ("csv", "json"):
            _, out = run(cmd, "--u0", "0.4,-1.3,0.7,0.9,-0.2", "--samples", "101", "--format", fmt)
            trips.append(reemit(out, fmt) == out)
    failed = [m for m in suite if run("check", "--u0", ",".join(repr(float(v)) for v in m.as_array()))[0] != EXIT_OK]
    ok = all(codes.values()) and all(trips) and not failed
    assert acceptance_log(
        "9 CLI contract", ok,
        f"exit codes {'ok' if all(codes.values()) else codes}; round trips {sum(trips)}/{len(trips)} byte-identical; "
        f"check exits 0 on {len(suite) - len(failed)}/{len(suite)} momenta",
    )
