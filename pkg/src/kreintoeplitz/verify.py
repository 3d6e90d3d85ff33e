"""Self-check suite: closed-form oracles, bound audits, golden values and determinism.

``verify_suite("quick")`` runs every check at the stated sizes; ``"full"``
adds wider sweeps.  Each check writes a CSV under the output directory.  The
whole set is produced twice (one worker, then several) and the CSV bytes are
compared; computed headline numbers are compared with a golden JSON file.
"""

from __future__ import annotations

import filecmp
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import bounds, io
from .catalog import s1, s3, s4, s5
from .experiment import ordered_map
from .functions import AnalyticFunction, Contour
from .linalg import determinant, schatten_norm, toeplitz_section, truncated_hankel_product
from .symbols import FourierSymbol, KreinIndex
from .szego import E_of, G_of, bo_verify
from .trace_formula import DEFAULT_NS, Ef, Gf, error_sequence, rate_fit, trace_f_Tn
from .wiener_hopf import canonical_factorization, matrix_canonical, scalar_canonical

GOLDEN_RTOL = 1e-9


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    values: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _s1_closed(n, r=0.5, s=0.5):
    rs = r * s
    return (1 - rs ** (n + 2)) / (1 - rs), 1 - rs ** (n + 2)


def check_bo_exactness(out: Path, jobs: int, level: str) -> CheckResult:
    a = s1()
    fact = canonical_factorization(a)
    G, E = G_of(a), E_of(a, fact)
    reps = ordered_map(lambda n: bo_verify(a, n, fact, G=G, E=E), range(65), jobs)
    rows, ok = [], abs(G - 1) < 1e-12 and abs(E - 4 / 3) < 1e-10
    for r in reps:
        det_cf, corr_cf = _s1_closed(r.n)
        ok &= r.relError < 1e-8 and abs(r.detTn - det_cf) <= 1e-10 * det_cf and abs(r.detCorrection - corr_cf) < 1e-12
        rows.append([r.n, r.detTn.real, det_cf, r.detCorrection.real, corr_cf, r.relError])
    io.write_csv(out / "check_01_bo.csv", ["n", "detTn", "detTn_closed", "detCorrection", "closed", "relError"], rows)
    worst = max(r.relError for r in reps)
    return CheckResult(1, "Borodin-Okounkov identity, S1, n=0..64", bool(ok),
                       f"max relError {worst:.2e}, E={E.real:.15g}", {"S1.E": E.real, "S1.G": G.real})


def check_closed_form_det(out: Path, jobs: int, level: str) -> CheckResult:
    a = s1()
    dets = ordered_map(lambda n: determinant(toeplitz_section(a, n)).real, range(65), jobs)
    rows, worst = [], 0.0
    for n, d in enumerate(dets):
        cf = _s1_closed(n)[0]
        worst = max(worst, abs(d - cf) / cf)
        rows.append([n, d, cf])
    io.write_csv(out / "check_02_det.csv", ["n", "det", "closed"], rows)
    return CheckResult(2, "closed-form det T_n(S1), n<=64", worst < 1e-10, f"max rel deviation {worst:.2e}",
                       {"S1.det64": dets[64]})


def check_trace_exact(out: Path, jobs: int, level: str) -> CheckResult:
    a, f = s3(), AnalyticFunction.monomial(2)
    g = Gf(a, f)
    e = Ef(a, f, Contour.circle(3, 2.5, 256))
    traces = ordered_map(lambda n: trace_f_Tn(a, f, n), range(1, 65), jobs)
    rows, worst = [], 0.0
    for n, tr in zip(range(1, 65), traces):
        worst = max(worst, abs(tr - (11 * (n + 1) - 2)))
        rows.append([n, tr.real, 11 * (n + 1) - 2])
    io.write_csv(out / "check_03_trace.csv", ["n", "trace", "closed"], rows)
    ok = worst <= 1e-10 and abs(g - 11) <= 1e-10 and abs(e + 2) <= 1e-6
    return CheckResult(3, "trace T_n(S3)^2 exact regime", bool(ok),
                       f"max |eps| {worst:.1e}, G_f={g.real:.12g}, E_f={e.real:.12g}",
                       {"S3.Gf": g.real, "S3.Ef": e.real})


def s4_Ef_oracle(a) -> float:
    K = a.band
    m = np.arange(1, K + 1)
    p = a.take(m)[:, 0, 0] * a.take(-m)[:, 0, 0]
    return float(-2 * np.sum((m * p).real[::-1]))


def check_rate(out: Path, jobs: int, level: str) -> CheckResult:
    a, f, idx = s4(1.3, 1.3, 4096), AnalyticFunction.monomial(2), KreinIndex(0.75, 0.75)
    from .trace_formula import auto_contour
    e = Ef(a, f, auto_contour(a))
    rows = error_sequence(a, f, None, DEFAULT_NS, Ef_value=e)
    fit = rate_fit(DEFAULT_NS, [r.eps for r in rows], idx)
    io.write_csv(out / "check_04_rate.csv", ["n", "trace", "eps", "abs_eps"],
                 [[r.n, r.trace.real, r.eps.real, abs(r.eps)] for r in rows])
    oracle = s4_Ef_oracle(a)
    ok = fit.passed and abs(e.real - oracle) < 1e-8
    return CheckResult(4, "trace-formula rate, S4(1.3,1.3,4096), alpha=beta=0.75", bool(ok),
                       f"slope {fit.slope:.4f} (threshold {fit.target + 0.15:.2f}), E_f={e.real:.12g} vs {oracle:.12g}",
                       {"S4.Ef": e.real, "S4.slope": fit.slope})


def _write_checks(path, checks):
    io.write_csv(path, ["check", "lhs", "rhs", "slack", "pass"], [[c.name, c.lhs, c.rhs, c.slack, c.passed] for c in checks])


def check_logdet(out: Path, jobs: int, level: str) -> CheckResult:
    checks = bounds.random_logdet_audit()
    _write_checks(out / "check_05_logdet.csv", checks)
    worst = min(c.slack for c in checks)
    return CheckResult(5, "log-det bound, 100 seeded matrices", all(c.passed for c in checks), f"min slack {worst:.4f}")


def check_holder(out: Path, jobs: int, level: str) -> CheckResult:
    checks = bounds.random_holder_audit()
    _write_checks(out / "check_06_holder.csv", checks)
    worst = min(c.slack for c in checks)
    return CheckResult(6, "Hölder inequality, 100 seeded pairs", worst >= -1e-10, f"min slack {worst:.4f}")


def check_hs(out: Path, jobs: int, level: str) -> CheckResult:
    checks = [bounds.hs_bound_check(FourierSymbol.from_dict({-5: 1.0}), 1, 0.75, 0.0),
              bounds.hs_bound_check_plus(FourierSymbol.from_dict({5: 1.0}), 1, 0.75, 0.0)]
    a = s4(1.3, 1.3, 4096)
    for n in (8, 16, 32):
        checks += [bounds.hs_bound_check(a, n, 0.75, 0.0), bounds.hs_bound_check_plus(a, n, 0.75, 0.0)]
    checks += [bounds.partial_sum_check(g) for g in (-0.4, -0.2, 0.0, 0.2, 0.4)]
    _write_checks(out / "check_07_hs.csv", checks)
    ok = all(c.passed for c in checks) and abs(checks[0].lhs - math.sqrt(3)) < 1e-12
    return CheckResult(7, "weighted Hilbert-Schmidt bounds", bool(ok),
                       f"single coefficient {checks[0].lhs:.6f} <= {checks[0].rhs:.6f}",
                       {"hs.single.rhs": checks[0].rhs})


def check_trace_norm(out: Path, jobs: int, level: str) -> CheckResult:
    r = s = 0.5
    f1 = canonical_factorization(s1(r, s))
    rows, worst = [], 0.0
    for n in range(17):
        tn = schatten_norm(truncated_hankel_product(f1.b, f1.c, n)).trace_norm
        cf = (1 - r * s) * (r * s) ** (n + 2) / math.sqrt((1 - r * r) * (1 - s * s))
        worst = max(worst, abs(tn - cf) / cf)
        rows.append([n, tn, cf])
    f4 = canonical_factorization(s4(1.3, 1.3, 256))
    fit = bounds.tc_bound_fit(f4.b, f4.c, (16, 32, 64), 0.75, 0.75)
    rows += [[f"S4:{c.context['n']}", c.lhs, c.context["ratio"]] for c in fit.per_n]
    io.write_csv(out / "check_08_trace_norm.csv", ["n", "trace_norm", "closed_or_ratio"], rows)
    ok = worst < 1e-9 and fit.stable and math.isfinite(fit.empirical_L)
    return CheckResult(8, "trace-norm truncation", bool(ok),
                       f"S1 max rel deviation {worst:.1e}; S4 empirical L {fit.empirical_L:.4f}, stable={fit.stable}",
                       {"S4.L": fit.empirical_L})


def check_factorization(out: Path, jobs: int, level: str) -> CheckResult:
    r = s = 0.5
    sc = scalar_canonical(s1(r, s))
    want_minus = FourierSymbol.from_dict({-1: -s, 0: 1.0})
    want_plus = FourierSymbol.from_dict({0: 1.0, 1: -r})
    K0 = max(sc.u_minus.band, sc.u_plus.band)
    dev = max(float(np.max(np.abs(sc.u_minus.coeffs_padded(K0) - want_minus.coeffs_padded(K0)))),
              float(np.max(np.abs(sc.u_plus.coeffs_padded(K0) - want_plus.coeffs_padded(K0)))))
    m1 = matrix_canonical(s5("diag_s1_1"))
    m2 = matrix_canonical(s5("upper_minus"))
    mm = matrix_canonical(s1(r, s))
    K = 8
    agree = max(float(np.max(np.abs(mm.u_plus.coeffs_padded(K) - sc.u_plus.coeffs_padded(K)))),
                float(np.max(np.abs(mm.u_minus.coeffs_padded(K) - sc.u_minus.coeffs_padded(K)))))
    rows = [["scalar S1 coefficient deviation", dev], ["diag(S1,1) residual", m1.max_residual],
            ["[[1,1/t],[0,1]] residual", m2.max_residual], ["scalar vs matrix route", agree]]
    io.write_csv(out / "check_09_factorization.csv", ["item", "value"], rows)
    ok = dev < 1e-8 and m1.max_residual < 1e-8 and m2.max_residual < 1e-8 and agree < 1e-8
    return CheckResult(9, "Wiener-Hopf factorization residuals", bool(ok),
                       f"S1 deviation {dev:.1e}, residuals {m1.max_residual:.1e}/{m2.max_residual:.1e}, routes {agree:.1e}")


def check_full_sweeps(out: Path, jobs: int, level: str) -> CheckResult:
    """Wider sweeps for the ``full`` level: S1 family E values and BO on every zero-winding catalog symbol."""
    rows, ok = [], True
    for r in (0.3, 0.5, 0.7):
        for s in (0.3, 0.5, 0.7):
            e = E_of(s1(r, s)).real
            ok &= abs(e - 1 / (1 - r * s)) < 1e-8
            rows.append([f"E S1({r},{s})", e, 1 / (1 - r * s)])
    syms = [s1(), s3(), s5("diag_s1_s1"), s5("diag_s1_s3"), s5("triangular_s1"), s5("lower_plus"), s4(1.3, 1.3, 32)]
    for a in syms:
        fact = canonical_factorization(a)
        G, E = G_of(a), E_of(a, fact)
        worst = max(bo_verify(a, n, fact, G=G, E=E).relError for n in (0, 1, 2, 4, 8, 16, 32, 64))
        ok &= worst < 1e-8
        rows.append([f"BO {a.label}", worst, 1e-8])
    f = AnalyticFunction.monomial(2)
    e1 = Ef(s3(), f, Contour.circle(3, 2.5, 256))
    e2 = Ef(s3(), f, Contour.ellipse(3, 2.6, 1.0, 256))
    ok &= abs(e1 - e2) <= 1e-6 * abs(e1)
    rows.append(["E_f circle vs ellipse", abs(e1 - e2), 1e-6])
    io.write_csv(out / "check_11_sweeps.csv", ["item", "value", "reference"], rows)
    return CheckResult(11, "full-level sweeps", bool(ok), f"{len(rows)} items")


QUICK = (check_bo_exactness, check_closed_form_det, check_trace_exact, check_rate, check_logdet, check_holder,
         check_hs, check_trace_norm, check_factorization)
FULL = QUICK + (check_full_sweeps,)


def produce(out: Path, level: str = "quick", jobs: int = 1) -> list[CheckResult]:
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for fn in (FULL if level == "full" else QUICK):
        t0 = time.perf_counter()
        res = fn(out, jobs, level)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def default_golden_path():
    return resources.files("kreintoeplitz") / "data" / "golden.json"


def compare_golden(values: dict, golden_text: str, rtol: float = GOLDEN_RTOL) -> tuple[bool, str]:
    try:
        golden = json.loads(golden_text)
        if not isinstance(golden, dict) or not golden:
            raise ValueError("golden file must hold a non-empty JSON object")
        bad = []
        for key, ref in golden.items():
            if key not in values:
                bad.append(f"{key}: not computed")
            elif not abs(values[key] - float(ref)) <= rtol * max(abs(float(ref)), 1e-300):
                bad.append(f"{key}: {values[key]!r} vs golden {ref!r}")
    except (ValueError, TypeError) as exc:
        return False, f"unreadable golden file: {exc}"
    return (not bad), ("all golden values match" if not bad else "; ".join(bad))


def _same_tree(a: Path, b: Path) -> tuple[bool, list]:
    names = sorted(p.name for p in a.glob("*.csv"))
    diff = [n for n in names if not (b / n).exists() or not filecmp.cmp(a / n, b / n, shallow=False)]
    return not diff and names == sorted(p.name for p in b.glob("*.csv")), diff


def verify_suite(level: str = "quick", out=None, golden=None, jobs: int = 2, echo=print) -> int:
    """Run the checks, the golden comparison and the determinism check; return an exit code."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    out = Path(out or io.default_output_dir()) / f"verify-{level}"
    t0 = time.perf_counter()
    results = produce(out / "run1", level, 1)
    produce(out / "run2", level, max(2, jobs))
    same, diff = _same_tree(out / "run1", out / "run2")
    results.append(CheckResult(10, "determinism (two runs, 1 vs several workers)", same,
                               "CSV outputs byte-identical" if same else f"differing files: {diff}"))
    values = {k: v for r in results for k, v in r.values.items()}
    gpath = Path(golden) if golden else default_golden_path()
    try:
        text = gpath.read_text()
    except OSError as exc:
        text = ""
        echo(f"cannot read golden file {gpath}: {exc}")
    ok, msg = compare_golden(values, text)
    results.append(CheckResult(12, "golden values", ok, msg))
    for r in results:
        echo(r.line())
    (out / "values.json").write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
    passed = all(r.passed for r in results)
    echo(f"{'PASS' if passed else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} checks "
         f"in {time.perf_counter() - t0:.1f} s")
    return 0 if passed else 1
