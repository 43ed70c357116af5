"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a single ``CRITERION n ... PASS|FAIL`` line (also listed
in the terminal summary).  The edge blow-up part of criterion 3 cannot be
met by the logarithmic growth term and is kept as a strict xfail.
"""

import time
import warnings

import numpy as np
import pytest

import conftest
from rodnet import checks, cli
from rodnet import energy as en
from rodnet import equilibrium as eq
from rodnet import phase_diagram as pd
from rodnet.config import parse_config

CONST = dict(alpha_mode="constant", alpha_value=-2.0)


class Report:
    def __init__(self, label, spent=0.0):
        self.label = label
        self.t0 = time.perf_counter() - spent
        self.notes = []

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0

    def note(self, text):
        self.notes.append(text)

    def check(self, ok, text):
        self.notes.append(f"{text}: {'ok' if ok else 'FAILED'}")
        return bool(ok)

    def finish(self, ok):
        line = (f"CRITERION {self.label}: {'PASS' if ok else 'FAIL'} "
                f"({self.elapsed:.1f} s) " + "; ".join(self.notes))
        print(line)
        conftest.ACCEPTANCE.append(line)
        assert ok, line


# -- 1 ---------------------------------------------------------------------

def test_criterion_1_matrix_inequalities():
    r = Report("1 matrix inequalities")
    res = checks.matrix_inequality_suites(seed=0, n=10_000)
    ok = True
    for s in res:
        ok &= r.check(s["violations"] == 0 and s["trials"] == 10_000,
                      f"{s['name']} {s['violations']}/{s['trials']}")
    ok &= r.check(r.elapsed < 10, "runtime < 10 s")
    r.finish(ok)


# -- 2 ---------------------------------------------------------------------

def test_criterion_2_constitutive_degeneracy():
    r = Report("2 constitutive degeneracy")
    res = checks.degeneracy_suite(seed=0, n_paths=100)
    ok = r.check(res["passed"], f"{res['trials']} paths, 3 edges")
    for name, info in res["edges"].items():
        r.note(f"{name}: det_q {info['final_det_q']:.1e}, ratio dev {info['ratio_dev']:.1e}")
    ok &= r.check(r.elapsed < 5, "runtime < 5 s")
    r.finish(ok)


# -- 3 ---------------------------------------------------------------------

def test_criterion_3_bulk_axioms():
    r = Report("3 bulk axioms (wells, crossover)")
    w = en.DENSE_WELLS
    prog = checks.well_progression(w, (0.5, 1, 3.5, 10, 80, 1000))
    kinds = [(row["chi"], row["kind"], row["lower"]) for row in prog]
    r.note(" ".join(f"{c:g}:{k}" for c, k, _ in kinds))
    ok = r.check(kinds[0][1] == "double" and kinds[0][2] == "isotropic", "double well, isotropic lower")
    ok &= r.check(kinds[-1][1] == "single-nematic", "single nematic well at large chi")
    first_single = next(i for i, k in enumerate(kinds) if k[1] == "single-nematic")
    ok &= r.check(all(k[1] == "double" for k in kinds[:first_single])
                  and all(k[1] == "single-nematic" for k in kinds[first_single:]),
                  "double -> single without reversal")
    lo = max(c for c, k, low in kinds if k == "double" and low == "isotropic")
    hi = min(c for c, k, low in kinds if k == "double" and low == "nematic")
    chi_l = checks.depth_crossover(w, lo, hi, tol=1e-3)
    ok &= r.check(chi_l is not None, f"chi_l = {chi_l:.4f}")
    iso, nem = checks.split_wells(checks.bulk_minima(chi_l, w), w.split)
    ok &= r.check(abs(iso.f - nem.f) < 0.05, f"depth gap at chi_l {abs(iso.f - nem.f):.1e}")
    growth = {chi: checks.growth_is_monotone(chi, w) for chi in (0.5, 1000)}
    ok &= r.check(all(all(g.values()) for g in growth.values()), "f grows toward every edge")
    ok &= r.check(r.elapsed < 30, "runtime < 30 s")
    r.finish(ok)


@pytest.mark.xfail(strict=True, reason="the log growth term stays near 10 at distance 1e-4")
def test_criterion_3_edge_blowup():
    r = Report("3 bulk axioms (f > 1e3 within 1e-4 of each edge)")
    ok = True
    for chi in (0.5, 1, 3.5, 10, 80, 1000):
        v = checks.boundary_values(chi, en.DENSE_WELLS, distance=1e-4)
        low = {k: round(x, 1) for k, x in v.items() if not x > 1e3}
        ok &= r.check(not low, f"chi {chi:g} below 1e3: {low}" if low else f"chi {chi:g}")
    r.finish(ok)


# -- 4 ---------------------------------------------------------------------

BRUTE = np.linspace(-0.5 + 1e-4, 1.0 - 1e-4, 100_000)


def _refine(f, k):
    if k == 0 or k == len(BRUTE) - 1:
        return BRUTE[k]
    a, b, c = f[k - 1], f[k], f[k + 1]
    den = a - 2 * b + c
    return BRUTE[k] + (0.5 * (a - c) / den if den > 0 else 0.0) * (BRUTE[1] - BRUTE[0])


def test_criterion_4_solver_vs_brute_force():
    r = Report("4 solver vs brute force")
    rng = np.random.default_rng(4)
    worst_e, worst_s, n_arg = -np.inf, 0.0, 0
    ok = True
    for k in range(100):
        chi = float(np.exp(rng.uniform(np.log(0.3), np.log(1000))))
        aa = float(np.exp(rng.uniform(np.log(0.01), np.log(100))))
        rho = float(rng.uniform(0.2, 3.0))
        wells = en.DENSE_WELLS if k % 2 == 0 else en.DILUTE_WELLS
        p = en.MaterialParams(chi=chi, A_a=aa, wells=wells)
        if k % 4 < 2:
            sol = eq.solve_equilibrium_expansion(rho, p)
            profiles = [(0.0, en.total_energy_expansion(BRUTE, rho, p))]
        else:
            lam = np.sqrt(1.0 / rho)
            sol = eq.solve_equilibrium_plane(lam, p)
            profiles = [(0.0, en.total_energy_plane_strain(BRUTE, None, lam, p, cos2=1.0)),
                        (0.5 * np.pi, en.total_energy_plane_strain(BRUTE, None, lam, p, cos2=0.0))]
        best = min(float(np.min(e)) for _, e in profiles)
        worst_e = max(worst_e, sol.energy - best)
        ok &= sol.energy <= best + 1e-8
        # argmin comparison where the grid minimum is interior and unique
        th, e = min(profiles, key=lambda x: float(np.min(x[1])))
        kmin = int(np.argmin(e))
        other = [float(np.min(x[1])) for x in profiles if x[0] != th]
        split = wells.split
        basin = BRUTE < split if BRUTE[kmin] < split else BRUTE >= split
        rival = min([float(np.min(e[~basin]))] + other)
        interior = 0 < kmin < len(BRUTE) - 1
        if interior and rival - best > 1e-6 * (1 + abs(best)):
            n_arg += 1
            gap = abs(sol.s_star - _refine(e, kmin))
            worst_s = max(worst_s, gap)
            ok &= gap <= 1e-4
    r.note(f"max E_solver - E_grid {worst_e:.1e} (<= 1e-8)")
    r.note(f"max argmin gap {worst_s:.1e} over {n_arg} nondegenerate cases (<= 1e-4)")
    ok = r.check(ok, "all 100 solves")
    ok &= r.check(r.elapsed < 60, "runtime < 60 s")
    r.finish(ok)


# -- 5 ---------------------------------------------------------------------

def test_criterion_5_phase_diagrams():
    r = Report("5 phase diagrams")
    diagrams = {}
    for chi in (1.0, 1000.0):
        t = time.perf_counter()
        d = pd.build_phase_diagram(pd.GridSpec(), chi, en.MaterialParams(), protocol="plane",
                                   threads=4)
        diagrams[chi] = (d, time.perf_counter() - t)
    ok = True
    for chi, (d, secs) in diagrams.items():
        c = d.counts()
        r.note(f"chi {chi:g}: {c['nematic']} nematic, {c['isotropic']} isotropic, "
               f"{c['failed']} failed, {secs:.0f} s")
        ok &= r.check(d.labels.shape == (200, 200) and c["failed"] == 0, f"chi {chi:g} 200x200")
        sw = d.switch_counts()
        ok &= r.check(np.all(sw <= 1), f"(a) chi {chi:g} max switches {sw.max()}")
        m = d.nematic_mask()
        up = np.all(m[:, 1:] >= m[:, :-1])
        ok &= r.check(up, f"(a) chi {chi:g} switches are isotropic -> nematic")
        sd = d.switch_density()
        ok &= r.check(np.all(sd[1:] <= sd[:-1]), f"(b) chi {chi:g} rho*(A_a) non-increasing")
        ok &= r.check(c["nematic"] > 0 and c["isotropic"] > 0, f"(d) chi {chi:g} both phases")
        ok &= r.check(secs < 300, f"chi {chi:g} runtime < 5 min")
    m1, m2 = diagrams[1.0][0].nematic_mask(), diagrams[1000.0][0].nematic_mask()
    ok &= r.check(np.all(m2[m1]) and m2.sum() > m1.sum(), "(c) chi 1000 region strictly contains chi 1")
    r.finish(ok)


# -- 6 ---------------------------------------------------------------------

OP_AA = (0.01, 0.1, 0.5, 5.0, 20.0, 80.0)
OP_RHO = np.linspace(3.0, 0.1, 59)
OP_RUNS = {10.0: en.DENSE_WELLS, 3.5: en.DENSE_WELLS, 0.5: en.DILUTE_WELLS, 80.0: en.DILUTE_WELLS}


def _op_family(chi, settings=eq.DEFAULT_SETTINGS):
    return pd.order_parameter_curve(chi, OP_AA, pd.lam_for_densities(OP_RHO),
                                    en.MaterialParams(wells=OP_RUNS[chi]), settings=settings)


@pytest.fixture(scope="module")
def op_curves():
    t = time.perf_counter()
    fam = {chi: _op_family(chi) for chi in OP_RUNS}
    return fam, time.perf_counter() - t


def _reincrease(s):
    """Largest rise of s* above its running minimum as density falls, and where it reaches 0.05."""
    rise = s - np.minimum.accumulate(s)
    hit = np.nonzero(rise >= 0.05)[0]
    return float(rise.max()), (float(OP_RHO[hit[0]]) if hit.size else None)


def test_criterion_6_order_parameter_curves(op_curves):
    op_curves, spent = op_curves
    r = Report("6 order-parameter curves", spent)
    ok = True
    high = OP_RHO >= 2.0
    for a in (0.5, 5.0, 20.0, 80.0):
        s = op_curves[10.0][a].s_star
        plateau = s[high].max()
        drop = plateau - s[~high].min()
        ok &= r.check(plateau >= 0.4 and drop >= 0.2,
                      f"chi 10 A_a {a:g} plateau {plateau:.3f}, drop {drop:.3f}")
    onsets = {}
    for chi in (0.5, 80.0, 3.5):
        found = []
        for a in OP_AA:
            rise, at = _reincrease(op_curves[chi][a].s_star)
            onsets[(chi, a)] = at
            if at is not None:
                found.append(f"{a:g}:{rise:.2f}@{at:.2f}")
        r.note(f"chi {chi:g} re-increase " + (" ".join(found) or "none"))
        if chi != 3.5:
            ok &= r.check(bool(found), f"chi {chi:g} re-increase >= 0.05")
    both = [a for a in OP_AA if onsets[(80.0, a)] is not None and onsets[(3.5, a)] is not None]
    ok &= r.check(bool(both) and all(onsets[(80.0, a)] < onsets[(3.5, a)] for a in both),
                  f"chi 80 re-increase below chi 3.5 for A_a {both}")
    for chi in OP_RUNS:
        smin = op_curves[chi][0.01].s_star.min()
        ok &= r.check(smin < 0, f"chi {chi:g} A_a 0.01 min s* {smin:.3f}")
    r.finish(ok)


# -- 7 ---------------------------------------------------------------------

def test_criterion_7_stress_strain():
    r = Report("7 stress-strain")
    lam = np.linspace(1.0, 2.5, 76)
    p = en.MaterialParams(wells=en.DILUTE_WELLS)
    ok = True
    for a in (0.5, 5.0, 80.0):
        c = pd.stress_curve(0.5, a, lam, p)
        _, _, rel = pd.work_energy_check(c)
        ok &= r.check(rel < 1e-3, f"A_a {a:g} work-energy {rel:.1e}")
        if a < 80:
            ok &= r.check(c.monotone, f"A_a {a:g} monotone")
        else:
            js = int(np.argmax(np.abs(np.diff(c.s_star))))
            near = [k for k in c.sign_changes if abs(k - js) <= 2]
            ok &= r.check(len(c.sign_changes) >= 1, f"A_a 80 sign changes at {list(c.sign_changes)}")
            ok &= r.check(bool(near), f"A_a 80 change within 2 steps of the largest jump (index {js})")
    r.finish(ok)


# -- 8 ---------------------------------------------------------------------

PROP_RHO = np.geomspace(0.2, 3.0, 60)


def test_criterion_8_expansion_thresholds():
    r = Report("8 expansion thresholds (constant alpha)")
    p = en.MaterialParams(**CONST)
    chi_t = checks.single_well_onset(p.wells, 3.5, 10.0)
    r.note(f"chi_t = {chi_t:.3f}")
    ok = r.check(chi_t is not None and 3.5 < chi_t < 10, "chi_t located")
    # single-well side
    above = (10.0, 20.0, 40.0, 80.0, 1000.0)
    s_min, rising = np.inf, True
    for a in (0.5, 5.0, 50.0):
        prev = None
        for chi in above:
            s = eq.sweep(PROP_RHO, p.with_(chi=chi, A_a=a)).s_star
            s_min = min(s_min, float(s.min()))
            if prev is not None:
                rising &= bool(np.all(s > prev))
            prev = s
    ok &= r.check(s_min > 0.02, f"chi 10..1000 min s* {s_min:.3f} > 0.02")
    ok &= r.check(rising, "s* strictly increasing in chi at every rho")
    # double-well side
    below = (0.5, 1.0, 2.0, 3.5)
    aas = (5.0, 10.0, 20.0, 50.0)
    table = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", eq.MultiSwitchWarning)
        for chi in below:
            for a in aas:
                table[chi, a] = eq.threshold_density(a, chi, p, (0.2, 3.0))
        tiny = [eq.threshold_density(a, chi, p, (0.2, 3.0)) for chi in (0.01, 0.1) for a in aas]
    ok &= r.check(all(t.found for t in table.values()), "R exists for chi < chi_t")
    R = {k: t.rho for k, t in table.items()}
    r.note("R: " + " ".join(f"({c:g},{a:g})={R[c, a]:.3f}" for c in below for a in aas))
    ok &= r.check(all(R[c, a1] > R[c, a2] for c in below for a1, a2 in zip(aas, aas[1:])),
                  "R decreasing in A_a")
    ok &= r.check(all(R[c1, a] > R[c2, a] for a in aas for c1, c2 in zip(below, below[1:])),
                  "R increasing as chi decreases")
    ok &= r.check(all(not t.found and t.exhausted == "high" for t in tiny),
                  "R exits the range high for chi <= 0.1")
    ok &= r.check(r.elapsed < 60, "runtime < 60 s")
    r.finish(ok)


# -- 9 ---------------------------------------------------------------------

def test_criterion_9_numerical_hygiene(tmp_path, op_curves):
    op_curves, _ = op_curves
    r = Report("9 numerical hygiene")
    rng = np.random.default_rng(9)
    n = 1000
    s = rng.uniform(-0.45, 0.95, n)
    z = rng.uniform(0.2, 3.0, n)
    lam = rng.uniform(0.6, 2.0, n)
    th = rng.uniform(0, np.pi, n)
    h = 1e-6
    p = en.MaterialParams(chi=3.5, A_a=5.0)

    def close(a, b):
        return np.all(np.abs(a - b) <= 1e-6 * np.maximum(1.0, np.abs(b)))

    fs, fz = en.bulk_f_grad(s, z, 3.5, p.wells)
    ok = r.check(close(fs, (en.bulk_f(s + h, z, 3.5, p.wells) - en.bulk_f(s - h, z, 3.5, p.wells))
                       / (2 * h)) and
                 close(fz, (en.bulk_f(s, z + h, 3.5, p.wells) - en.bulk_f(s, z - h, 3.5, p.wells))
                       / (2 * h)), "bulk gradient vs FD at 1e3 points")
    ok &= r.check(close(en.expansion_energy_ds(s, 1 / z, p),
                        (en.total_energy_expansion(s + h, 1 / z, p)
                         - en.total_energy_expansion(s - h, 1 / z, p)) / (2 * h)),
                  "expansion dE/ds vs FD")
    ok &= r.check(close(en.plane_energy_ds(s, th, lam, p),
                        (en.total_energy_plane_strain(s + h, th, lam, p)
                         - en.total_energy_plane_strain(s - h, th, lam, p)) / (2 * h)),
                  "plane dE/ds vs FD")
    ok &= r.check(close(en.plane_energy_dlam1(s, th, lam, p),
                        (en.total_energy_plane_strain(s, th, lam + h, p, lam2=lam)
                         - en.total_energy_plane_strain(s, th, lam - h, p, lam2=lam)) / (2 * h)),
                  "plane dE/dF_xx vs FD")
    # determinism of the CLI output
    cfg = ("[run]\ncommand = phase-diagram\n[grid]\nrho_min = 0.3\nrho_max = 2.7\n"
           "aa_min = 0.5\naa_max = 60\nn_rho = 6\nn_aa = 4\n")
    path = tmp_path / "det.cfg"
    path.write_text(cfg)
    parse_config(cfg)
    for d in ("a", "b"):
        cli.main(["phase-diagram", "--config", str(path), "--out", str(tmp_path / d), "--threads", "2"])
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in ("phase_diagram.csv", "phase_diagram.svg"))
    ok &= r.check(same, "byte-identical CSV and SVG across runs")
    # s-grid refinement on the order-parameter sweeps
    fine = eq.SolverSettings(n_grid=4000)
    changed = 0
    for chi in OP_RUNS:
        ref = _op_family(chi, fine)
        for a in OP_AA:
            changed += sum(x != y for x, y in zip(op_curves[chi][a].labels, ref[a].labels))
    ok &= r.check(changed == 0, f"labels changed by 2000 -> 4000 grid: {changed}")
    # diagram refinement: boundary moves by less than one coarse cell
    g = pd.GridSpec.with_counts(0.05, 3.0, 100, 0.01, 100.0, 100)
    for chi in (1.0, 1000.0):
        a = pd.build_phase_diagram(g, chi, en.MaterialParams(), threads=4)
        b = pd.build_phase_diagram(g.refined(), chi, en.MaterialParams(), threads=4)
        sa, sb = a.switch_density(), b.switch_density()[::2]
        fin = np.isfinite(sa) & np.isfinite(sb)
        same_inf = np.all(np.isfinite(sa) == np.isfinite(sb))
        shift = float(np.max(np.abs(sa[fin] - sb[fin]))) if fin.any() else 0.0
        ok &= r.check(same_inf and shift < g.h1, f"chi {chi:g} boundary shift {shift:.3f} < {g.h1:.3f}")
    r.finish(ok)
