"""Equilibrium order parameter at fixed density or stretch.

The energy is scanned on a dense grid in s, every sign change of dE/ds is
bracketed and refined by bisection, and the lowest minimum is kept.  States
are split into two basins at ``settings.split`` (default: midway between
the two wells of the bulk potential); the best state in each basin gives
E_iso and E_nema, and the label is nematic only when E_nema is strictly
lower.

Plane strain uses F = diag(lam, lam, 1) with the director in the x-z
plane.  For diagonal F the energy depends on theta only through
cos^2(theta), linearly, so the minimum over theta sits at 0 or pi/2 for
every s.  The solver therefore runs the s-scan on both endpoints and
compares.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import energy as en
from .errors import DomainError, SolverFailure

ISOTROPIC = "isotropic"
NEMATIC = "nematic"
FAILED = "failed"

TIE_TOL = 1e-12
BRANCH_TOL = 1e-9


@dataclass(frozen=True)
class SolverSettings:
    n_grid: int = 2000
    delta: float = 1e-4
    root_tol: float = 1e-12
    split: float = None
    zero_tol: float = 0.02
    jump: float = 0.05
    warm_window: float = 0.05

    def __post_init__(self):
        if self.n_grid < 10:
            raise DomainError("n_grid must be at least 10")
        if not 0 < self.delta < 0.1:
            raise DomainError("delta must lie in (0, 0.1)")

    def split_for(self, params):
        return params.wells.split if self.split is None else self.split

    def grid(self):
        return np.linspace(-0.5 + self.delta, 1.0 - self.delta, self.n_grid)


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class EquilibriumPoint:
    control: float
    rho: float
    lam: float
    s_star: float
    theta_star: float
    energy: float
    E_iso: float
    E_nema: float
    label: str
    n_roots: int
    protocol: str = "expansion"

    @property
    def is_nematic(self):
        return self.label == NEMATIC

    def near_zero(self, tol=0.02):
        return abs(self.s_star) < tol


def failed_point(control, rho, lam, protocol):
    nan = float("nan")
    return EquilibriumPoint(float(control), float(rho), float(lam), nan, nan, nan, nan, nan,
                            FAILED, 0, protocol)


# -- batched landscapes ----------------------------------------------------

class _Landscape:
    """A batch of 1D energy profiles E_b(s) sharing one material."""

    def __init__(self, protocol, params, **arrays):
        self.protocol = protocol
        self.params = params
        self.arrays = {k: np.asarray(v, dtype=float) for k, v in arrays.items()}
        self.size = len(next(iter(self.arrays.values())))

    def _take(self, idx):
        if idx is None:
            return {k: v[:, None] for k, v in self.arrays.items()}
        return {k: v[idx] for k, v in self.arrays.items()}

    def energy(self, s, idx=None):
        a = self._take(idx)
        if self.protocol == "expansion":
            return en.total_energy_expansion(s, a["rho"], self.params, nu=a["nu"])
        return en.total_energy_plane_strain(s, None, a["lam1"], self.params, lam2=a["lam2"],
                                            nu=a["nu"], cos2=a["cos2"])

    def slope(self, s, idx=None):
        a = self._take(idx)
        if self.protocol == "expansion":
            return en.expansion_energy_ds(s, a["rho"], self.params, nu=a["nu"])
        return en.plane_energy_ds(s, None, a["lam1"], self.params, lam2=a["lam2"],
                                  nu=a["nu"], cos2=a["cos2"])


def _bisect(ls, idx, a, b, ga, tol):
    a = a.copy()
    b = b.copy()
    ga = ga.copy()
    for _ in range(200):
        if a.size == 0 or np.max(b - a) <= tol:
            break
        m = 0.5 * (a + b)
        gm = ls.slope(m, idx)
        same = np.sign(gm) == np.sign(ga)
        a = np.where(same, m, a)
        ga = np.where(same, gm, ga)
        b = np.where(same, b, m)
    gb = ls.slope(b, idx)
    den = gb - ga
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(den != 0, -ga / den, 0.5)
    return a + np.clip(t, 0.0, 1.0) * (b - a)


def _critical_points(ls, grid, tol, lo=None, hi=None):
    """Refined minima of every profile in the batch.

    Returns (minima, n_roots, g) with minima a list (per batch member) of
    (s, E) pairs.
    """
    g = ls.slope(grid[None, :])
    sg = np.sign(g)
    up = (sg[:, :-1] < 0) & (sg[:, 1:] >= 0)
    down = (sg[:, :-1] > 0) & (sg[:, 1:] <= 0)
    n_roots = up.sum(axis=1) + down.sum(axis=1)
    bi, bj = np.nonzero(up)
    s = _bisect(ls, bi, grid[bj], grid[bj + 1], g[bi, bj], tol)
    e = ls.energy(s, bi)
    minima = [[] for _ in range(ls.size)]
    for k in range(len(bi)):
        minima[bi[k]].append((float(s[k]), float(e[k])))
    return minima, n_roots, g


def _boundary_escape(ls, grid, g, minima, b):
    """True when the energy keeps falling toward an end of the interval."""
    e_ends = ls.energy(np.array([grid[0], grid[-1]]), np.array([b, b]))
    best = min((e for _, e in minima), default=np.inf)
    left = g[b, 0] > 0 and e_ends[0] < best
    right = g[b, -1] < 0 and e_ends[1] < best
    return left or right


def _select(cands, e_zero, split):
    """Pick the equilibrium from candidate minima (s, E, theta)."""
    iso = [c for c in cands if c[0] < split]
    nem = [c for c in cands if c[0] >= split]

    def best(group):
        out = None
        for c in group:
            if out is None or c[1] < out[1] - TIE_TOL * (1 + abs(out[1])):
                out = c
        return out

    bi, bn = best(iso), best(nem)
    zero = (0.0, float(e_zero), 0.0)
    if bi is None or zero[1] < bi[1] - TIE_TOL * (1 + abs(bi[1])):
        bi = zero
    e_iso = bi[1]
    e_nem = bn[1] if bn is not None else np.inf
    if e_nem < e_iso - TIE_TOL * (1 + abs(e_iso)):
        return bn, e_iso, e_nem, NEMATIC
    return bi, e_iso, e_nem, ISOTROPIC


def _diagnostics(ls, grid, b):
    return {"s": grid.copy(), "energy": ls.energy(grid[None, :])[b].copy(),
            "slope": ls.slope(grid[None, :])[b].copy()}


def solve_expansion_batch(rho, params, nu=None, settings=DEFAULT_SETTINGS):
    """Equilibria under F = lam I for arrays of rho and nu.

    Returns a list whose entries are EquilibriumPoint or SolverFailure.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    nu = np.broadcast_to(params.nu if nu is None else np.asarray(nu, dtype=float), rho.shape)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    ls = _Landscape("expansion", params, rho=rho, nu=nu)
    grid = settings.grid()
    minima, n_roots, g = _critical_points(ls, grid, settings.root_tol)
    e0 = ls.energy(np.zeros((1, 1)))[:, 0]
    split = settings.split_for(params)
    out = []
    for b in range(ls.size):
        lam = (params.rho0 / rho[b]) ** (1.0 / 3.0)
        if _boundary_escape(ls, grid, g, minima[b], b):
            out.append(SolverFailure("energy decreases toward the edge of the s interval",
                                     _diagnostics(ls, grid, b)))
            continue
        cands = [(s, e, 0.0) for s, e in minima[b]]
        c, e_iso, e_nem, label = _select(cands, e0[b], split)
        out.append(EquilibriumPoint(float(rho[b]), float(rho[b]), float(lam), c[0], 0.0, c[1],
                                    float(e_iso), float(e_nem), label, int(n_roots[b]),
                                    "expansion"))
    return out


def solve_plane_batch(lam, params, nu=None, lam2=None, settings=DEFAULT_SETTINGS):
    """Equilibria under F = diag(lam, lam2, 1), lam2 defaulting to lam."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    lam2 = lam if lam2 is None else np.broadcast_to(np.asarray(lam2, dtype=float), lam.shape)
    nu = np.broadcast_to(params.nu if nu is None else np.asarray(nu, dtype=float), lam.shape)
    if np.any(lam <= 0) or np.any(lam2 <= 0):
        raise DomainError("stretch must be positive")
    n = lam.size
    # member b is theta = 0, member n + b is theta = pi/2
    ls = _Landscape("plane", params, lam1=np.tile(lam, 2), lam2=np.tile(lam2, 2),
                    nu=np.tile(nu, 2), cos2=np.repeat([1.0, 0.0], n))
    grid = settings.grid()
    minima, n_roots, g = _critical_points(ls, grid, settings.root_tol)
    e0 = ls.energy(np.zeros((1, 1)))[:, 0]
    split = settings.split_for(params)
    out = []
    for b in range(n):
        z = lam[b] * lam2[b]
        rho = params.rho0 / z
        if _boundary_escape(ls, grid, g, minima[b], b) or \
                _boundary_escape(ls, grid, g, minima[n + b], n + b):
            out.append(SolverFailure("energy decreases toward the edge of the s interval",
                                     _diagnostics(ls, grid, b)))
            continue
        cands = [(s, e, 0.0) for s, e in minima[b]] + \
                [(s, e, 0.5 * np.pi) for s, e in minima[n + b]]
        c, e_iso, e_nem, label = _select(cands, e0[b], split)
        out.append(EquilibriumPoint(float(lam[b]), float(rho), float(lam[b]), c[0], c[2], c[1],
                                    float(e_iso), float(e_nem), label,
                                    int(n_roots[b] + n_roots[n + b]), "plane"))
    return out


def _single(res):
    r = res[0]
    if isinstance(r, SolverFailure):
        raise r
    return r


def solve_equilibrium_expansion(rho, params, settings=DEFAULT_SETTINGS):
    """Lowest-energy order parameter under isotropic expansion at density rho."""
    return _single(solve_expansion_batch([rho], params, settings=settings))


def solve_equilibrium_plane(lam, params, settings=DEFAULT_SETTINGS, lam2=None):
    """Lowest-energy (s, theta) under plane strain F = diag(lam, lam, 1)."""
    return _single(solve_plane_batch([lam], params, lam2=lam2, settings=settings))


def optimal_energy_plane(lam1, lam2, params, settings=DEFAULT_SETTINGS):
    """Optimal value min over (s, theta) of the plane-strain energy, with the minimizer."""
    p = solve_equilibrium_plane(lam1, params, settings=settings, lam2=lam2)
    return p.energy, p


# -- warm starts -----------------------------------------------------------

def _local_minimum(ls, s_prev, settings):
    """Nearest local minimum of a single profile within a window around s_prev."""
    lo = max(-0.5 + settings.delta, s_prev - settings.warm_window)
    hi = min(1.0 - settings.delta, s_prev + settings.warm_window)
    grid = np.linspace(lo, hi, 81)
    minima, _, _ = _critical_points(ls, grid, settings.root_tol)
    if not minima[0]:
        return None
    return min(minima[0], key=lambda c: abs(c[0] - s_prev))


def _warm_solve(protocol, control, params, prev, settings):
    if prev is None or prev.label == FAILED:
        return None
    if protocol == "expansion":
        ls = _Landscape("expansion", params, rho=[control], nu=[params.nu])
    else:
        cos2 = np.cos(prev.theta_star) ** 2
        ls = _Landscape("plane", params, lam1=[control], lam2=[control], nu=[params.nu],
                        cos2=[cos2])
    return _local_minimum(ls, prev.s_star, settings)


# -- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    protocol: str
    points: tuple
    discontinuities: tuple = ()
    warm_overrides: tuple = ()
    failures: tuple = ()

    @property
    def controls(self):
        return np.array([p.control for p in self.points])

    @property
    def s_star(self):
        return np.array([p.s_star for p in self.points])

    @property
    def rho(self):
        return np.array([p.rho for p in self.points])

    @property
    def labels(self):
        return [p.label for p in self.points]


BRANCH_COLUMNS = ("control", "rho", "lambda", "s_star", "theta_star", "energy", "E_iso",
                  "E_nema", "label", "n_roots")


def branch_rows(branch):
    return [(p.control, p.rho, p.lam, p.s_star, p.theta_star, p.energy, p.E_iso, p.E_nema,
             p.label, p.n_roots) for p in branch.points]


def _cold(protocol, controls, params, settings, threads):
    solve = solve_expansion_batch if protocol == "expansion" else solve_plane_batch
    if threads <= 1 or len(controls) < 2 * threads:
        return solve(controls, params, settings=settings)
    chunks = np.array_split(np.asarray(controls), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: solve(c, params, settings=settings), chunks))
    return [r for part in parts for r in part]


def _with_candidate(p, cand, split):
    s, e = cand
    e_iso, e_nem = p.E_iso, p.E_nema
    if s < split:
        e_iso = min(e_iso, e)
    else:
        e_nem = min(e_nem, e)
    label = NEMATIC if e_nem < e_iso - TIE_TOL * (1 + abs(e_iso)) else ISOTROPIC
    return replace(p, s_star=s, energy=e, E_iso=e_iso, E_nema=e_nem, label=label)


def sweep(controls, params, protocol="expansion", settings=DEFAULT_SETTINGS, threads=1,
          warm=True):
    """Solve along a monotone list of controls (rho for expansion, lam for plane).

    Every point gets a cold global solve.  The warm solve tracks the local
    minimum nearest the previous solution; when it is lower by more than
    BRANCH_TOL it replaces the cold result (the grid missed a narrow well).
    """
    c = np.asarray(controls, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise DomainError("controls must be a non-empty 1D sequence")
    if c.size > 1:
        d = np.diff(c)
        if not (np.all(d > 0) or np.all(d < 0) or np.all(d == 0)):
            raise DomainError("controls must be strictly monotone")
    cold = _cold(protocol, c, params, settings, threads)
    split = settings.split_for(params)
    points, overrides, failures = [], [], []
    prev = None
    for k, res in enumerate(cold):
        if isinstance(res, SolverFailure):
            lam = (params.rho0 / c[k]) ** (1 / 3) if protocol == "expansion" else c[k]
            rho = c[k] if protocol == "expansion" else params.rho0 / c[k] ** 2
            p = failed_point(c[k], rho, lam, protocol)
            failures.append(float(c[k]))
        else:
            p = res
            if warm:
                w = _warm_solve(protocol, c[k], params, prev, settings)
                if w is not None and w[1] < p.energy - BRANCH_TOL:
                    p = _with_candidate(p, w, split)
                    overrides.append(float(c[k]))
        points.append(p)
        prev = p
    jumps = []
    for a, b in zip(points[:-1], points[1:]):
        if abs(b.s_star - a.s_star) > settings.jump:
            jumps.append(0.5 * (a.control + b.control))
    return Branch(protocol, tuple(points), tuple(jumps), tuple(overrides), tuple(failures))


# -- threshold density -----------------------------------------------------

class MultiSwitchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ThresholdResult:
    found: bool
    rho: float = None
    switches: tuple = ()
    exhausted: str = None
    scan: tuple = field(default=(), repr=False)


def _label_at(rho, params, protocol, settings):
    if protocol == "expansion":
        p = solve_equilibrium_expansion(rho, params, settings)
    else:
        p = solve_equilibrium_plane(np.sqrt(params.rho0 / rho), params, settings)
    return p.label == NEMATIC


def threshold_density(A_a, chi, params, rho_range=(0.2, 3.0), n_scan=120, protocol="expansion",
                      settings=DEFAULT_SETTINGS, rtol=1e-6):
    """Density above which the equilibrium is nematic.

    Scans ``rho_range`` (log-spaced), then bisects the first
    isotropic-to-nematic switch to |d rho| <= rtol * rho0.  When the scan
    sees more than one switch a MultiSwitchWarning lists them all.
    """
    p = params.with_(A_a=A_a, chi=chi)
    rhos = np.geomspace(rho_range[0], rho_range[1], n_scan)
    if protocol == "expansion":
        res = solve_expansion_batch(rhos, p, settings=settings)
    else:
        res = solve_plane_batch(np.sqrt(p.rho0 / rhos), p, settings=settings)
    labs = []
    for r in res:
        if isinstance(r, SolverFailure):
            raise r
        labs.append(r.label == NEMATIC)
    labs = np.array(labs)
    scan = tuple(zip(rhos.tolist(), labs.tolist()))
    flips = np.nonzero(labs[1:] != labs[:-1])[0]
    if flips.size == 0:
        return ThresholdResult(False, None, (), "low" if labs[0] else "high", scan)
    switches = tuple(0.5 * (rhos[k] + rhos[k + 1]) for k in flips)
    if flips.size > 1:
        warnings.warn(f"label switches {len(flips)} times along rho at {switches}",
                      MultiSwitchWarning, stacklevel=2)
    ups = [k for k in flips if not labs[k] and labs[k + 1]]
    if not ups:
        return ThresholdResult(False, None, switches, None, scan)
    k = ups[0]
    a, b = rhos[k], rhos[k + 1]
    while b - a > rtol * p.rho0:
        m = 0.5 * (a + b)
        if _label_at(m, p, protocol, settings):
            b = m
        else:
            a = m
    return ThresholdResult(True, 0.5 * (a + b), switches, None, scan)
