"""Phase diagrams over (rho, A_a), order-parameter curves and stress curves."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import (DEFAULT_SETTINGS, FAILED, ISOTROPIC, NEMATIC, SolverFailure,
                          solve_expansion_batch, solve_plane_batch, sweep)
from .errors import DomainError

COLORS = {NEMATIC: "#d62728", ISOTROPIC: "#1f77b4", FAILED: "#7f7f7f"}
PROTOCOLS = ("plane", "expansion")


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid rho_i = rho_min + i h1, A_a_j = aa_min + j h2.

    A range with equal endpoints is a single row or column and its step is
    ignored.
    """

    rho_min: float = 0.05
    rho_max: float = 3.0
    aa_min: float = 0.01
    aa_max: float = 100.0
    h1: float = (3.0 - 0.05) / 199
    h2: float = (100.0 - 0.01) / 199

    def __post_init__(self):
        if not 0 < self.rho_min <= self.rho_max:
            raise DomainError("need 0 < rho_min <= rho_max")
        if not 0 < self.aa_min <= self.aa_max:
            raise DomainError("need 0 < aa_min <= aa_max")
        if self.rho_max > self.rho_min and not 0 < self.h1 <= self.rho_max - self.rho_min:
            raise DomainError("h1 must satisfy 0 < h1 <= rho_max - rho_min")
        if self.aa_max > self.aa_min and not 0 < self.h2 <= self.aa_max - self.aa_min:
            raise DomainError("h2 must satisfy 0 < h2 <= aa_max - aa_min")

    @classmethod
    def with_counts(cls, rho_min, rho_max, n_rho, aa_min, aa_max, n_aa):
        h1 = (rho_max - rho_min) / (n_rho - 1) if n_rho > 1 else 1.0
        h2 = (aa_max - aa_min) / (n_aa - 1) if n_aa > 1 else 1.0
        return cls(rho_min, rho_max, aa_min, aa_max, h1, h2)

    @staticmethod
    def _axis(lo, hi, h):
        if hi == lo:
            return np.array([lo])
        n = int(np.floor((hi - lo) / h + 1e-9)) + 1
        return lo + h * np.arange(n)

    @property
    def rho(self):
        return self._axis(self.rho_min, self.rho_max, self.h1)

    @property
    def aa(self):
        return self._axis(self.aa_min, self.aa_max, self.h2)

    def refined(self):
        return GridSpec(self.rho_min, self.rho_max, self.aa_min, self.aa_max,
                        self.h1 / 2, self.h2 / 2)


@dataclass(frozen=True)
class PhaseDiagram:
    """Labels indexed [j, i] = (A_a_j, rho_i)."""

    grid: GridSpec
    labels: np.ndarray
    s_star: np.ndarray
    gap: np.ndarray
    chi: float
    protocol: str
    meta: dict = field(default_factory=dict)

    @property
    def rho(self):
        return self.grid.rho

    @property
    def aa(self):
        return self.grid.aa

    def counts(self):
        return {k: int(np.sum(self.labels == k)) for k in (NEMATIC, ISOTROPIC, FAILED)}

    def nematic_mask(self):
        return self.labels == NEMATIC

    def switch_counts(self):
        """Number of label changes along rho, per A_a column."""
        return np.sum(self.labels[:, 1:] != self.labels[:, :-1], axis=1)

    def switch_density(self):
        """First rho labelled nematic in each A_a column (inf when none)."""
        m = self.nematic_mask()
        out = np.full(m.shape[0], np.inf)
        has = m.any(axis=1)
        out[has] = self.rho[np.argmax(m[has], axis=1)]
        return out

    def colors(self):
        return np.vectorize(COLORS.get)(self.labels)

    def rows(self):
        out = []
        for j, a in enumerate(self.aa):
            for i, r in enumerate(self.rho):
                out.append((float(r), float(a), str(self.labels[j, i]), float(self.s_star[j, i]),
                            float(self.gap[j, i])))
        return out


DIAGRAM_COLUMNS = ("rho", "A_a", "label", "s_star", "energy_gap")


def _row(rho, aa, params, protocol, settings):
    """All A_a cells at one density, solved as one batch."""
    nu = params.RT * aa * params.rho0
    if protocol == "plane":
        lam = np.sqrt(params.rho0 / rho)
        res = solve_plane_batch(np.full(aa.shape, lam), params, nu=nu, settings=settings)
    else:
        res = solve_expansion_batch(np.full(aa.shape, rho), params, nu=nu, settings=settings)
    labels, s, gap = [], [], []
    for r in res:
        if isinstance(r, SolverFailure):
            labels.append(FAILED)
            s.append(np.nan)
            gap.append(np.nan)
        else:
            labels.append(r.label)
            s.append(r.s_star)
            gap.append(r.E_iso - r.E_nema)
    return labels, s, gap


def build_phase_diagram(grid, chi, params, protocol="plane", settings=DEFAULT_SETTINGS, threads=1):
    """Label every (rho, A_a) cell by comparing the best isotropic and nematic energies."""
    if protocol not in PROTOCOLS:
        raise DomainError(f"protocol must be one of {PROTOCOLS}")
    p = params.with_(chi=chi)
    rho, aa = grid.rho, grid.aa

    def work(r):
        return _row(r, aa, p, protocol, settings)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(work, rho))
    else:
        cols = [work(r) for r in rho]
    labels = np.array([c[0] for c in cols], dtype=object).T
    s = np.array([c[1] for c in cols], dtype=float).T
    gap = np.array([c[2] for c in cols], dtype=float).T
    labels = labels.astype(str)
    meta = {"chi": chi, "protocol": protocol, "wells": p.wells, "mu": p.mu,
            "alpha_mode": p.alpha_mode}
    return PhaseDiagram(grid, labels, s, gap, float(chi), protocol, meta)


def order_parameter_curve(chi, aa_list, lam_values, params, settings=DEFAULT_SETTINGS, threads=1):
    """One plane-strain branch per aspect ratio, keyed by A_a."""
    out = {}
    for a in aa_list:
        out[float(a)] = sweep(lam_values, params.with_(chi=chi, A_a=a), protocol="plane",
                              settings=settings, threads=threads)
    return out


def lam_for_densities(rho_values, rho0=1.0):
    """Stretches that realize the given densities under plane strain."""
    return np.sqrt(rho0 / np.asarray(rho_values, dtype=float))


# -- stress ------------------------------------------------------------------

@dataclass(frozen=True)
class StressCurve:
    lam: np.ndarray
    rho: np.ndarray
    p_xx: np.ndarray
    p_yy: np.ndarray
    energy: np.ndarray
    s_star: np.ndarray
    theta_star: np.ndarray
    one_sided: np.ndarray
    sign_changes: tuple
    meta: dict = field(default_factory=dict)

    @property
    def monotone(self):
        return len(self.sign_changes) == 0

    def rows(self):
        return [(float(l), float(r), float(s), float(p))
                for l, r, s, p in zip(self.lam, self.rho, self.s_star, self.p_xx)]


CURVE_COLUMNS = ("lambda", "rho", "s_star", "P_xx")


def _stencil(lam, params, settings, frozen, nu):
    """Optimal energies for F = diag(l1, l2, 1) at the five stencil points of each lam."""
    h = 1e-5 * lam
    l1 = np.concatenate([lam, lam + h, lam - h, lam, lam])
    l2 = np.concatenate([lam, lam, lam, lam + h, lam - h])
    if frozen is not None:
        from .energy import total_energy_plane_strain
        s0, th0 = frozen
        e = total_energy_plane_strain(s0, th0, l1, params, lam2=l2, nu=nu)
        s = np.full(l1.shape, s0)
        th = np.full(l1.shape, th0)
        return h, e.reshape(5, -1), s.reshape(5, -1), th.reshape(5, -1)
    res = solve_plane_batch(l1, params, nu=nu, lam2=l2, settings=settings)
    bad = [k for k, r in enumerate(res) if isinstance(r, SolverFailure)]
    if bad:
        raise res[bad[0]]
    e = np.array([r.energy for r in res]).reshape(5, -1)
    s = np.array([r.s_star for r in res]).reshape(5, -1)
    th = np.array([r.theta_star for r in res]).reshape(5, -1)
    return h, e, s, th


def _fd(e0, ep, em, sp, sm, s0, h, jump):
    """Central difference, falling back to the side that stays on s0's branch."""
    cen = (ep - em) / (2 * h)
    fwd = (ep - e0) / h
    bwd = (e0 - em) / h
    jp = np.abs(sp - s0) > jump
    jm = np.abs(sm - s0) > jump
    val = np.where(jp & ~jm, bwd, np.where(jm & ~jp, fwd, cen))
    return val, jp | jm


def stress_curve(chi, A_a, lam_values, params, settings=DEFAULT_SETTINGS, frozen=None,
                 jump=1e-3, nu=None):
    """First Piola-Kirchhoff P_xx along plane strain, per unit reference volume.

    P_xx is the derivative of the optimal-value function min_(s, theta) E in
    F_xx with F_yy held at lam.  ``frozen=(s, theta)`` skips the
    minimization and differentiates the energy at that fixed state.  ``nu``
    overrides the bulk weight derived from A_a.
    """
    p = params.with_(chi=chi, A_a=A_a)
    lam = np.asarray(lam_values, dtype=float)
    if lam.size == 0:
        raise DomainError("empty stretch list")
    h, e, s, th = _stencil(lam, p, settings, frozen, nu)
    pxx, fx = _fd(e[0], e[1], e[2], s[1], s[2], s[0], h, jump)
    pyy, fy = _fd(e[0], e[3], e[4], s[3], s[4], s[0], h, jump)
    d = np.diff(pxx)
    sg = np.sign(d)
    nz = np.nonzero(sg)[0]
    changes = tuple(int(nz[k + 1]) for k in range(len(nz) - 1) if sg[nz[k + 1]] != sg[nz[k]])
    meta = {"chi": chi, "A_a": A_a, "normalization": "per unit reference volume",
            "fd_step": "1e-5*lambda"}
    return StressCurve(lam, p.rho0 / lam ** 2, pxx, pyy, e[0], s[0], th[0], fx | fy, changes, meta)


def work_energy_check(curve, i0=0, i1=None):
    """Integral of (P_xx + P_yy) d lam against the optimal-energy change.

    Both in-plane components do work along F = diag(lam, lam, 1).
    Returns (work, delta_energy, relative error).
    """
    i1 = len(curve.lam) - 1 if i1 is None else i1
    sl = slice(i0, i1 + 1)
    work = float(np.trapezoid(curve.p_xx[sl] + curve.p_yy[sl], curve.lam[sl]))
    de = float(curve.energy[i1] - curve.energy[i0])
    return work, de, abs(work - de) / max(abs(de), 1e-300)


def render_svg(obj, meta=None, title=None):
    """SVG document for a diagram or curves; see :func:`rodnet.output.render_svg`."""
    from .output import render_svg as _render
    return _render(obj, meta, title)
