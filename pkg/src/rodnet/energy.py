"""Energy densities: network elasticity, Landau-de Gennes polynomial, and the
two-well bulk potential of the rod fluid together with the total energies
of the expansion and plane-strain protocols.

Scalar-valued functions broadcast over numpy arrays in ``s``, ``z``,
``rho``, ``lam`` and ``nu`` so the solver can evaluate whole grids at once.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .constitutive import aniso_g
from .errors import DomainError
from .tensor import as_matrix, frobenius

ALPHA_MODES = ("derived", "constant")


@dataclass(frozen=True)
class BulkWellParams:
    """Positions (s, z) and sharpness eta of the isotropic and nematic wells.

    z is the volume ratio det F = rho0/rho.
    """

    s_i: float = 0.0
    z_i: float = 1.0
    eta_i: float = 50.0
    s_n: float = 0.5
    z_n: float = 2.0 / 3.0
    eta_n: float = 10.0

    def __post_init__(self):
        for name in ("eta_i", "eta_n", "z_i", "z_n"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("s_i", "s_n"):
            if not -0.5 < getattr(self, name) < 1.0:
                raise DomainError(f"{name} must lie in (-1/2, 1), got {getattr(self, name)}")

    @classmethod
    def with_nematic_density(cls, rho_n, rho0=1.0, **kw):
        return cls(z_n=rho0 / rho_n, **kw)

    @property
    def split(self):
        """Order parameter separating the two basins (midpoint of the wells)."""
        return 0.5 * (self.s_i + self.s_n)


# Tuned so that the isotropic well wins for small chi, the nematic well wins
# past chi ~ 1.5 and the isotropic well disappears before chi = 10.
DENSE_WELLS = BulkWellParams(0.0, 1.0, 50.0, 0.5, 2.0 / 3.0, 10.0)
# Nematic well at rho = 0.5.  A sharp, deep nematic well and a soft
# isotropic one give the low-density features of the op/stress runs.
DILUTE_WELLS = BulkWellParams(0.0, 1.0, 5.0, 0.5, 2.0, 500.0)

WELL_PRESETS = {"dense": DENSE_WELLS, "dilute": DILUTE_WELLS}


@dataclass(frozen=True)
class MaterialParams:
    """Material constants.  mu and nu are derived and never stored."""

    rho0: float = 1.0
    sigma_x0: float = 3.0
    A_a: float = 1.0
    chi: float = 1.0
    RT: float = 1.0
    a0: float = 3.0
    alpha_mode: str = "derived"
    alpha_value: float = -2.0
    wells: BulkWellParams = field(default_factory=BulkWellParams)

    def __post_init__(self):
        for name in ("rho0", "A_a", "chi", "RT", "a0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        # sigma_x0 = 0 switches the elastic term off
        if not self.sigma_x0 >= 0:
            raise DomainError(f"sigma_x0 must be non-negative, got {self.sigma_x0}")
        if self.alpha_mode not in ALPHA_MODES:
            raise DomainError(f"alpha_mode must be one of {ALPHA_MODES}, got {self.alpha_mode!r}")

    @property
    def mu(self):
        return self.RT * self.sigma_x0

    @property
    def nu(self):
        return self.RT * self.A_a * self.rho0

    def with_(self, **kw):
        return replace(self, **kw)

    def rho0_estimate(self, K):
        """Consistency estimate rho0 ~ K chi^3 / A_a^2 (diagnostic only)."""
        return K * self.chi ** 3 / self.A_a ** 2


@dataclass(frozen=True)
class LdGCoefficients:
    alpha_T: float
    T: float
    T_NI: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("alpha_T", "b", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def a(self):
        return 0.5 * self.alpha_T * (self.T - self.T_NI)


# -- elasticity ------------------------------------------------------------

def anisotropy(s, mode="derived", value=-2.0):
    """1 - r with r = l_perp/l_par, and its derivative in s.

    In derived mode, r(s) = (1 - s)/(1 + 2s) from L = a0 (Q + I/3).
    """
    s = np.asarray(s, dtype=float)
    if mode == "derived":
        return 3.0 * s / (1.0 + 2.0 * s), 3.0 / (1.0 + 2.0 * s) ** 2
    return np.full_like(s, value), np.zeros_like(s)


@dataclass(frozen=True)
class CrosslinkState:
    """Network state at crosslinking.  ``n0=None`` with r0 = 1 is isotropic."""

    n0: np.ndarray = None
    r0: float = 1.0
    l_perp0: float = None


def btw_energy(F, s, n, mu, ref=CrosslinkState(), a0=3.0, alpha_mode="derived", alpha_value=-2.0):
    """Anisotropic neo-Hookean energy in director form.

    (mu/2)(lp0/lp)[ |F|^2 - (1-r)|F^T n|^2 + ((1-r0)/r0)(|F n0|^2 - (1-r)(F^T n . n0)^2) ]
    with lp = a0 (1 - s)/3 from the constitutive map.
    """
    if not -0.5 < s < 1.0:
        raise DomainError(f"order parameter s = {s} outside (-1/2, 1)")
    fm = as_matrix(F.F if hasattr(F, "F") else F)
    n = np.asarray(n, dtype=float)
    one_minus_r = float(anisotropy(s, alpha_mode, alpha_value)[0])
    r = 1.0 - one_minus_r
    if r <= 0 or ref.r0 <= 0:
        raise DomainError(f"shape ratios must be positive, r = {r}, r0 = {ref.r0}")
    lp = a0 * (1.0 - s) / 3.0
    lp0 = a0 / 3.0 if ref.l_perp0 is None else ref.l_perp0
    ftn = fm.T @ n
    w = float(np.sum(fm * fm)) - one_minus_r * float(ftn @ ftn)
    if ref.n0 is not None and ref.r0 != 1.0:
        n0 = np.asarray(ref.n0, dtype=float)
        fn0 = fm @ n0
        w += (1.0 - ref.r0) / ref.r0 * (float(fn0 @ fn0) - one_minus_r * float(ftn @ n0) ** 2)
    return 0.5 * mu * (lp0 / lp) * w


def btw_diag(s, cos2, lam1, lam2, lam3, mu, alpha_mode="derived", alpha_value=-2.0):
    """Isotropic-reference energy for F = diag(lam1, lam2, lam3) and a director
    in the x-z plane with cos^2(theta) = ``cos2``.  Returns (W, dW/ds)."""
    s = np.asarray(s, dtype=float)
    a, da = anisotropy(s, alpha_mode, alpha_value)
    big = lam1 ** 2 + lam2 ** 2 + lam3 ** 2
    proj = lam1 ** 2 * cos2 + lam3 ** 2 * (1.0 - cos2)
    c = 1.0 / (1.0 - s)
    inner = big - a * proj
    w = 0.5 * mu * c * inner
    dw = 0.5 * mu * (c * c * inner - c * da * proj)
    return w, dw


def trace_energy(G, mu):
    """(mu/2) |G|^2."""
    g = G.G if hasattr(G, "G") else as_matrix(G)
    return 0.5 * mu * frobenius(g) ** 2


def trace_energy_direct(L, L0, F, mu):
    """(mu/2) tr(L0 F^T L^-1 F), the same energy without square roots."""
    lm = as_matrix(L.matrix() if hasattr(L, "matrix") else L)
    l0 = as_matrix(L0.matrix() if hasattr(L0, "matrix") else L0)
    fm = as_matrix(F.F if hasattr(F, "F") else F)
    ft = np.swapaxes(fm, -1, -2)
    return 0.5 * mu * np.trace(l0 @ ft @ np.linalg.solve(lm, fm), axis1=-2, axis2=-1)


def trace_energy_from(L, L0, F, mu):
    return trace_energy(aniso_g(L, L0, F), mu)


def ldg_poly(q, coeffs):
    """a tr Q^2 - (b/3) tr Q^3 + (c/4) (tr Q^2)^2."""
    m = as_matrix(q)
    q2 = m @ m
    t2 = np.trace(q2, axis1=-2, axis2=-1)
    t3 = np.einsum("...ij,...ji->...", q2, m)
    return coeffs.a * t2 - coeffs.b / 3.0 * t3 + 0.25 * coeffs.c * t2 ** 2


# -- bulk potential ------------------------------------------------------

def _check_bulk_domain(s, z):
    if np.any(~(np.asarray(z) > 0)):
        raise DomainError("z = det F must be positive")
    s = np.asarray(s)
    if np.any(~((s > -0.5) & (s < 1.0))):
        raise DomainError("order parameter must lie in the open interval (-1/2, 1)")


def bulk_terms(s, z, wells):
    """(W_iso, W_nema, W_gr) at order s and volume ratio z."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_bulk_domain(s, z)
    di = (s - wells.s_i) ** 2 + (z - wells.z_i) ** 2
    dn = (s - wells.s_n) ** 2 + (z - wells.z_n) ** 2
    w_iso = np.arctan(wells.eta_i * di) + di
    w_nem = np.arctan(wells.eta_n * dn)
    w_gr = -(np.log(z) + np.log(np.abs(s - 1.0) * (s + 0.5))) + z ** 2
    return w_iso, w_nem, w_gr


def bulk_f(s, z, chi, wells):
    """Bulk potential h(s, z) = W_iso + chi W_nema + W_gr.

    chi weights the nematic well, so raising chi deepens it.
    """
    w_iso, w_nem, w_gr = bulk_terms(s, z, wells)
    return w_iso + chi * w_nem + w_gr


def bulk_f_grad(s, z, chi, wells):
    """Analytic (df/ds, df/dz)."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_bulk_domain(s, z)
    di = (s - wells.s_i) ** 2 + (z - wells.z_i) ** 2
    dn = (s - wells.s_n) ** 2 + (z - wells.z_n) ** 2
    ki = wells.eta_i / (1.0 + (wells.eta_i * di) ** 2) + 1.0
    kn = chi * wells.eta_n / (1.0 + (wells.eta_n * dn) ** 2)
    fs = 2.0 * ki * (s - wells.s_i) + 2.0 * kn * (s - wells.s_n) + 1.0 / (1.0 - s) - 1.0 / (s + 0.5)
    fz = 2.0 * ki * (z - wells.z_i) + 2.0 * kn * (z - wells.z_n) - 1.0 / z + 2.0 * z
    return fs, fz


def bulk_f_density(s, rho, chi, wells, rho0=1.0):
    """The bulk potential as a function of density, f(s, rho) = h(s, rho0/rho)."""
    return bulk_f(s, rho0 / np.asarray(rho, dtype=float), chi, wells)


# -- protocol energies -----------------------------------------------------

def _ordering_term(s, params):
    """alpha s^2 and its s-derivative."""
    s = np.asarray(s, dtype=float)
    if params.alpha_mode == "derived":
        return 3.0 * s ** 3 / (1.0 + 2.0 * s), (9.0 * s ** 2 + 12.0 * s ** 3) / (1.0 + 2.0 * s) ** 2
    return params.alpha_value * s ** 2, 2.0 * params.alpha_value * s


def total_energy_expansion(s, rho, params, nu=None):
    """lam^3 (mu (1 - alpha s^2) + nu f) under F = lam I, lam^3 = rho0/rho."""
    nu = params.nu if nu is None else nu
    vol = params.rho0 / np.asarray(rho, dtype=float)
    q, _ = _ordering_term(s, params)
    return vol * (params.mu * (1.0 - q) + nu * bulk_f(s, vol, params.chi, params.wells))


def expansion_energy_ds(s, rho, params, nu=None):
    nu = params.nu if nu is None else nu
    vol = params.rho0 / np.asarray(rho, dtype=float)
    _, dq = _ordering_term(s, params)
    fs, _ = bulk_f_grad(s, vol, params.chi, params.wells)
    return vol * (-params.mu * dq + nu * fs)


def expansion_energy_drho(s, rho, params, nu=None):
    """Partial derivative in rho at fixed s."""
    nu = params.nu if nu is None else nu
    rho = np.asarray(rho, dtype=float)
    vol = params.rho0 / rho
    dvol = -params.rho0 / rho ** 2
    q, _ = _ordering_term(s, params)
    f = bulk_f(s, vol, params.chi, params.wells)
    _, fz = bulk_f_grad(s, vol, params.chi, params.wells)
    return dvol * (params.mu * (1.0 - q) + nu * f) + vol * nu * fz * dvol


def _plane_parts(s, theta, lam, params, lam2, nu, cos2):
    nu = params.nu if nu is None else nu
    lam = np.asarray(lam, dtype=float)
    lam2 = lam if lam2 is None else np.asarray(lam2, dtype=float)
    if cos2 is None:
        cos2 = np.cos(theta) ** 2
    vol = lam * lam2
    return nu, lam, lam2, vol, cos2


def total_energy_plane_strain(s, theta, lam, params, lam2=None, nu=None, cos2=None):
    """det F (W_BTW + nu f) for F = diag(lam, lam2, 1), lam2 defaulting to lam.

    The director is n = (cos theta, 0, sin theta) and z = det F = rho0/rho.
    """
    nu, lam, lam2, vol, cos2 = _plane_parts(s, theta, lam, params, lam2, nu, cos2)
    w, _ = btw_diag(s, cos2, lam, lam2, 1.0, params.mu, params.alpha_mode, params.alpha_value)
    return vol * (w + nu * bulk_f(s, vol, params.chi, params.wells))


def plane_energy_ds(s, theta, lam, params, lam2=None, nu=None, cos2=None):
    nu, lam, lam2, vol, cos2 = _plane_parts(s, theta, lam, params, lam2, nu, cos2)
    _, dw = btw_diag(s, cos2, lam, lam2, 1.0, params.mu, params.alpha_mode, params.alpha_value)
    fs, _ = bulk_f_grad(s, vol, params.chi, params.wells)
    return vol * (dw + nu * fs)


def plane_energy_dlam1(s, theta, lam, params, lam2=None, nu=None, cos2=None):
    """Partial derivative in F_xx at fixed (s, theta)."""
    nu, lam, lam2, vol, cos2 = _plane_parts(s, theta, lam, params, lam2, nu, cos2)
    w, _ = btw_diag(s, cos2, lam, lam2, 1.0, params.mu, params.alpha_mode, params.alpha_value)
    a, _ = anisotropy(s, params.alpha_mode, params.alpha_value)
    dw = 0.5 * params.mu / (1.0 - np.asarray(s)) * (2.0 * lam - a * 2.0 * lam * cos2)
    f = bulk_f(s, vol, params.chi, params.wells)
    _, fz = bulk_f_grad(s, vol, params.chi, params.wells)
    return lam2 * (w + nu * f) + vol * (dw + nu * fz * lam2)


def plane_energy_dlam(s, theta, lam, params, nu=None, cos2=None):
    """Derivative along the equibiaxial path F = diag(lam, lam, 1) at fixed (s, theta)."""
    nu, lam, lam2, vol, cos2 = _plane_parts(s, theta, lam, params, None, nu, cos2)
    w, _ = btw_diag(s, cos2, lam, lam, 1.0, params.mu, params.alpha_mode, params.alpha_value)
    a, _ = anisotropy(s, params.alpha_mode, params.alpha_value)
    dw = 0.5 * params.mu / (1.0 - np.asarray(s)) * (4.0 * lam - a * 2.0 * lam * cos2)
    f = bulk_f(s, vol, params.chi, params.wells)
    _, fz = bulk_f_grad(s, vol, params.chi, params.wells)
    return 2.0 * lam * (w + nu * f) + vol * (dw + nu * fz * 2.0 * lam)


# -- surface dump ----------------------------------------------------------

SURFACE_COLUMNS = ("s", "z", "rho", "f", "W_iso", "W_nema", "W_gr", "total")


def energy_surface(params, s_values, rho_values):
    """Rows of the bulk potential and expansion energy over an (s, rho) grid."""
    rows = []
    for rho in rho_values:
        z = params.rho0 / rho
        w_iso, w_nem, w_gr = bulk_terms(np.asarray(s_values), z, params.wells)
        f = w_iso + params.chi * w_nem + w_gr
        tot = total_energy_expansion(np.asarray(s_values), rho, params)
        for k, s in enumerate(s_values):
            rows.append((float(s), float(z), float(rho), float(f[k]), float(w_iso[k]),
                         float(w_nem[k]), float(w_gr[k]), float(tot[k])))
    return rows
