"""Randomized matrix-inequality suites and structural checks of the bulk potential.

These back the ``verify`` command and the acceptance tests.  Every suite
returns plain dictionaries so results are easy to print or serialize.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage, optimize

from . import constitutive as cn
from .energy import bulk_f, bulk_f_grad
from .tensor import STRUCT_TOL, THIRD, det3, eig_sym, q_from_triangle

INEQ_TOL = 1e-10


def _suite(name, violations, trials, **extra):
    out = {"name": name, "trials": int(trials), "violations": int(violations),
           "passed": int(violations) == 0}
    out.update(extra)
    return out


def ftlf_suite(rng, n):
    L = cn.random_spd(rng, n)
    F = cn.random_deformations(rng, n)
    return _suite("ftlf", cn.check_ftlf(L, F).violations, n)


def det_norm_suite(rng, n):
    return _suite("det_over_norm", cn.check_det_over_norm(cn.random_spd(rng, n)).violations, n)


def g_bounds_suite(rng, n):
    L = cn.random_spd(rng, n)
    L0 = cn.random_spd(rng, n)
    F = cn.random_deformations(rng, n)
    return _suite("g_bounds", cn.check_g_bounds(L, L0, F).violations, n)


def eigen_bound_suite(rng, n, tol=STRUCT_TOL):
    """lmax(Q) <= -2 lmin(Q) for admissible order tensors."""
    w = eig_sym(cn.random_order_tensors(rng, n))[0]
    bad = np.count_nonzero(w[:, 2] > -2.0 * w[:, 0] + tol)
    return _suite("lmax_bound", bad, n)


def convexity_suite(rng, n, tol=STRUCT_TOL):
    """lmin is concave, so {Q : lmin(Q) >= a} is convex."""
    q1 = cn.random_order_tensors(rng, n)
    q2 = cn.random_order_tensors(rng, n)
    w1 = eig_sym(q1)[0][:, 0]
    w2 = eig_sym(q2)[0][:, 0]
    a = np.minimum(w1, w2)  # both samples lie in Q(a) at this level
    t = rng.uniform(0.0, 1.0, size=n)[:, None, None]
    wm = eig_sym(t * q1 + (1 - t) * q2)[0][:, 0]
    bad = np.count_nonzero(wm < a - tol)
    return _suite("convexity", bad, n)


def matrix_inequality_suites(seed=0, n=10_000):
    rng = np.random.default_rng(seed)
    return [ftlf_suite(rng, n), det_norm_suite(rng, n), g_bounds_suite(rng, n),
            eigen_bound_suite(rng, n), convexity_suite(rng, n)]


def edge_paths(rng, n_paths, a0=3.0, depths=np.arange(1, 13)):
    """det L and det(Q + I/3) along straight paths that end on each edge.

    Returns per-edge arrays of shape (n_paths, len(depths)) for both
    determinants, with t = 1 - 10**-depth along each path.
    """
    # edges r + s = 1, r - 2s = 1, s - 2r = 1 between the vertices (1,0), (0,1), (-1,-1)
    verts = {"r+s": ((1.0, 0.0), (0.0, 1.0)),
             "r-2s": ((1.0, 0.0), (-1.0, -1.0)),
             "s-2r": ((0.0, 1.0), (-1.0, -1.0))}
    out = {}
    for name, (p, q) in verts.items():
        p = np.array(p)
        q = np.array(q)
        u = rng.uniform(0.05, 0.95, size=n_paths)[:, None]
        target = p + u * (q - p)
        # interior start: random barycentric point of the triangle
        b = rng.dirichlet([2.0, 2.0, 2.0], size=n_paths)
        start = b @ np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        frames = cn.random_rotations(rng, n_paths)
        t = 1.0 - 10.0 ** (-np.asarray(depths, dtype=float))
        pts = start[:, None, :] + t[None, :, None] * (target - start)[:, None, :]
        q_m = q_from_triangle(pts[..., 0], pts[..., 1], frames[:, None])
        det_q = det3(q_m + THIRD * np.eye(3))
        det_l = det3(cn.l_matrix_from_q(q_m, 1.0, a0))
        out[name] = (det_l, det_q)
    return out


def degeneracy_suite(seed=0, n_paths=100, a0=3.0):
    rng = np.random.default_rng(seed)
    paths = edge_paths(rng, n_paths, a0)
    ok = True
    info = {}
    for name, (dl, dq) in paths.items():
        ratio = dl / dq
        goes_to_zero = np.all(np.abs(dl[:, -1]) < 1e-9) and np.all(np.abs(dq[:, -1]) < 1e-9)
        bounded = np.all(np.abs(ratio / a0 ** 3 - 1.0) < 0.5)
        decreasing = np.all(np.diff(np.abs(dq), axis=1) < 0)
        info[name] = {"final_det_q": float(np.max(np.abs(dq[:, -1]))),
                      "ratio_dev": float(np.max(np.abs(ratio / a0 ** 3 - 1.0)))}
        ok &= bool(goes_to_zero and bounded and decreasing)
    return _suite("edge_degeneracy", 0 if ok else 1, 3 * n_paths, passed=ok, edges=info)


# -- bulk potential structure ---------------------------------------------

@dataclass(frozen=True)
class Well:
    s: float
    z: float
    f: float

    @property
    def rho(self):
        return 1.0 / self.z


def _refine(x0, chi, wells, bounds):
    def fun(x):
        return float(bulk_f(x[0], x[1], chi, wells))

    def jac(x):
        fs, fz = bulk_f_grad(x[0], x[1], chi, wells)
        return np.array([float(fs), float(fz)])

    res = optimize.minimize(fun, x0, jac=jac, method="L-BFGS-B", bounds=bounds,
                            options={"ftol": 1e-15, "gtol": 1e-11, "maxiter": 500})
    return res.x, res.fun


def bulk_minima(chi, wells, n_s=401, n_z=401, z_max=4.0, delta=1e-4):
    """All interior local minima of the bulk potential over (s, z).

    Candidates come from a dense grid (points no larger than their 3x3
    neighbourhood), then each is polished with L-BFGS-B.  Minima closer
    than 1e-4 are merged.
    """
    s = np.linspace(-0.5 + delta, 1.0 - delta, n_s)
    z = np.linspace(z_max / n_z, z_max, n_z)
    S, Z = np.meshgrid(s, z, indexing="ij")
    F = bulk_f(S, Z, chi, wells)
    loc = F == ndimage.minimum_filter(F, size=3, mode="nearest")
    loc[0, :] = loc[-1, :] = loc[:, 0] = loc[:, -1] = False
    bounds = [(-0.5 + delta, 1.0 - delta), (z[0] / 2, 2 * z_max)]
    found = []
    for i, j in zip(*np.nonzero(loc)):
        x, f = _refine(np.array([S[i, j], Z[i, j]]), chi, wells, bounds)
        g = np.hypot(*bulk_f_grad(x[0], x[1], chi, wells))
        if g > 1e-5:
            continue
        if all(np.hypot(x[0] - w.s, x[1] - w.z) > 1e-4 for w in found):
            found.append(Well(float(x[0]), float(x[1]), float(f)))
    return sorted(found, key=lambda w: w.s)


def split_wells(minima, split):
    iso = [w for w in minima if w.s < split]
    nem = [w for w in minima if w.s >= split]
    best = lambda g: min(g, key=lambda w: w.f) if g else None  # noqa: E731
    return best(iso), best(nem)


def depth_crossover(wells, lo, hi, tol=1e-3):
    """Bisect chi on [lo, hi] for equal isotropic and nematic well depths.

    Both wells are located afresh by :func:`bulk_minima` at every step.
    Returns None when the depth gap does not change sign on the interval
    or one of the wells is missing at an endpoint.
    """

    def gap(chi):
        iso, nem = split_wells(bulk_minima(chi, wells), wells.split)
        if iso is None or nem is None:
            return None
        return nem.f - iso.f

    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo is None or g_hi is None or np.sign(g_lo) == np.sign(g_hi):
        return None
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        g = gap(m)
        if g is None:
            return None
        if np.sign(g) == np.sign(g_lo):
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def single_well_onset(wells, lo, hi, tol=1e-3):
    """Bisect chi on [lo, hi] for the point where the isotropic well disappears.

    Returns None unless both wells exist at ``lo`` and only the nematic one
    at ``hi``.
    """

    def double(chi):
        iso, nem = split_wells(bulk_minima(chi, wells), wells.split)
        if nem is None:
            return None
        return iso is not None

    if double(lo) is not True or double(hi) is not False:
        return None
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        d = double(m)
        if d is None:
            return None
        if d:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def well_progression(wells, chis=(0.5, 1, 3.5, 10, 80, 1000)):
    """Number and ordering of bulk minima for each chi."""
    rows = []
    for chi in chis:
        m = bulk_minima(chi, wells)
        iso, nem = split_wells(m, wells.split)
        if iso is not None and nem is not None:
            kind = "double"
            lower = "isotropic" if iso.f < nem.f else "nematic"
        elif nem is not None:
            kind, lower = "single-nematic", "nematic"
        elif iso is not None:
            kind, lower = "single-isotropic", "isotropic"
        else:
            kind, lower = "none", None
        rows.append({"chi": chi, "kind": kind, "lower": lower, "n_minima": len(m),
                     "iso": iso, "nem": nem})
    return rows


def boundary_values(chi, wells, distance=1e-4, s_probe=0.25, z_probe=1.0):
    """f evaluated at ``distance`` from each singular edge of its domain.

    The large-z edge is probed at z = 1/distance.
    """
    return {
        "s->-1/2": float(bulk_f(-0.5 + distance, z_probe, chi, wells)),
        "s->1": float(bulk_f(1.0 - distance, z_probe, chi, wells)),
        "z->0": float(bulk_f(s_probe, distance, chi, wells)),
        "z->inf": float(bulk_f(s_probe, 1.0 / distance, chi, wells)),
    }


def growth_is_monotone(chi, wells, distances=10.0 ** -np.arange(1, 13)):
    """f increases strictly as each singular edge is approached."""
    vals = [boundary_values(chi, wells, d) for d in distances]
    return {k: bool(np.all(np.diff([v[k] for v in vals]) > 0)) for k in vals[0]}
