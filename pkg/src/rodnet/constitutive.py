"""Order tensor to step-length tensor map, the anisotropic deformation G,
and executable checks of the matrix inequalities used for coercivity.

The check_* functions are vectorized: pass stacks of matrices with shape
(..., 3, 3) to run many trials at once.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularShapeError
from .tensor import (THIRD, OrderTensor, SymTensor3, adjugate, as_matrix, det3,
                     eig_sym, frobenius)

SPD_REL_TOL = 1e-10
CHECK_TOL = 1e-10


def _is_spd(w, trace):
    return w[..., 0] > SPD_REL_TOL * trace


@dataclass(frozen=True)
class StepLengthTensor:
    """SPD shape tensor L.  ``alpha``/``beta`` are set when built from Q."""

    L: SymTensor3
    alpha: float = None
    beta: float = None

    def __post_init__(self):
        w, _ = eig_sym(self.L.matrix())
        if not _is_spd(w, self.L.trace):
            raise SingularShapeError(f"step-length tensor is not positive definite, eigenvalues {w}")

    @classmethod
    def from_matrix(cls, m):
        return cls(SymTensor3.from_matrix(m))

    def matrix(self):
        return self.L.matrix()

    @property
    def eigenvalues(self):
        return eig_sym(self.L.matrix())[0]


def l_from_q(q, alpha=1.0, beta=3.0):
    """L = beta (alpha Q + I/3)."""
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not isinstance(q, OrderTensor):
        q = OrderTensor.from_matrix(q)
    m = beta * (alpha * q.matrix() + THIRD * np.eye(3))
    try:
        return StepLengthTensor(SymTensor3.from_matrix(m), alpha=float(alpha), beta=float(beta))
    except SingularShapeError as exc:
        raise SingularShapeError(f"Q with eigenvalues {q.eigenvalues} gives a singular L "
                                 f"(alpha={alpha})") from exc


def l_matrix_from_q(q, alpha=1.0, beta=3.0):
    """Unchecked, batched version of :func:`l_from_q`."""
    return beta * (alpha * as_matrix(q) + THIRD * np.eye(3))


@dataclass(frozen=True)
class DeformationGradient:
    F: np.ndarray

    def __post_init__(self):
        f = np.array(self.F, dtype=float)
        if f.shape != (3, 3):
            raise DomainError("deformation gradient must be 3x3")
        d = float(det3(f))
        if not d > 0:
            raise DomainError(f"det F must be positive, got {d}")
        f.setflags(write=False)
        object.__setattr__(self, "F", f)

    @property
    def det(self):
        return float(det3(self.F))

    @classmethod
    def diag(cls, a, b, c):
        return cls(np.diag([a, b, c]))


def spd_power(m, p):
    """m**p for SPD m via the eigendecomposition; batched."""
    w, v = eig_sym(m)
    return np.einsum("...ij,...j,...kj->...ik", v, w ** p, v)


def _spd_matrix(x, name):
    if isinstance(x, StepLengthTensor):
        return x.matrix()
    m = as_matrix(x)
    w, _ = eig_sym(m)
    tr = np.trace(m, axis1=-2, axis2=-1)
    if not np.all(_is_spd(w, tr)):
        raise DomainError(f"{name} is not symmetric positive definite")
    return m


def _f_matrix(f):
    if isinstance(f, DeformationGradient):
        return f.F
    m = as_matrix(f)
    if not np.all(det3(m) > 0):
        raise DomainError("det F must be positive")
    return m


@dataclass(frozen=True)
class AnisoDeformation:
    G: np.ndarray
    L: np.ndarray
    L0: np.ndarray
    F: np.ndarray

    @property
    def norm(self):
        return frobenius(self.G)


def aniso_g(L, L0, F):
    """G = L^(-1/2) F L0^(1/2)."""
    lm = _spd_matrix(L, "L")
    l0 = _spd_matrix(L0, "L0")
    fm = _f_matrix(F)
    g = spd_power(lm, -0.5) @ fm @ spd_power(l0, 0.5)
    return AnisoDeformation(g, lm, l0, fm)


@dataclass(frozen=True)
class InequalityCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    holds: np.ndarray

    @property
    def violations(self):
        return int(np.size(self.holds) - np.count_nonzero(self.holds))


def check_ftlf(L, F):
    """tr(F^T L F) >= lmin(L) |F|^2."""
    lm = as_matrix(L)
    fm = as_matrix(F)
    lhs = np.einsum("...ji,...jk,...ki->...", fm, lm, fm)
    rhs = eig_sym(lm)[0][..., 0] * frobenius(fm) ** 2
    return InequalityCheck(lhs, rhs, lhs >= rhs - CHECK_TOL)


def check_det_over_norm(L):
    """det(L)/|L| >= lmin(L)^2 / sqrt(3)."""
    lm = as_matrix(L)
    lhs = det3(lm) / frobenius(lm)
    rhs = eig_sym(lm)[0][..., 0] ** 2 / np.sqrt(3.0)
    return InequalityCheck(lhs, rhs, lhs >= rhs - CHECK_TOL)


@dataclass(frozen=True)
class GBounds:
    norm_g: np.ndarray
    c1_norm_f: np.ndarray
    norm_adj_g: np.ndarray
    c2_norm_adj_f: np.ndarray
    holds: np.ndarray

    @property
    def violations(self):
        return int(np.size(self.holds) - np.count_nonzero(self.holds))


def g_constants(L, L0):
    c1 = np.sqrt(eig_sym(as_matrix(L0))[0][..., 0] / eig_sym(as_matrix(L))[0][..., 2])
    return c1, c1 ** 2 / 3.0


def check_g_bounds(L, L0, F):
    """|G| >= C1 |F| and |adj G| >= C2 |adj F|, C1 = sqrt(lmin(L0)/lmax(L)), C2 = C1^2/3."""
    lm, l0, fm = as_matrix(L), as_matrix(L0), as_matrix(F)
    g = spd_power(lm, -0.5) @ fm @ spd_power(l0, 0.5)
    c1, c2 = g_constants(lm, l0)
    ng = frobenius(g)
    nf = c1 * frobenius(fm)
    nag = frobenius(adjugate(g))
    naf = c2 * frobenius(adjugate(fm))
    holds = (ng >= nf - CHECK_TOL) & (nag >= naf - CHECK_TOL)
    return GBounds(ng, nf, nag, naf, holds)


# -- random sampling for the oracles --------------------------------------

def random_rotations(rng, n):
    """Haar-distributed rotations, shape (n, 3, 3)."""
    from scipy.spatial.transform import Rotation
    return Rotation.random(n, random_state=rng).as_matrix()


def random_spd(rng, n, low=1e-3, high=1e3):
    """SPD matrices with log-uniform eigenvalues in [low, high]."""
    w = np.exp(rng.uniform(np.log(low), np.log(high), size=(n, 3)))
    r = random_rotations(rng, n)
    return np.einsum("nij,nj,nkj->nik", r, w, r)


def random_deformations(rng, n, scale=1.0):
    """Gaussian matrices with the sign of one row flipped where det < 0."""
    f = rng.normal(scale=scale, size=(n, 3, 3))
    neg = det3(f) < 0
    f[neg, 0, :] *= -1.0
    return f


def random_order_tensors(rng, n, boundary_fraction=0.1):
    """Traceless symmetric matrices with eigenvalues in [-1/3, 2/3].

    A fraction of the samples is pushed exactly onto lmin = -1/3 so that the
    boundary of the admissible set is exercised too.
    """
    out = np.empty((n, 3))
    k = 0
    while k < n:
        l1 = rng.uniform(-THIRD, 2 * THIRD, size=2 * n)
        l2 = rng.uniform(-THIRD, 2 * THIRD, size=2 * n)
        l3 = -(l1 + l2)
        ok = (l3 >= -THIRD) & (l3 <= 2 * THIRD)
        w = np.stack([l1[ok], l2[ok], l3[ok]], axis=1)
        take = min(len(w), n - k)
        out[k:k + take] = w[:take]
        k += take
    nb = int(boundary_fraction * n)
    if nb:
        # lmin = -1/3 and the other two split 1/3 randomly, both in range
        t = rng.uniform(-THIRD, 2 * THIRD, size=nb)
        out[:nb] = np.stack([np.full(nb, -THIRD), t, THIRD - t], axis=1)
    r = random_rotations(rng, n)
    return np.einsum("nij,nj,nkj->nik", r, out, r)
