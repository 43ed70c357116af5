"""Symmetric 3x3 tensors, order tensors and the triangle of admissible states.

Most functions accept either the small value types defined here or plain
numpy arrays.  Array inputs may carry leading batch dimensions, shape
``(..., 3, 3)``, which is what the randomized checks rely on.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

STRUCT_TOL = 1e-12
BOUNDARY_TOL = 1e-10
DET_TOL = 1e-12

THIRD = 1.0 / 3.0
_ID = np.eye(3)


def as_matrix(m):
    """Return ``m`` as a float array of shape (..., 3, 3)."""
    if isinstance(m, SymTensor3):
        return m.matrix()
    if isinstance(m, OrderTensor):
        return m.Q.matrix()
    a = np.asarray(m, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise DomainError(f"expected a 3x3 matrix, got shape {a.shape}")
    return a


def frobenius(m):
    a = as_matrix(m)
    return np.sqrt(np.einsum("...ij,...ij->...", a, a))


def det3(m):
    """Determinant by cofactor expansion along the first row."""
    a = as_matrix(m)
    return (a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]))


def adjugate(m):
    """Transpose of the cofactor matrix, so that ``m @ adj(m) = det(m) I``."""
    a = as_matrix(m)
    c = np.empty_like(a)
    c[..., 0, 0] = a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1]
    c[..., 0, 1] = a[..., 0, 2] * a[..., 2, 1] - a[..., 0, 1] * a[..., 2, 2]
    c[..., 0, 2] = a[..., 0, 1] * a[..., 1, 2] - a[..., 0, 2] * a[..., 1, 1]
    c[..., 1, 0] = a[..., 1, 2] * a[..., 2, 0] - a[..., 1, 0] * a[..., 2, 2]
    c[..., 1, 1] = a[..., 0, 0] * a[..., 2, 2] - a[..., 0, 2] * a[..., 2, 0]
    c[..., 1, 2] = a[..., 0, 2] * a[..., 1, 0] - a[..., 0, 0] * a[..., 1, 2]
    c[..., 2, 0] = a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]
    c[..., 2, 1] = a[..., 0, 1] * a[..., 2, 0] - a[..., 0, 0] * a[..., 2, 1]
    c[..., 2, 2] = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    return c


@dataclass(frozen=True)
class SymTensor3:
    """Symmetric 3x3 matrix stored as its six independent components."""

    xx: float
    yy: float
    zz: float
    yz: float
    xz: float
    xy: float

    @classmethod
    def from_matrix(cls, m, tol=STRUCT_TOL):
        a = as_matrix(m)
        if a.shape != (3, 3):
            raise DomainError("SymTensor3 holds a single matrix")
        if np.max(np.abs(a - a.T)) > tol * (1.0 + frobenius(a)):
            raise DomainError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        return cls(float(a[0, 0]), float(a[1, 1]), float(a[2, 2]),
                   float(a[1, 2]), float(a[0, 2]), float(a[0, 1]))

    @classmethod
    def diag(cls, a, b, c):
        return cls(float(a), float(b), float(c), 0.0, 0.0, 0.0)

    def matrix(self):
        return np.array([[self.xx, self.xy, self.xz],
                         [self.xy, self.yy, self.yz],
                         [self.xz, self.yz, self.zz]])

    @property
    def trace(self):
        return self.xx + self.yy + self.zz

    @property
    def det(self):
        return float(det3(self.matrix()))

    @property
    def norm(self):
        return float(frobenius(self.matrix()))


def eig_sym(m):
    """Eigenvalues in ascending order and an orthonormal eigenvector frame.

    Eigenvectors are the columns of the returned frame.  Each column is
    flipped so that its largest-magnitude component (first one on ties) is
    positive, which makes the output reproducible.
    """
    a = as_matrix(m)
    w, v = np.linalg.eigh(a)
    idx = np.argmax(np.abs(v), axis=-2)[..., None, :]
    lead = np.take_along_axis(v, idx, axis=-2)
    v = v * np.where(lead < 0, -1.0, 1.0)
    return w, v


def triangle_coords(eigenvalues):
    """Biaxial coordinates (r, s) from ascending eigenvalues.

    Uses s = 2 l1 + l2 and r = l1 + 2 l2.  With ascending order both are
    non-positive; the prolate uniaxial state with order s0 > 0 maps to
    r = s = -s0.
    """
    w = np.asarray(eigenvalues, dtype=float)
    return w[..., 0] + 2.0 * w[..., 1], 2.0 * w[..., 0] + w[..., 1]


def edge_functionals(r, s):
    """The three edge functionals of the triangle; all positive inside."""
    return np.stack([1.0 - (r + s), 1.0 - (r - 2.0 * s), 1.0 - (s - 2.0 * r)], axis=-1)


_EDGE_NORMS = np.array([np.sqrt(2.0), np.sqrt(5.0), np.sqrt(5.0)])


@dataclass(frozen=True)
class OrderTensor:
    """Traceless symmetric tensor with eigenvalues in [-1/3, 2/3]."""

    Q: SymTensor3
    eigenvalues: tuple = field(init=False)
    r: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        m = self.Q.matrix()
        scale = 1.0 + frobenius(m)
        if abs(np.trace(m)) > STRUCT_TOL * scale:
            raise DomainError(f"order tensor must be traceless, trace = {np.trace(m):.3e}")
        w, _ = eig_sym(m)
        if w[0] < -THIRD - STRUCT_TOL * scale or w[2] > 2 * THIRD + STRUCT_TOL * scale:
            raise DomainError(f"eigenvalues {w} outside [-1/3, 2/3]")
        r, s = triangle_coords(w)
        object.__setattr__(self, "eigenvalues", tuple(float(x) for x in w))
        object.__setattr__(self, "r", float(r))
        object.__setattr__(self, "s", float(s))

    @classmethod
    def from_matrix(cls, m):
        return cls(SymTensor3.from_matrix(m))

    def matrix(self):
        return self.Q.matrix()

    @property
    def lmin(self):
        return self.eigenvalues[0]

    @property
    def lmax(self):
        return self.eigenvalues[2]


def _check_unit(n):
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise DomainError("director must be a 3-vector")
    if abs(np.linalg.norm(n) - 1.0) > STRUCT_TOL:
        raise DomainError(f"director is not a unit vector, |n| = {np.linalg.norm(n)!r}")
    return n


def uniaxial_q(s, n):
    """Uniaxial order tensor s (n n^T - I/3); s > 0 is prolate."""
    if not (-0.5 < s < 1.0):
        raise DomainError(f"order parameter s = {s} outside (-1/2, 1)")
    n = _check_unit(n)
    return OrderTensor.from_matrix(s * (np.outer(n, n) - THIRD * _ID))


def uniaxial_matrix(s, n):
    """Unchecked array version of :func:`uniaxial_q`, broadcasting over s."""
    s = np.asarray(s, dtype=float)[..., None, None]
    n = np.asarray(n, dtype=float)
    return s * (np.einsum("...i,...j->...ij", n, n) - THIRD * _ID)


@dataclass(frozen=True)
class TrianglePosition:
    r: float
    s: float
    classification: str
    distance: float
    det_shifted: float


def triangle_classify(q):
    """Locate an order tensor relative to the admissible triangle.

    The shifted determinant det(Q + I/3) equals the product of the three
    edge functionals over 27, so it vanishes exactly on the boundary.  The
    classification uses it with tolerance ``DET_TOL``.
    """
    if not isinstance(q, OrderTensor):
        q = OrderTensor.from_matrix(q)
    d = float(det3(q.matrix() + THIRD * _ID))
    e = edge_functionals(q.r, q.s)
    dist = float(np.min(e / _EDGE_NORMS))
    if abs(d) <= DET_TOL:
        label = "boundary"
    elif d > 0:
        label = "interior"
    else:
        label = "exterior"
    return TrianglePosition(q.r, q.s, label, dist, d)


def q_from_triangle(r, s, frame=None):
    """Order tensor matrix r(e1 e1 - I/3) + s(e2 e2 - I/3) in a given frame."""
    e = _ID if frame is None else np.asarray(frame, dtype=float)
    e1, e2 = e[..., :, 0], e[..., :, 1]
    r = np.asarray(r, dtype=float)[..., None, None]
    s = np.asarray(s, dtype=float)[..., None, None]
    return (r * (np.einsum("...i,...j->...ij", e1, e1) - THIRD * _ID)
            + s * (np.einsum("...i,...j->...ij", e2, e2) - THIRD * _ID))
