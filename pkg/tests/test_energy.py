import numpy as np
import pytest

from rodnet import energy as en
from rodnet.constitutive import l_matrix_from_q, random_deformations, random_rotations, random_spd
from rodnet.errors import DomainError
from rodnet.tensor import uniaxial_matrix, uniaxial_q

E3 = np.array([0.0, 0.0, 1.0])

# frozen from a 30-digit independent evaluation of the closed forms
F_DENSE = 4.03894774033718146719918590297           # f(0.3, z=0.8), chi = 2, dense wells
F_DILUTE = 130.508827708239124790721959348          # f(-0.2, z=1.7), chi = 80, dilute wells
EXP_CONST = 18.9877909613487258687967436119         # expansion, alpha = -2
EXP_DERIVED = 18.4342909613487258687967436119
PLANE_DERIVED = 29.4715509543095185368899810322


def _params(**kw):
    return en.MaterialParams(**{"sigma_x0": 3.0, "A_a": 5.0, "chi": 2.0, **kw})


def test_oracle_bulk_dense():
    assert float(en.bulk_f(0.3, 0.8, 2.0, en.DENSE_WELLS)) == pytest.approx(F_DENSE, rel=1e-13)


def test_oracle_bulk_dilute():
    assert float(en.bulk_f(-0.2, 1.7, 80.0, en.DILUTE_WELLS)) == pytest.approx(F_DILUTE, rel=1e-13)


def test_oracle_expansion():
    p = _params(alpha_mode="constant", alpha_value=-2.0)
    assert float(en.total_energy_expansion(0.3, 1.25, p)) == pytest.approx(EXP_CONST, rel=1e-13)
    p = _params()
    assert float(en.total_energy_expansion(0.3, 1.25, p)) == pytest.approx(EXP_DERIVED, rel=1e-13)


def test_oracle_plane():
    e = en.total_energy_plane_strain(0.3, 0.4, 1.1, _params(), lam2=0.9)
    assert float(e) == pytest.approx(PLANE_DERIVED, rel=1e-13)


def test_btw_identity_isotropic():
    assert en.btw_energy(np.eye(3), 0.0, E3, 2.0) == pytest.approx(3.0)


@pytest.mark.parametrize("s", [-0.3, 0.2, 0.6])
def test_btw_matches_trace_form(rng, s):
    # with L = a0 (Q + I/3) and an isotropic reference L0 = (a0/3) I
    a0 = 3.0
    n = random_rotations(rng, 1)[0][:, 2]
    F = random_deformations(rng, 1)[0]
    L = l_matrix_from_q(uniaxial_matrix(s, n), 1.0, a0)
    L0 = a0 / 3.0 * np.eye(3)
    w = en.btw_energy(F, s, n, 1.7, a0=a0)
    assert w == pytest.approx(float(en.trace_energy_direct(L, L0, F, 1.7)), rel=1e-11)


def test_btw_diag_matches_full():
    s, th = 0.35, 0.7
    n = np.array([np.cos(th), 0.0, np.sin(th)])
    F = np.diag([1.2, 0.8, 1.0])
    w, _ = en.btw_diag(s, np.cos(th) ** 2, 1.2, 0.8, 1.0, 2.5)
    assert float(w) == pytest.approx(en.btw_energy(F, s, n, 2.5), rel=1e-13)


def test_btw_constant_mode_reduces():
    w, _ = en.btw_diag(0.0, 1.0, 1.0, 1.0, 1.0, 3.0, "constant", -2.0)
    assert float(w) == pytest.approx(0.5 * 3.0 * (3.0 + 2.0))


def test_btw_rejects_domain():
    with pytest.raises(DomainError):
        en.btw_energy(np.eye(3), 1.0, E3, 1.0)


def test_anisotropy_derived():
    a, da = en.anisotropy(0.5)
    assert float(a) == pytest.approx(0.75)
    assert float(da) == pytest.approx(0.75)


def test_trace_energy_two_routes(rng):
    L, L0 = random_spd(rng, 200, 0.1, 10.0), random_spd(rng, 200, 0.1, 10.0)
    F = random_deformations(rng, 200)
    a = np.array([en.trace_energy_from(L[k], L0[k], F[k], 2.0) for k in range(200)])
    b = en.trace_energy_direct(L, L0, F, 2.0)
    assert np.allclose(a, b, rtol=1e-10)


def test_ldg_uniaxial_reduction():
    c = en.LdGCoefficients(alpha_T=1.0, T=0.5, T_NI=1.0, b=2.0, c=3.0)
    for s in (-0.4, 0.1, 0.7):
        expect = c.a * 2 * s * s / 3 - c.b * 2 * s ** 3 / 27 + c.c * s ** 4 / 9
        assert float(en.ldg_poly(uniaxial_q(s, E3).matrix(), c)) == pytest.approx(expect, abs=1e-14)


def test_ldg_rotation_invariant(rng):
    c = en.LdGCoefficients(1.0, 0.2, 1.0, 1.5, 2.0)
    q = uniaxial_matrix(0.4, np.array([0.0, 0.6, 0.8]))
    R = random_rotations(rng, 20)
    rot = R @ q @ np.swapaxes(R, -1, -2)
    assert np.allclose(en.ldg_poly(rot, c), en.ldg_poly(q, c), atol=1e-14)


def test_ldg_coefficient_a():
    assert en.LdGCoefficients(2.0, 3.0, 1.0, 1.0, 1.0).a == pytest.approx(2.0)
    with pytest.raises(DomainError):
        en.LdGCoefficients(0.0, 3.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("s, z", [(-0.5, 1.0), (1.0, 1.0), (0.2, 0.0), (0.2, -1.0)])
def test_bulk_rejects_domain(s, z):
    with pytest.raises(DomainError):
        en.bulk_f(s, z, 1.0, en.DENSE_WELLS)


def test_bulk_wells_validate():
    with pytest.raises(DomainError):
        en.BulkWellParams(eta_i=-1.0)
    with pytest.raises(DomainError):
        en.BulkWellParams(s_n=1.0)
    assert en.BulkWellParams.with_nematic_density(1.5).z_n == pytest.approx(2 / 3)


def test_material_params_derived():
    p = en.MaterialParams(RT=2.0, sigma_x0=3.0, A_a=4.0, rho0=0.5)
    assert (p.mu, p.nu) == (6.0, 4.0)
    with pytest.raises(DomainError):
        en.MaterialParams(chi=0.0)
    with pytest.raises(DomainError):
        en.MaterialParams(alpha_mode="other")


def test_chi_is_linear_weight():
    s, z = 0.3, 0.9
    a = en.bulk_f(s, z, 1.0, en.DENSE_WELLS)
    b = en.bulk_f(s, z, 3.0, en.DENSE_WELLS)
    _, wn, _ = en.bulk_terms(s, z, en.DENSE_WELLS)
    assert float(b - a) == pytest.approx(2.0 * float(wn))


def _fd_check(fun, grad, pts, h=1e-6):
    for x in pts:
        g = grad(*x)
        for k in range(len(x)):
            xp, xm = list(x), list(x)
            xp[k] += h
            xm[k] -= h
            num = (fun(*xp) - fun(*xm)) / (2 * h)
            assert float(g[k]) == pytest.approx(float(num), rel=1e-6, abs=1e-6)


def test_bulk_gradient_against_differences(rng):
    pts = np.column_stack([rng.uniform(-0.45, 0.95, 1000), rng.uniform(0.1, 3.0, 1000)])
    for chi, w in ((2.0, en.DENSE_WELLS), (80.0, en.DILUTE_WELLS)):
        _fd_check(lambda s, z: en.bulk_f(s, z, chi, w), lambda s, z: en.bulk_f_grad(s, z, chi, w),
                  pts)


@pytest.mark.parametrize("mode", ["derived", "constant"])
def test_expansion_derivatives(rng, mode):
    p = _params(alpha_mode=mode)
    pts = np.column_stack([rng.uniform(-0.45, 0.95, 1000), rng.uniform(0.4, 3.0, 1000)])
    _fd_check(lambda s, r: en.total_energy_expansion(s, r, p),
              lambda s, r: (en.expansion_energy_ds(s, r, p), en.expansion_energy_drho(s, r, p)),
              pts)


@pytest.mark.parametrize("mode", ["derived", "constant"])
def test_plane_derivatives(rng, mode):
    p = _params(alpha_mode=mode)
    n = 1000
    s = rng.uniform(-0.45, 0.95, n)
    th = rng.uniform(0, np.pi, n)
    lam = rng.uniform(0.6, 2.0, n)
    lam2 = rng.uniform(0.6, 2.0, n)
    h = 1e-6
    num_s = (en.total_energy_plane_strain(s + h, th, lam, p, lam2)
             - en.total_energy_plane_strain(s - h, th, lam, p, lam2)) / (2 * h)
    num_l = (en.total_energy_plane_strain(s, th, lam + h, p, lam2)
             - en.total_energy_plane_strain(s, th, lam - h, p, lam2)) / (2 * h)
    num_e = (en.total_energy_plane_strain(s, th, lam + h, p)
             - en.total_energy_plane_strain(s, th, lam - h, p)) / (2 * h)
    assert np.allclose(en.plane_energy_ds(s, th, lam, p, lam2), num_s, rtol=1e-6, atol=1e-6)
    assert np.allclose(en.plane_energy_dlam1(s, th, lam, p, lam2), num_l, rtol=1e-6, atol=1e-6)
    assert np.allclose(en.plane_energy_dlam(s, th, lam, p), num_e, rtol=1e-6, atol=1e-6)


def test_energy_linear_in_nu():
    p = _params()
    s = np.linspace(-0.4, 0.9, 30)
    e = [en.total_energy_expansion(s, 1.3, p, nu=v) for v in (0.0, 1.0, 2.0)]
    assert np.allclose(e[2] - e[1], e[1] - e[0], rtol=1e-12)


def test_plane_theta_symmetries():
    p = _params()
    s = np.linspace(-0.4, 0.9, 15)
    e = en.total_energy_plane_strain(s, 0.3, 1.2, p)
    assert np.allclose(en.total_energy_plane_strain(s, -0.3, 1.2, p), e, rtol=1e-14)
    assert np.allclose(en.total_energy_plane_strain(s, np.pi - 0.3, 1.2, p), e, rtol=1e-14)


def test_plane_energy_linear_in_cos2():
    p = _params()
    e = [float(en.total_energy_plane_strain(0.4, 0, 1.3, p, cos2=c)) for c in (0.0, 0.5, 1.0)]
    assert e[1] == pytest.approx(0.5 * (e[0] + e[2]), rel=1e-13)


def test_energy_surface_rows():
    p = _params()
    rows = en.energy_surface(p, [0.0, 0.5], [1.0, 2.0])
    assert len(rows) == 4 and len(rows[0]) == len(en.SURFACE_COLUMNS)
    s, z, rho, f, wi, wn, wg, tot = rows[1]
    assert f == pytest.approx(wi + p.chi * wn + wg)
    assert tot == pytest.approx(float(en.total_energy_expansion(s, rho, p)))
