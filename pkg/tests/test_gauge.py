import math

import numpy as np
import pytest

from spectra_lab.errors import NonMultiplicationInput, ZeroFrequency
from spectra_lab.frequency import algebraic_sum, freq
from spectra_lab.gauge import (CutoffFamily, cutoff_eval, first_order_psi,
                               run_gauge, verify_b3)
from spectra_lab.symbols import (QuadShift, Symbol, XiGrid, is_symmetric,
                                 laplace_symbol, multiplication_symbol,
                                 op_matrix)
from spectra_lab.zones import ZoneParameters, sample_annulus

RHO = 1000.0


@pytest.fixture(scope="module")
def cf1():
    zp = ZoneParameters.create(RHO, 1)
    return CutoffFamily(RHO, zp.beta), zp


@pytest.fixture(scope="module")
def cf2():
    zp = ZoneParameters.create(RHO, 2)
    return CutoffFamily(RHO, zp.beta), zp


def _mathieu(basis, v):
    return multiplication_symbol({freq([1], basis): v, freq([-1], basis): v})


def test_cutoff_e_plateau(rational_basis, cf1):
    cf, _ = cf1
    th = freq([1], rational_basis)
    # |xi + theta/2| = 3 rho -> argument 0 -> 1
    assert cutoff_eval("e", th, np.array([3 * RHO - 0.5]), cf) == 1.0
    # far outside the shell -> 0
    assert cutoff_eval("e", th, np.array([10 * RHO]), cf) == 0.0


def test_cutoff_phi_and_chi(rational_basis, cf1):
    cf, _ = cf1
    th = freq([1], rational_basis)
    # <theta, xi + theta/2> = 0 -> phi = 0 and chi = 0/0 = 0
    xi = np.array([-0.5])
    assert cutoff_eval("phi", th, xi, cf) == 0.0
    assert cutoff_eval("chi", th, xi, cf) == 0.0
    with pytest.raises(ZeroFrequency):
        cutoff_eval("phi", freq([0], rational_basis), xi, cf)


def test_cutoff_ranges(rational_basis, cf1, rng):
    cf, _ = cf1
    th = freq([1], rational_basis)
    xi = rng.uniform(-5 * RHO, 5 * RHO, size=(300, 1))
    e = cutoff_eval("e", th, xi, cf)
    p = cutoff_eval("phi", th, xi, cf)
    assert ((0 <= e) & (e <= 1)).all()
    assert ((0 <= p) & (p <= 1)).all()


def test_cutoff_symmetry_identity(rational_basis, cf1, rng):
    # e_theta(xi) = e_{-theta}(xi + theta), same for phi
    cf, _ = cf1
    th = freq([1], rational_basis)
    xi = rng.uniform(-4 * RHO, 4 * RHO, size=(200, 1))
    t = th.to_float()
    for kind in ("e", "phi"):
        a = cutoff_eval(kind, th, xi, cf)
        b = cutoff_eval(kind, -th, xi + t, cf)
        assert np.abs(np.asarray(a) - np.asarray(b)).max() < 1e-12


def test_first_order_psi_formula(rational_basis, cf1, rng):
    cf, _ = cf1
    v = 0.37
    b = _mathieu(rational_basis, v)
    psi1 = first_order_psi(b, cf)
    th = freq([1], rational_basis)
    xi = rng.uniform(0.5 * RHO, 4 * RHO, size=(100, 1))
    got = psi1.coeff(th).eval(xi)
    e = cutoff_eval("e", th, xi, cf)
    p = cutoff_eval("phi", th, xi, cf)
    want = 1j * v * e * p / (2.0 * (xi[:, 0] + 0.5))
    assert np.abs(got - want).max() < 1e-14


def test_requires_multiplication_symbol(rational_basis, cf1, mathieu1d):
    cf, _ = cf1
    bad = Symbol({freq([1], rational_basis): QuadShift([0.0])})
    with pytest.raises(NonMultiplicationInput):
        run_gauge(bad, 1, cf, mathieu1d)


def test_gauge_zero_potential(rational_basis, cf1, mathieu1d):
    cf, _ = cf1
    zero = Symbol({})
    out = run_gauge(zero, 2, cf, mathieu1d)
    assert out.w.is_zero() or all(
        th.is_zero() for th in out.w.support())
    assert all(p.is_zero() for p in out.psi)


def test_ktilde1_closed_form(rational_basis, cf1, mathieu1d, rng):
    cf, zp = cf1
    v = 0.25
    b = _mathieu(rational_basis, v)
    out = run_gauge(b, 1, cf, mathieu1d)
    th = freq([1], rational_basis)
    xi = sample_annulus(1, RHO, 100, rng)
    e = cutoff_eval("e", th, xi, cf)
    p = cutoff_eval("phi", th, xi, cf)
    want = v * (1.0 - e * p)
    got = out.w.coeff(th).eval(xi)
    assert np.abs(got - want).max() == 0.0


def test_gauge_symmetry_and_support(rational_basis, cf1, mathieu1d, rng):
    cf, zp = cf1
    b = _mathieu(rational_basis, 0.25)
    out = run_gauge(b, 2, cf, mathieu1d)
    pts = sample_annulus(1, RHO, 150, rng)
    grid = XiGrid(pts, zp.beta)
    assert is_symmetric(out.psi[0], grid)
    assert is_symmetric(out.psi[1], grid)
    assert is_symmetric(out.w, grid)
    theta2 = set(algebraic_sum(mathieu1d, 2).elements)
    assert set(out.w.support()) <= theta2


def test_verify_b3_mathieu(rational_basis, cf1, mathieu1d, rng):
    cf, zp = cf1
    b = _mathieu(rational_basis, 0.25)
    out = run_gauge(b, 2, cf, mathieu1d)
    pts = sample_annulus(1, RHO, 400, rng)
    rep = verify_b3(out, pts, mathieu1d, zp)
    assert rep["passed"]
    assert rep["checked"] > 0


def test_norm_ladder_decreases(rational_basis, cf1, mathieu1d, rng):
    cf, zp = cf1
    b = _mathieu(rational_basis, 0.25)
    grid = XiGrid(sample_annulus(1, RHO, 200, rng), zp.beta)
    out = run_gauge(b, 3, cf, mathieu1d, norm_grid=grid)
    ladder = [e["norm"] for e in out.diagnostics["psi_norm_ladder"]]
    assert ladder[0] > ladder[1] > ladder[2]
    assert "remainder_norm" in out.diagnostics


def test_finite_matrix_conjugation_crosscheck(rational_basis, cf1, mathieu1d, rng):
    """Independent check of the order-2 construction: conjugate the operator
    matrix on a frequency window by exp(i Psi) (3-commutator truncation) and
    compare against the matrix of the gauged symbol w."""
    cf, zp = cf1
    v = 0.1
    b = _mathieu(rational_basis, v)
    out = run_gauge(b, 2, cf, mathieu1d)
    H_sym = laplace_symbol(1, rational_basis) + b
    psi_sym = out.psi[0] + out.psi[1]
    w_sym = laplace_symbol(1, rational_basis) + out.w

    J = 6
    for _ in range(20):
        base = rng.uniform(0.8 * RHO, 1.2 * RHO)
        etas = [freq([j], rational_basis) for j in range(-J, J + 1)]
        shift = np.array([base])
        H = _op_matrix_at(H_sym, etas, shift)
        P = _op_matrix_at(psi_sym, etas, shift)
        W = _op_matrix_at(w_sym, etas, shift)
        iP = 1j * P
        A = H.copy()
        C = H.copy()
        fact = 1.0
        for l in range(1, 4):
            C = C @ iP - iP @ C
            fact *= l
            A = A + C / fact
        # compare central columns; edges are polluted by window truncation
        mid = slice(J - 2, J + 3)
        assert np.abs(A[mid, mid] - W[mid, mid]).max() < 1e-5


def _op_matrix_at(sym, etas, shift):
    n = len(etas)
    M = np.zeros((n, n), dtype=complex)
    for j, eta in enumerate(etas):
        xi = eta.to_float() + shift
        for i, etap in enumerate(etas):
            ex = sym.coeffs.get(etap - eta)
            if ex is not None:
                M[i, j] = complex(ex.eval(xi))
    return M
