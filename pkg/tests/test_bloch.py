import math

import numpy as np
import pytest

from spectra_lab.bloch import (BlochOracle1D, build_fiber, fiber_spectrum,
                               free_lds_d1, free_lds_d2, lattice_fourier,
                               spectral_function)
from spectra_lab.errors import NonLatticeFrequencies, TruncationCeiling
from spectra_lab.frequency import GeneratorBasis, freq

MATHIEU = {(1,): 0.3, (-1,): 0.3}


def test_lattice_fourier_normalization():
    four = lattice_fourier(MATHIEU, 1)
    assert four == {(1,): 0.3 + 0j, (-1,): 0.3 + 0j}
    with pytest.raises(NonLatticeFrequencies):
        lattice_fourier({(0.5,): 1.0}, 1)
    basis = GeneratorBasis(2)
    surd = freq([(0, 1)], basis)
    with pytest.raises(NonLatticeFrequencies):
        lattice_fourier({surd: 1.0}, 1)
    with pytest.raises(NonLatticeFrequencies):
        lattice_fourier({(1, 0): 1.0}, 1)  # dimension mismatch


def test_fiber_free_diagonal():
    fib = build_fiber(0.25, {}, 4, d=1)
    M = fib.matrix
    assert np.allclose(M, np.diag(np.diag(M)))
    ms = np.arange(-4, 5)
    assert np.allclose(np.sort(np.diag(M).real), np.sort((0.25 + ms) ** 2))


def test_fiber_mathieu_tridiagonal():
    fib = build_fiber(0.1, MATHIEU, 5, d=1)
    M = fib.matrix
    assert np.allclose(M, M.conj().T)
    off = M - np.diag(np.diag(M))
    i, j = np.nonzero(np.abs(off) > 1e-15)
    assert (np.abs(i - j) == 1).all()
    assert np.allclose(off[i, j], 0.3)


def test_fiber_spectrum_orthonormal():
    fib = build_fiber(0.13, MATHIEU, 8, d=1)
    spec = fiber_spectrum(fib)
    assert (np.diff(spec.energies) >= -1e-12).all()
    G = spec.vectors.conj().T @ spec.vectors
    assert np.allclose(G, np.eye(G.shape[0]), atol=1e-12)


def test_projector_idempotent():
    fib = build_fiber(0.13, MATHIEU, 8, d=1)
    spec = fiber_spectrum(fib)
    sel = spec.energies <= 9.0
    P = spec.vectors[:, sel] @ spec.vectors[:, sel].conj().T
    assert np.linalg.norm(P @ P - P, 2) < 1e-10


def test_free_on_diagonal_d1():
    val = spectral_function(4.0, 0.0, 0.0, {}, 20, 2048, d=1)
    assert abs(val - 2.0 / math.pi) < 1e-4


def test_free_off_diagonal_d1():
    z = 0.8
    val = spectral_function(4.0, 0.0, z, {}, 20, 2048, d=1)
    assert abs(val - math.sin(2 * z) / (math.pi * z)) < 1e-3


def test_free_on_diagonal_d2():
    val = spectral_function(1.0, np.zeros(2), np.zeros(2), {}, 6, 64, d=2)
    assert abs(val - 1.0 / (4 * math.pi)) < 2e-3


def test_free_fast_paths():
    lams = np.geomspace(100.0, 10000.0, 10)
    N1 = free_lds_d1(lams, 4096)
    assert np.max(np.abs(N1 / (np.sqrt(lams) / math.pi) - 1)) < 1e-4
    lams2 = np.geomspace(10.0, 200.0, 8)
    N2 = free_lds_d2(lams2, 512)
    assert np.max(np.abs(N2 / (lams2 / (4 * math.pi)) - 1)) < 1e-4


def test_truncation_ceiling():
    with pytest.raises(TruncationCeiling):
        spectral_function(500.0, 0.0, 0.0, MATHIEU, 10, 64, d=1)


def test_monotone_in_lambda():
    lams = np.linspace(2.0, 80.0, 25)
    vals = spectral_function(lams, 0.2, 0.2, MATHIEU, 30, 256, d=1)
    assert (np.diff(vals) >= -1e-10).all()


def test_symmetry_and_reality():
    a = spectral_function(30.0, 0.1, 0.9, MATHIEU, 30, 256, d=1)
    b = spectral_function(30.0, 0.9, 0.1, MATHIEU, 30, 256, d=1)
    assert isinstance(a, float)
    assert abs(a - b) < 1e-12


def test_mcut_convergence():
    lam = 50.0
    v1 = spectral_function(lam, 0.3, 0.3, MATHIEU, 16, 512, d=1)
    v2 = spectral_function(lam, 0.3, 0.3, MATHIEU, 32, 512, d=1)
    assert abs(v1 - v2) < 1e-8


def test_oracle_consistent_with_midpoint():
    oracle = BlochOracle1D(MATHIEU, M_cut=30)
    lam = np.array([200.0])
    a = float(oracle.evaluate(lam, 0.4)[0])
    b = float(np.atleast_1d(spectral_function(lam, 0.4, 0.4, MATHIEU, 30, 4096, d=1))[0])
    assert abs(a - b) / a < 1e-3


def test_oracle_free_case_exact():
    oracle = BlochOracle1D({}, M_cut=60)
    lams = np.geomspace(50.0, 800.0, 6)
    vals = oracle.evaluate(lams, 0.0)
    assert np.max(np.abs(vals / (np.sqrt(lams) / math.pi) - 1)) < 1e-10
