import numpy as np
import pytest

from etclab import (
    DesignInfeasibleError,
    DimensionError,
    is_hurwitz,
    is_positive_definite,
    solve_lyapunov,
    spectral_norm,
    sym_eigenvalues,
)
from oracles import (
    charpoly_eigenvalues,
    lyapunov_kronecker,
    positive_definite_by_minors,
    power_iteration_norm,
)


class TestSymEigenvalues:
    def test_diagonal(self):
        assert np.allclose(sym_eigenvalues(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    def test_exchange_matrix(self):
        vals = sym_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(vals, [-1.0, 1.0])

    def test_matches_charpoly_bisection_oracle(self, rng):
        m = rng.standard_normal((5, 5))
        m = 0.5 * (m + m.T)
        roots = charpoly_eigenvalues(m)
        assert roots.size == 5  # oracle isolated every root
        assert np.abs(sym_eigenvalues(m) - roots).max() < 1e-9

    def test_nondecreasing_and_trace(self, rng):
        for _ in range(20):
            m = rng.standard_normal((6, 6))
            m = m + m.T
            vals = sym_eigenvalues(m)
            assert np.all(np.diff(vals) >= 0)
            scale = max(1.0, np.abs(vals).max())
            assert abs(vals.sum() - np.trace(m)) <= 1e-9 * scale

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionError):
            sym_eigenvalues(np.zeros((2, 3)))


class TestSpectralNorm:
    def test_identity(self):
        assert spectral_norm(np.eye(2)) == pytest.approx(1.0)

    def test_rank_one_gain(self):
        # B K with B = [0; 1], K = [1, -4] has norm sqrt(17) = 4.1231.
        bk = np.array([[0.0], [1.0]]) @ np.array([[1.0, -4.0]])
        assert spectral_norm(bk) == pytest.approx(np.sqrt(17.0), abs=1e-12)
        assert spectral_norm(bk) == pytest.approx(4.1231, abs=1e-4)

    def test_matches_power_iteration(self, rng):
        m = rng.standard_normal((3, 4))
        assert spectral_norm(m) == pytest.approx(power_iteration_norm(m), abs=1e-9)

    def test_transpose_invariance(self, rng):
        for _ in range(10):
            m = rng.standard_normal((4, 7))
            assert abs(spectral_norm(m) - spectral_norm(m.T)) <= 1e-12


class TestIsPositiveDefinite:
    def test_identity(self):
        assert is_positive_definite(np.eye(3))

    def test_indefinite(self):
        # eigenvalues -1 and 3
        assert not is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_agrees_with_minors_oracle(self, rng):
        for n in (2, 3):
            for _ in range(50):
                m = rng.standard_normal((n, n))
                m = m + m.T + rng.uniform(-1, 2) * np.eye(n)
                assert is_positive_definite(m) == positive_definite_by_minors(m)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            is_positive_definite(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestHurwitz:
    def test_examples(self):
        assert is_hurwitz(np.array([[0.0, 1.0], [-1.0, -1.0]]))
        assert not is_hurwitz(np.array([[0.0, 1.0], [-2.0, 3.0]]))


def _random_stable(rng, n):
    a = rng.standard_normal((n, n))
    shift = np.linalg.eigvals(a).real.max() + rng.uniform(0.2, 2.0)
    return a - shift * np.eye(n)


def _random_spd(rng, n):
    m = rng.standard_normal((n, n))
    return m @ m.T + 0.1 * np.eye(n)


class TestSolveLyapunov:
    def test_analytic(self):
        p = solve_lyapunov(-np.eye(2), np.eye(2))
        assert np.allclose(p, 0.5 * np.eye(2), atol=1e-12)

    def test_matches_kronecker_oracle(self):
        a = np.array([[0.0, 1.0], [-1.0, -1.0]])
        p = solve_lyapunov(a, np.eye(2))
        assert np.abs(p - lyapunov_kronecker(a, np.eye(2))).max() < 1e-9

    def test_residual_and_symmetry_random(self, rng):
        for _ in range(10):
            a = _random_stable(rng, 4)
            q = _random_spd(rng, 4)
            p = solve_lyapunov(a, q)
            assert np.abs(p - p.T).max() <= 1e-10
            residual = spectral_norm(a.T @ p + p @ a + q)
            assert residual <= 1e-8 * spectral_norm(q)

    def test_rejects_unstable(self):
        with pytest.raises(DesignInfeasibleError):
            solve_lyapunov(np.array([[1.0]]), np.array([[1.0]]))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            solve_lyapunov(-np.eye(2), np.eye(3))
