"""System construction, rotation-based diagonalisation (checked against
numpy's symmetric eigensolver as an independent oracle), coercivity, and
the two coupling-condition routes."""

import numpy as np
import pytest
from helpers import damped_wave_system, random_valid_system, three_speed_system

from locdamp.model import (
    EigenStructure,
    FullDampingMatrix,
    HyperbolicSystem,
    diagonalize,
    coupling_check_eigvec,
    coupling_check_rank,
    source_matrix,
    validate_system,
)


class TestConstruction:
    def test_shape_checks(self):
        with pytest.raises(ValueError, match="square"):
            HyperbolicSystem(a=np.zeros((2, 3)), n1=1, dd=np.eye(1))
        with pytest.raises(ValueError, match="n1"):
            HyperbolicSystem(a=np.eye(2), n1=2, dd=np.eye(1))
        with pytest.raises(ValueError, match="n1"):
            HyperbolicSystem(a=np.eye(2), n1=-1, dd=np.eye(1))
        with pytest.raises(ValueError, match="dd"):
            HyperbolicSystem(a=np.eye(3), n1=1, dd=np.eye(1))

    def test_finite_entries_required(self):
        with pytest.raises(ValueError, match="finite"):
            HyperbolicSystem(a=np.array([[np.nan, 0.0], [0.0, 1.0]]), n1=1, dd=np.eye(1))

    def test_arrays_frozen(self):
        sys = damped_wave_system()
        with pytest.raises(ValueError):
            sys.a[0, 0] = 5.0

    def test_full_damping_layout(self):
        sys = damped_wave_system()
        b = sys.full_damping().matrix
        assert b.shape == (2, 2)
        assert b[0, 0] == 0.0 and b[0, 1] == 0.0 and b[1, 0] == 0.0
        assert b[1, 1] == 1.0


class TestDiagonalize:
    def test_antidiagonal_pair(self):
        eigs = diagonalize([[0.0, 1.0], [1.0, 0.0]])
        assert eigs.lambdas == pytest.approx([-1.0, 1.0], abs=1e-13)
        assert eigs.p == 1
        s = 1.0 / np.sqrt(2.0)
        assert eigs.basis[:, 0] == pytest.approx([s, -s], abs=1e-13)
        assert eigs.basis[:, 1] == pytest.approx([s, s], abs=1e-13)

    def test_constant_offdiagonal(self):
        eigs = diagonalize([[1.0, 2.0], [2.0, 1.0]])
        assert eigs.lambdas == pytest.approx([-1.0, 3.0], abs=1e-13)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            diagonalize([[0.0, 1.0], [0.0, 0.0]])

    def test_matches_numpy_eigensolver(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            m = rng.standard_normal((n, n))
            a = 0.5 * (m + m.T)
            eigs = diagonalize(a)
            scale = max(1.0, np.abs(eigs.lambdas).max())
            assert eigs.lambdas == pytest.approx(
                np.linalg.eigvalsh(a), abs=1e-10 * scale
            )
            q = eigs.basis
            assert np.abs(q.T @ q - np.eye(n)).max() < 1e-12
            assert np.abs(a @ q - q * eigs.lambdas).max() < 1e-9 * scale
            assert eigs.p == int(np.sum(eigs.lambdas < 0))

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(43)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            m = rng.standard_normal((n, n))
            a = 0.5 * (m + m.T)
            basis = diagonalize(a).basis
            for k in range(n):
                col = basis[:, k]
                lead = np.flatnonzero(np.abs(col) > 1e-12)
                assert col[lead[0]] > 0.0

    def test_from_speeds_constructor(self):
        eigs = EigenStructure.from_speeds([3.0, -1.0, 2.0])
        assert eigs.lambdas == pytest.approx([-1.0, 2.0, 3.0])
        assert eigs.p == 1
        assert np.array_equal(eigs.basis, np.eye(3))


class TestCoercivity:
    def test_unit_block(self):
        assert damped_wave_system().full_damping().coercivity == pytest.approx(1.0, abs=1e-13)

    def test_nonsymmetric_block_uses_symmetric_part(self):
        sys = HyperbolicSystem(
            a=np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]) + np.diag([0.1, 0.2, 0.3]),
            n1=1,
            dd=np.array([[2.0, 1.0], [0.0, 3.0]]),
        )
        assert sys.full_damping().coercivity == pytest.approx(2.5 - np.sqrt(0.5), rel=1e-12)

    def test_negative_block_reported(self):
        m = FullDampingMatrix.from_matrix(np.diag([0.0, -1.0]), 1)
        assert m.coercivity == pytest.approx(-1.0, abs=1e-13)


class TestCouplingCondition:
    def test_zero_damping_fails(self):
        damping = FullDampingMatrix.from_matrix(np.zeros((2, 2)), 1)
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert not coupling_check_eigvec(a, damping)
        assert not coupling_check_rank(a, damping)

    def test_decoupled_diagonal_fails(self):
        damping = FullDampingMatrix.from_matrix(np.diag([0.0, 1.0]), 1)
        a = np.diag([1.0, 2.0])
        assert not coupling_check_eigvec(a, damping)
        assert not coupling_check_rank(a, damping)

    def test_full_damping_passes(self):
        damping = FullDampingMatrix.from_matrix(np.eye(2), 0)
        a = np.diag([1.0, 2.0])
        assert coupling_check_eigvec(a, damping)
        assert coupling_check_rank(a, damping)

    def test_damped_wave_passes(self):
        sys = damped_wave_system()
        assert coupling_check_eigvec(sys.a, sys.full_damping())
        assert coupling_check_rank(sys.a, sys.full_damping())

    def test_routes_agree_on_random_corpus(self):
        rng = np.random.default_rng(47)
        for i in range(60):
            uncoupled = i % 2 == 1
            sys = random_valid_system(rng, uncoupled=uncoupled)
            damping = sys.full_damping()
            via_vec = coupling_check_eigvec(sys.a, damping)
            via_rank = coupling_check_rank(sys.a, damping)
            assert via_vec == via_rank
            if uncoupled:
                assert not via_vec


class TestSourceMatrix:
    def test_damped_wave_value(self):
        m = source_matrix(damped_wave_system())
        assert m == pytest.approx(np.array([[0.5, -0.5], [-0.5, 0.5]]), abs=1e-13)

    def test_sign_flip_conjugation(self):
        # flipping the second basis vector turns the off-diagonal positive
        m = source_matrix(damped_wave_system())
        ds = np.diag([1.0, -1.0])
        assert ds @ m @ ds == pytest.approx(
            np.array([[0.5, 0.5], [0.5, 0.5]]), abs=1e-13
        )

    def test_trace_and_spectrum_preserved(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            sys = random_valid_system(rng)
            b = sys.full_damping().matrix
            m = source_matrix(sys)
            assert np.trace(m) == pytest.approx(np.trace(b), rel=1e-10, abs=1e-10)
            if np.abs(b - b.T).max() < 1e-12:
                assert np.linalg.eigvalsh(m) == pytest.approx(
                    np.linalg.eigvalsh(b), abs=1e-9
                )

    def test_three_speed_diagonal_entries(self):
        # damping of each characteristic equals its projection onto the
        # damped components: 5/9, 5/9, 8/9 for the reference basis
        m = source_matrix(three_speed_system())
        assert np.diag(m) == pytest.approx([5.0 / 9, 5.0 / 9, 8.0 / 9], abs=1e-12)


class TestValidation:
    def test_damped_wave_all_pass(self):
        rep = validate_system(damped_wave_system())
        assert rep.ok
        assert len(rep.checks) == 6
        assert all(c.passed for c in rep.checks)
        assert rep.coercivity == pytest.approx(1.0)
        assert rep.eigs is not None

    def test_repeated_speed_rejected(self):
        rep = validate_system(HyperbolicSystem(a=np.eye(2), n1=1, dd=np.eye(1)))
        assert not rep.ok
        failed = {c.name for c in rep.checks if not c.passed}
        # the coupling checks also fail here: every vector is an eigenvector
        # of the identity, including those in the damping kernel
        assert "speeds_distinct" in failed
        assert "damping_coercive" not in failed
        assert "speeds_nonzero" not in failed

    def test_zero_speed_rejected(self):
        rep = validate_system(
            HyperbolicSystem(a=np.diag([0.0, 1.0]), n1=1, dd=np.eye(1))
        )
        assert not rep.ok
        failed = {c.name for c in rep.checks if not c.passed}
        assert "speeds_nonzero" in failed
        assert "speeds_distinct" not in failed

    def test_nonsymmetric_short_circuits(self):
        rep = validate_system(
            HyperbolicSystem(a=np.array([[0.0, 1.0], [0.0, 0.0]]), n1=1, dd=np.eye(1))
        )
        assert not rep.ok
        assert rep.eigs is None
        by_name = {c.name: c for c in rep.checks}
        assert not by_name["velocity_symmetric"].passed
        assert "not evaluated" in by_name["coupling_rank"].detail

    def test_noncoercive_damping_flagged(self):
        rep = validate_system(
            HyperbolicSystem(
                a=np.array([[0.0, 1.0], [1.0, 0.0]]), n1=1, dd=np.array([[-0.5]])
            )
        )
        assert not rep.ok
        by_name = {c.name: c for c in rep.checks}
        assert not by_name["damping_coercive"].passed
        assert rep.coercivity == pytest.approx(-0.5)

    def test_decoupled_system_fails_both_coupling_routes(self):
        rep = validate_system(
            HyperbolicSystem(a=np.diag([1.0, 2.0]), n1=1, dd=np.eye(1))
        )
        by_name = {c.name: c for c in rep.checks}
        assert not by_name["coupling_eigvec"].passed
        assert not by_name["coupling_rank"].passed

    def test_three_speed_system_admissible(self):
        rep = validate_system(three_speed_system())
        assert rep.ok
        assert rep.eigs.lambdas == pytest.approx([1.0, 2.0, 3.0], abs=1e-12)
