import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

from gradfrac.core.errors import SingularSystemError
from gradfrac.solver.linear import (
    GlobalSystem,
    assemble_matrix,
    assemble_vector,
    solve_linear,
    unconstrained_rigid_modes,
)


def test_identity_solve():
    b = np.array([1.0, -2.0, 3.5])
    assert_allclose(solve_linear(sp.identity(3), b), b)


def test_small_symmetric_system():
    x = solve_linear(sp.csc_matrix([[2.0, 1.0], [1.0, 2.0]]), np.array([3.0, 3.0]))
    assert_allclose(x, [1.0, 1.0], atol=1e-14)


def test_random_spd_system():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(50, 50))
    matrix = a @ a.T + 50.0 * np.eye(50)
    x_true = rng.normal(size=50)
    x = solve_linear(sp.csc_matrix(matrix), matrix @ x_true)
    assert_allclose(x, x_true, rtol=1e-10, atol=1e-12)


def test_zero_rhs_short_circuits():
    assert_allclose(solve_linear(sp.csc_matrix((3, 3)), np.zeros(3)), 0.0)


def test_singular_matrix_names_free_modes():
    matrix = sp.csc_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(SingularSystemError) as info:
        solve_linear(matrix, np.array([1.0, 1.0]), ["translation y"])
    assert info.value.rigid_modes == ["translation y"]
    assert "translation y" in str(info.value)


def test_assembly_adds_shared_entries():
    dofs = np.array([[0, 1], [1, 2]])
    blocks = np.array([[[1.0, -1.0], [-1.0, 1.0]]] * 2)
    matrix = assemble_matrix(dofs, blocks, 3).toarray()
    assert_allclose(matrix, [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    assert_allclose(assemble_vector(dofs, np.ones((2, 2)), 3), [1.0, 2.0, 1.0])


def test_correction_honours_prescribed_increment():
    # two springs in series, left end fixed, right end pulled by 0.3
    matrix = sp.csr_matrix(np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]))
    system = GlobalSystem.from_parts(matrix, np.zeros(3), np.array([0, 2]))
    dx = system.correction(np.array([0.0, 0.3]))
    assert_allclose(dx, [0.0, 0.15, 0.3])
    assert system.free.tolist() == [1]


def test_rigid_mode_detection():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert unconstrained_rigid_modes(coords, np.array([], dtype=np.int64)) == [
        "translation x",
        "translation y",
        "rotation",
    ]
    # u_x at node 0, u_y at node 0: rotation about node 0 stays free
    assert unconstrained_rigid_modes(coords, np.array([0, 1])) == ["rotation"]
    # u_y at two nodes with different x holds the rotation
    assert unconstrained_rigid_modes(coords, np.array([0, 1, 3])) == []
