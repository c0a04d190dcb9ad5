"""Smoke tests for the python bindings against known analytic values."""

import math

import numpy as np
import pytest

import minsurf


def test_mesh_and_level_set():
    mesh = minsurf.build_box_mesh([0, 0, 0], [1, 1, 1], [8, 8, 8])
    assert mesh.node_count == 9**3
    assert mesh.element_count == 6 * 8**3
    assert mesh.total_volume() == pytest.approx(1.0, rel=1e-12)
    assert mesh.h == pytest.approx(math.sqrt(3) / 8, rel=1e-12)

    ball = minsurf.Primitive.sphere([0.5, 0.5, 0.5], 0.3)
    assert ball.signed_distance([0.5, 0.5, 0.9]) == pytest.approx(0.1)
    ls = minsurf.level_set(mesh, ball)
    values = ls.values
    assert values.shape == (mesh.node_count,)
    assert values.min() == pytest.approx(-0.3, abs=1e-12)


def test_extract_sphere_surface():
    mesh = minsurf.build_box_mesh([-0.6] * 3, [0.6] * 3, [16, 16, 16])
    ls = minsurf.level_set(mesh, minsurf.Primitive.sphere([0, 0, 0], 0.4))
    surface = minsurf.extract_surface(ls)

    vertices = surface["vertices"]
    triangles = surface["triangles"]
    assert vertices.ndim == 2 and vertices.shape[1] == 3
    assert triangles.ndim == 2 and triangles.shape[1] == 3
    assert triangles.min() >= 0
    assert triangles.max() < len(vertices)

    exact = 4 * math.pi * 0.4**2
    assert surface["area"] == pytest.approx(exact, rel=0.05)
    radii = np.linalg.norm(vertices, axis=1)
    assert np.all(np.abs(radii - 0.4) < 0.02)


def test_scenario_registry_and_errors():
    names = minsurf.scenario_names()
    assert "catenoid" in names and "plane" in names
    assert minsurf.scenario_description("plane")
    with pytest.raises(minsurf.UsageError):
        minsurf.run_scenario("torus")
    with pytest.raises(minsurf.SolverError):
        minsurf.Primitive.sphere([0, 0, 0], -1.0)


def test_plane_scenario_converges_immediately():
    result = minsurf.run_scenario("plane")
    assert result["status"] == "converged"
    assert result["steps"] == 1
    history = result["history"]
    assert history["area"][0] == pytest.approx(1.0, rel=1e-12)
    assert history["nodal_curvature_norm"][0] < 1e-10
    assert result["surface"]["area"] == pytest.approx(1.0, rel=1e-12)


def test_sphere_scenario_shrinks_deterministically():
    kwargs = dict(divisions=[12, 12, 12], epsilon=0.0, max_steps=4)
    first = minsurf.run_scenario("sphere", **kwargs)
    second = minsurf.run_scenario("sphere", **kwargs)

    assert first["status"] == "max_steps"
    areas = first["history"]["area"]
    assert len(areas) == 4
    assert np.all(np.diff(areas) < 0)
    np.testing.assert_array_equal(areas, second["history"]["area"])
    np.testing.assert_array_equal(first["history"]["dt"], second["history"]["dt"])


def test_curvature_study_first_order():
    study = minsurf.curvature_study([12, 24])
    assert study["h"][0] > study["h"][1]
    assert study["l2_error"][0] > study["l2_error"][1]
    assert study["order"] > 0.8
