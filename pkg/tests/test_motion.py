import numpy as np
import pytest

from perigid import (
    FlexClass,
    NotAFlexError,
    NotSimplexFamilyError,
    SimplexVariant,
    analyze,
    audit_expansiveness,
    classify_flex,
    continue_motion,
    expansive_cone,
    export_frames,
    facet_separation,
    pair_constraint,
    simplex_framework,
    stressed_framework,
    trivial_motion_basis,
    with_edge_orbit,
)
from perigid.motion import MotionPath, write_audit_csv

from conftest import make_framework


def expanding_flex(fw):
    flex = analyze(fw).flex_basis[0]
    if classify_flex(fw, flex) is FlexClass.NOT_EXPANSIVE:
        flex = -flex
    assert classify_flex(fw, flex) is FlexClass.EFFECTIVELY_EXPANSIVE
    return flex


@pytest.fixture(scope="module")
def mech2():
    return simplex_framework(2, SimplexVariant.removed_edge(1))


@pytest.fixture(scope="module")
def path2(mech2):
    return continue_motion(mech2, expanding_flex(mech2), n_steps=50, h=0.01)


def test_rigid_framework_rejects_random_direction(enhanced3):
    rng = np.random.default_rng(3)
    with pytest.raises(NotAFlexError):
        continue_motion(enhanced3, rng.standard_normal(15))


def test_trivial_direction_gives_zero_path(enhanced3):
    v = trivial_motion_basis(enhanced3)[0]
    path = continue_motion(enhanced3, v, n_steps=5, h=0.01)
    assert path.n_steps == 5
    p0 = path.placements[0]
    for pl in path.placements[1:]:
        assert np.array_equal(pl.lattice, p0.lattice)
        for o in path.graph.vertex_orbits:
            assert np.array_equal(pl.positions[o], p0.positions[o])


def test_mechanism_path_residuals(path2):
    assert path2.n_steps == 50
    assert path2.residuals.max() < 1e-10


def test_edge_lengths_preserved(mech2, path2):
    base = mech2.edge_lengths
    for k in range(mech2.m):
        for step in range(0, 51, 10):
            fw_k = path2.framework_at(step)
            assert abs(fw_k.edge_lengths[k] ** 2 - base[k] ** 2) < 10 * 1e-10


def test_step_zero_is_input(mech2, path2):
    for o in mech2.graph.vertex_orbits:
        assert np.array_equal(path2.placements[0].positions[o], mech2.placement.positions[o])
    assert np.array_equal(path2.placements[0].lattice, mech2.placement.lattice)


def test_tangent_continuity(path2):
    for a, b in zip(path2.tangents, path2.tangents[1:]):
        angle = np.arccos(np.clip(a @ b, -1.0, 1.0))
        assert angle < 0.1


def test_audit_passes_forward_fails_reversed(mech2, path2):
    audit = audit_expansiveness(path2, radius=2)
    assert audit.passed and not audit.violations
    reverse = continue_motion(mech2, -expanding_flex(mech2), n_steps=50, h=0.01)
    bad = audit_expansiveness(reverse, radius=2)
    assert not bad.passed
    assert bad.violations


def test_first_order_agreement(mech2, path2):
    # Finite difference of squared pair distances against the pair rows.
    t0 = path2.tangents[0]
    h_eff = path2.step_size
    for key in list(audit_expansiveness(path2, radius=2).pair_results)[:40]:
        a, b, shift = key
        p = pair_constraint(mech2, a, b, shift)
        d0 = np.linalg.norm(
            path2.placements[0].positions[b]
            + path2.placements[0].lattice @ np.asarray(shift, float)
            - path2.placements[0].positions[a]
        )
        d1 = np.linalg.norm(
            path2.placements[1].positions[b]
            + path2.placements[1].lattice @ np.asarray(shift, float)
            - path2.placements[1].positions[a]
        )
        fd = (d1**2 - d0**2) / (2 * h_eff)
        assert abs(fd - p.row @ t0) < 10 * path2.nominal_h


def test_interior_seed_passes_outside_fails(stressed):
    report = analyze(stressed)
    cone = expansive_cone(stressed, report, radius=2)
    interior = cone.ray_motion(0) + cone.ray_motion(1)
    path = continue_motion(stressed, interior, n_steps=20, h=0.005)
    assert audit_expansiveness(path, radius=2).passed
    outside = cone.ray_motion(0) - 2 * cone.ray_motion(1)
    path_out = continue_motion(stressed, outside, n_steps=20, h=0.005)
    assert not audit_expansiveness(path_out, radius=2).passed


def test_boundary_ray_via_period_edge_mechanism(stressed):
    # Fixing one period length equals inserting the corresponding red-red
    # edge orbit; the resulting one-dof mechanism realizes the extremal ray
    # and keeps that pair distance constant.
    report = analyze(stressed)
    cone = expansive_cone(stressed, report, radius=2)
    row_e1 = pair_constraint(stressed, "red", "red", (1, 0, 0)).row
    ray = min(range(2), key=lambda i: abs(row_e1 @ cone.ray_motion(i)))
    mech = with_edge_orbit(stressed, "red", "red", (1, 0, 0))
    flex = analyze(mech).flex_basis[0]
    if flex @ cone.ray_motion(ray) < 0:
        flex = -flex
    path = continue_motion(mech, flex, n_steps=50, h=0.01)
    audit = audit_expansiveness(path, radius=2)
    assert audit.passed
    dists = [
        np.linalg.norm(pl.lattice @ np.array([1.0, 0, 0])) for pl in path.placements
    ]
    assert max(abs(d - dists[0]) for d in dists) < 1e-8


# -- facet separation ----------------------------------------------------------


def test_facet_separation_increases(path2):
    sep = facet_separation(path2)
    assert np.all(np.diff(sep) > 0)


def test_facet_separation_increases_3d():
    fw = simplex_framework(3, SimplexVariant.removed_edge(2))
    path = continue_motion(fw, expanding_flex(fw), n_steps=20, h=0.01)
    sep = facet_separation(path)
    assert np.all(np.diff(sep) > 0)


def test_facet_separation_constant_on_rigid(enhanced3):
    path = MotionPath(
        graph=enhanced3.graph,
        placements=[enhanced3.placement] * 4,
        step_size=0.0,
        nominal_h=0.01,
        direction_seed=np.zeros(15),
        tangents=np.zeros((4, 15)),
        residuals=np.zeros(4),
        pinning="none",
    )
    sep = facet_separation(path)
    assert np.allclose(sep, sep[0])


def test_facet_separation_requires_family(stressed):
    path = MotionPath(
        graph=stressed.graph,
        placements=[stressed.placement] * 2,
        step_size=0.0,
        nominal_h=0.01,
        direction_seed=np.zeros(15),
        tangents=np.zeros((2, 15)),
        residuals=np.zeros(2),
        pinning="none",
    )
    with pytest.raises(NotSimplexFamilyError):
        facet_separation(path)


# -- exports --------------------------------------------------------------------


def test_export_obj(tmp_path, path2):
    files = export_frames(path2, supercell=1, fmt="obj", outdir=tmp_path)
    assert len(files) == 51
    text = (tmp_path / "frame_0000.obj").read_text().strip().split("\n")
    kinds = {line.split()[0] for line in text}
    assert kinds == {"v", "l"}
    n_vertices = sum(1 for line in text if line.startswith("v "))
    assert n_vertices == 2 * 9  # two orbits, 3x3 supercell in d=2


def test_export_obj_vertex_positions_match(tmp_path, stressed):
    path = MotionPath(
        graph=stressed.graph,
        placements=[stressed.placement],
        step_size=0.0,
        nominal_h=0.01,
        direction_seed=np.zeros(15),
        tangents=np.zeros((1, 15)),
        residuals=np.zeros(1),
        pinning="none",
    )
    files = export_frames(path, supercell=1, fmt="obj", outdir=tmp_path)
    text = (tmp_path / "frame_0000.obj").read_text().strip().split("\n")
    verts = [line.split()[1:] for line in text if line.startswith("v ")]
    assert len(verts) == 2 * 27
    import itertools

    shifts = list(itertools.product((-1, 0, 1), repeat=3))
    idx = 0
    for orbit in stressed.graph.vertex_orbits:
        for w in shifts:
            expected = stressed.realized_vertex(orbit, w)
            got = np.array([float(x) for x in verts[idx]])
            assert np.array_equal(got, expected)
            idx += 1


def test_export_csv(tmp_path, path2):
    files = export_frames(path2, supercell=1, fmt="csv", outdir=tmp_path)
    lines = (tmp_path / "frames.csv").read_text().strip().split("\n")
    assert lines[0] == "step,orbit,shift_1,shift_2,x_1,x_2"
    assert len(lines) == 1 + 51 * 2 * 9


def test_audit_csv(tmp_path, path2):
    audit = audit_expansiveness(path2, radius=1)
    write_audit_csv(audit, tmp_path / "audit.csv")
    lines = (tmp_path / "audit.csv").read_text().strip().split("\n")
    assert lines[0] == "orbit_a,orbit_b,shift_1,shift_2,min_increment,first_violation_step"
    assert len(lines) == 1 + len(audit.pair_results)
    assert all(line.endswith(",") or line.split(",")[-1].isdigit() for line in lines[1:])
