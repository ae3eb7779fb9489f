import numpy as np
import pytest

from doublewell import MeshResolutionError, PotentialSpec, build_1d_mesh, build_2d_mesh

SPEC = PotentialSpec(50.0, 3.0, 0.3)


class TestMesh1D:
    def test_breakpoints_plus_uniform_fill(self):
        m = build_1d_mesh(SPEC, 25.0)
        assert np.array_equal(m.nodes, [0, 25, 50, 53, 78, 103])

    def test_isolated_endpoints_only(self):
        m = build_1d_mesh(SPEC, 50.0, isolated_left=True)
        assert np.array_equal(m.nodes, [0, 50])

    def test_unit_h_node_count_and_gaps(self):
        m = build_1d_mesh(SPEC, 1.0)
        assert m.n_nodes == 104
        assert np.max(m.spacings) <= 1.0 + 1e-12

    def test_potential_breakpoints_are_nodes(self):
        m = build_1d_mesh(SPEC, 7.3)
        for x in (0.0, 50.0, 53.0, 103.0):
            assert np.min(np.abs(m.nodes - x)) < 1e-12

    def test_region_split_adds_midpoint(self):
        m = build_1d_mesh(SPEC, 1.0, include_region_split=True)
        assert np.min(np.abs(m.nodes - 51.5)) < 1e-12
        assert np.max(m.spacings) <= 1.0 + 1e-12

    def test_too_coarse_raises(self):
        with pytest.raises(MeshResolutionError):
            build_1d_mesh(SPEC, 51.0)
        with pytest.raises(MeshResolutionError):
            build_1d_mesh(SPEC, -1.0)

    def test_boundary_nodes(self):
        m = build_1d_mesh(SPEC, 10.0)
        first, last = m.boundary_nodes
        assert (m.nodes[first], m.nodes[last]) == (0.0, 103.0)


class TestMesh2D:
    def test_smallest_mesh(self):
        m2 = build_2d_mesh(build_1d_mesh(SPEC, 50.0, isolated_left=True))
        assert len(m2.triangles) == 2
        assert len(m2.diagonal_edges) == 1

    def test_triangle_count(self):
        m1 = build_1d_mesh(SPEC, 20.0)
        m2 = build_2d_mesh(m1)
        assert len(m2.triangles) == 2 * (m1.n_nodes - 1) ** 2

    def test_diagonal_nodes_are_grid_diagonal(self):
        m1 = build_1d_mesh(PotentialSpec(1.0, 0.0, 0.0), 1.0)  # nodes {0,1,2}
        m2 = build_2d_mesh(m1)
        diag = np.flatnonzero(m2.node_class == "diagonal")
        coords = m2.nodes[diag]
        assert np.array_equal(coords, [[0, 0], [1, 1], [2, 2]])

    def test_area_sum_full_and_isolated(self):
        for iso, total in ((False, 103.0**2), (True, 50.0**2)):
            m2 = build_2d_mesh(build_1d_mesh(SPEC, 7.0, isolated_left=iso))
            areas = m2.triangle_areas()
            assert np.all(areas > 0)
            assert abs(areas.sum() - total) / total < 1e-12

    def test_exchange_map_involution_and_triangles(self):
        m2 = build_2d_mesh(build_1d_mesh(SPEC, 20.0))
        sigma = m2.exchange_map
        assert np.array_equal(sigma[sigma], np.arange(m2.n_nodes))
        tri_sets = {frozenset(t) for t in m2.triangles.tolist()}
        mirrored = {frozenset(sigma[t] for t in tri) for tri in m2.triangles.tolist()}
        assert tri_sets == mirrored

    def test_every_diagonal_node_on_a_diagonal_edge(self):
        m2 = build_2d_mesh(build_1d_mesh(SPEC, 9.0))
        diag_nodes = set(np.flatnonzero(m2.node_class == "diagonal").tolist())
        edge_nodes = set(m2.diagonal_edges.ravel().tolist())
        assert diag_nodes == edge_nodes

    def test_diagonal_edges_lie_on_diagonal(self):
        m2 = build_2d_mesh(build_1d_mesh(SPEC, 9.0))
        for edge in m2.diagonal_edges:
            for node in edge:
                x1, x2 = m2.nodes[node]
                assert x1 == x2

    def test_corner_is_classified_diagonal(self):
        m2 = build_2d_mesh(build_1d_mesh(SPEC, 20.0))
        assert m2.node_class[0] == "diagonal"
        assert m2.is_boundary[0]

    def test_dump_csv(self, tmp_path):
        from doublewell.mesh import dump_mesh_csv

        m2 = build_2d_mesh(build_1d_mesh(SPEC, 30.0))
        dump_mesh_csv(m2, tmp_path)
        nodes = (tmp_path / "nodes.csv").read_text().splitlines()
        assert nodes[0] == "id,x1,x2,class"
        assert len(nodes) == m2.n_nodes + 1
        tris = (tmp_path / "triangles.csv").read_text().splitlines()
        assert len(tris) == len(m2.triangles) + 1
