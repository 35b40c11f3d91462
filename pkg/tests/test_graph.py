import numpy as np
import pytest

import meshes
import oracles
from citymesh.errors import ParameterError
from citymesh.graph import build_base_graph, connected_components, weld_graph
from citymesh.mesh import TriangleMesh


class TestBaseGraph:
    def test_single_triangle(self):
        graph = build_base_graph(meshes.single_triangle_mesh())
        assert graph.node_count == 1
        assert graph.neighbors == ((),)

    def test_two_triangles_sharing_one_vertex(self):
        mesh = meshes.load_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nv -1 0 0\nv 0 -1 0\nf 1 2 3\nf 1 4 5\n"
        )
        graph = build_base_graph(mesh)
        assert graph.edge_set() == {(0, 1)}

    def test_cube_matches_pairwise_oracle(self, cube):
        graph = build_base_graph(cube)
        assert graph.edge_set() == oracles.shared_vertex_edges(cube)

    def test_symmetric_no_self_loops(self, gabled_house, prism):
        for mesh in (gabled_house, prism):
            graph = build_base_graph(mesh)
            for i, adj in enumerate(graph.neighbors):
                assert i not in adj
                for j in adj:
                    assert i in graph.neighbors[j]


class TestWeldGraph:
    def test_rejects_nonpositive_precision(self, cube):
        base = build_base_graph(cube)
        with pytest.raises(ParameterError):
            weld_graph(cube, base, 0)
        with pytest.raises(ParameterError):
            weld_graph(cube, base, -3)

    def test_gap_below_threshold_connects(self):
        mesh = meshes.two_cubes_mesh(0.05)
        base = build_base_graph(mesh)
        assert len(connected_components(base)) == 2
        welded = weld_graph(mesh, base, 10)           # threshold 0.1
        assert len(connected_components(welded)) == 1

    def test_gap_above_threshold_stays_apart(self):
        mesh = meshes.two_cubes_mesh(0.5)
        welded = weld_graph(mesh, build_base_graph(mesh), 10)
        assert len(connected_components(welded)) == 2

    def test_coarse_precision_connects_wide_gap(self):
        # precision 1 (threshold 1.0) joins what precision 10 left apart
        mesh = meshes.two_cubes_mesh(0.5)
        welded = weld_graph(mesh, build_base_graph(mesh), 1)
        assert len(connected_components(welded)) == 1

    @pytest.mark.parametrize("gap", [0.01, 0.05, 0.2, 0.5, 1.5])
    @pytest.mark.parametrize("precision", [1, 2, 10, 20])
    def test_exact_against_all_pairs_oracle(self, gap, precision):
        mesh = meshes.two_cubes_mesh(gap)
        base = build_base_graph(mesh)
        welded = weld_graph(mesh, base, precision)
        expected = oracles.weld_edges(mesh, 1.0 / precision) | base.edge_set()
        assert welded.edge_set() == expected

    def test_superset_of_base_and_monotone_in_precision(self):
        mesh = meshes.two_cubes_mesh(0.3)
        base = build_base_graph(mesh)
        previous = None
        for precision in (1, 2, 5, 10, 20):
            welded = weld_graph(mesh, base, precision)
            assert welded.edge_set() >= base.edge_set()
            if previous is not None:
                # larger p means smaller threshold, so fewer weld edges
                assert welded.edge_set() <= previous
            previous = welded.edge_set()

    def test_bucket_boundary_pairs_not_missed(self):
        # vertex pairs straddling a bucket key boundary: norms sit just
        # under and just over a multiple of the threshold
        rows = []
        for k in range(1, 40):
            r = k * 0.1
            rows.append((r - 1e-4, 0.0, 0.0))
            rows.append((r + 1e-4, 0.0, 0.0))
        vertices = []
        faces = []
        for i, (x, y, z) in enumerate(rows):
            vertices += [(x, y, z), (x, y + 1e-6, z), (x, y, z + 1e-6)]
            faces.append((3 * i, 3 * i + 1, 3 * i + 2))
        mesh = TriangleMesh.from_arrays(vertices, faces, drop_degenerate=False)
        base = build_base_graph(mesh)
        for precision in (10, 7, 3):
            welded = weld_graph(mesh, base, precision)
            expected = oracles.weld_edges(mesh, 1.0 / precision) | base.edge_set()
            assert welded.edge_set() == expected

    def test_records_precision(self, cube):
        base = build_base_graph(cube)
        assert base.weld_precision is None
        assert weld_graph(cube, base, 4).weld_precision == 4.0


class TestConnectedComponents:
    def test_two_disjoint_cubes(self):
        mesh = meshes.two_cubes_mesh(2.0)
        parts = connected_components(build_base_graph(mesh))
        assert [len(p) for p in parts] == [12, 12]
        assert parts[0] == list(range(12))
        assert parts[1] == list(range(12, 24))

    def test_empty_mesh(self):
        mesh = TriangleMesh.from_arrays(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
        assert connected_components(build_base_graph(mesh)) == []

    def test_welded_pair_matches_union_find_oracle(self):
        mesh = meshes.two_cubes_mesh(0.05)
        welded = weld_graph(mesh, build_base_graph(mesh), 10)
        expected = oracles.components_from_edges(mesh.face_count, welded.edge_set())
        assert connected_components(welded) == expected
        assert [len(p) for p in connected_components(welded)] == [24]

    def test_ordered_by_smallest_face(self, prism):
        parts = connected_components(build_base_graph(prism))
        firsts = [p[0] for p in parts]
        assert firsts == sorted(firsts)
