"""Tests for the weighted dual graph and the admissibility conditions."""

import itertools
import math

import numpy as np
import pytest

from hyperpoly.minkowski import GeometryError
from hyperpoly.polyhedron import Combinatorics
from hyperpoly.angles import (
    WeightedDualGraph,
    check_angle_admissibility,
    check_cycle_condition,
    check_path_condition,
    consistency_with_metric,
    edge_key,
    enumerate_simple_cycles,
    enumerate_simple_paths,
    graph_from_json,
    graph_to_json,
    uniform_weights,
)


TETRA = Combinatorics.tetrahedron()
CUBE = Combinatorics.cube()


def brute_force_cycles(g):
    """Independent oracle: all simple cycles by subset + permutation scan."""
    adj = {}
    for (f, h), key in g.dual_edges().items():
        adj.setdefault(f, set()).add(h)
        adj.setdefault(h, set()).add(f)
    nodes = sorted(adj)
    found = set()
    for r in range(3, len(nodes) + 1):
        for subset in itertools.combinations(nodes, r):
            first = subset[0]
            rest = subset[1:]
            for perm in itertools.permutations(rest):
                cyc = (first,) + perm
                if all(cyc[(i + 1) % r] in adj[cyc[i]] for i in range(r)):
                    k = len(cyc)
                    edges = frozenset(
                        (min(cyc[i], cyc[(i + 1) % k]),
                         max(cyc[i], cyc[(i + 1) % k])) for i in range(k))
                    found.add(edges)
    return found


def brute_force_paths(g, a, b):
    adj = {}
    for (f, h), key in g.dual_edges().items():
        adj.setdefault(f, set()).add(h)
        adj.setdefault(h, set()).add(f)
    nodes = sorted(adj)
    found = set()
    others = [n for n in nodes if n not in (a, b)]
    for r in range(0, len(others) + 1):
        for subset in itertools.combinations(others, r):
            for perm in itertools.permutations(subset):
                path = (a,) + perm + (b,)
                if all(path[i + 1] in adj[path[i]]
                       for i in range(len(path) - 1)):
                    found.add(path)
    return found


class TestEnumeration:
    @pytest.mark.parametrize("comb", [TETRA, CUBE, Combinatorics.octahedron()])
    def test_cycles_match_brute_force(self, comb):
        g = uniform_weights(comb, 0.8 * math.pi)
        ours = {frozenset(
            (min(c[i], c[(i + 1) % len(c)]), max(c[i], c[(i + 1) % len(c)]))
            for i in range(len(c)))
            for c, _ in enumerate_simple_cycles(g)}
        assert ours == brute_force_cycles(g)

    def test_paths_match_brute_force(self):
        g = uniform_weights(CUBE, 0.8 * math.pi)
        for a, b in ((0, 1), (0, 5), (2, 4)):
            ours = {p for p, _ in enumerate_simple_paths(g, a, b)}
            assert ours == brute_force_paths(g, a, b)

    def test_pruning_keeps_everything_below_bound(self):
        g = uniform_weights(TETRA, 0.8 * math.pi)
        bound = 2.5 * math.pi
        full = {(c, round(s, 9)) for c, s in enumerate_simple_cycles(g)
                if s <= bound}
        pruned = {(c, round(s, 9))
                  for c, s in enumerate_simple_cycles(g, sum_bound=bound)}
        assert full == pruned

    def test_thirty_edge_graph_matches_bitmask_oracle(self):
        # the dual of the dodecahedron combinatorics is the icosahedron
        # graph: 12 nodes, 30 edges, the documented enumeration limit
        g = uniform_weights(Combinatorics.dodecahedron(), 0.8 * math.pi)
        assert len(g.dual_edges()) == 30
        adj = {n: [] for n in g.dual_nodes()}
        for (f, h) in g.dual_edges():
            adj[f].append(h)
            adj[h].append(f)

        found = set()

        def dfs(root, node, mask, path):
            for nxt in adj[node]:
                if nxt == root and len(path) >= 3:
                    if path[1] < path[-1]:
                        k = len(path)
                        found.add(frozenset(
                            (min(path[i], path[(i + 1) % k]),
                             max(path[i], path[(i + 1) % k]))
                            for i in range(k)))
                    continue
                if nxt <= root or mask & (1 << nxt):
                    continue
                path.append(nxt)
                dfs(root, nxt, mask | (1 << nxt), path)
                path.pop()

        for root in sorted(adj):
            dfs(root, root, 1 << root, [root])

        ours = {frozenset(
            (min(c[i], c[(i + 1) % len(c)]), max(c[i], c[(i + 1) % len(c)]))
            for i in range(len(c)))
            for c, _ in enumerate_simple_cycles(g)}
        assert ours == found
        assert len(ours) == 12878


class TestCycleCondition:
    def test_ideal_tetrahedron_passes_with_all_faces_flagged(self):
        g = uniform_weights(TETRA, 2 * math.pi / 3)
        rep = check_cycle_condition(g)
        assert rep.passed
        assert rep.ideal_vertices == (0, 1, 2, 3)

    def test_hyperideal_passes_without_ideal_faces(self):
        g = uniform_weights(TETRA, 0.8 * math.pi)
        rep = check_cycle_condition(g)
        assert rep.passed
        assert rep.ideal_vertices == ()

    def test_low_face_fails_with_cycle_listed(self):
        weights = {edge_key(*e.vertices): 0.8 * math.pi for e in TETRA.edges()}
        fan = TETRA.vertex_fan(0)
        for _, w in fan:
            weights[edge_key(0, w)] = (1.9 / 3) * math.pi
        g = WeightedDualGraph(TETRA, weights, {v: "hyperideal"
                                               for v in TETRA.vertex_ids})
        rep = check_cycle_condition(g)
        assert not rep.passed
        lows = [v for v in rep.violations if v.kind == "cycle_below_2pi"]
        assert lows and min(v.total for v in lows) == pytest.approx(
            1.9 * math.pi, abs=1e-9)

    def test_near_equality_must_be_declared(self):
        g = uniform_weights(TETRA, 2 * math.pi / 3,
                            vertex_kind={v: "hyperideal"
                                         for v in TETRA.vertex_ids})
        rep = check_cycle_condition(g)
        assert not rep.passed
        assert all(v.kind == "ambiguous_near_equality" for v in rep.violations)

    def test_declared_ideal_must_be_at_equality(self):
        g = uniform_weights(TETRA, 0.8 * math.pi,
                            vertex_kind={0: "ideal", 1: "hyperideal",
                                         2: "hyperideal", 3: "hyperideal"})
        rep = check_cycle_condition(g)
        assert not rep.passed
        assert any(v.kind == "ideal_face_not_at_equality"
                   for v in rep.violations)


class TestPathCondition:
    def test_hyperideal_tetra_passes(self):
        g = uniform_weights(TETRA, 0.8 * math.pi)
        assert check_path_condition(g).passed

    def test_short_paths_fail(self):
        # two cheap edges make a sub-pi path between nodes of a common face
        weights = {edge_key(*e.vertices): 0.95 * math.pi
                   for e in TETRA.edges()}
        keys = sorted(weights)
        weights[keys[0]] = 0.45 * math.pi
        weights[keys[1]] = 0.45 * math.pi
        g = WeightedDualGraph(TETRA, weights,
                              {v: "hyperideal" for v in TETRA.vertex_ids})
        rep = check_path_condition(g)
        assert not rep.passed
        assert any(v.total == pytest.approx(0.9 * math.pi, abs=1e-9)
                   for v in rep.violations)

    def test_all_ideal_runs_and_passes(self):
        g = uniform_weights(TETRA, 2 * math.pi / 3)
        rep = check_path_condition(g)
        assert rep.passed


class TestAdmissibility:
    @pytest.mark.parametrize("theta,member", [
        (0.55 * math.pi, False),
        (2 * math.pi / 3, True),
        (0.8 * math.pi, True),
        (0.95 * math.pi, True),
    ])
    def test_tetrahedron_family(self, theta, member):
        verdict = check_angle_admissibility(uniform_weights(TETRA, theta))
        assert verdict.member is member

    def test_cube_near_pi(self):
        verdict = check_angle_admissibility(uniform_weights(CUBE, 0.99 * math.pi))
        assert verdict.member

    def test_range_violations_reported(self):
        weights = {edge_key(*e.vertices): 0.8 * math.pi for e in TETRA.edges()}
        weights[sorted(weights)[0]] = 1.2 * math.pi
        g = WeightedDualGraph(TETRA, weights)
        verdict = check_angle_admissibility(g)
        assert not verdict.member
        assert any(v.kind == "weight_out_of_range" for v in verdict.violations)

    def test_monotonicity_strict_passes_stay_passes(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            base = {edge_key(*e.vertices):
                    float(rng.uniform(0.72, 0.93)) * math.pi
                    for e in TETRA.edges()}
            g = WeightedDualGraph(TETRA, base)
            if not check_angle_admissibility(g).member:
                continue
            key = sorted(base)[int(rng.integers(len(base)))]
            bumped = dict(base)
            bumped[key] = min(bumped[key] + 0.02 * math.pi, 0.999 * math.pi)
            g2 = WeightedDualGraph(TETRA, bumped)
            assert check_angle_admissibility(g2).member

    def test_relabeling_equivariance(self):
        rng = np.random.default_rng(21)
        base = {edge_key(*e.vertices):
                float(rng.uniform(0.72, 0.93)) * math.pi
                for e in TETRA.edges()}
        g = WeightedDualGraph(TETRA, base)
        perm = {0: 3, 1: 2, 2: 0, 3: 1}
        comb2 = Combinatorics.from_cycles(
            [tuple(perm[v] for v in cyc) for cyc in TETRA.face_cycles])
        w2 = {edge_key(perm[u], perm[v]): w for (u, v), w in base.items()}
        g2 = WeightedDualGraph(comb2, w2)
        assert check_angle_admissibility(g).member == \
            check_angle_admissibility(g2).member


class TestConsistencyWithMetric:
    @pytest.mark.parametrize("theta", [0.8 * math.pi, 0.55 * math.pi])
    def test_agreement(self, theta):
        g = uniform_weights(TETRA, theta)
        r = consistency_with_metric(g, seed=7, depth=10, shots=200)
        assert r["agree"] and r["sound"]

    def test_equality_boundary_case(self):
        g = uniform_weights(TETRA, 2 * math.pi / 3)
        r = consistency_with_metric(g, seed=7, depth=10, shots=200)
        assert r["member"] and r["witness_found"] and not \
            r["witness_is_violation"]
        assert r["agree"] and r["sound"]

    def test_undeclared_equality_disagrees_with_membership(self):
        g = uniform_weights(TETRA, 2 * math.pi / 3,
                            vertex_kind={v: "hyperideal"
                                         for v in TETRA.vertex_ids})
        r = consistency_with_metric(g, seed=7, depth=10, shots=200)
        assert not r["member"] and r["witness_is_violation"]
        assert r["agree"] and r["sound"]


class TestJson:
    def test_round_trip(self):
        g = uniform_weights(TETRA, 0.8 * math.pi,
                            vertex_kind={v: "hyperideal"
                                         for v in TETRA.vertex_ids})
        data = graph_to_json(g)
        g2 = graph_from_json(data)
        assert g2.weight_vector() == g.weight_vector()
        assert g2.vertex_kind == g.vertex_kind

    def test_weights_must_cover_edges(self):
        with pytest.raises(GeometryError, match="weights do not match"):
            WeightedDualGraph(TETRA, {(0, 1): 1.0})
