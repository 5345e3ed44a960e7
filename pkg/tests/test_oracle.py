"""Self-tests for the brute-force grid oracle.

The acceptance battery only ever asserts the oracle's negative answers, so
this file pins its positive-detection power: data assembled from grid
mixtures of core vertices must be found.
"""

import random
from fractions import Fraction as F
from math import comb

import gen
import oracle
from capid import GroundSet, Measure, core_vertices
from capid.info_specs import build_capacity


class TestWeightGrid:
    def test_count_matches_stars_and_bars(self):
        for k, step in ((1, 20), (2, 20), (3, 10), (4, 6)):
            combos = list(oracle.weight_grid(k, step))
            assert len(combos) == comb(step + k - 1, k - 1)
            assert all(sum(c) == 1 for c in combos)
            assert all(all(x >= 0 for x in c) for c in combos)
            assert len(set(combos)) == len(combos)

    def test_single_slot(self):
        assert list(oracle.weight_grid(1, 20)) == [(F(1),)]


class TestMixtureCandidates:
    def test_single_vertex_collapses(self):
        ground = GroundSet.of("ab")
        vs = [Measure.point(ground, "a")]
        assert oracle.mixture_candidates(vs) == [(F(1), F(0))]

    def test_segment_has_21_points(self):
        ground = GroundSet.of("ab")
        vs = [Measure.point(ground, "a"), Measure.point(ground, "b")]
        cands = oracle.mixture_candidates(vs, step=20)
        assert len(cands) == 21
        assert (F(1, 4), F(3, 4)) in cands


class TestWitnessSearch:
    def test_finds_planted_grid_witness(self):
        rng = random.Random(88006)
        found = 0
        for _ in range(40):
            ground = gen.random_ground(rng, 2, 4)
            m = rng.randint(1, 3)
            rules = []
            lam = [F(0)] * ground.size
            q = gen.random_q(rng, [f"r{j}" for j in range(m)])
            for j in range(m):
                family = rng.choice(gen.FAMILIES)
                max_bits = 2 if family in ("variation-neighborhood", "interval-belief") else 3
                carrier = gen.random_carrier(rng, ground, max_bits)
                spec = gen.random_spec(rng, ground, family, carrier)
                verts = core_vertices(build_capacity(spec))
                # plant a step-1/20 mixture of the vertices
                units = [rng.randint(0, 4) for _ in verts]
                if sum(units) == 0:
                    units[0] = 1
                scale = F(1, 20)
                pad = 20 - sum(units)
                units[0] += pad
                rho = [
                    sum(u * scale * v.weights[i] for u, v in zip(units, verts))
                    for i in range(ground.size)
                ]
                qd = q.weights[j]
                for i in range(ground.size):
                    lam[i] += qd * rho[i]
                if qd > 0:
                    rules.append((qd, oracle.mixture_candidates(verts)))
            assert oracle.grid_witness_exists(tuple(lam), rules)
            found += 1
        assert found == 40

    def test_rejects_impossible_target(self):
        ground = GroundSet.of("ab")
        delta_a = Measure.point(ground, "a")
        cands = oracle.mixture_candidates([delta_a])
        lam = (F(0), F(1))
        assert not oracle.grid_witness_exists(
            lam, [(F(1, 2), cands), (F(1, 2), cands)]
        )

    def test_respects_off_grid_gaps(self):
        # target strictly between two adjacent grid mixtures is unreachable
        ground = GroundSet.of("ab")
        vs = [Measure.point(ground, "a"), Measure.point(ground, "b")]
        cands = oracle.mixture_candidates(vs, step=20)
        lam = (F(1, 41), F(40, 41))
        assert not oracle.grid_witness_exists(lam, [(F(1), cands)])
