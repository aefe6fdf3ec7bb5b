"""boosters 모듈 테스트"""
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tests.conftest import CORPUS_SETTINGS, LEMMA_SETTINGS, dense_tripartite_graphs, matching_graph
from tritur.boosters import (
    HistogramRow,
    backward_booster_count,
    best_squad,
    booster_histogram,
    booster_level,
    booster_rows,
    certify_booster,
    classify_edges,
    find_squads,
    graver_triangle,
    heavy_histogram,
    increment_step,
    regularise,
    squad_threshold,
    structure_extract,
)
from tritur.constructions import Recipe, complete_tripartite, compose_extremal
from tritur.errors import InfeasibleError, InvalidArgumentError
from tritur.graph_core import TripartiteGraph, VertexSet
from tritur.patterns import kttt_violation


class TestRegularise:
    """f± 정규화"""

    def test_heavy_fixture_values(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        assert reg.tau == 11
        assert set(reg.f_plus[:24]) == {12} and set(reg.f_plus[24:]) == {11}
        assert set(reg.f_minus[:24]) == {11} and set(reg.f_minus[24:]) == {12}
        assert reg.chain_violations(heavy_fixture) == []

    def test_infeasible_tau(self, heavy_fixture):
        with pytest.raises(InfeasibleError) as exc_info:
            regularise(heavy_fixture, 12)
        assert exc_info.value.required == 24
        assert exc_info.value.degree == 23

    @pytest.mark.parametrize("tau", [0, -3])
    def test_non_positive_tau(self, heavy_fixture, tau):
        with pytest.raises(InvalidArgumentError):
            regularise(heavy_fixture, tau)

    @LEMMA_SETTINGS
    @given(tau=st.integers(1, 3), data=st.data())
    def test_chain_holds(self, tau, data):
        """n ≤ 30, δ ≥ n + τ 이면 모든 정점에서 τ ≤ f± ≤ deg± 이고 합은 n + τ"""
        g = data.draw(dense_tripartite_graphs(max_part=30, tau=tau))
        assert regularise(g, tau).chain_violations(g) == []
        assert regularise(g).chain_violations(g) == []

    @LEMMA_SETTINGS
    @given(tau=st.integers(1, 3), data=st.data())
    def test_order_reversal(self, tau, data):
        """한 파트 안에서 f⁺(u) ≤ f⁺(v) 이면 그리고 그때만 f⁻(u) ≥ f⁻(v)"""
        g = data.draw(dense_tripartite_graphs(max_part=30, tau=tau))
        reg = regularise(g, tau)
        for p in range(3):
            members = g.part(p).members()
            by_plus = sorted(members, key=lambda v: (-reg.f_plus[v], v))
            by_minus = sorted(members, key=lambda v: (reg.f_minus[v], v))
            assert by_plus == by_minus
            for u, v in combinations(members, 2):
                assert (reg.f_plus[u] <= reg.f_plus[v]) == (reg.f_minus[u] >= reg.f_minus[v])


class TestClassify:
    """부스터 분류와 히스토그램"""

    def test_levels_on_heavy_fixture(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        labels = classify_edges(heavy_fixture, reg)
        assert len(labels) == heavy_fixture.edge_count
        assert booster_histogram(labels) == [
            HistogramRow(-1, 144, 11, 11),
            HistogramRow(0, 144, 11, 11),
            HistogramRow(1, 132, 12, 12),
        ]
        assert heavy_histogram(labels) == [(11, 288), (12, 132)]

    def test_labels_ordered_and_thread_independent(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        labels = classify_edges(heavy_fixture, reg, threads=1)
        assert labels == classify_edges(heavy_fixture, reg, threads=4)
        assert [(l.u, l.v) for l in labels] == sorted((l.u, l.v) for l in labels)

    def test_booster_rows_filter_level(self):
        g = matching_graph()
        reg = regularise(g, 1)
        assert booster_level(reg, 0, 4) == 3
        rows = booster_rows(g, reg, g.part(0), g.part(1), min_level=3)
        assert rows == {i: 1 << (4 + i) for i in range(4)}
        assert booster_rows(g, reg, g.part(2), g.part(0)) == {v: 0 for v in range(8, 12)}


class TestBoosterCertificate:
    """코디그리 인증서"""

    def test_certificate_record(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        cert = certify_booster(heavy_fixture, reg, 24, 1)
        assert cert.to_record() == "BOOSTER u=24 v=1 r=1 tau=11 codegree=12 complement=0"
        assert cert.codegree_slack == 0 and cert.complement_slack == 0

    def test_rejects_non_boosters(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        with pytest.raises(InvalidArgumentError):
            certify_booster(heavy_fixture, reg, 24, 0)
        with pytest.raises(InvalidArgumentError):
            certify_booster(heavy_fixture, reg, 12, 24)

    @LEMMA_SETTINGS
    @given(tau=st.integers(1, 3), data=st.data())
    def test_every_booster_certifies(self, tau, data):
        """n ≤ 30 그래프의 모든 r-부스터에서 deg(u,v) ≥ τ + r 과 여집합 한계가 성립"""
        g = data.draw(dense_tripartite_graphs(max_part=30, tau=tau))
        reg = regularise(g, tau)
        for label in classify_edges(g, reg):
            if not label.is_booster:
                continue
            cert = certify_booster(g, reg, label.u, label.v)
            assert cert.codegree == label.heavy_level
            assert cert.codegree_slack >= 0
            assert cert.complement_slack >= 0


class TestGraverTriangle:
    """δ ≥ n + 1 이면 삼각형"""

    def test_complete(self, dense_fixture):
        w = graver_triangle(dense_fixture)
        assert (w.a_set, w.b_set, w.c_set) == ((0,), (12,), (24,))
        assert kttt_violation(dense_fixture, w) is None

    def test_starts_from_smallest_f_plus(self, heavy_fixture):
        w = graver_triangle(heavy_fixture)
        assert (w.a_set, w.b_set, w.c_set) == ((1,), (12,), (24,))

    @CORPUS_SETTINGS
    @given(g=dense_tripartite_graphs(max_part=30, tau=1))
    def test_always_a_triangle(self, g):
        """δ ≥ n + 1 인 n ≤ 30 그래프 200개 모두에서 검증되는 삼각형"""
        assert kttt_violation(g, graver_triangle(g)) is None

    def test_needs_degree_above_n(self):
        with pytest.raises(InfeasibleError):
            graver_triangle(TripartiteGraph.from_edges((1, 1, 1), [(0, 1), (1, 2)]))


class TestStructureExtract:
    """구조 추출"""

    def test_complete_gives_witness(self):
        g = complete_tripartite(3, 3, 3)
        reg = regularise(g)
        result = structure_extract(g, reg, g.part(0), g.part(1), g.part(2), t=2, K=1)
        assert result.tuple == (3, 4)
        assert result.a1.members() == (0, 1, 2)
        assert result.c_star.size == 0
        assert result.witness is not None
        assert kttt_violation(g, result.witness) is None

    def test_rejects_non_cyclic_parts(self):
        g = complete_tripartite(3, 3, 3)
        reg = regularise(g)
        with pytest.raises(InvalidArgumentError):
            structure_extract(g, reg, g.part(0), g.part(2), g.part(1), t=2, K=1)

    def test_rejects_rows_outside_graph(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        g = heavy_fixture
        with pytest.raises(InvalidArgumentError):
            structure_extract(g, reg, g.part(2), g.part(0), g.part(1), h={24: 1 << 0}, t=1, K=1)

    def test_rejects_non_positive_k(self):
        g = complete_tripartite(3, 3, 3)
        with pytest.raises(InvalidArgumentError):
            structure_extract(g, regularise(g), g.part(0), g.part(1), g.part(2), t=2, K=0)


class TestIncrementStep:
    """증분 단계"""

    def test_complete_returns_witness(self):
        g = complete_tripartite(3, 3, 3)
        reg = regularise(g)
        result = increment_step(g, reg, g.part(0), g.part(1), t=2, K=1)
        assert result.witness is not None
        assert kttt_violation(g, result.witness) is None

    def test_lambda_range_checked(self):
        g = complete_tripartite(3, 3, 3)
        reg = regularise(g)
        with pytest.raises(InvalidArgumentError):
            increment_step(g, reg, g.part(0), g.part(1), t=2, K=1, lam=2)

    def test_rejects_non_booster_rows(self, heavy_fixture):
        g = heavy_fixture
        reg = regularise(g)
        # V2 → V3 간선은 수준 −1
        with pytest.raises(InvalidArgumentError):
            increment_step(g, reg, g.part(1), g.part(2), h={12: 1 << 24}, t=1, K=1)

    def test_refines_on_kttt_free_bundle(self):
        """K_{2,2,2}-free 묶음에서는 증거 없이 H′ ⊂ H 를 돌려줌"""
        g = compose_extremal(Recipe(t=2, k=2, sigma=7, gadget="pg", q=2)).graph
        reg = regularise(g)
        for p in range(3):
            a, b = g.part(p), g.part((p + 1) % 3)
            h = booster_rows(g, reg, a, b)
            if any(h.values()):
                break
        result = increment_step(g, reg, a, b, t=2, K=1)
        assert result.witness is None
        assert result.stage in ("sparse", "b_star_star", "b_star")
        for u, row in result.h_prime.items():
            assert u in result.a_star
            assert row & ~h[u] == 0
        if result.precondition_held:
            assert result.h_prime_edges > 0
        assert result.max_codegree <= result.input_max_codegree


class TestSquads:
    """스쿼드 탐지"""

    def test_threshold(self):
        assert squad_threshold(1) == 1
        assert squad_threshold(800) == 1
        assert squad_threshold(801) == 2

    def test_matching_graph_squad(self):
        g = matching_graph()
        reg = regularise(g, 1)
        assert backward_booster_count(g, reg, 5, 2) == 1
        certs = find_squads(g, reg, t=1, k=1, r=1)
        assert len(certs) == 1
        cert = certs[0]
        assert cert.part == 1
        assert cert.vertices == VertexSet.of(range(4, 8))
        assert cert.to_record(reg.tau) == "SQUAD r=1 t=1 k=1 tau=1 part=1 verts=4,5,6,7 counts=1,1,1,1"

    def test_threshold_not_met(self):
        g = matching_graph()
        reg = regularise(g, 1)
        assert find_squads(g, reg, t=1, k=801, r=1) == []
        assert find_squads(g, reg, t=2, k=1, r=1) == []

    def test_best_squad_scans_r_downwards(self):
        g = matching_graph()
        reg = regularise(g, 1)
        best = best_squad(g, reg, t=1, k=1)
        assert best is not None and best.r == 1
        assert best_squad(g, reg, t=2, k=1) is None

    def test_none_on_fixtures(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        assert best_squad(heavy_fixture, reg, t=1, k=1) is None

    def test_rejects_bad_parameters(self):
        g = matching_graph()
        with pytest.raises(InvalidArgumentError):
            find_squads(g, regularise(g, 1), t=1, k=0, r=1)
