"""patterns 모듈 테스트"""
import math
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from config import get_config, reset_config
from tests.conftest import (
    CORPUS_SETTINGS,
    PROPERTY_SETTINGS,
    bipartite_graphs,
    naive_contains_ktt,
    naive_contains_kttt,
    tripartite_graphs,
)
from tritur.constructions import complete_tripartite
from tritur.errors import InvalidArgumentError, SearchBudgetExceeded, TriturError
from tritur.graph_core import BipartiteGraph, TripartiteGraph, VertexSet
from tritur.metrics import get_metrics
from tritur.patterns import (
    KttWitness,
    KtttWitness,
    contains_ktt,
    contains_kttt,
    contains_kttt_within,
    count_k11t,
    count_triangles,
    extract_dense_core,
    find_triangle,
    k11t_dense_check,
    kst_threshold,
    ktt_violation,
    kttt_violation,
    meets_extraction_bound,
)


def _from_networkx(graph: nx.Graph, left) -> BipartiteGraph:
    left = sorted(left)
    right = sorted(set(graph.nodes) - set(left))
    index = {v: i for i, v in enumerate(right)}
    rows = []
    for u in left:
        row = 0
        for v in graph.neighbors(u):
            row |= 1 << index[v]
        rows.append(row)
    return BipartiteGraph(len(left), len(right), tuple(rows))


class TestTriangles:
    """삼각형 탐지와 계수"""

    def test_find_triangle_smallest(self):
        g = complete_tripartite(2, 2, 2)
        w = find_triangle(g)
        assert (w.a_set, w.b_set, w.c_set) == ((0,), (2,), (4,))
        assert kttt_violation(g, w) is None

    def test_bipartite_has_none(self):
        g = TripartiteGraph.from_edges((2, 2, 2), [(0, 2), (0, 4), (1, 3)])
        assert find_triangle(g) is None

    @PROPERTY_SETTINGS
    @given(g=tripartite_graphs())
    def test_count_matches_networkx(self, g):
        """삼분 그래프의 모든 삼각형은 세 파트를 가로지름"""
        nxg = nx.Graph(list(g.edges()))
        nxg.add_nodes_from(g.vertices())
        expected = sum(nx.triangles(nxg).values()) // 3
        assert count_triangles(g, g.part(0), g.part(1), g.part(2)) == expected
        assert (find_triangle(g) is None) == (expected == 0)

    @PROPERTY_SETTINGS
    @given(g=tripartite_graphs())
    def test_k111_equals_triangles(self, g):
        """t = 1 에서 K_{1,1,1} 수는 삼각형 수"""
        parts = [g.part(i) for i in range(3)]
        assert count_k11t(g, *parts, 1) == count_triangles(g, *parts)


class TestKtt:
    """K_{t,t} 탐지"""

    def test_heawood_is_c4_free(self):
        """Heawood 그래프는 K_{2,2}-free, K_{1,1} 은 있음"""
        heawood = nx.heawood_graph()
        left, _ = nx.bipartite.sets(heawood)
        h = _from_networkx(heawood, left)
        assert contains_ktt(h, 2) is None
        assert contains_ktt(h, 1) is not None

    def test_c8_is_c4_free(self):
        cycle = nx.cycle_graph(8)
        h = _from_networkx(cycle, [0, 2, 4, 6])
        assert contains_ktt(h, 2) is None

    def test_complete_bipartite_witness(self):
        h = BipartiteGraph(3, 3, (0b111,) * 3)
        w = contains_ktt(h, 2)
        assert w == KttWitness(2, (0, 1), (0, 1))
        assert ktt_violation(h, w) is None
        assert get_metrics().get_counter("witnesses_found_total") == 1

    def test_right_side_enumeration(self):
        """오른쪽이 더 작으면 오른쪽을 열거해도 증거는 (왼쪽, 오른쪽) 순서"""
        h = BipartiteGraph(4, 2, (0b11, 0b11, 0b00, 0b01))
        w = contains_ktt(h, 2)
        assert w.left == (0, 1) and w.right == (0, 1)
        assert ktt_violation(h, w) is None

    def test_invalid_t(self):
        with pytest.raises(InvalidArgumentError):
            contains_ktt(BipartiteGraph(1, 1, (1,)), 0)

    def test_too_small_sides(self):
        assert contains_ktt(BipartiteGraph(1, 5, (0b11111,)), 2) is None

    def test_budget_exceeded(self):
        h = BipartiteGraph(12, 12, tuple(1 << i for i in range(12)))
        with pytest.raises(SearchBudgetExceeded):
            contains_ktt(h, 3, limit=5)

    @CORPUS_SETTINGS
    @given(h=bipartite_graphs(max_side=14), t=st.integers(1, 3))
    def test_oracle_equivalence(self, h, t):
        """한 쪽 14 정점 이하 200개 그래프에서 완전 열거 오라클과 같은 판정"""
        w = contains_ktt(h, t)
        assert (w is not None) == naive_contains_ktt(h, t)
        if w is not None:
            assert ktt_violation(h, w) is None

    def test_violation_fields(self):
        h = BipartiteGraph(2, 2, (0b11, 0b01))
        assert ktt_violation(h, KttWitness(2, (0, 1), (0, 1))) == "B"
        assert ktt_violation(h, KttWitness(2, (0,), (0, 1))) == "A"
        assert ktt_violation(h, KttWitness(0, (), ())) == "t"


class TestKttt:
    """K_{t,t,t} 탐지"""

    def test_complete_has_witness(self):
        g = complete_tripartite(3, 3, 3)
        w = contains_kttt(g, 2)
        assert w == KtttWitness(2, (0, 1), (3, 4), (6, 7))
        assert w.to_record() == "KTTT t=2 A=0,1 B=3,4 C=6,7"

    def test_parallel_same_witness(self):
        g = complete_tripartite(4, 4, 4)
        assert contains_kttt(g, 2, threads=3) == contains_kttt(g, 2, threads=1)

    def test_within_rejects_mixed_parts(self):
        g = complete_tripartite(2, 2, 2)
        with pytest.raises(InvalidArgumentError):
            contains_kttt_within(g, VertexSet.of([0, 2]), g.part(1), g.part(2), 1)

    def test_within_subsets(self):
        g = complete_tripartite(3, 3, 3)
        w = contains_kttt_within(g, VertexSet.of([1, 2]), VertexSet.of([4, 5]), VertexSet.of([7, 8]), 2)
        assert (w.a_set, w.b_set, w.c_set) == ((1, 2), (4, 5), (7, 8))

    def test_from_parts_orders_by_part(self):
        g = complete_tripartite(1, 1, 1)
        w = KtttWitness.from_parts(g, 1, (2,), (0,), (1,))
        assert (w.a_set, w.b_set, w.c_set) == ((0,), (1,), (2,))

    @CORPUS_SETTINGS
    @given(data=st.data(), dense=st.booleans(), t=st.integers(1, 3))
    def test_oracle_equivalence(self, data, dense, t):
        """파트 14 정점 이하 200개 그래프에서 오라클과 같은 판정, 증거는 재검증됨"""
        g = data.draw(tripartite_graphs(max_part=14, dense=dense))
        w = contains_kttt(g, t)
        assert (w is not None) == naive_contains_kttt(g, t)
        if w is not None:
            assert kttt_violation(g, w) is None

    @PROPERTY_SETTINGS
    @given(g=tripartite_graphs(max_part=6, dense=True), t=st.integers(1, 3))
    def test_monotone_in_t(self, g, t):
        """K_{t+1,t+1,t+1} 가 있으면 K_{t,t,t} 도 있음"""
        if contains_kttt(g, t + 1) is not None:
            assert contains_kttt(g, t) is not None

    def test_violation_names_first_field(self):
        g = complete_tripartite(2, 2, 2)
        good = KtttWitness(2, (0, 1), (2, 3), (4, 5))
        assert kttt_violation(g, good) is None
        assert kttt_violation(g, KtttWitness(2, (0, 2), (2, 3), (4, 5))) == "A"
        assert kttt_violation(g, KtttWitness(2, (0, 1), (2, 3), (4,))) == "C"
        sparse = TripartiteGraph.from_edges((1, 1, 1), [(0, 1), (0, 2)])
        assert kttt_violation(sparse, KtttWitness(1, (0,), (1,), (2,))) == "C"


class TestCounting:
    """K_{1,1,t} 계수와 Kővári–Sós–Turán 임계값"""

    def test_count_k11t_complete(self):
        g = complete_tripartite(2, 2, 4)
        parts = [g.part(i) for i in range(3)]
        assert count_k11t(g, *parts, 2) == 4 * math.comb(4, 2)

    def test_count_k11t_needs_distinct_parts(self):
        g = complete_tripartite(2, 2, 2)
        with pytest.raises(InvalidArgumentError):
            count_k11t(g, g.part(0), g.part(0), g.part(2), 1)

    @pytest.mark.parametrize("m,n,t,K", [(4, 9, 2, 1), (10, 16, 2, 4), (5, 8, 3, 2), (3, 3, 1, 1)])
    def test_kst_threshold_is_exact_ceiling(self, m, n, t, K):
        """결과 e 는 e ≥ K(m n^{1−1/t} + n) 인 가장 작은 정수"""
        e = kst_threshold(m, n, t, K)
        value = K * (m * n ** (1 - 1 / t) + n)
        assert e - 1 < value + 1e-9
        assert e >= value - 1e-9

    def test_kst_threshold_perfect_square(self):
        assert kst_threshold(4, 9, 2, 1) == 4 * 3 + 9

    def test_kst_threshold_reads_configured_constant(self, monkeypatch):
        """K 를 생략하면 kst_constant 설정값을 씀"""
        assert kst_threshold(4, 9, 2) == kst_threshold(4, 9, 2, get_config().kst_constant) == 84
        monkeypatch.setenv("TRITUR_KST_CONSTANT", "1")
        reset_config()
        assert kst_threshold(4, 9, 2) == 21

    def test_kst_threshold_met_on_complete(self):
        h = BipartiteGraph(14, 14, ((1 << 14) - 1,) * 14)
        assert h.edge_count >= kst_threshold(14, 14, 1)
        assert contains_ktt(h, 1) is not None

    @CORPUS_SETTINGS
    @given(h=bipartite_graphs(max_side=14), t=st.integers(1, 3))
    def test_kst_threshold_forces_witness(self, h, t):
        """e(H) ≥ kst_threshold(m, n, t, K_cal) 이면 K_{t,t} 증거가 있음"""
        k_cal = get_config().kst_constant
        if h.edge_count >= kst_threshold(h.left_size, h.right_size, t, k_cal):
            w = contains_ktt(h, t)
            assert w is not None
            assert ktt_violation(h, w) is None

    def test_dense_check_on_complete(self):
        g = complete_tripartite(4, 4, 4)
        check = k11t_dense_check(g, g.part(0), g.part(1), g.part(2), 2, Fraction(1), 1)
        assert check.edges == 16
        assert check.count == 16 * math.comb(4, 2)
        assert check.hypotheses_met
        assert check.bound_holds

    def test_dense_check_rejects_empty(self):
        g = complete_tripartite(1, 1, 1)
        with pytest.raises(InvalidArgumentError):
            k11t_dense_check(g, VertexSet(), g.part(1), g.part(2), 1, 1, 1)


class TestExtraction:
    """공통 이웃 밀집 핵 추출"""

    def test_complete_bipartite_takes_everything(self):
        h = BipartiteGraph(3, 4, (0b1111,) * 3)
        result = extract_dense_core(h, 2)
        assert result.tuple == (0, 1)
        assert result.score == 3
        assert result.a_prime.members() == (0, 1, 2)
        assert result.meets_bound

    def test_density_condition(self):
        h = BipartiteGraph(3, 3, (0b001, 0, 0))
        with pytest.raises(InvalidArgumentError):
            extract_dense_core(h, 2)

    def test_exact_bound_comparison(self):
        # ½(1/e)^1·2 ≈ 0.3679
        assert meets_extraction_bound(1, Fraction(1), 1, 2)
        assert not meets_extraction_bound(0, Fraction(1), 1, 2)

    @PROPERTY_SETTINGS
    @given(h=bipartite_graphs(max_side=7), t=st.integers(1, 2))
    def test_score_meets_bound(self, h, t):
        """λ|B| ≥ t 이면 점수는 항상 ½(λ/e)^t|A| 이상"""
        lam = Fraction(h.edge_count, h.left_size * h.right_size)
        if lam * h.right_size < t:
            with pytest.raises(InvalidArgumentError):
                extract_dense_core(h, t)
            return
        result = extract_dense_core(h, t)
        assert result.meets_bound
        # 최대 점수 확인
        good = [a for a, row in enumerate(h.adj) if 2 * h.left_size * row.bit_count() >= h.edge_count]
        best = max(
            sum(1 for a in good if all(h.adj[a] >> b & 1 for b in subset))
            for subset in combinations(range(h.right_size), t)
        )
        assert result.score == best

    def test_raises_when_bound_missed(self, monkeypatch):
        """하한 미달이면 TriturError (불변식 위반 보고)"""
        monkeypatch.setattr("tritur.patterns.meets_extraction_bound", lambda *args: False)
        with pytest.raises(TriturError):
            extract_dense_core(BipartiteGraph(1, 1, (1,)), 1)
