import os
import sys
from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

# 프로젝트 루트를 path에 추가
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import reset_config  # noqa: E402
from logging_config import reset_logging  # noqa: E402
from tritur.graph_core import BipartiteGraph, TripartiteBuilder, TripartiteGraph  # noqa: E402
from tritur.metrics import reset_metrics  # noqa: E402


PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

# 오라클 동치와 Graver 말뭉치 (200개), 정규화/부스터 말뭉치 (100개)
CORPUS_SETTINGS = settings(
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
LEMMA_SETTINGS = settings(CORPUS_SETTINGS, max_examples=100)


@pytest.fixture(autouse=True)
def clean_singletons():
    """설정, 로깅, 메트릭 싱글턴 초기화"""
    reset_config()
    reset_metrics()
    yield
    reset_config()
    reset_metrics()
    reset_logging()


# ============================================================
# 나이브 오라클 (테스트 전용)
# ============================================================

def naive_contains_ktt(h: BipartiteGraph, t: int) -> bool:
    """왼쪽 t-부분집합마다 공통 이웃 수를 직접 센다"""
    for left in combinations(range(h.left_size), t):
        common = [r for r in range(h.right_size) if all(h.adj[l] >> r & 1 for l in left)]
        if len(common) >= t:
            return True
    return False


def naive_contains_kttt(g: TripartiteGraph, t: int) -> bool:
    """A 의 t-부분집합 전부, 그 공통 이웃 안의 B 의 t-부분집합 전부를 보고 C 후보 수를 센다"""
    parts = [g.part(i).members() for i in range(3)]
    for a in combinations(parts[0], t):
        b_pool = [y for y in parts[1] if all(g.adj[x] >> y & 1 for x in a)]
        for b in combinations(b_pool, t):
            c_pool = [z for z in parts[2] if all(g.adj[z] >> x & 1 for x in a + b)]
            if len(c_pool) >= t:
                return True
    return False


# ============================================================
# 전략
# ============================================================

@st.composite
def bipartite_graphs(draw, max_side=14):
    left = draw(st.integers(1, max_side))
    right = draw(st.integers(1, max_side))
    rows = tuple(draw(st.integers(0, (1 << right) - 1)) for _ in range(left))
    return BipartiteGraph(left, right, rows)


@st.composite
def tripartite_graphs(draw, max_part=5, balanced=False, dense=False):
    """정점마다 뒤쪽 파트로 향하는 행을 비트마스크 하나로 뽑음 (dense 면 두 마스크의 OR, 약 3/4)"""
    if balanced:
        n = draw(st.integers(1, max_part))
        sizes = (n, n, n)
    else:
        sizes = tuple(draw(st.integers(1, max_part)) for _ in range(3))
    builder = TripartiteBuilder(*sizes)
    o = (0, sizes[0], sizes[0] + sizes[1], sum(sizes))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        full = (1 << sizes[j]) - 1
        for u in range(o[i], o[i + 1]):
            row = draw(st.integers(0, full))
            if dense:
                row |= draw(st.integers(0, full))
            for bit in range(sizes[j]):
                if row >> bit & 1:
                    builder.add_edge(u, o[j] + bit)
    return builder.finalize()


@st.composite
def dense_tripartite_graphs(draw, max_part=8, tau=1):
    """완전 삼분 그래프에서 δ ≥ n + τ 를 지키며 무작위 순서로 간선을 지운 그래프"""
    n = draw(st.integers(max(tau, 1), max_part))
    rnd = draw(st.randoms(use_true_random=False))
    edges = [(u, v) for u in range(3 * n) for v in range(u + 1, 3 * n) if u // n != v // n]
    rnd.shuffle(edges)
    attempts = draw(st.integers(0, 2 * n * n))
    degree = [2 * n] * (3 * n)
    removed = set()
    for u, v in edges[:attempts]:
        if min(degree[u], degree[v]) - 1 < n + tau:
            continue
        removed.add((u, v))
        degree[u] -= 1
        degree[v] -= 1
    return TripartiteGraph.from_edges((n, n, n), sorted(set(edges) - removed))


# ============================================================
# 심어 둔 고정 그래프
# ============================================================

def complete_minus_matching(n: int) -> TripartiteGraph:
    """K_{n,n,n} 에서 V1–V3 완전 매칭 (i, 2n + i) 를 뺀 그래프 (τ = n − 1)"""
    builder = TripartiteBuilder(n, n, n)
    builder.add_complete(range(n), range(n, 2 * n))
    builder.add_complete(range(n, 2 * n), range(2 * n, 3 * n))
    for i in range(n):
        for j in range(n):
            if i != j:
                builder.add_edge(i, 2 * n + j)
    return builder.finalize()


def matching_graph() -> TripartiteGraph:
    """n = 4, V1–V2 완전 매칭, 나머지 두 쌍은 완전 (τ = 1, V1→V2 부스터 수준 3)"""
    builder = TripartiteBuilder(4, 4, 4)
    builder.add_complete(range(4), range(8, 12))
    builder.add_complete(range(4, 8), range(8, 12))
    for i in range(4):
        builder.add_edge(i, 4 + i)
    return builder.finalize()


@pytest.fixture
def heavy_fixture() -> TripartiteGraph:
    return complete_minus_matching(12)


@pytest.fixture
def dense_fixture() -> TripartiteGraph:
    builder = TripartiteBuilder(12, 12, 12)
    builder.add_complete(range(12), range(12, 36))
    builder.add_complete(range(12, 24), range(24, 36))
    return builder.finalize()
