"""
tritur 금지 패턴 탐지 모듈

삼각형, K_{t,t}, K_{t,t,t}, K_{1,1,t} 의 정확한 탐지와 계수, 그리고
공통 이웃 밀집 핵 추출(결정적 탈확률화)을 제공합니다.

탐지는 완전 탐색이며 근사가 없습니다. 탐색 예산을 넘기면
SearchBudgetExceeded 를 던지고 "없음"을 보고하지 않습니다.
보고되는 증거는 여사전식으로 가장 작은 것입니다.

사용법:
    from tritur.patterns import contains_kttt, find_triangle
    witness = contains_kttt(g, 2)
    if witness is not None:
        print(witness.to_record())   # KTTT t=2 A=0,1 B=5,6 C=9,10
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

from config import get_config
from logging_config import get_logger
from tritur.errors import InvalidArgumentError, SearchBudgetExceeded, TriturError
from tritur.graph_core import (
    BipartiteGraph,
    TripartiteGraph,
    VertexSet,
    iter_bits,
    lowest_bit,
)
from tritur.metrics import get_metrics
from tritur.search import SearchBudget, colex_search

logger = get_logger("patterns")


def _ids(values) -> str:
    return ",".join(str(v) for v in values)


# ============================================================
# 증거 타입
# ============================================================

@dataclass(frozen=True)
class KttWitness:
    """이분 그래프의 K_{t,t} (left 는 왼쪽, right 는 오른쪽 지역 번호)"""

    t: int
    left: tuple[int, ...]
    right: tuple[int, ...]

    def to_record(self) -> str:
        return f"KTT t={self.t} A={_ids(self.left)} B={_ids(self.right)}"


@dataclass(frozen=True)
class KtttWitness:
    """삼분 그래프의 K_{t,t,t} (a_set ⊂ V1, b_set ⊂ V2, c_set ⊂ V3)"""

    t: int
    a_set: tuple[int, ...]
    b_set: tuple[int, ...]
    c_set: tuple[int, ...]

    @classmethod
    def from_parts(cls, g: TripartiteGraph, t: int, *groups) -> KtttWitness:
        """파트 순서와 무관하게 주어진 세 정점 묶음을 V1/V2/V3 자리에 배치"""
        slots: dict[int, tuple[int, ...]] = {}
        for group in groups:
            group = tuple(sorted(group))
            slots[g.part_of(group[0])] = group
        return cls(t, slots[0], slots[1], slots[2])

    def to_record(self) -> str:
        return (
            f"KTTT t={self.t} A={_ids(self.a_set)} "
            f"B={_ids(self.b_set)} C={_ids(self.c_set)}"
        )


Witness = Union[KttWitness, KtttWitness]


def ktt_violation(h: BipartiteGraph, w: KttWitness) -> Optional[str]:
    """K_{t,t} 증거를 인접 행렬로 재검증하여 처음 어긋난 필드 이름 반환 (정상이면 None)"""
    if w.t < 1:
        return "t"
    for name, side, size in (("A", w.left, h.left_size), ("B", w.right, h.right_size)):
        if len(side) != w.t or len(set(side)) != w.t:
            return name
        if any(not 0 <= v < size for v in side):
            return name
    for l in w.left:
        for r in w.right:
            if not h.adj[l] >> r & 1:
                return "B"
    return None


def kttt_violation(g: TripartiteGraph, w: KtttWitness) -> Optional[str]:
    """K_{t,t,t} 증거 재검증 (파트, 크기, 3t² 간선)"""
    if w.t < 1:
        return "t"
    sets = (("A", w.a_set), ("B", w.b_set), ("C", w.c_set))
    for part, (name, group) in enumerate(sets):
        if len(group) != w.t or len(set(group)) != w.t:
            return name
        for v in group:
            if not 0 <= v < g.vertex_count or g.part_of(v) != part:
                return name
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for u in sets[i][1]:
            for v in sets[j][1]:
                if not g.adj[u] >> v & 1:
                    return sets[j][0]
    return None


# ============================================================
# 삼각형
# ============================================================

def find_triangle(g: TripartiteGraph) -> Optional[KtttWitness]:
    """각 파트에 한 정점씩인 삼각형 (V1 정점, V2 정점, V3 정점 순으로 가장 작은 것)"""
    v2_mask, v3_mask = g.part_masks[1], g.part_masks[2]
    for a in g.part(0):
        for b in iter_bits(g.adj[a] & v2_mask):
            common = g.adj[a] & g.adj[b] & v3_mask
            if common:
                return KtttWitness(1, (a,), (b,), (lowest_bit(common),))
    return None


def count_triangles(g: TripartiteGraph, a: VertexSet, b: VertexSet, c: VertexSet) -> int:
    """A × B × C 의 삼각형 수 (정점 삼중쌍 전수 확인)"""
    total = 0
    for x in a:
        for y in b:
            if not g.adj[x] >> y & 1:
                continue
            for z in c:
                if g.adj[x] >> z & 1 and g.adj[y] >> z & 1:
                    total += 1
    return total


# ============================================================
# K_{t,t}, K_{t,t,t}
# ============================================================

def _resolve(limit: Optional[int], threads: Optional[int]) -> tuple[int, int]:
    cfg = get_config()
    return (
        cfg.search_budget if limit is None else limit,
        cfg.threads if threads is None else threads,
    )


def _record_search(examined: int, found: bool) -> None:
    metrics = get_metrics()
    metrics.increment("subsets_examined_total", examined)
    if found:
        metrics.increment("witnesses_found_total")


def find_ktt_in_rows(rows: list[int], t: int, budget: SearchBudget) -> Optional[tuple[tuple[int, ...], int]]:
    """행 비트셋들 중 공통 이웃이 t 이상인 여사전식 최소 t-부분집합 (공유 예산 사용)"""
    viable = lambda mask: mask.bit_count() >= t
    accept = lambda subset, mask, _budget: (subset, mask)
    found, _ = colex_search(rows, t, -1, viable, accept, limit=budget.limit, budget=budget)
    return found


def contains_ktt(h: BipartiteGraph, t: int, *, limit: Optional[int] = None,
                 threads: Optional[int] = None) -> Optional[KttWitness]:
    """H 가 K_{t,t} 를 포함하면 증거, 아니면 None

    작은 쪽(동률이면 왼쪽)의 t-부분집합을 여사전식으로 열거합니다.
    """
    if t < 1:
        raise InvalidArgumentError(f"t must be at least 1, got {t}")
    limit, threads = _resolve(limit, threads)
    if h.left_size < t or h.right_size < t:
        return None

    use_left = h.left_size <= h.right_size
    rows = list(h.adj) if use_left else list(h.right_adj)
    viable = lambda mask: mask.bit_count() >= t
    accept = lambda subset, mask, _budget: (subset, mask)

    try:
        found, examined = colex_search(rows, t, -1, viable, accept, limit=limit, threads=threads)
    except SearchBudgetExceeded as exc:
        _record_search(exc.examined, False)
        logger.warning(f"K_{{{t},{t}}} search stopped: {exc}")
        raise
    _record_search(examined, found is not None)
    logger.debug(f"K_{{{t},{t}}} search examined {examined} subsets")
    if found is None:
        return None

    subset, mask = found
    other = tuple(iter_bits(mask))[:t]
    if use_left:
        return KttWitness(t, subset, other)
    return KttWitness(t, other, subset)


def contains_kttt_within(g: TripartiteGraph, x: VertexSet, y: VertexSet, z: VertexSet, t: int, *,
                         limit: Optional[int] = None,
                         threads: Optional[int] = None) -> Optional[KtttWitness]:
    """X × Y × Z (서로 다른 세 파트의 부분집합) 안의 K_{t,t,t}

    Z 의 t-부분집합마다 공통 이웃이 X, Y 각각에 t 개 이상 남으면
    공통 이웃 사이의 이분 그래프에서 K_{t,t} 를 찾습니다.
    """
    if t < 1:
        raise InvalidArgumentError(f"t must be at least 1, got {t}")
    limit, threads = _resolve(limit, threads)
    groups = (x, y, z)
    parts = set()
    for group in groups:
        group_parts = {g.part_of(v) for v in group}
        if len(group_parts) > 1:
            raise InvalidArgumentError("each vertex set must lie inside one part")
        parts |= group_parts
    if any(group.size < t for group in groups):
        return None
    if len(parts) != 3:
        raise InvalidArgumentError("vertex sets must lie in three distinct parts")

    z_ids = z.members()
    rows = [g.adj[c] for c in z_ids]
    start = x.bits | y.bits

    def viable(mask: int) -> bool:
        return (mask & x.bits).bit_count() >= t and (mask & y.bits).bit_count() >= t

    def accept(subset, mask, budget):
        xs = tuple(iter_bits(mask & x.bits))
        ys_mask = mask & y.bits
        # 공통 이웃 사이 이분 그래프에서 작은 쪽을 열거
        if len(xs) <= ys_mask.bit_count():
            inner = find_ktt_in_rows([g.adj[a] & ys_mask for a in xs], t, budget)
            if inner is None:
                return None
            chosen, other = inner
            side_x = tuple(xs[i] for i in chosen)
            side_y = tuple(iter_bits(other))[:t]
        else:
            ys = tuple(iter_bits(ys_mask))
            xs_mask = mask & x.bits
            inner = find_ktt_in_rows([g.adj[b] & xs_mask for b in ys], t, budget)
            if inner is None:
                return None
            chosen, other = inner
            side_y = tuple(ys[i] for i in chosen)
            side_x = tuple(iter_bits(other))[:t]
        side_z = tuple(z_ids[i] for i in subset)
        return KtttWitness.from_parts(g, t, side_x, side_y, side_z)

    try:
        found, examined = colex_search(rows, t, start, viable, accept, limit=limit, threads=threads)
    except SearchBudgetExceeded as exc:
        _record_search(exc.examined, False)
        logger.warning(f"K_{{{t},{t},{t}}} search stopped: {exc}")
        raise
    _record_search(examined, found is not None)
    logger.debug(f"K_{{{t},{t},{t}}} search examined {examined} subsets")
    return found


def contains_kttt(g: TripartiteGraph, t: int, *, limit: Optional[int] = None,
                  threads: Optional[int] = None) -> Optional[KtttWitness]:
    """G 가 K_{t,t,t} 를 포함하면 증거, 아니면 None (V3 의 t-부분집합 기준 열거)"""
    return contains_kttt_within(g, g.part(0), g.part(1), g.part(2), t,
                                limit=limit, threads=threads)


# ============================================================
# 계수
# ============================================================

def _check_distinct_parts(g: TripartiteGraph, *groups: VertexSet) -> None:
    seen = set()
    for group in groups:
        parts = {g.part_of(v) for v in group}
        if len(parts) > 1:
            raise InvalidArgumentError("each vertex set must lie inside one part")
        if parts & seen:
            raise InvalidArgumentError("vertex sets must lie in distinct parts")
        seen |= parts


def count_k11t(g: TripartiteGraph, a: VertexSet, b: VertexSet, c: VertexSet, t: int) -> int:
    """Σ_{ab ∈ E(A,B)} C(|N(a,b) ∩ C|, t) (정수 연산)"""
    _check_distinct_parts(g, a, b, c)
    total = 0
    for x in a:
        for y in iter_bits(g.adj[x] & b.bits):
            total += math.comb((g.adj[x] & g.adj[y] & c.bits).bit_count(), t)
    return total


def as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def kst_threshold(m: int, n: int, t: int, K=None) -> int:
    """⌈K(m·n^{1−1/t} + n)⌉ (유리수 비교로 정확히 올림). K 를 생략하면 설정의 kst_constant"""
    if m < 1 or n < 1 or t < 1:
        raise InvalidArgumentError("m, n, t must be at least 1")
    k = as_fraction(get_config().kst_constant if K is None else K)
    if k <= 0:
        raise InvalidArgumentError("K must be positive")

    def meets(e: int) -> bool:
        # e ≥ K m n^{(t-1)/t} + K n  ⇔  ((e − Kn) / Km)^t ≥ n^{t-1}
        rest = e - k * n
        if rest < 0:
            return False
        return (rest / (k * m)) ** t >= n ** (t - 1)

    estimate = math.ceil(float(k) * (m * n ** (1 - 1 / t) + n))
    e = max(estimate, 0)
    while not meets(e):
        e += 1
    while e > 0 and meets(e - 1):
        e -= 1
    return e


def at_least_root_bound(x: int, k: Fraction, c: int, t: int) -> bool:
    """x ≥ k·c^{1−1/t} 의 정확한 판정"""
    if x < 0:
        return False
    return (Fraction(x) / k) ** t >= Fraction(c) ** (t - 1)


@dataclass(frozen=True)
class K11tCheck:
    """K_{1,1,t} 계수 보조정리의 가설과 하한을 정확한 계수와 비교한 결과"""

    edges: int
    edge_threshold: int
    min_codegree: int
    required_codegree: Fraction
    lower_bound: float
    count: int

    @property
    def hypotheses_met(self) -> bool:
        return self.edges >= self.edge_threshold and self.min_codegree >= self.required_codegree

    @property
    def bound_holds(self) -> bool:
        return self.count >= self.lower_bound


def k11t_dense_check(g: TripartiteGraph, a: VertexSet, b: VertexSet, c: VertexSet,
                     t: int, lam, K=None) -> K11tCheck:
    """e(G[A,B]) ≥ K(|A||B|^{1−1/t} + |B|) 이고 모든 A-B 간선의 코디그리가 max(λ|C|, t) 이상이면
    K_{1,1,t} 수는 e·(λ/t)^t·|C|^t 이상"""
    _check_distinct_parts(g, a, b, c)
    if t < 1 or a.size == 0 or b.size == 0:
        raise InvalidArgumentError("need t ≥ 1 and non-empty A, B")
    lam = as_fraction(lam)
    edges = 0
    min_codegree = None
    for x in a:
        for y in iter_bits(g.adj[x] & b.bits):
            edges += 1
            d = (g.adj[x] & g.adj[y] & c.bits).bit_count()
            min_codegree = d if min_codegree is None else min(min_codegree, d)
    required = max(lam * c.size, Fraction(t))
    lower = edges * float(lam / t) ** t * c.size ** t
    return K11tCheck(
        edges=edges,
        edge_threshold=kst_threshold(a.size, b.size, t, K),
        min_codegree=min_codegree or 0,
        required_codegree=required,
        lower_bound=lower,
        count=count_k11t(g, a, b, c, t),
    )


# ============================================================
# 공통 이웃 밀집 핵 추출
# ============================================================

def extraction_bound(lam: Fraction, t: int, a_size: int) -> float:
    """½(λ/e)^t·|A| (보고용 근사값)"""
    return 0.5 * (float(lam) / math.e) ** t * a_size


def meets_extraction_bound(score: int, lam: Fraction, t: int, a_size: int) -> bool:
    """score ≥ ½(λ/e)^t·|A| 를 60자리 십진 연산으로 판정 (2·score·e^t ≥ λ^t·|A|)"""
    rhs = lam ** t * a_size
    with localcontext() as ctx:
        ctx.prec = 60
        lhs = 2 * score * Decimal(1).exp() ** t * rhs.denominator
        return lhs >= rhs.numerator


@dataclass(frozen=True)
class ExtractionResult:
    """b₁…b_t (B 의 지역 번호)와 그 공통 이웃 안의 좋은 정점 A′ (A 의 지역 번호)"""

    tuple: tuple[int, ...]
    a_prime: VertexSet
    score: int
    lam: Fraction
    t: int
    a_size: int

    @property
    def bound(self) -> float:
        return extraction_bound(self.lam, self.t, self.a_size)

    @property
    def meets_bound(self) -> bool:
        return meets_extraction_bound(self.score, self.lam, self.t, self.a_size)


def extract_dense_core(h: BipartiteGraph, t: int, *, limit: Optional[int] = None) -> ExtractionResult:
    """A = 왼쪽, B = 오른쪽. |N(b₁…b_t) ∩ 좋은 정점| 을 최대화하는 t-부분집합을 고른다.

    좋은 정점: B 로의 차수가 ½λ|B| 이상. 동률이면 사전식으로 가장 작은 튜플.
    """
    if t < 1:
        raise InvalidArgumentError(f"t must be at least 1, got {t}")
    if h.left_size == 0 or h.right_size == 0:
        raise InvalidArgumentError("both sides must be non-empty")
    limit, _ = _resolve(limit, 1)
    edges = h.edge_count
    lam = Fraction(edges, h.left_size * h.right_size)
    if lam * h.right_size < t:
        raise InvalidArgumentError(f"density condition λ|B| ≥ t fails (λ|B| = {float(lam * h.right_size):.3f})")

    # deg(a) ≥ ½λ|B| = e / (2|A|)
    good = 0
    for a, row in enumerate(h.adj):
        if 2 * h.left_size * row.bit_count() >= edges:
            good |= 1 << a

    rows = h.right_adj
    budget = SearchBudget(limit)
    best: Optional[tuple[int, ...]] = None
    best_mask = 0
    best_score = -1
    try:
        for subset in combinations(range(h.right_size), t):
            budget.charge()
            mask = good
            for b in subset:
                mask &= rows[b]
            score = mask.bit_count()
            if score > best_score:
                best, best_mask, best_score = subset, mask, score
    finally:
        get_metrics().increment("subsets_examined_total", budget.examined)

    result = ExtractionResult(best, VertexSet(best_mask), best_score, lam, t, h.left_size)
    if not result.meets_bound:
        raise TriturError(
            f"extraction score {best_score} below ½(λ/e)^t|A| = {result.bound:.4f}"
        )
    logger.debug(f"dense core tuple={best} score={best_score} bound={result.bound:.4f}")
    return result
