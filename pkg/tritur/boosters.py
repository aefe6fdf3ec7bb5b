"""
tritur 부스터 엔진

f± 정규화, 순방향 간선의 부스터/무거운 간선 분류, 코디그리 인증서,
Graver 삼각형 논증, 구조 추출, 증분 단계(희소화 → U₁/U₂ 분할 → 희소 간선 필터),
스쿼드 탐지를 그래프 위의 결정적 절차로 실행합니다.

순방향 간선 uv: u ∈ V_i, v ∈ V_{i+1 mod 3}.
r-부스터: f⁺(u) + r ≤ f⁺(v).  r-무거운 간선: codegree(u, v) ≥ r.

사용법:
    from tritur.boosters import regularise, classify_edges, certify_booster
    reg = regularise(g)                 # τ 기본값: max(1, δ − n)
    labels = classify_edges(g, reg)
    cert = certify_booster(g, reg, labels[0].u, labels[0].v)
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from config import get_config
from logging_config import get_logger
from tritur.errors import (
    CertificateMismatch,
    InfeasibleError,
    InvalidArgumentError,
    TriturError,
)
from tritur.graph_core import (
    BipartiteGraph,
    TripartiteGraph,
    VertexSet,
    iter_bits,
    lowest_bit,
    min_degree,
    tau_of,
)
from tritur.patterns import (
    KtttWitness,
    as_fraction,
    at_least_root_bound,
    contains_kttt_within,
    extract_dense_core,
    extraction_bound,
    find_ktt_in_rows,
)
from tritur.search import SearchBudget, parallel_map

logger = get_logger("boosters")

# 부분 그래프 H: A 의 정점 → B 쪽 이웃 비트셋 (전역 번호)
EdgeRows = Mapping[int, int]


# ============================================================
# 정규화
# ============================================================

@dataclass(frozen=True)
class Regularisation:
    """정점별 (f⁺, f⁻), f⁺(v) + f⁻(v) = n + τ"""

    n: int
    tau: int
    f_plus: tuple[int, ...]
    f_minus: tuple[int, ...]

    def chain_violations(self, g: TripartiteGraph) -> list[int]:
        """τ ≤ f⁺ ≤ deg⁺, τ ≤ f⁻ ≤ deg⁻, f⁺ + f⁻ = n + τ 중 하나라도 어긋나는 정점"""
        bad = []
        for v in g.vertices():
            fp, fm = self.f_plus[v], self.f_minus[v]
            if not (self.tau <= fp <= g.forward_degree(v)
                    and self.tau <= fm <= g.backward_degree(v)
                    and fp + fm == self.n + self.tau):
                bad.append(v)
        return bad


def default_tau(g: TripartiteGraph) -> int:
    return max(1, tau_of(g))


def regularise(g: TripartiteGraph, tau: Optional[int] = None) -> Regularisation:
    """정규 규칙 f⁺(v) = max(τ, min(deg⁺(v), n)), f⁻(v) = n + τ − f⁺(v)"""
    n = g.n
    if tau is None:
        tau = default_tau(g)
    if tau < 1:
        raise InvalidArgumentError(f"tau must be at least 1, got {tau}")
    required = n + tau
    if min_degree(g) < required:
        vertex = next(v for v in g.vertices() if g.degree(v) < required)
        raise InfeasibleError(vertex, g.degree(vertex), required)

    f_plus = tuple(max(tau, min(g.forward_degree(v), n)) for v in g.vertices())
    f_minus = tuple(n + tau - fp for fp in f_plus)
    return Regularisation(n, tau, f_plus, f_minus)


# ============================================================
# 부스터 분류
# ============================================================

@dataclass(frozen=True)
class BoosterLabel:
    """순방향 간선 (u, v) 의 부스터 수준 f⁺(v) − f⁺(u) 와 코디그리"""

    u: int
    v: int
    booster_level: int
    heavy_level: int

    @property
    def is_booster(self) -> bool:
        return self.booster_level >= 0

    def is_heavy(self, r: int) -> bool:
        return self.heavy_level >= r


def booster_level(reg: Regularisation, u: int, v: int) -> int:
    return reg.f_plus[v] - reg.f_plus[u]


def _labels_from(g: TripartiteGraph, reg: Regularisation, u: int) -> list[BoosterLabel]:
    return [
        BoosterLabel(u, v, booster_level(reg, u, v), (g.adj[u] & g.adj[v]).bit_count())
        for v in iter_bits(g.forward_mask(u))
    ]


def classify_edges(g: TripartiteGraph, reg: Regularisation,
                   threads: Optional[int] = None) -> list[BoosterLabel]:
    """모든 순방향 간선의 라벨 (u 오름차순, 같은 u 안에서 v 오름차순)"""
    threads = get_config().threads if threads is None else threads
    chunks = parallel_map(lambda u: _labels_from(g, reg, u), list(g.vertices()), threads)
    return [label for chunk in chunks for label in chunk]


@dataclass(frozen=True)
class HistogramRow:
    level: int
    edges: int
    min_codegree: int
    max_codegree: int


def booster_histogram(labels: list[BoosterLabel]) -> list[HistogramRow]:
    """부스터 수준별 간선 수와 코디그리 범위"""
    groups: dict[int, list[int]] = {}
    for label in labels:
        groups.setdefault(label.booster_level, []).append(label.heavy_level)
    return [
        HistogramRow(level, len(codegrees), min(codegrees), max(codegrees))
        for level, codegrees in sorted(groups.items())
    ]


def heavy_histogram(labels: list[BoosterLabel]) -> list[tuple[int, int]]:
    """코디그리별 순방향 간선 수"""
    return sorted(Counter(label.heavy_level for label in labels).items())


def forward_rows(g: TripartiteGraph, a: VertexSet, b: VertexSet) -> dict[int, int]:
    """H = G[A, B] 전체"""
    return {u: g.adj[u] & b.bits for u in a}


def booster_rows(g: TripartiteGraph, reg: Regularisation, a: VertexSet, b: VertexSet,
                 min_level: int = 0) -> dict[int, int]:
    """A → B 순방향 간선 중 min_level-부스터만 남긴 H"""
    rows = {}
    for u in a:
        row = 0
        for v in iter_bits(g.forward_mask(u) & b.bits):
            if booster_level(reg, u, v) >= min_level:
                row |= 1 << v
        rows[u] = row
    return rows


# ============================================================
# 코디그리 인증서
# ============================================================

@dataclass(frozen=True)
class BoosterCertificate:
    """r-부스터 uv 에 대해 deg(u,v) ≥ τ + r, |V_i \\ (N(u) ∪ N(v))| ≤ deg(u,v) − τ − r"""

    u: int
    v: int
    r: int
    tau: int
    codegree: int
    complement: int

    @property
    def codegree_slack(self) -> int:
        return self.codegree - self.tau - self.r

    @property
    def complement_slack(self) -> int:
        return self.codegree - self.tau - self.r - self.complement

    def to_record(self) -> str:
        return (
            f"BOOSTER u={self.u} v={self.v} r={self.r} tau={self.tau} "
            f"codegree={self.codegree} complement={self.complement}"
        )


def third_part(g: TripartiteGraph, u: int, v: int) -> int:
    return 3 - g.part_of(u) - g.part_of(v)


def certify_booster(g: TripartiteGraph, reg: Regularisation, u: int, v: int) -> BoosterCertificate:
    if not g.is_forward_edge(u, v):
        raise InvalidArgumentError(f"({u}, {v}) is not a forward edge")
    r = booster_level(reg, u, v)
    if r < 0:
        raise InvalidArgumentError(f"({u}, {v}) is not a booster (level {r})")
    third = g.part_masks[third_part(g, u, v)]
    codegree = (g.adj[u] & g.adj[v]).bit_count()
    complement = reg.n - ((g.adj[u] | g.adj[v]) & third).bit_count()
    cert = BoosterCertificate(u, v, r, reg.tau, codegree, complement)
    if cert.codegree_slack < 0:
        raise CertificateMismatch("BOOSTER", "codegree", f"{codegree} < tau + r = {reg.tau + r}")
    if cert.complement_slack < 0:
        raise CertificateMismatch("BOOSTER", "complement",
                                  f"{complement} > codegree - tau - r = {cert.codegree_slack}")
    return cert


# ============================================================
# Graver 삼각형
# ============================================================

def graver_triangle(g: TripartiteGraph) -> KtttWitness:
    """τ = 1 정규화에서 f⁺ 최소 정점 u, 가장 작은 순방향 이웃 v, 가장 작은 공통 이웃 w"""
    reg = regularise(g, 1)
    u = min(g.vertices(), key=lambda x: (reg.f_plus[x], x))
    forward = g.forward_mask(u)
    if not forward:
        raise TriturError(f"vertex {u} has no forward neighbour")
    v = lowest_bit(forward)
    common = g.adj[u] & g.adj[v]
    if not common:
        raise TriturError(f"booster ({u}, {v}) has no common neighbour")
    w = lowest_bit(common)
    return KtttWitness.from_parts(g, 1, (u,), (v,), (w,))


# ============================================================
# 구조 추출
# ============================================================

def _single_part(g: TripartiteGraph, s: VertexSet, name: str) -> int:
    parts = {g.part_of(v) for v in s}
    if len(parts) != 1:
        raise InvalidArgumentError(f"{name} must be a non-empty subset of one part")
    return parts.pop()


def _check_cyclic(g: TripartiteGraph, a: VertexSet, b: VertexSet, c: VertexSet) -> None:
    pa = _single_part(g, a, "A")
    pb = _single_part(g, b, "B")
    pc = _single_part(g, c, "C")
    if pb != (pa + 1) % 3 or pc != (pb + 1) % 3:
        raise InvalidArgumentError("A, B, C must follow the cyclic part order")


def _check_rows(h: EdgeRows, a: VertexSet, b: VertexSet, g: TripartiteGraph) -> None:
    for u, row in h.items():
        if u not in a or row & ~(b.bits & g.adj[u]):
            raise InvalidArgumentError("H must be a subgraph of G[A, B]")


@dataclass(frozen=True)
class StructureResult:
    """구조 추출 결과: 증거, 또는 (b₁…b_t, A*, C*) 와 보장 한계"""

    tuple: tuple[int, ...]
    a1: VertexSet
    a2: VertexSet
    a_star: VertexSet
    c_star: VertexSet
    witness: Optional[KtttWitness]
    lam: Fraction
    t: int
    K: Fraction
    c_size: int
    c_star_bound: int
    a_star_lower: float

    @property
    def neighbour_bound(self) -> float:
        """K·|C|^{1−1/t}"""
        return float(self.K) * self.c_size ** (1 - 1 / self.t)


def structure_violations(g: TripartiteGraph, result: StructureResult, b: VertexSet,
                         c: VertexSet, h: EdgeRows) -> list[str]:
    """증거가 없는 결과의 네 가지 한계를 인접 행렬에서 다시 확인"""
    problems = []
    common = -1
    for x in result.tuple:
        common &= g.adj[x]
    if result.c_star.bits != c.bits & ~common:
        problems.append("C* differs from C minus N(b1..bt)")
    if result.c_star.size > result.c_star_bound:
        problems.append(f"|C*| = {result.c_star.size} exceeds {result.c_star_bound}")
    rest = c.bits & ~result.c_star.bits
    for a in result.a_star:
        if at_least_root_bound((g.adj[a] & rest).bit_count(), result.K, result.c_size, result.t):
            problems.append(f"vertex {a} has too many neighbours in C minus C*")
        if any(not h.get(a, 0) >> x & 1 for x in result.tuple):
            problems.append(f"vertex {a} is not an H-neighbour of every b")
        if 2 * h.get(a, 0).bit_count() < result.lam * b.size:
            problems.append(f"vertex {a} has H-degree below half of lambda |B|")
    return problems


def structure_extract(g: TripartiteGraph, reg: Regularisation, a: VertexSet, b: VertexSet,
                      c: VertexSet, h: Optional[EdgeRows] = None, t: int = 2, K=None, *,
                      limit: Optional[int] = None) -> StructureResult:
    """H[A,B] 의 밀집 핵에서 b₁…b_t 와 A₁ 을 얻고, C* = C \\ N(b₁…b_t) 로 나눈 뒤
    C \\ C* 에 이웃이 많은 A₂ 가 충분히 크면 A₂ 와 C \\ C* 사이 K_{t,t} 를 찾는다"""
    _check_cyclic(g, a, b, c)
    cfg = get_config()
    limit = cfg.search_budget if limit is None else limit
    k_const = as_fraction(cfg.structure_constant if K is None else K)
    if k_const <= 0:
        raise InvalidArgumentError("K must be positive")
    h = forward_rows(g, a, b) if h is None else h
    _check_rows(h, a, b, g)

    left_ids = a.members()
    right_ids = b.members()
    position = {v: i for i, v in enumerate(right_ids)}
    local_rows = []
    for u in left_ids:
        row = 0
        for v in iter_bits(h.get(u, 0)):
            row |= 1 << position[v]
        local_rows.append(row)
    view = BipartiteGraph(len(left_ids), len(right_ids), tuple(local_rows))
    core = extract_dense_core(view, t, limit=limit)

    b_tuple = tuple(right_ids[i] for i in core.tuple)
    a1 = VertexSet.of(left_ids[i] for i in core.a_prime)
    common = -1
    for x in b_tuple:
        common &= g.adj[x]
    c_star = VertexSet(c.bits & ~common)
    rest = c.bits & common

    a2 = VertexSet.of(
        u for u in a1 if at_least_root_bound((g.adj[u] & rest).bit_count(), k_const, c.size, t)
    )
    c_star_bound = t * max(reg.f_minus[x] for x in b)
    a_star_lower = extraction_bound(core.lam, t, a.size) - c.size ** (1 / t)

    witness = None
    if a2.size ** t >= c.size:
        a2_ids = a2.members()
        found = find_ktt_in_rows([g.adj[u] & rest for u in a2_ids], t, SearchBudget(limit))
        if found is not None:
            chosen, mask = found
            witness = KtttWitness.from_parts(
                g, t,
                [a2_ids[i] for i in chosen],
                b_tuple,
                list(iter_bits(mask))[:t],
            )
            logger.info(f"structure step found {witness.to_record()}")

    result = StructureResult(
        tuple=b_tuple,
        a1=a1,
        a2=a2,
        a_star=a1 - a2,
        c_star=c_star,
        witness=witness,
        lam=core.lam,
        t=t,
        K=k_const,
        c_size=c.size,
        c_star_bound=c_star_bound,
        a_star_lower=a_star_lower,
    )
    if witness is None:
        problems = structure_violations(g, result, b, c, h)
        if problems:
            raise TriturError("structure bounds failed: " + "; ".join(problems))
    return result


# ============================================================
# 증분 단계
# ============================================================

@dataclass(frozen=True)
class IncrementResult:
    """증거, 또는 정제된 H′ 과 코디그리 통계"""

    witness: Optional[KtttWitness]
    structure: StructureResult
    a_star: VertexSet = field(default_factory=VertexSet)
    b_star: VertexSet = field(default_factory=VertexSet)
    b_star_star: VertexSet = field(default_factory=VertexSet)
    u1: VertexSet = field(default_factory=VertexSet)
    u2: VertexSet = field(default_factory=VertexSet)
    h_prime: dict = field(default_factory=dict)
    stage: str = ""
    sparse_limit: float = 0.0
    input_max_codegree: int = 0
    max_codegree: int = 0
    reported_bound: float = 0.0
    precondition_held: bool = False

    @property
    def h_prime_edges(self) -> int:
        return sum(row.bit_count() for row in self.h_prime.values())


def _max_codegree(g: TripartiteGraph, rows: EdgeRows) -> int:
    best = 0
    for u, row in rows.items():
        for v in iter_bits(row):
            best = max(best, (g.adj[u] & g.adj[v]).bit_count())
    return best


def _sparsify(h: EdgeRows, a: VertexSet, b: VertexSet, lam: Fraction) -> tuple[int, int]:
    """H-차수 < λ/4·|B| 인 A 정점과 < λ/4·|A| 인 B 정점을 반복 삭제"""
    a_alive, b_alive = a.bits, b.bits
    a_limit = lam * b.size / 4
    b_limit = lam * a.size / 4
    changed = True
    while changed:
        changed = False
        for u in iter_bits(a_alive):
            if (h.get(u, 0) & b_alive).bit_count() < a_limit:
                a_alive &= ~(1 << u)
                changed = True
        for v in iter_bits(b_alive):
            degree = sum(1 for u in iter_bits(a_alive) if h.get(u, 0) >> v & 1)
            if degree < b_limit:
                b_alive &= ~(1 << v)
                changed = True
    return a_alive, b_alive


def increment_step(g: TripartiteGraph, reg: Regularisation, a: VertexSet, b: VertexSet,
                   h: Optional[EdgeRows] = None, d: Optional[int] = None, t: int = 2, K=None,
                   lam=None, *, limit: Optional[int] = None) -> IncrementResult:
    """부스터 부분 그래프 H 에서 구조 추출 → 희소화 → U₁/U₂ 분할 → K_{t,t,t} 시도 → 희소 간선 H′"""
    n = g.n
    pa = _single_part(g, a, "A")
    c = g.part((pa + 2) % 3)
    h = booster_rows(g, reg, a, b) if h is None else dict(h)
    _check_rows(h, a, b, g)
    for u, row in h.items():
        for v in iter_bits(row):
            if booster_level(reg, u, v) < 0:
                raise InvalidArgumentError(f"H edge ({u}, {v}) is not a booster")

    edges = sum(row.bit_count() for row in h.values())
    actual = Fraction(edges, a.size * b.size) if a and b else Fraction(0)
    lam = actual if lam is None else as_fraction(lam)
    if lam <= 0 or lam > actual:
        raise InvalidArgumentError(f"lambda must lie in (0, {float(actual):.4f}]")
    k_const = as_fraction(get_config().structure_constant if K is None else K)
    input_max = _max_codegree(g, h)
    d = input_max if d is None else d

    structure = structure_extract(g, reg, a, b, c, h, t, k_const, limit=limit)
    if structure.witness is not None:
        return IncrementResult(witness=structure.witness, structure=structure,
                               input_max_codegree=input_max)

    a_prime = structure.a_star
    restricted = {u: h.get(u, 0) for u in a_prime}
    restricted_edges = sum(row.bit_count() for row in restricted.values())
    precondition = a_prime.size > 0 and 2 * restricted_edges >= lam * a_prime.size * b.size
    a_alive, b_alive = _sparsify(restricted, a_prime, b, lam)
    a_star, b_star = VertexSet(a_alive), VertexSet(b_alive)
    remaining = {u: restricted[u] & b_alive for u in a_star}
    if precondition and not any(remaining.values()):
        raise TriturError("sparsification removed every edge although its precondition held")

    common = c.bits
    for x in structure.tuple:
        common &= g.adj[x]
    outside = c.bits & ~common
    u1_bits = 0
    for v in iter_bits(outside):
        if (g.adj[v] & a_alive).bit_count() >= (1 - lam / 8) * a_star.size:
            u1_bits |= 1 << v
    u1, u2 = VertexSet(u1_bits), VertexSet(outside & ~u1_bits)

    witness = contains_kttt_within(g, a_star, b_star, u1, t, limit=limit, threads=1)
    four_k = 4 * k_const
    b_star_star = VertexSet.of(
        v for v in b_star
        if not at_least_root_bound((g.adj[v] & u1.bits).bit_count(), four_k, n, t)
    )
    if witness is None:
        witness = contains_kttt_within(g, a_star, b_star_star, u2, t, limit=limit, threads=1)
    if witness is not None:
        logger.info(f"increment step found {witness.to_record()}")
        return IncrementResult(witness=witness, structure=structure, a_star=a_star,
                               b_star=b_star, b_star_star=b_star_star, u1=u1, u2=u2,
                               input_max_codegree=input_max, precondition_held=precondition)

    lam_f = float(lam)
    sparse_limit = max(
        128 * float(k_const) * t * t * d * lam_f ** -2 * (lam_f / 8 * b.size) ** (-1 / (t * t)),
        t,
    )
    sparse = {}
    for u in a_star:
        row = 0
        for v in iter_bits(remaining[u] & b_star_star.bits):
            if (g.adj[u] & g.adj[v] & u2.bits).bit_count() <= sparse_limit:
                row |= 1 << v
        if row:
            sparse[u] = row

    # 탁상 규모에서 증명의 가설이 깨지면 더 큰 단계로 물러선다
    if sparse:
        stage, h_prime = "sparse", sparse
    else:
        rows = {u: remaining[u] & b_star_star.bits for u in a_star}
        rows = {u: row for u, row in rows.items() if row}
        if rows:
            stage, h_prime = "b_star_star", rows
        else:
            stage, h_prime = "b_star", {u: row for u, row in remaining.items() if row}
    if precondition and not h_prime:
        raise TriturError("refined subgraph is empty although the precondition held")

    reported = float(k_const) * (d * b.size ** (-1 / (t * t)) + n ** (1 - 1 / t))
    result = IncrementResult(
        witness=None,
        structure=structure,
        a_star=a_star,
        b_star=b_star,
        b_star_star=b_star_star,
        u1=u1,
        u2=u2,
        h_prime=h_prime,
        stage=stage,
        sparse_limit=sparse_limit,
        input_max_codegree=input_max,
        max_codegree=_max_codegree(g, h_prime),
        reported_bound=reported,
        precondition_held=precondition,
    )
    logger.info(
        f"increment step: stage={stage} edges={result.h_prime_edges} "
        f"max codegree {result.max_codegree} (input {input_max}, reported bound {reported:.2f})"
    )
    return result


# ============================================================
# 스쿼드
# ============================================================

@dataclass(frozen=True)
class SquadCertificate:
    """한 파트 안의 r-스쿼드: f⁻ ≤ r 이고 역방향 2tr-부스터 간선을 ⌈k/800⌉ 개 이상 가진 정점들"""

    r: int
    t: int
    k: int
    part: int
    vertices: VertexSet
    counts: tuple[int, ...]

    @property
    def threshold(self) -> int:
        return squad_threshold(self.k)

    def to_record(self, tau: int) -> str:
        verts = ",".join(map(str, self.vertices.members()))
        counts = ",".join(map(str, self.counts))
        return (
            f"SQUAD r={self.r} t={self.t} k={self.k} tau={tau} part={self.part} "
            f"verts={verts} counts={counts}"
        )


def squad_threshold(k: int) -> int:
    """⌈k/800⌉"""
    return -(-k // 800)


def backward_booster_count(g: TripartiteGraph, reg: Regularisation, v: int, level: int) -> int:
    """v 로 들어오는 역방향 간선 중 level-부스터인 것의 수"""
    return sum(1 for u in iter_bits(g.backward_mask(v)) if booster_level(reg, u, v) >= level)


def _squad_in_part(g, reg, t, k, r, part) -> Optional[SquadCertificate]:
    need = squad_threshold(k)
    level = 2 * t * r
    members, counts = [], []
    for v in g.part(part):
        if reg.f_minus[v] > r:
            continue
        count = backward_booster_count(g, reg, v, level)
        if count >= need:
            members.append(v)
            counts.append(count)
    if len(members) < need:
        return None
    return SquadCertificate(r, t, k, part, VertexSet.of(members), tuple(counts))


def find_squads(g: TripartiteGraph, reg: Regularisation, t: int, k: int, r: int,
                threads: Optional[int] = None) -> list[SquadCertificate]:
    """파트별 전수 스캔, ⌈k/800⌉ 개 이상이면 인증서 하나"""
    if k < 1 or r < 1 or t < 1:
        raise InvalidArgumentError("t, k, r must be at least 1")
    threads = get_config().threads if threads is None else threads
    found = parallel_map(lambda p: _squad_in_part(g, reg, t, k, r, p), [0, 1, 2], threads)
    return [cert for cert in found if cert is not None]


def best_squad(g: TripartiteGraph, reg: Regularisation, t: int, k: int,
               r_values: Optional[list[int]] = None) -> Optional[SquadCertificate]:
    """r 이 최대인 스쿼드 (동률이면 작은 파트). r 후보 기본값은 서로 다른 f⁻ 값"""
    candidates = sorted(set(r_values or reg.f_minus), reverse=True)
    for r in candidates:
        if r < 1:
            continue
        certs = find_squads(g, reg, t, k, r, threads=1)
        if certs:
            return certs[0]
    return None
