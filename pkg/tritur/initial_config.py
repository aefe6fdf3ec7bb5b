"""
tritur 초기 배치 절차

정규화된 그래프에서 정점을 f⁺ 내림차순으로 세우고
k = min{i : f⁻(v_i) ≤ 98i} 를 구한 뒤 f⁻ 창으로 A, B, C 를 만들고
경우 분석(X, Y, A′, C′, B′, C″)을 순서대로 걸으며 결론이 실제 그래프에서
검증되는 첫 번째 분기를 돌려줍니다.

결과:
    DenseBoosters  두 집합(크기 ≥ ⌈k/200⌉) 사이 부스터 밀도 ≥ 1/200
    HeavyVertices  ⌈k/12⌉ 개 이상의 정점, 각각 f⁻ ≤ 100k 이고
                   ⌈k/100⌉-무거운 역방향 간선 ≥ ⌈k/200⌉ 개
    Inconclusive   어느 분기도 검증되지 않음 (만든 집합 전부와 실패 사유 기록)

분수 임계값: "이상"은 올림, "이하"는 내림. v_{k/2} 는 v_{⌈k/2⌉}.

사용법:
    from tritur.boosters import regularise
    from tritur.initial_config import initial_configuration
    outcome = initial_configuration(g, regularise(g))
    print(outcome.to_record())
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from logging_config import get_logger
from tritur.boosters import (
    Regularisation,
    SquadCertificate,
    booster_level,
    find_squads,
    squad_threshold,
)
from tritur.errors import InvalidArgumentError, TriturError
from tritur.graph_core import TripartiteGraph, VertexSet, iter_bits

logger = get_logger("initial_config")


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _ids(s: VertexSet) -> str:
    return ",".join(map(str, s.members()))


# ============================================================
# 결과 타입
# ============================================================

@dataclass(frozen=True)
class DenseBoosters:
    """a_set ⊂ V_part, b_set ⊂ V_{part+1}, a_set → b_set 부스터 간선 수"""

    part: int
    a_set: VertexSet
    b_set: VertexSet
    booster_edges: int

    name = "DenseBoosters"

    def fields(self) -> str:
        return f"part={self.part} A={_ids(self.a_set)} B={_ids(self.b_set)} edges={self.booster_edges}"


@dataclass(frozen=True)
class HeavyVertices:
    """members ⊂ V_part 와 정점별 무거운 역방향 간선 수, 순방향 차수"""

    part: int
    members: VertexSet
    heavy_counts: tuple[int, ...]
    forward_degrees: tuple[int, ...]

    name = "HeavyVertices"

    def fields(self) -> str:
        return (
            f"part={self.part} verts={_ids(self.members)} "
            f"counts={','.join(map(str, self.heavy_counts))} "
            f"fwd={','.join(map(str, self.forward_degrees))}"
        )


@dataclass(frozen=True)
class Inconclusive:
    """만든 집합들의 기록과 분기별 실패 사유"""

    trail: tuple[tuple[str, VertexSet], ...]
    reasons: tuple[str, ...]

    name = "Inconclusive"

    def fields(self) -> str:
        return "sizes=" + ",".join(f"{name}:{s.size}" for name, s in self.trail)


Variant = Union[DenseBoosters, HeavyVertices, Inconclusive]


@dataclass(frozen=True)
class InitialConfigOutcome:
    k: int
    tau: int
    fk: int          # f⁻(v_k)
    shift: int       # V1 로 다시 이름 붙인 실제 파트
    stage: str       # 결론을 낸 분기
    variant: Variant

    @property
    def variant_name(self) -> str:
        return self.variant.name

    def to_record(self) -> str:
        return (
            f"ICFG k={self.k} tau={self.tau} fk={self.fk} shift={self.shift} "
            f"stage={self.stage} variant={self.variant_name} {self.variant.fields()}"
        )


# ============================================================
# 검증 도우미
# ============================================================

def heavy_backward_count(g: TripartiteGraph, v: int, r: int) -> int:
    """v 의 역방향 간선 중 코디그리 ≥ r 인 것의 수"""
    return sum(1 for u in iter_bits(g.backward_mask(v)) if (g.adj[u] & g.adj[v]).bit_count() >= r)


def validate_heavy(g: TripartiteGraph, reg: Regularisation, candidates: VertexSet,
                   k: int) -> Optional[HeavyVertices]:
    """후보 중 f⁻ ≤ 100k 이고 ⌈k/100⌉-무거운 역방향 간선이 ⌈k/200⌉ 개 이상인 정점이
    ⌈k/12⌉ 개 이상이면 HeavyVertices"""
    if not candidates:
        return None
    heavy_r, need_edges = ceil_div(k, 100), ceil_div(k, 200)
    members, counts = [], []
    for v in candidates:
        if reg.f_minus[v] > 100 * k:
            continue
        count = heavy_backward_count(g, v, heavy_r)
        if count >= need_edges:
            members.append(v)
            counts.append(count)
    if len(members) < ceil_div(k, 12):
        return None
    part = g.part_of(members[0])
    return HeavyVertices(
        part,
        VertexSet.of(members),
        tuple(counts),
        tuple(g.forward_degree(v) for v in members),
    )


def count_boosters(g: TripartiteGraph, reg: Regularisation, tail: VertexSet, head: VertexSet) -> int:
    """tail → head 순방향 간선 중 부스터의 수"""
    total = 0
    for u in tail:
        for v in iter_bits(g.forward_mask(u) & head.bits):
            if booster_level(reg, u, v) >= 0:
                total += 1
    return total


def validate_dense(g: TripartiteGraph, reg: Regularisation, tail: VertexSet, head: VertexSet,
                   k: int) -> Optional[DenseBoosters]:
    """두 집합이 ⌈k/200⌉ 이상이고 부스터 밀도가 1/200 이상이면 DenseBoosters"""
    need = ceil_div(k, 200)
    if tail.size < need or head.size < need:
        return None
    edges = count_boosters(g, reg, tail, head)
    if 200 * edges < tail.size * head.size:
        return None
    return DenseBoosters(g.part_of(tail.members()[0]), tail, head, edges)


# ============================================================
# 절차
# ============================================================

def compute_k(reg: Regularisation, order: list[int]) -> int:
    for i, v in enumerate(order, start=1):
        if reg.f_minus[v] <= 98 * i:
            return i
    raise TriturError("no index satisfies f⁻(v_i) ≤ 98i")


def initial_configuration(g: TripartiteGraph, reg: Regularisation) -> InitialConfigOutcome:
    n = g.n
    order = sorted(g.vertices(), key=lambda v: (-reg.f_plus[v], v))
    k = compute_k(reg, order)
    if k < ceil_div(reg.tau, 100):
        raise TriturError(f"k = {k} is below ceil(tau/100)")

    window = order[ceil_div(k, 2) - 1:k]
    per_part = [0, 0, 0]
    for v in window:
        per_part[g.part_of(v)] += 1
    shift = max(range(3), key=lambda p: (per_part[p], -p))
    p1, p2, p3 = shift, (shift + 1) % 3, (shift + 2) % 3
    P1, P2, P3 = g.part(p1), g.part(p2), g.part(p3)

    fk = reg.f_minus[order[k - 1]]
    a = VertexSet.of(v for v in window if g.part_of(v) == p1)
    b = VertexSet.of(v for v in P2 if fk <= reg.f_minus[v] <= fk + k // 50)
    c = VertexSet.of(v for v in P3 if fk <= reg.f_minus[v] <= fk + k // 100)

    trail: list[tuple[str, VertexSet]] = [("A", a), ("B", b), ("C", c)]
    reasons: list[str] = []

    def done(stage: str, variant: Variant) -> InitialConfigOutcome:
        outcome = InitialConfigOutcome(k, reg.tau, fk, shift, stage, variant)
        logger.info(
            f"initial configuration: {outcome.variant_name} at stage {stage} (k={k})",
            extra={"tau": reg.tau, "stage": stage},
        )
        return outcome

    # X: A 중 P3 \ C 로 이웃 ≥ 10k
    outside_c = P3.bits & ~c.bits
    x = VertexSet.of(v for v in a if (g.adj[v] & outside_c).bit_count() >= 10 * k)
    trail.append(("X", x))
    if x.size >= ceil_div(k, 12):
        heavy = validate_heavy(g, reg, x, k)
        if heavy is not None:
            return done("X", heavy)
        reasons.append("X: large enough but its heavy-edge counts do not validate")

    # Y: C 중 P2 \ B 로 이웃 ≥ 10k
    outside_b = P2.bits & ~b.bits
    y = VertexSet.of(v for v in c if (g.adj[v] & outside_b).bit_count() >= 10 * k)
    trail.append(("Y", y))
    if y.size >= ceil_div(k, 12):
        heavy = validate_heavy(g, reg, y, k)
        if heavy is not None:
            return done("Y", heavy)
        reasons.append("Y: large enough but its heavy-edge counts do not validate")

    a_prime, c_prime = a - x, c - y
    trail += [("A'", a_prime), ("C'", c_prime)]

    # W: B 중 A′ 로 이웃 ≥ ⌈k/100⌉
    need_a = ceil_div(k, 100)
    w = VertexSet.of(v for v in b if (g.adj[v] & a_prime.bits).bit_count() >= need_a)
    trail.append(("W", w))
    if w.size >= 40 * k:
        heavy = validate_heavy(g, reg, w, k)
        if heavy is not None:
            return done("B-heavy", heavy)
        need_light = ceil_div(k, 200)
        for v in w:
            light = VertexSet.of(
                u for u in iter_bits(g.adj[v] & a_prime.bits)
                if (g.adj[u] & g.adj[v]).bit_count() < k
            )
            if light.size >= need_light:
                trail.append(("A''", light))
                outside_nv = VertexSet(P3.bits & ~g.adj[v])
                dense = validate_dense(g, reg, outside_nv, light, k)
                if dense is not None:
                    return done("B-dense", dense)
                reasons.append(f"B-dense: booster density around vertex {v} does not validate")
                break
        else:
            reasons.append("B: no vertex of W has enough light edges into A'")
    else:
        reasons.append(f"B: |W| = {w.size} below 40k = {40 * k}")

    b_prime = b - w
    trail.append(("B'", b_prime))

    # A′–C′ 부스터 밀도
    dense = validate_dense(g, reg, c_prime, a_prime, k)
    if dense is not None:
        return done("A'C'", dense)
    reasons.append("A'C': booster density between C' and A' below 1/200 or sets too small")

    # C″: C′ 중 A′ 로 이웃이 |A′|/100 미만
    c_dprime = VertexSet.of(
        v for v in c_prime if 100 * (g.adj[v] & a_prime.bits).bit_count() < a_prime.size
    )
    trail.append(("C''", c_dprime))
    heavy = validate_heavy(g, reg, c_dprime, k)
    if heavy is not None:
        return done("C''", heavy)
    reasons.append("C'': too few vertices with validated heavy backward edges into B'")

    for reason in reasons:
        logger.debug(f"initial configuration branch failed: {reason}")
    return done("none", Inconclusive(tuple(trail), tuple(reasons)))


# ============================================================
# 스쿼드 분할
# ============================================================

@dataclass(frozen=True)
class SquadSplit:
    """HeavyVertices 의 무거운 역방향 간선을 f⁻ 크기로 나눈 진단 결과"""

    heavy_edges: int
    endpoints: VertexSet
    a1: VertexSet
    a2: VertexSet
    c_set: VertexSet
    a2_members: VertexSet
    a2_squad: Optional[SquadCertificate]


def squad_split(g: TripartiteGraph, reg: Regularisation, outcome: InitialConfigOutcome,
                t: int) -> SquadSplit:
    """A₁ = f⁻ ≤ 300tk 인 끝점, A₂ = 나머지 끝점, C = 다음 파트의 f⁻ ≤ 900t²k 정점"""
    heavy = outcome.variant
    if not isinstance(heavy, HeavyVertices):
        raise InvalidArgumentError("squad split needs a HeavyVertices outcome")
    k = outcome.k
    heavy_r = ceil_div(k, 100)

    neighbours: dict[int, int] = {}
    edges = 0
    for x in heavy.members:
        row = 0
        for u in iter_bits(g.backward_mask(x)):
            if (g.adj[u] & g.adj[x]).bit_count() >= heavy_r:
                row |= 1 << u
        neighbours[x] = row
        edges += row.bit_count()

    endpoints = 0
    for row in neighbours.values():
        endpoints |= row
    endpoint_set = VertexSet(endpoints)
    a1 = VertexSet.of(u for u in endpoint_set if reg.f_minus[u] <= 300 * t * k)
    a2 = endpoint_set - a1
    c_set = VertexSet.of(
        v for v in g.part((heavy.part + 1) % 3) if reg.f_minus[v] <= 900 * t * t * k
    )

    need = squad_threshold(k)
    a2_members = VertexSet.of(x for x, row in neighbours.items() if (row & a2.bits).bit_count() >= need)
    a2_squad = None
    if a2_members.size >= need:
        for cert in find_squads(g, reg, t, k, 100 * k, threads=1):
            if cert.part == heavy.part:
                a2_squad = cert
                break
    return SquadSplit(edges, endpoint_set, a1, a2, c_set, a2_members, a2_squad)
