"""
tritur 극값 구성 모듈

Andrásfai 순환 그래프, 표준 가중치와 blowup, K_{t,t}-free 이분 가젯
(사영평면 결합 그래프, 무작위 삭제), 최소차수 트리밍, 그리고
blowup 위에 가젯 두 벌을 얹은 K_{t,t,t}-free 극값 묶음(bundle)을 만듭니다.

모든 생성기는 (레시피, 시드)가 같으면 같은 그래프를 돌려줍니다.
무작위 생성은 카운터 기반 numpy Philox 생성기를 씁니다.

사용법:
    from tritur.constructions import Recipe, compose_extremal
    bundle = compose_extremal(Recipe(t=2, k=2, sigma=7, gadget="pg", q=2))
    print(bundle.graph.part_sizes)   # (42, 42, 42)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np

from config import get_config
from logging_config import get_logger
from tritur.errors import ConstructionInfeasibleError, GraphParseError, InvalidArgumentError
from tritur.graph_core import (
    BipartiteGraph,
    TripartiteBuilder,
    TripartiteGraph,
    VertexSet,
    iter_bits,
    lowest_bit,
    mask_of,
    min_degree,
    parse_graph,
    serialize_graph,
)
from tritur.patterns import find_ktt_in_rows, find_triangle
from tritur.search import SearchBudget

logger = get_logger("constructions")

GADGET_KINDS = ("pg", "random", "supplied")


# ============================================================
# Andrásfai 그래프
# ============================================================

@dataclass(frozen=True)
class CirculantGraph:
    """Z/(order) 위의 순환 그래프와 선언된 3-분할"""

    order: int
    adj: tuple[int, ...]
    parts: Optional[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = None

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbours(self, v: int) -> tuple[int, ...]:
        return tuple(iter_bits(self.adj[v]))

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self):
        for u, row in enumerate(self.adj):
            for v in iter_bits(row >> (u + 1)):
                yield u, u + 1 + v

    def find_triangle(self) -> Optional[tuple[int, int, int]]:
        """전수 확인 삼각형 탐색 (u < v < w 중 가장 작은 것)"""
        for u, v in self.edges():
            common = self.adj[u] & self.adj[v] & ~((1 << (v + 1)) - 1)
            if common:
                return u, v, lowest_bit(common)
        return None

    def as_tripartite(self) -> TripartiteGraph:
        """선언된 분할이 연속 구간일 때 전역 번호를 그대로 유지한 삼분 그래프"""
        if self.parts is None:
            raise InvalidArgumentError("graph has no declared tripartition")
        return blowup(self, [1] * self.order, 1).graph


def andrasfai(k: int) -> CirculantGraph:
    """Γ_k: 정점 Z/(3k−1), N(i) = {i+k, …, i+2k−1}

    분할 {0..k−1}, {k..2k−1}, {2k..3k−2} 은 각각 독립집합입니다.
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be at least 1, got {k}")
    order = 3 * k - 1
    adj = tuple(
        mask_of((i + j) % order for j in range(k, 2 * k))
        for i in range(order)
    )
    parts = (
        tuple(range(0, k)),
        tuple(range(k, 2 * k)),
        tuple(range(2 * k, order)),
    )
    return CirculantGraph(order, adj, parts)


def andrasfai_partition(k: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Γ_{k+1} 의 세 파트 {0..k}, {k+1..2k+1}, {2k+2..3k+1}"""
    return andrasfai(k + 1).parts


@dataclass(frozen=True)
class Weighting:
    """기저 정점별 양의 정수 가중치"""

    weights: tuple[int, ...]

    def __post_init__(self):
        if any(w < 1 for w in self.weights):
            raise InvalidArgumentError("weights must be positive")

    def __getitem__(self, v: int) -> int:
        return self.weights[v]

    def __len__(self) -> int:
        return len(self.weights)

    def total(self, vertices) -> int:
        return sum(self.weights[v] for v in vertices)


def standard_weighting(k: int) -> Weighting:
    """Γ_{k+1} 의 표준 가중치: ω(0)=ω(2k+1)=1, ω(k)=ω(k+1)=2, 나머지 3"""
    if k < 2:
        raise InvalidArgumentError(f"standard weighting needs k ≥ 2, got {k}")
    weights = [3] * (3 * k + 2)
    weights[0] = weights[2 * k + 1] = 1
    weights[k] = weights[k + 1] = 2
    return Weighting(tuple(weights))


def window_sums(k: int, weighting: Union[Weighting, Sequence[int]]) -> tuple[int, ...]:
    """Γ_{k+1} 에서 정점별 Σ_{j∈N(i)} ω(j)"""
    base = andrasfai(k + 1)
    weights = weighting.weights if isinstance(weighting, Weighting) else tuple(weighting)
    if len(weights) != base.order:
        raise InvalidArgumentError(f"expected {base.order} weights, got {len(weights)}")
    return tuple(sum(weights[j] for j in iter_bits(row)) for row in base.adj)


# ============================================================
# Blowup
# ============================================================

@dataclass(frozen=True)
class Blowup:
    """blowup 그래프와 기저 정점 → 전역 번호 구간"""

    graph: TripartiteGraph
    classes: tuple[range, ...]

    def class_of(self, v: int) -> VertexSet:
        return VertexSet.of(self.classes[v])


def blowup(base: CirculantGraph, weighting: Union[Weighting, Sequence[int]], sigma: int) -> Blowup:
    """정점 v 를 크기 σ·ω(v) 의 독립집합 I_v 로, 간선을 완전 이분 그래프로 바꾼다"""
    if base.parts is None:
        raise InvalidArgumentError("blowup needs a base graph with declared parts")
    if sigma < 1:
        raise InvalidArgumentError(f"sigma must be at least 1, got {sigma}")
    weights = weighting.weights if isinstance(weighting, Weighting) else tuple(weighting)
    if len(weights) != base.order or any(w < 1 for w in weights):
        raise InvalidArgumentError("weighting must give every base vertex a positive weight")

    part_of = {}
    for p, members in enumerate(base.parts):
        for v in members:
            part_of[v] = p
    if len(part_of) != base.order:
        raise InvalidArgumentError("declared parts must cover every base vertex once")

    classes: list[Optional[range]] = [None] * base.order
    sizes = []
    cursor = 0
    for members in base.parts:
        start = cursor
        for v in sorted(members):
            classes[v] = range(cursor, cursor + sigma * weights[v])
            cursor += sigma * weights[v]
        sizes.append(cursor - start)

    builder = TripartiteBuilder(*sizes)
    for u, v in base.edges():
        if part_of[u] == part_of[v]:
            raise InvalidArgumentError(f"base edge ({u}, {v}) lies inside a declared part")
        builder.add_complete(classes[u], classes[v])
    return Blowup(builder.finalize(), tuple(classes))


# ============================================================
# 이분 가젯
# ============================================================

def is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, math.isqrt(q) + 1))


def _projective_points(q: int) -> list[tuple[int, int, int]]:
    # 첫 비영 좌표가 1 인 대표 벡터, 사전순
    return sorted(
        v for v in product(range(q), repeat=3)
        if any(v) and v[next(i for i in range(3) if v[i])] == 1
    )


def pg_incidence(q: int) -> BipartiteGraph:
    """PG(2, q) 의 점-직선 결합 그래프 (왼쪽 점, 오른쪽 직선)"""
    if not is_prime(q):
        raise InvalidArgumentError(f"q must be prime, got {q}")
    points = _projective_points(q)
    lines = points
    rows = []
    for p in points:
        row = 0
        for j, l in enumerate(lines):
            if (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0:
                row |= 1 << j
        rows.append(row)
    return BipartiteGraph(len(points), len(lines), tuple(rows))


def random_deletion_free(n: int, t: int, seed: int, *, limit: Optional[int] = None) -> BipartiteGraph:
    """확률 p = ½·n^{−2/(t+1)} 로 n×n 이분 그래프를 뽑고
    K_{t,t} 가 남지 않을 때까지 (여사전식 최소 복사본마다) 간선 하나씩 삭제"""
    if not n >= t >= 2:
        raise InvalidArgumentError(f"need n ≥ t ≥ 2, got n={n}, t={t}")
    limit = get_config().search_budget if limit is None else limit
    p = 0.5 * n ** (-2 / (t + 1))
    rng = np.random.Generator(np.random.Philox(seed))
    sample = rng.random((n, n)) < p
    rows = [mask_of(int(j) for j in np.flatnonzero(sample[i])) for i in range(n)]
    sampled = sum(row.bit_count() for row in rows)

    budget = SearchBudget(limit)
    deleted = 0
    while True:
        found = find_ktt_in_rows(rows, t, budget)
        if found is None:
            break
        subset, common = found
        rows[subset[0]] &= ~(common & -common)
        deleted += 1
    logger.info(f"random gadget n={n} t={t} seed={seed}: sampled {sampled} edges, deleted {deleted}")
    return BipartiteGraph(n, n, tuple(rows))


def core_of(h: BipartiteGraph, threshold: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """차수 ≤ threshold 인 정점을 반복 삭제한 뒤 남는 (왼쪽, 오른쪽) 정점"""
    left_alive = (1 << h.left_size) - 1
    right_alive = (1 << h.right_size) - 1
    left_deg = [row.bit_count() for row in h.adj]
    right_deg = [row.bit_count() for row in h.right_adj]
    queue = [("L", v) for v in range(h.left_size) if left_deg[v] <= threshold]
    queue += [("R", v) for v in range(h.right_size) if right_deg[v] <= threshold]

    while queue:
        side, v = queue.pop()
        if side == "L":
            if not left_alive >> v & 1:
                continue
            left_alive &= ~(1 << v)
            for r in iter_bits(h.adj[v] & right_alive):
                right_deg[r] -= 1
                if right_deg[r] <= threshold:
                    queue.append(("R", r))
        else:
            if not right_alive >> v & 1:
                continue
            right_alive &= ~(1 << v)
            for l in iter_bits(h.right_adj[v] & left_alive):
                left_deg[l] -= 1
                if left_deg[l] <= threshold:
                    queue.append(("L", l))

    return tuple(iter_bits(left_alive)), tuple(iter_bits(right_alive))


def _restrict(h: BipartiteGraph, left: Sequence[int], right: Sequence[int]) -> BipartiteGraph:
    position = {r: i for i, r in enumerate(right)}
    rows = []
    for l in left:
        row = 0
        for r in iter_bits(h.adj[l]):
            if r in position:
                row |= 1 << position[r]
        rows.append(row)
    return BipartiteGraph(len(left), len(right), tuple(rows))


def trim_min_degree(h: BipartiteGraph, threshold: int) -> BipartiteGraph:
    """차수 ≤ threshold 정점을 더 이상 없을 때까지 삭제한 핵 (정점 번호는 순서대로 압축)"""
    left, right = core_of(h, threshold)
    return _restrict(h, left, right)


def fit_gadget(source: BipartiteGraph, sigma: int, n: int, threshold: int = 0) -> BipartiteGraph:
    """트리밍 → 남는 왼쪽 정점을 차수 낮은 순(동률은 작은 번호)으로 σ 개까지 삭제 →
    오른쪽을 고립 정점으로 n 개까지 채운 σ×n 가젯"""
    if sigma < 1 or n < 1:
        raise InvalidArgumentError("sigma and n must be positive")
    core = trim_min_degree(source, threshold)
    if core.left_size < sigma:
        raise ConstructionInfeasibleError(
            "gadget core has too few left vertices", core.left_size, sigma
        )
    if core.right_size > n:
        raise ConstructionInfeasibleError(
            "gadget core has more right vertices than the part size", core.right_size, n
        )
    excess = core.left_size - sigma
    by_degree = sorted(range(core.left_size), key=lambda v: (core.adj[v].bit_count(), v))
    dropped = set(by_degree[:excess])
    rows = tuple(core.adj[v] for v in range(core.left_size) if v not in dropped)
    return BipartiteGraph(sigma, n, rows)


# ============================================================
# 레시피와 극값 묶음
# ============================================================

@dataclass(frozen=True)
class Recipe:
    """극값 묶음 재현 매개변수 (n = 3kσ)"""

    t: int
    k: int
    sigma: int
    gadget: str = "pg"
    q: Optional[int] = None
    seed: int = 0
    trim: int = 0
    size: Optional[int] = None   # random 가젯의 표본 크기 (기본 n)

    def __post_init__(self):
        if self.t < 1 or self.k < 1 or self.sigma < 1:
            raise InvalidArgumentError("t, k, sigma must be at least 1")
        if self.gadget not in GADGET_KINDS:
            raise InvalidArgumentError(f"unknown gadget kind {self.gadget!r}")
        if self.gadget == "pg" and self.q is None:
            raise InvalidArgumentError("pg gadget needs q")

    @property
    def n(self) -> int:
        return 3 * self.k * self.sigma

    def to_line(self) -> str:
        items = [f"t={self.t}", f"k={self.k}", f"sigma={self.sigma}", f"gadget={self.gadget}"]
        if self.q is not None:
            items.append(f"q={self.q}")
        items.append(f"seed={self.seed}")
        items.append(f"trim={self.trim}")
        if self.size is not None:
            items.append(f"size={self.size}")
        return " ".join(items)

    @classmethod
    def parse(cls, line: str) -> Recipe:
        values = {}
        for item in line.split():
            key, sep, value = item.partition("=")
            if not sep:
                raise GraphParseError(f"recipe item {item!r} is not key=value")
            values[key] = value
        try:
            return cls(
                t=int(values["t"]),
                k=int(values["k"]),
                sigma=int(values["sigma"]),
                gadget=values.get("gadget", "pg"),
                q=int(values["q"]) if "q" in values else None,
                seed=int(values.get("seed", 0)),
                trim=int(values.get("trim", 0)),
                size=int(values["size"]) if "size" in values else None,
            )
        except KeyError as exc:
            raise GraphParseError(f"recipe is missing {exc.args[0]}")
        except ValueError as exc:
            raise GraphParseError(f"bad recipe value: {exc}")


def make_gadget(recipe: Recipe, supplied: Optional[BipartiteGraph] = None, *,
                limit: Optional[int] = None) -> BipartiteGraph:
    """레시피의 가젯 원천에서 σ×n 가젯을 만든다 (limit 는 random 가젯의 탐색 예산)"""
    if recipe.gadget == "pg":
        source = pg_incidence(recipe.q)
    elif recipe.gadget == "random":
        source = random_deletion_free(recipe.size or recipe.n, recipe.t, recipe.seed, limit=limit)
    else:
        if supplied is None:
            raise InvalidArgumentError("supplied gadget kind needs a graph")
        source = supplied
    return fit_gadget(source, recipe.sigma, recipe.n, recipe.trim)


@dataclass(frozen=True)
class ExtremalBundle:
    """G₀ 위에 U₁–V₃, U₂–V₃ 가젯을 얹은 그래프"""

    graph: TripartiteGraph
    base_graph: TripartiteGraph
    u1: VertexSet
    u2: VertexSet
    recipe: Recipe
    gadget: BipartiteGraph

    @property
    def n(self) -> int:
        return self.recipe.n

    @property
    def min_degree(self) -> int:
        return min_degree(self.graph)

    @property
    def achieved_tau(self) -> int:
        return self.min_degree - self.n

    @property
    def extremal(self) -> bool:
        """가젯이 최소차수를 n 위로 올렸는지"""
        return self.achieved_tau > 0

    def gadget_edges(self) -> list[tuple[int, int]]:
        v3_start = self.graph.offsets[2]
        edges = []
        for members in (self.u1.members(), self.u2.members()):
            for i, u in enumerate(members):
                edges.extend((u, v3_start + r) for r in iter_bits(self.gadget.adj[i]))
        return sorted(edges)


def compose_extremal(recipe: Recipe, supplied: Optional[BipartiteGraph] = None, *,
                     limit: Optional[int] = None) -> ExtremalBundle:
    """G₀ = blowup(Γ_{k+1}, ω_σ), U₁ = I_0, U₂ = I_{2k+1}, 그리고 가젯 두 벌"""
    weighting = standard_weighting(recipe.k)
    g0 = blowup(andrasfai(recipe.k + 1), weighting, recipe.sigma)
    u1 = g0.class_of(0)
    u2 = g0.class_of(2 * recipe.k + 1)
    gadget = make_gadget(recipe, supplied, limit=limit)

    builder = TripartiteBuilder.from_graph(g0.graph)
    v3_start = g0.graph.offsets[2]
    for members in (u1.members(), u2.members()):
        for i, u in enumerate(members):
            for r in iter_bits(gadget.adj[i]):
                builder.add_edge(u, v3_start + r)

    bundle = ExtremalBundle(builder.finalize(), g0.graph, u1, u2, recipe, gadget)
    logger.info(
        f"bundle {recipe.to_line()}: n={recipe.n} edges={bundle.graph.edge_count} "
        f"delta={bundle.min_degree}"
    )
    if not bundle.extremal:
        logger.warning(f"bundle {recipe.to_line()} is degenerate: minimum degree {bundle.min_degree}")
    return bundle


def check_g0_properties(bundle: ExtremalBundle) -> list[str]:
    """가젯 간선을 뺀 그래프에서 성질 (1)–(4) 를 확인하고 위반 목록 반환"""
    g = bundle.base_graph
    n, sigma = bundle.n, bundle.recipe.sigma
    problems = []
    if g.part_sizes != (n, n, n):
        problems.append(f"part sizes {g.part_sizes} differ from n={n}")
    if bundle.u1.size != sigma or bundle.u2.size != sigma:
        problems.append("U1/U2 sizes differ from sigma")
    for v in bundle.u1:
        if g.adj[v] != g.part_masks[1]:
            problems.append(f"U1 vertex {v} is not complete to V2 only")
    for v in bundle.u2:
        if g.adj[v] != g.part_masks[0]:
            problems.append(f"U2 vertex {v} is not complete to V1 only")
    special = bundle.u1.bits | bundle.u2.bits
    for v in g.vertices():
        if not special >> v & 1 and g.degree(v) < n + sigma:
            problems.append(f"vertex {v} has degree {g.degree(v)} < n + sigma")
    stripped = TripartiteBuilder.from_graph(bundle.graph)
    for u, v in bundle.gadget_edges():
        stripped.remove_edge(u, v)
    if stripped.finalize() != g:
        problems.append("graph minus gadget edges differs from G0")
    if find_triangle(g) is not None:
        problems.append("G0 contains a triangle")
    return problems


def complete_tripartite(n1: int, n2: int, n3: int) -> TripartiteGraph:
    builder = TripartiteBuilder(n1, n2, n3)
    o = (0, n1, n1 + n2, n1 + n2 + n3)
    builder.add_complete(range(o[0], o[1]), range(o[1], o[3]))
    builder.add_complete(range(o[1], o[2]), range(o[2], o[3]))
    return builder.finalize()


def two_pair_example(n: int) -> TripartiteGraph:
    """V1–V2, V1–V3 간선 전부 (δ = n, 이분 그래프)"""
    builder = TripartiteBuilder(n, n, n)
    builder.add_complete(range(n), range(n, 3 * n))
    return builder.finalize()


def edge_extremal_example(n: int, gadget: BipartiteGraph) -> TripartiteGraph:
    """two_pair_example 에 V2–V3 사이 K_{t,t}-free n×n 가젯을 더한 간선 극값 모양"""
    if gadget.left_size != n or gadget.right_size != n:
        raise InvalidArgumentError("gadget must be n × n")
    builder = TripartiteBuilder.from_graph(two_pair_example(n))
    for l, r in gadget.edges():
        builder.add_edge(n + l, 2 * n + r)
    return builder.finalize()


# ============================================================
# 묶음 직렬화
# ============================================================

def serialize_bundle(bundle: ExtremalBundle) -> str:
    """TRI 블록 + U1= / U2= + 레시피 줄"""
    return (
        serialize_graph(bundle.graph)
        + f"U1={','.join(map(str, bundle.u1.members()))}\n"
        + f"U2={','.join(map(str, bundle.u2.members()))}\n"
        + f"RECIPE {bundle.recipe.to_line()}\n"
    )


def serialize_sidecar(bundle: ExtremalBundle) -> str:
    """그래프 파일 옆에 두는 레시피 사이드카 (U1/U2/레시피만)"""
    text = serialize_bundle(bundle)
    return text[len(serialize_graph(bundle.graph)):]


@dataclass(frozen=True)
class BundleHeader:
    """직렬화된 묶음의 비그래프 부분"""

    u1: VertexSet
    u2: VertexSet
    recipe: Recipe
    graph: Optional[TripartiteGraph] = field(default=None)


def parse_bundle(text: str) -> BundleHeader:
    graph_lines = []
    u1 = u2 = None
    recipe = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(("U1=", "U2=")):
            ids = line[3:]
            try:
                members = VertexSet.of(int(x) for x in ids.split(",") if x)
            except ValueError:
                raise GraphParseError(f"bad id list {ids!r}", line_no)
            if line.startswith("U1="):
                u1 = members
            else:
                u2 = members
            graph_lines.append("")
        elif line.startswith("RECIPE "):
            recipe = Recipe.parse(line[len("RECIPE "):])
            graph_lines.append("")
        else:
            graph_lines.append(raw)
    if u1 is None or u2 is None or recipe is None:
        raise GraphParseError("bundle needs U1=, U2= and RECIPE lines")
    body = "\n".join(graph_lines)
    graph = parse_graph(body) if any(l.strip() and not l.strip().startswith("#") for l in graph_lines) else None
    return BundleHeader(u1, u2, recipe, graph)
