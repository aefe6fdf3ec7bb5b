"""
tritur 그래프 핵심 모듈

이분/삼분 그래프의 비트셋 표현, 차수/코디그리 커널, 텍스트 포맷.
인접 행은 파이썬 int 비트셋이며 모든 개수는 popcount(int.bit_count)로 셉니다.
그래프는 빌더로 만든 뒤 finalize()하면 불변 값이 되어 여러 스레드에서 안전하게 읽을 수 있습니다.

전역 정점 번호: 0..n1-1 은 V1, 이어서 V2, V3 (API와 파일 모두 파트 번호는 0, 1, 2).
순방향 간선은 V_i 에서 V_{i+1 mod 3} 으로 향합니다.

사용법:
    from tritur.graph_core import TripartiteBuilder, parse_graph, serialize_graph
    b = TripartiteBuilder(2, 2, 2)
    b.add_edge(0, 2)
    g = b.finalize()
    text = serialize_graph(g)   # "TRI 2 2 2\\n0 2\\n"
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Union

from tritur.errors import GraphParseError, InvalidArgumentError


def iter_bits(mask: int) -> Iterator[int]:
    """비트셋의 원소를 오름차순으로 반환"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest_bit(mask: int) -> int:
    """가장 작은 원소 (빈 집합이면 -1)"""
    return (mask & -mask).bit_length() - 1


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


# ============================================================
# VertexSet
# ============================================================

@dataclass(frozen=True)
class VertexSet:
    """전역 정점 번호 위의 비트셋 (크기는 캐시됨)"""

    bits: int = 0

    @classmethod
    def of(cls, vertices: Iterable[int]) -> VertexSet:
        return cls(mask_of(vertices))

    @cached_property
    def size(self) -> int:
        return self.bits.bit_count()

    def members(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, v: int) -> bool:
        return v >= 0 and bool(self.bits >> v & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __and__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits & other.bits)

    def __or__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits | other.bits)

    def __sub__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits & ~other.bits)

    def issubset(self, other: VertexSet) -> bool:
        return self.bits & ~other.bits == 0

    def __repr__(self) -> str:
        return f"VertexSet({list(self.members())})"


# ============================================================
# BipartiteGraph
# ============================================================

@dataclass(frozen=True)
class BipartiteGraph:
    """left_size × right_size 이분 그래프 (왼쪽 정점별 오른쪽 비트셋 행)"""

    left_size: int
    right_size: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.left_size < 0 or self.right_size < 0:
            raise InvalidArgumentError("side sizes must be non-negative")
        if len(self.adj) != self.left_size:
            raise InvalidArgumentError(
                f"expected {self.left_size} adjacency rows, got {len(self.adj)}"
            )
        limit = 1 << self.right_size
        for row in self.adj:
            if row < 0 or row >= limit:
                raise InvalidArgumentError("adjacency row exceeds right side")

    @classmethod
    def from_edges(cls, left_size: int, right_size: int,
                   edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
        builder = BipartiteBuilder(left_size, right_size)
        for l, r in edges:
            builder.add_edge(l, r)
        return builder.finalize()

    @cached_property
    def right_adj(self) -> tuple[int, ...]:
        """오른쪽 정점별 왼쪽 비트셋 (전치)"""
        rows = [0] * self.right_size
        for l, row in enumerate(self.adj):
            for r in iter_bits(row):
                rows[r] |= 1 << l
        return tuple(rows)

    def row(self, v: int, side: str = "left") -> int:
        if side == "left":
            return self.adj[v]
        if side == "right":
            return self.right_adj[v]
        raise InvalidArgumentError(f"unknown side: {side}")

    def degree(self, v: int, side: str = "left") -> int:
        return self.row(v, side).bit_count()

    @cached_property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj)

    def edges(self) -> Iterator[tuple[int, int]]:
        for l, row in enumerate(self.adj):
            for r in iter_bits(row):
                yield l, r

    def density(self) -> Fraction:
        if self.left_size == 0 or self.right_size == 0:
            return Fraction(0)
        return Fraction(self.edge_count, self.left_size * self.right_size)

    def min_left_degree(self) -> int:
        return min((row.bit_count() for row in self.adj), default=0)


class BipartiteBuilder:
    """BipartiteGraph 빌더 (finalize 전까지 단일 소유자)"""

    def __init__(self, left_size: int, right_size: int):
        if left_size < 0 or right_size < 0:
            raise InvalidArgumentError("side sizes must be non-negative")
        self.left_size = left_size
        self.right_size = right_size
        self._rows = [0] * left_size
        self._finalized = False

    def add_edge(self, l: int, r: int) -> None:
        if self._finalized:
            raise InvalidArgumentError("builder already finalized")
        if not (0 <= l < self.left_size) or not (0 <= r < self.right_size):
            raise InvalidArgumentError(f"edge ({l}, {r}) out of range")
        self._rows[l] |= 1 << r

    def finalize(self) -> BipartiteGraph:
        self._finalized = True
        return BipartiteGraph(self.left_size, self.right_size, tuple(self._rows))


# ============================================================
# TripartiteGraph
# ============================================================

@dataclass(frozen=True)
class TripartiteGraph:
    """세 파트 그래프 (전역 번호, 순환 파트 순서 V1 → V2 → V3 → V1)"""

    part_sizes: tuple[int, int, int]
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.part_sizes) != 3 or min(self.part_sizes) < 0:
            raise InvalidArgumentError("need three non-negative part sizes")
        if len(self.adj) != sum(self.part_sizes):
            raise InvalidArgumentError("adjacency length does not match part sizes")

    @classmethod
    def from_edges(cls, part_sizes: tuple[int, int, int],
                   edges: Iterable[tuple[int, int]]) -> TripartiteGraph:
        builder = TripartiteBuilder(*part_sizes)
        for u, v in edges:
            builder.add_edge(u, v)
        return builder.finalize()

    @cached_property
    def offsets(self) -> tuple[int, int, int, int]:
        n1, n2, n3 = self.part_sizes
        return (0, n1, n1 + n2, n1 + n2 + n3)

    @cached_property
    def part_masks(self) -> tuple[int, int, int]:
        o = self.offsets
        return tuple(((1 << o[i + 1]) - 1) ^ ((1 << o[i]) - 1) for i in range(3))

    @property
    def vertex_count(self) -> int:
        return self.offsets[3]

    @property
    def is_balanced(self) -> bool:
        return len(set(self.part_sizes)) == 1

    @property
    def n(self) -> int:
        """균형 그래프의 파트 크기"""
        if not self.is_balanced:
            raise InvalidArgumentError(f"unbalanced parts {self.part_sizes}")
        return self.part_sizes[0]

    def part_of(self, v: int) -> int:
        o = self.offsets
        if not 0 <= v < o[3]:
            raise InvalidArgumentError(f"vertex {v} out of range")
        if v < o[1]:
            return 0
        return 1 if v < o[2] else 2

    def part(self, i: int) -> VertexSet:
        return VertexSet(self.part_masks[i % 3])

    def vertices(self) -> range:
        return range(self.vertex_count)

    def neighbours(self, v: int) -> int:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def forward_mask(self, v: int) -> int:
        return self.adj[v] & self.part_masks[(self.part_of(v) + 1) % 3]

    def backward_mask(self, v: int) -> int:
        return self.adj[v] & self.part_masks[(self.part_of(v) + 2) % 3]

    def forward_degree(self, v: int) -> int:
        return self.forward_mask(v).bit_count()

    def backward_degree(self, v: int) -> int:
        return self.backward_mask(v).bit_count()

    def is_forward_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1) and self.part_of(v) == (self.part_of(u) + 1) % 3

    @cached_property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """u < v 인 간선을 사전순으로"""
        for u, row in enumerate(self.adj):
            for v in iter_bits(row >> (u + 1)):
                yield u, u + 1 + v


class TripartiteBuilder:
    """TripartiteGraph 빌더. 같은 파트 안의 간선은 거부합니다."""

    def __init__(self, n1: int, n2: int, n3: int):
        if min(n1, n2, n3) < 0:
            raise InvalidArgumentError("part sizes must be non-negative")
        self.part_sizes = (n1, n2, n3)
        self._bounds = (n1, n1 + n2, n1 + n2 + n3)
        self._rows = [0] * (n1 + n2 + n3)
        self._finalized = False

    @classmethod
    def from_graph(cls, g: TripartiteGraph) -> TripartiteBuilder:
        builder = cls(*g.part_sizes)
        builder._rows = list(g.adj)
        return builder

    def _part(self, v: int) -> int:
        for i, bound in enumerate(self._bounds):
            if v < bound:
                return i
        raise InvalidArgumentError(f"vertex {v} out of range")

    def add_edge(self, u: int, v: int) -> None:
        if self._finalized:
            raise InvalidArgumentError("builder already finalized")
        if u < 0 or v < 0:
            raise InvalidArgumentError(f"edge ({u}, {v}) out of range")
        if self._part(u) == self._part(v):
            raise InvalidArgumentError(f"edge ({u}, {v}) lies inside part {self._part(u)}")
        self._rows[u] |= 1 << v
        self._rows[v] |= 1 << u

    def add_complete(self, left: Iterable[int], right: Iterable[int]) -> None:
        right = list(right)
        for u in left:
            for v in right:
                self.add_edge(u, v)

    def remove_edge(self, u: int, v: int) -> None:
        if self._finalized:
            raise InvalidArgumentError("builder already finalized")
        self._rows[u] &= ~(1 << v)
        self._rows[v] &= ~(1 << u)

    def finalize(self) -> TripartiteGraph:
        self._finalized = True
        return TripartiteGraph(self.part_sizes, tuple(self._rows))


Graph = Union[TripartiteGraph, BipartiteGraph]


# ============================================================
# 차수 커널
# ============================================================

@dataclass(frozen=True)
class DegreeProfile:
    """정점별 차수, 순방향 차수 deg⁺, 역방향 차수 deg⁻"""

    degree: tuple[int, ...]
    forward: tuple[int, ...]
    backward: tuple[int, ...]


def degree_profile(g: TripartiteGraph) -> DegreeProfile:
    forward = tuple(g.forward_degree(v) for v in g.vertices())
    backward = tuple(g.backward_degree(v) for v in g.vertices())
    degree = tuple(f + b for f, b in zip(forward, backward))
    return DegreeProfile(degree, forward, backward)


def codegree(g: Graph, u: int, v: int, side: str = "left") -> int:
    """|N(u) ∩ N(v)|

    삼분 그래프: u, v 는 서로 다른 파트 (교집합은 자동으로 세 번째 파트).
    이분 그래프: u, v 는 같은 쪽(side)의 서로 다른 정점이며 반대쪽 공통 이웃 수를 셉니다.
    두 인덱스 모두 side 쪽 번호로 읽습니다. 왼쪽 정점과 오른쪽 정점의 쌍은
    공통 이웃이 항상 0 이므로 받지 않습니다 (side 범위 밖이면 InvalidArgumentError).
    """
    if isinstance(g, TripartiteGraph):
        if u == v or g.part_of(u) == g.part_of(v):
            raise InvalidArgumentError(f"vertices {u} and {v} share a part")
        return (g.adj[u] & g.adj[v]).bit_count()
    if u == v:
        raise InvalidArgumentError("codegree needs two distinct vertices")
    size = g.left_size if side == "left" else g.right_size
    if not (0 <= u < size and 0 <= v < size):
        raise InvalidArgumentError(f"vertices ({u}, {v}) out of range on {side} side")
    return (g.row(u, side) & g.row(v, side)).bit_count()


def min_degree(g: Graph) -> int:
    if isinstance(g, TripartiteGraph):
        return min((row.bit_count() for row in g.adj), default=0)
    left = (row.bit_count() for row in g.adj)
    right = (row.bit_count() for row in g.right_adj)
    return min(list(left) + list(right), default=0)


def tau_of(g: TripartiteGraph) -> int:
    """δ(G) − n (음수 가능)"""
    return min_degree(g) - g.n


def density(g: TripartiteGraph, a: VertexSet, b: VertexSet) -> Fraction:
    """두 정점 집합 사이의 간선 밀도"""
    if not a or not b:
        return Fraction(0)
    edges = sum((g.adj[u] & b.bits).bit_count() for u in a)
    return Fraction(edges, a.size * b.size)


def induced_bipartite(g: TripartiteGraph, a: VertexSet,
                      b: VertexSet) -> tuple[BipartiteGraph, tuple[int, ...], tuple[int, ...]]:
    """G[A, B] 를 이분 그래프로 (왼쪽/오른쪽 지역 번호 → 전역 번호 표 포함)"""
    left_ids = a.members()
    right_ids = b.members()
    position = {v: i for i, v in enumerate(right_ids)}
    rows = []
    for u in left_ids:
        row = 0
        for v in iter_bits(g.adj[u] & b.bits):
            row |= 1 << position[v]
        rows.append(row)
    return BipartiteGraph(len(left_ids), len(right_ids), tuple(rows)), left_ids, right_ids


def verify_symmetry(g: Graph) -> bool:
    """전치 비교로 대칭성과 파트 내부 간선 부재 확인"""
    if isinstance(g, BipartiteGraph):
        rebuilt = [0] * g.left_size
        for r, row in enumerate(g.right_adj):
            for l in iter_bits(row):
                rebuilt[l] |= 1 << r
        return tuple(rebuilt) == g.adj
    for u, row in enumerate(g.adj):
        if row & g.part_masks[g.part_of(u)]:
            return False
        for v in iter_bits(row):
            if not g.adj[v] >> u & 1:
                return False
    return True


# ============================================================
# 텍스트 포맷
# ============================================================

def _parse_ints(fields: list[str], line_no: int) -> list[int]:
    try:
        return [int(x) for x in fields]
    except ValueError:
        raise GraphParseError(f"expected integers, got {' '.join(fields)!r}", line_no)


def parse_graph(text: str) -> Graph:
    """TRI/BIP 텍스트를 그래프로 파싱 (주석 '#' 줄과 빈 줄 무시)"""
    header = None
    builder: Union[TripartiteBuilder, BipartiteBuilder, None] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()

        if header is None:
            header = fields[0]
            if header == "BIP" and len(fields) == 3:
                left, right = _parse_ints(fields[1:], line_no)
                if left < 0 or right < 0:
                    raise GraphParseError("negative side size", line_no)
                builder = BipartiteBuilder(left, right)
            elif header == "TRI" and len(fields) == 4:
                sizes = _parse_ints(fields[1:], line_no)
                if min(sizes) < 0:
                    raise GraphParseError("negative part size", line_no)
                builder = TripartiteBuilder(*sizes)
            else:
                raise GraphParseError(f"malformed header {line!r}", line_no)
            continue

        if len(fields) != 2:
            raise GraphParseError(f"expected an edge pair, got {line!r}", line_no)
        u, v = _parse_ints(fields, line_no)
        try:
            builder.add_edge(u, v)
        except InvalidArgumentError as exc:
            raise GraphParseError(str(exc), line_no)

    if builder is None:
        raise GraphParseError("missing header")
    return builder.finalize()


def serialize_graph(g: Graph) -> str:
    """정규형: 헤더 + 정렬된 간선 목록, 주석 없음"""
    if isinstance(g, BipartiteGraph):
        lines = [f"BIP {g.left_size} {g.right_size}"]
    else:
        lines = ["TRI {} {} {}".format(*g.part_sizes)]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
