"""
tritur 인증서 레코드

증거와 인증서를 한 줄 레코드(`KIND key=value ... sha=…`)로 쓰고 읽으며,
레코드의 모든 필드를 그래프 인접 행렬에서 독립적으로 다시 계산해 검증합니다.
검증은 탐색 경로를 신뢰하지 않습니다. 처음 어긋난 필드를 CertificateMismatch 로 보고하고,
sha(레코드 본문 + 정규 그래프 텍스트의 sha256 앞 16자)는 마지막에 확인합니다.

레코드 종류:
    KTT      t A B
    KTTT     t A B C
    BOOSTER  u v r tau codegree complement
    SQUAD    r t k tau part verts counts
    ICFG     k tau fk shift stage variant (+ 변형별 필드)

사용법:
    from tritur.certificates import sign, write_certificates, verify_text
    line = sign(witness.to_record(), g)
    count = verify_text(g, open("cert.txt").read())
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

from logging_config import get_logger
from tritur.boosters import Regularisation, backward_booster_count, booster_level, regularise, squad_threshold
from tritur.errors import CertificateMismatch, InfeasibleError, InvalidArgumentError
from tritur.graph_core import BipartiteGraph, TripartiteGraph, VertexSet, serialize_graph
from tritur.initial_config import (
    ceil_div,
    compute_k,
    count_boosters,
    heavy_backward_count,
    initial_configuration,
)
from tritur.metrics import get_metrics
from tritur.patterns import KttWitness, KtttWitness, ktt_violation, kttt_violation

logger = get_logger("certificates")

Graph = Union[TripartiteGraph, BipartiteGraph]

REQUIRED_FIELDS: dict[str, tuple[str, ...]] = {
    "KTT": ("t", "A", "B"),
    "KTTT": ("t", "A", "B", "C"),
    "BOOSTER": ("u", "v", "r", "tau", "codegree", "complement"),
    "SQUAD": ("r", "t", "k", "tau", "part", "verts", "counts"),
    "ICFG": ("k", "tau", "fk", "shift", "stage", "variant"),
}

ICFG_STAGES = ("X", "Y", "B-heavy", "B-dense", "A'C'", "C''", "none")


# ============================================================
# 서명과 파싱
# ============================================================

def digest(body: str, g: Graph) -> str:
    h = hashlib.sha256()
    h.update(body.encode("ascii"))
    h.update(b"\n")
    h.update(serialize_graph(g).encode("ascii"))
    return h.hexdigest()[:16]


def sign(body: str, g: Graph) -> str:
    """레코드 본문 뒤에 sha 필드를 붙임"""
    return f"{body} sha={digest(body, g)}"


@dataclass(frozen=True)
class Record:
    kind: str
    fields: dict[str, str]
    body: str
    sha: str

    def text(self, key: str) -> str:
        if key not in self.fields:
            raise CertificateMismatch(self.kind, key, "missing")
        return self.fields[key]

    def number(self, key: str) -> int:
        value = self.text(key)
        try:
            return int(value)
        except ValueError:
            raise CertificateMismatch(self.kind, key, f"not an integer: {value!r}")

    def numbers(self, key: str) -> tuple[int, ...]:
        value = self.text(key)
        if not value:
            return ()
        try:
            return tuple(int(x) for x in value.split(","))
        except ValueError:
            raise CertificateMismatch(self.kind, key, f"not an integer list: {value!r}")


def parse_record(line: str) -> Record:
    tokens = line.split()
    if not tokens:
        raise CertificateMismatch("?", "kind", "empty record")
    kind = tokens[0]
    if kind not in REQUIRED_FIELDS:
        raise CertificateMismatch(kind, "kind", "unknown record kind")

    fields: dict[str, str] = {}
    sha = ""
    body_tokens = [kind]
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise CertificateMismatch(kind, token, "expected key=value")
        if key == "sha":
            sha = value
            continue
        if key in fields:
            raise CertificateMismatch(kind, key, "duplicate field")
        fields[key] = value
        body_tokens.append(token)
    for key in REQUIRED_FIELDS[kind]:
        if key not in fields:
            raise CertificateMismatch(kind, key, "missing")
    return Record(kind, fields, " ".join(body_tokens), sha)


def parse_records(text: str) -> list[Record]:
    """빈 줄과 '#' 주석을 건너뛰고 레코드 목록으로"""
    return [
        parse_record(line)
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]


def write_certificates(path: Union[str, Path], bodies: list[str], g: Graph) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(sign(body, g) + "\n" for body in bodies), encoding="ascii")
    get_metrics().increment("certificates_written_total", len(bodies))
    logger.info(f"wrote {len(bodies)} certificate records to {path}")
    return path


# ============================================================
# 검증
# ============================================================

def _tripartite(g: Graph, rec: Record) -> TripartiteGraph:
    if not isinstance(g, TripartiteGraph):
        raise CertificateMismatch(rec.kind, "kind", "record needs a tripartite graph")
    return g


def _regularisation(g: TripartiteGraph, rec: Record) -> Regularisation:
    try:
        return regularise(g, rec.number("tau"))
    except (InfeasibleError, InvalidArgumentError) as exc:
        raise CertificateMismatch(rec.kind, "tau", str(exc))


def _members(g: TripartiteGraph, rec: Record, key: str, part: int) -> tuple[int, ...]:
    verts = rec.numbers(key)
    if len(set(verts)) != len(verts) or list(verts) != sorted(verts):
        raise CertificateMismatch(rec.kind, key, "vertices must be distinct and sorted")
    for v in verts:
        if not 0 <= v < g.vertex_count or g.part_of(v) != part:
            raise CertificateMismatch(rec.kind, key, f"vertex {v} is not in part {part}")
    return verts


def _expect(rec: Record, key: str, claimed, actual) -> None:
    if claimed != actual:
        raise CertificateMismatch(rec.kind, key, f"claimed {claimed}, recomputed {actual}")


def _verify_ktt(g: Graph, rec: Record) -> None:
    if not isinstance(g, BipartiteGraph):
        raise CertificateMismatch(rec.kind, "kind", "record needs a bipartite graph")
    witness = KttWitness(rec.number("t"), rec.numbers("A"), rec.numbers("B"))
    field = ktt_violation(g, witness)
    if field is not None:
        raise CertificateMismatch(rec.kind, field, "not a K_{t,t} in the graph")


def _verify_kttt(g: Graph, rec: Record) -> None:
    g = _tripartite(g, rec)
    witness = KtttWitness(rec.number("t"), rec.numbers("A"), rec.numbers("B"), rec.numbers("C"))
    field = kttt_violation(g, witness)
    if field is not None:
        raise CertificateMismatch(rec.kind, field, "not a K_{t,t,t} in the graph")


def _verify_booster(g: Graph, rec: Record) -> None:
    g = _tripartite(g, rec)
    u, v = rec.number("u"), rec.number("v")
    if not 0 <= u < g.vertex_count:
        raise CertificateMismatch(rec.kind, "u", f"vertex {u} out of range")
    if not 0 <= v < g.vertex_count or not g.is_forward_edge(u, v):
        raise CertificateMismatch(rec.kind, "v", f"({u}, {v}) is not a forward edge")
    reg = _regularisation(g, rec)
    level = booster_level(reg, u, v)
    _expect(rec, "r", rec.number("r"), level)
    if level < 0:
        raise CertificateMismatch(rec.kind, "r", f"level {level} is not a booster")

    codegree = (g.adj[u] & g.adj[v]).bit_count()
    _expect(rec, "codegree", rec.number("codegree"), codegree)
    third = g.part_masks[3 - g.part_of(u) - g.part_of(v)]
    complement = reg.n - ((g.adj[u] | g.adj[v]) & third).bit_count()
    _expect(rec, "complement", rec.number("complement"), complement)
    if codegree < reg.tau + level:
        raise CertificateMismatch(rec.kind, "codegree", f"{codegree} < tau + r")
    if complement > codegree - reg.tau - level:
        raise CertificateMismatch(rec.kind, "complement", f"{complement} > codegree - tau - r")


def _verify_squad(g: Graph, rec: Record) -> None:
    g = _tripartite(g, rec)
    r, t, k = rec.number("r"), rec.number("t"), rec.number("k")
    for key, value in (("r", r), ("t", t), ("k", k)):
        if value < 1:
            raise CertificateMismatch(rec.kind, key, "must be at least 1")
    reg = _regularisation(g, rec)
    part = rec.number("part")
    if part not in (0, 1, 2):
        raise CertificateMismatch(rec.kind, "part", f"no part {part}")
    verts = _members(g, rec, "verts", part)
    counts = rec.numbers("counts")
    need = squad_threshold(k)
    if len(verts) < need:
        raise CertificateMismatch(rec.kind, "verts", f"{len(verts)} vertices, need {need}")
    for v in verts:
        if reg.f_minus[v] > r:
            raise CertificateMismatch(rec.kind, "verts", f"f-({v}) = {reg.f_minus[v]} > r")
    if len(counts) != len(verts):
        raise CertificateMismatch(rec.kind, "counts", "length differs from verts")
    for v, claimed in zip(verts, counts):
        _expect(rec, "counts", claimed, backward_booster_count(g, reg, v, 2 * t * r))
        if claimed < need:
            raise CertificateMismatch(rec.kind, "counts", f"vertex {v} has {claimed} < {need}")


def _verify_icfg(g: Graph, rec: Record) -> None:
    g = _tripartite(g, rec)
    reg = _regularisation(g, rec)
    order = sorted(g.vertices(), key=lambda v: (-reg.f_plus[v], v))
    k = compute_k(reg, order)
    _expect(rec, "k", rec.number("k"), k)
    _expect(rec, "fk", rec.number("fk"), reg.f_minus[order[k - 1]])
    if rec.text("stage") not in ICFG_STAGES:
        raise CertificateMismatch(rec.kind, "stage", f"unknown stage {rec.text('stage')!r}")
    outcome = initial_configuration(g, reg)
    _expect(rec, "shift", rec.number("shift"), outcome.shift)
    _expect(rec, "stage", rec.text("stage"), outcome.stage)

    variant = rec.text("variant")
    _expect(rec, "variant", variant, outcome.variant_name)
    if variant == "HeavyVertices":
        part = rec.number("part")
        if part not in (0, 1, 2):
            raise CertificateMismatch(rec.kind, "part", f"no part {part}")
        verts = _members(g, rec, "verts", part)
        if len(verts) < ceil_div(k, 12):
            raise CertificateMismatch(rec.kind, "verts", f"{len(verts)} < ceil(k/12)")
        counts, fwd = rec.numbers("counts"), rec.numbers("fwd")
        if len(counts) != len(verts):
            raise CertificateMismatch(rec.kind, "counts", "length differs from verts")
        if len(fwd) != len(verts):
            raise CertificateMismatch(rec.kind, "fwd", "length differs from verts")
        for v in verts:
            if reg.f_minus[v] > 100 * k:
                raise CertificateMismatch(rec.kind, "verts", f"f-({v}) > 100k")
        for v, claimed in zip(verts, counts):
            _expect(rec, "counts", claimed, heavy_backward_count(g, v, ceil_div(k, 100)))
            if claimed < ceil_div(k, 200):
                raise CertificateMismatch(rec.kind, "counts", f"vertex {v} has {claimed} < ceil(k/200)")
        for v, claimed in zip(verts, fwd):
            _expect(rec, "fwd", claimed, g.forward_degree(v))
    elif variant == "DenseBoosters":
        part = rec.number("part")
        if part not in (0, 1, 2):
            raise CertificateMismatch(rec.kind, "part", f"no part {part}")
        a_set = _members(g, rec, "A", part)
        b_set = _members(g, rec, "B", (part + 1) % 3)
        need = ceil_div(k, 200)
        if len(a_set) < need:
            raise CertificateMismatch(rec.kind, "A", f"{len(a_set)} < ceil(k/200)")
        if len(b_set) < need:
            raise CertificateMismatch(rec.kind, "B", f"{len(b_set)} < ceil(k/200)")
        edges = count_boosters(g, reg, VertexSet.of(a_set), VertexSet.of(b_set))
        _expect(rec, "edges", rec.number("edges"), edges)
        if 200 * edges < len(a_set) * len(b_set):
            raise CertificateMismatch(rec.kind, "edges", "booster density below 1/200")
    elif variant == "Inconclusive":
        _expect(rec, "sizes", rec.text("sizes"), outcome.variant.fields().partition("=")[2])

    # 위 검사를 통과한 뒤에도 모든 필드가 재계산한 레코드와 같아야 함
    expected = parse_record(outcome.to_record()).fields
    for key, value in rec.fields.items():
        if key not in expected:
            raise CertificateMismatch(rec.kind, key, "unexpected field")
        _expect(rec, key, value, expected[key])
    for key in expected.keys() - rec.fields.keys():
        raise CertificateMismatch(rec.kind, key, "missing")


_VERIFIERS: dict[str, Callable[[Graph, Record], None]] = {
    "KTT": _verify_ktt,
    "KTTT": _verify_kttt,
    "BOOSTER": _verify_booster,
    "SQUAD": _verify_squad,
    "ICFG": _verify_icfg,
}


def verify_record(g: Graph, rec: Record) -> None:
    """모든 필드를 재계산, 어긋나면 CertificateMismatch (sha 는 마지막)"""
    _VERIFIERS[rec.kind](g, rec)
    expected = digest(rec.body, g)
    if rec.sha != expected:
        raise CertificateMismatch(rec.kind, "sha", f"digest {rec.sha!r} does not match {expected}")
    get_metrics().increment("certificates_verified_total")


def verify_text(g: Graph, text: str) -> int:
    """파일 전체 검증, 검증된 레코드 수 반환"""
    records = parse_records(text)
    if not records:
        raise CertificateMismatch("?", "kind", "no records")
    for rec in records:
        verify_record(g, rec)
    logger.info(f"verified {len(records)} certificate records")
    return len(records)
