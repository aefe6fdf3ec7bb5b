"""initial_config 모듈 테스트"""
import pytest

from tests.conftest import complete_minus_matching
from tritur.boosters import Regularisation, regularise
from tritur.errors import InvalidArgumentError, TriturError
from tritur.graph_core import VertexSet
from tritur.initial_config import (
    DenseBoosters,
    HeavyVertices,
    Inconclusive,
    ceil_div,
    compute_k,
    count_boosters,
    heavy_backward_count,
    initial_configuration,
    squad_split,
    validate_dense,
    validate_heavy,
)


class TestHelpers:
    """임계값 도우미"""

    def test_ceil_div(self):
        assert ceil_div(1, 12) == 1
        assert ceil_div(24, 12) == 2
        assert ceil_div(25, 12) == 3

    def test_compute_k(self):
        reg = Regularisation(n=200, tau=1, f_plus=(1, 1, 1), f_minus=(150, 150, 150))
        assert compute_k(reg, [0, 1, 2]) == 2

    def test_compute_k_fails_when_no_index(self):
        reg = Regularisation(n=300, tau=1, f_plus=(1, 1), f_minus=(250, 250))
        with pytest.raises(TriturError):
            compute_k(reg, [0, 1])

    def test_heavy_backward_count(self, heavy_fixture):
        # 0 의 역방향 이웃 25..35, 코디그리는 모두 12
        assert heavy_backward_count(heavy_fixture, 0, 12) == 11
        assert heavy_backward_count(heavy_fixture, 0, 13) == 0

    def test_validate_heavy_needs_enough_members(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        assert validate_heavy(heavy_fixture, reg, VertexSet(), 1) is None
        assert validate_heavy(heavy_fixture, reg, VertexSet.of([0]), 1) is not None
        # k = 13 이면 ⌈k/12⌉ = 2 명이 필요
        assert validate_heavy(heavy_fixture, reg, VertexSet.of([0]), 13) is None

    def test_validate_dense(self, dense_fixture):
        reg = regularise(dense_fixture)
        tail, head = dense_fixture.part(2), VertexSet.of([0])
        assert count_boosters(dense_fixture, reg, tail, head) == 12
        dense = validate_dense(dense_fixture, reg, tail, head, 1)
        assert dense == DenseBoosters(2, tail, head, 12)
        assert validate_dense(dense_fixture, reg, tail, head, 400) is None


class TestInitialConfiguration:
    """경우 분석"""

    def test_heavy_vertices_at_stage_x(self, heavy_fixture):
        outcome = initial_configuration(heavy_fixture, regularise(heavy_fixture))
        assert (outcome.k, outcome.tau, outcome.fk, outcome.shift) == (1, 11, 11, 0)
        assert outcome.stage == "X"
        assert isinstance(outcome.variant, HeavyVertices)
        assert outcome.variant.members.members() == (0,)
        assert outcome.variant.heavy_counts == (11,)
        assert outcome.to_record() == (
            "ICFG k=1 tau=11 fk=11 shift=0 stage=X variant=HeavyVertices "
            "part=0 verts=0 counts=11 fwd=12"
        )

    def test_dense_boosters_at_stage_a_c(self, dense_fixture):
        outcome = initial_configuration(dense_fixture, regularise(dense_fixture))
        assert outcome.stage == "A'C'"
        variant = outcome.variant
        assert isinstance(variant, DenseBoosters)
        assert variant.part == 2
        assert variant.a_set == dense_fixture.part(2)
        assert variant.b_set.members() == (0,)
        assert variant.booster_edges == 12
        assert outcome.to_record().endswith(
            "variant=DenseBoosters part=2 A=" + ",".join(map(str, range(24, 36))) + " B=0 edges=12"
        )

    def test_inconclusive_records_trail(self):
        g = complete_minus_matching(3)
        outcome = initial_configuration(g, regularise(g))
        assert outcome.stage == "none"
        assert isinstance(outcome.variant, Inconclusive)
        assert len(outcome.variant.reasons) == 3
        assert outcome.to_record() == (
            "ICFG k=1 tau=2 fk=2 shift=0 stage=none variant=Inconclusive "
            "sizes=A:1,B:3,C:0,X:0,Y:0,A':1,C':0,W:3,B':0,C'':0"
        )

    def test_deterministic(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        assert initial_configuration(heavy_fixture, reg) == initial_configuration(heavy_fixture, reg)


class TestSquadSplit:
    """무거운 역방향 간선의 분할"""

    def test_split_on_heavy_fixture(self, heavy_fixture):
        reg = regularise(heavy_fixture)
        outcome = initial_configuration(heavy_fixture, reg)
        split = squad_split(heavy_fixture, reg, outcome, t=1)
        assert split.heavy_edges == 11
        assert split.endpoints.members() == tuple(range(25, 36))
        assert split.a1 == split.endpoints
        assert not split.a2
        assert split.c_set == heavy_fixture.part(1)
        assert split.a2_squad is None

    def test_needs_heavy_outcome(self, dense_fixture):
        reg = regularise(dense_fixture)
        outcome = initial_configuration(dense_fixture, reg)
        with pytest.raises(InvalidArgumentError):
            squad_split(dense_fixture, reg, outcome, t=1)
