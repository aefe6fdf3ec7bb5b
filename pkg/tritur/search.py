"""
tritur 부분집합 탐색 엔진

행 비트셋들의 t-부분집합을 여사전식(colex) 순서로 열거하며, 공통 이웃 마스크가
viable 조건을 잃으면 가지를 잘라냅니다. 최대 원소(stratum)별로 작업을 나누어
스레드 풀에서 병렬 실행할 수 있고, 결과와 검사 개수는 스레드 수와 무관하게 같습니다.

예산: 공통 이웃 마스크를 한 번 계산할 때마다 1 을 셉니다 (부분/완성 집합 모두).
예산을 넘기면 SearchBudgetExceeded 를 던지며 "없음"을 보고하지 않습니다.

사용법:
    from tritur.search import colex_search
    found, examined = colex_search(rows, 2, full_mask, viable, accept, limit=10**8)
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Optional, Sequence, TypeVar

from logging_config import get_logger
from tritur.errors import SearchBudgetExceeded

logger = get_logger("search")

T = TypeVar("T")
R = TypeVar("R")

Viable = Callable[[int], bool]
Accept = Callable[[tuple[int, ...], int, "SearchBudget"], Optional[T]]


class SearchBudget:
    """탐색 예산 카운터 (한 번의 탐색 동안만 유효)"""

    def __init__(self, limit: int):
        self.limit = limit
        self.examined = 0

    def charge(self, count: int = 1) -> None:
        self.examined += count
        if self.examined > self.limit:
            raise SearchBudgetExceeded(self.limit, self.examined)


def colex(n: int, t: int) -> Iterator[tuple[int, ...]]:
    """range(n) 의 t-부분집합을 여사전식 순서로"""
    if t == 0:
        yield ()
        return
    for top in range(t - 1, n):
        for rest in colex(top, t - 1):
            yield rest + (top,)


def _extend(rows: Sequence[int], mask: int, bound: int, k: int, chosen: tuple[int, ...],
            viable: Viable, accept: Accept, budget: SearchBudget):
    # chosen 보다 작은 원소 k 개를 더 고른다 (다음으로 큰 원소부터 오름차순)
    for x in range(k - 1, bound):
        sub = mask & rows[x]
        budget.charge()
        if not viable(sub):
            continue
        subset = (x,) + chosen
        if k == 1:
            found = accept(subset, sub, budget)
        else:
            found = _extend(rows, sub, x, k - 1, subset, viable, accept, budget)
        if found is not None:
            return found
    return None


def search_stratum(rows: Sequence[int], t: int, top: int, start_mask: int,
                   viable: Viable, accept: Accept, budget: SearchBudget):
    """최대 원소가 top 인 t-부분집합만 탐색"""
    mask = start_mask & rows[top]
    budget.charge()
    if not viable(mask):
        return None
    if t == 1:
        return accept((top,), mask, budget)
    return _extend(rows, mask, top, t - 1, (top,), viable, accept, budget)


def _run_stratum(rows, t, top, start_mask, viable, accept, limit):
    budget = SearchBudget(limit)
    try:
        found = search_stratum(rows, t, top, start_mask, viable, accept, budget)
    except SearchBudgetExceeded as exc:
        return None, exc.examined
    return found, budget.examined


def colex_search(rows: Sequence[int], t: int, start_mask: int, viable: Viable,
                 accept: Accept, *, limit: int, threads: int = 1,
                 budget: Optional[SearchBudget] = None) -> tuple[Optional[T], int]:
    """여사전식 최소 해를 찾는다

    Args:
        rows: 후보 원소별 비트셋 행
        t: 부분집합 크기
        start_mask: 공통 이웃 초기 마스크
        viable: 공통 이웃 마스크가 아직 해를 가질 수 있는지
        accept: 완성된 부분집합, 공통 이웃 마스크, 예산 카운터를 받아 해 또는 None 반환
        limit: 예산 (검사 개수 상한)
        threads: 1 이면 순차, 그 이상이면 stratum 단위 병렬
        budget: 순차 모드에서 공유할 카운터 (주어지면 limit 무시)

    Returns:
        (해 또는 None, 검사 개수)

    Raises:
        SearchBudgetExceeded: 해를 찾기 전에 예산을 넘긴 경우
    """
    if t < 1 or len(rows) < t:
        return None, 0

    strata = range(t - 1, len(rows))

    if threads <= 1 or budget is not None:
        own = budget or SearchBudget(limit)
        start = own.examined
        for top in strata:
            found = search_stratum(rows, t, top, start_mask, viable, accept, own)
            if found is not None:
                return found, own.examined - start
        return None, own.examined - start

    # 병렬: 각 stratum 을 독립 예산으로 실행하고 순서대로 누적
    logger.debug(f"parallel colex search: {len(strata)} strata, {threads} threads")
    executor = ThreadPoolExecutor(max_workers=threads)
    try:
        futures = [
            executor.submit(_run_stratum, rows, t, top, start_mask, viable, accept, limit)
            for top in strata
        ]
        total = 0
        for future in futures:
            found, examined = future.result()
            total += examined
            if total > limit:
                raise SearchBudgetExceeded(limit, total)
            if found is not None:
                return found, total
        return None, total
    finally:
        executor.shutdown(wait=False, cancel_futures=True)


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """입력 순서를 보존하는 map (threads > 1 이면 스레드 풀)"""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, items))
