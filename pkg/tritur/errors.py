"""
tritur 예외 계층

모든 라이브러리 오류는 TriturError에서 파생됩니다.
CLI는 예외 종류를 종료 코드로 변환합니다 (tritur_cli.EXIT_CODES 참고).
"""

from __future__ import annotations

from typing import Optional


class TriturError(Exception):
    """tritur 기본 예외"""
    pass


class InvalidArgumentError(TriturError, ValueError):
    """사전조건 위반 (잘못된 크기, 집합, 매개변수)"""
    pass


class GraphParseError(TriturError):
    """그래프/인증서 텍스트 파싱 실패"""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class SearchBudgetExceeded(TriturError):
    """부분집합 탐색 예산 초과 (결과 없음이 아니라 판정 불가)"""

    def __init__(self, budget: int, examined: int):
        self.budget = budget
        self.examined = examined
        super().__init__(
            f"search budget exceeded: examined {examined} subsets, budget {budget}"
        )


class InfeasibleError(TriturError):
    """최소차수 조건 δ ≥ n + τ 위반"""

    def __init__(self, vertex: int, degree: int, required: int):
        self.vertex = vertex
        self.degree = degree
        self.required = required
        super().__init__(
            f"vertex {vertex} has degree {degree}, regularisation needs at least {required}"
        )


class ConstructionInfeasibleError(TriturError):
    """요청한 크기의 가젯을 만들 수 없음"""

    def __init__(self, message: str, achieved: int, required: int):
        self.achieved = achieved
        self.required = required
        super().__init__(f"{message} (achieved {achieved}, required {required})")


class CertificateMismatch(TriturError):
    """인증서 필드가 그래프에서 재검증되지 않음"""

    def __init__(self, kind: str, field: str, message: str):
        self.kind = kind
        self.field = field
        super().__init__(f"{kind} field {field}: {message}")
