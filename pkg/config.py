"""
tritur 중앙 집중식 설정 모듈

탐색 예산, 스레드 수, 상수, 로깅, 출력 경로를 단일 모듈로 통합합니다.
우선순위: 명령행 플래그 > 환경변수 > tritur.json > 기본값
(명령행 플래그는 tritur_cli에서 dataclasses.replace로 적용)

사용법:
    from config import get_config
    cfg = get_config()
    print(cfg.search_budget)  # 100000000
"""

import os
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class Config:
    """중앙 집중식 설정 (불변 객체)"""

    # 탐색 설정
    search_budget: int = 100_000_000     # 검사할 부분집합 수 상한
    threads: int = 1
    default_t: int = 2

    # 보고용 상수 (점근 증명에서 정해지지 않은 값의 탁상 규모 선택)
    kst_constant: float = 4.0            # Kővári–Sós–Turán 상수
    structure_constant: float = 2.0      # 구조 보조정리의 K

    # 분석 설정
    cert_sample: int = 20                # 출력할 코디그리 인증서 수
    seed: int = 0

    # 출력
    output_dir: str = "out"

    # 로깅
    log_level: str = "WARNING"
    log_format: str = "text"             # "text" | "json"
    log_file: Optional[str] = None
    log_max_bytes: int = 10_485_760      # 10MB
    log_backup_count: int = 5

    def as_metadata(self) -> list[tuple[str, str]]:
        """보고서 메타데이터용 (이름, 값) 목록"""
        return [(f.name, str(getattr(self, f.name))) for f in fields(self)]


def _optional_str(s) -> Optional[str]:
    """빈 문자열은 None으로 변환"""
    s = str(s)
    return s or None


# 환경변수 매핑 (ENV_NAME -> (field_name, type_converter))
_ENV_MAP = {
    "TRITUR_SEARCH_BUDGET": ("search_budget", int),
    "TRITUR_THREADS": ("threads", int),
    "TRITUR_DEFAULT_T": ("default_t", int),
    "TRITUR_KST_CONSTANT": ("kst_constant", float),
    "TRITUR_STRUCTURE_CONSTANT": ("structure_constant", float),
    "TRITUR_CERT_SAMPLE": ("cert_sample", int),
    "TRITUR_SEED": ("seed", int),
    "TRITUR_OUTPUT_DIR": ("output_dir", str),
    "TRITUR_LOG_LEVEL": ("log_level", str),
    "TRITUR_LOG_FORMAT": ("log_format", str),
    "TRITUR_LOG_FILE": ("log_file", _optional_str),
    "TRITUR_LOG_MAX_BYTES": ("log_max_bytes", int),
    "TRITUR_LOG_BACKUP_COUNT": ("log_backup_count", int),
}


# 설정 필드 범위 제한
_FIELD_BOUNDS = {
    "search_budget": (1, 10**12),
    "threads": (1, 256),
    "default_t": (1, 16),
    "kst_constant": (0.01, 1000.0),
    "structure_constant": (0.01, 1000.0),
    "cert_sample": (0, 100000),
    "log_backup_count": (0, 100),
}


def _clamp(field_name, value):
    """설정값의 범위를 제한"""
    if field_name in _FIELD_BOUNDS:
        lo, hi = _FIELD_BOUNDS[field_name]
        return type(value)(max(lo, min(hi, value)))
    return value


def _load_config_file(path: str = "tritur.json") -> dict:
    """tritur.json 로드 (없거나 손상됐거나 객체가 아니면 빈 dict)"""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (FileNotFoundError, json.JSONDecodeError, OSError):
        return {}
    return data if isinstance(data, dict) else {}


def load_config(config_path: str = "tritur.json") -> Config:
    """설정 로드 (환경변수 > tritur.json > 기본값)"""
    file_config = _load_config_file(config_path)
    overrides = {}

    for env_name, (field_name, converter) in _ENV_MAP.items():
        # 1. 환경변수 확인
        env_val = os.environ.get(env_name)
        if env_val is not None:
            try:
                overrides[field_name] = _clamp(field_name, converter(env_val))
            except (ValueError, TypeError):
                pass  # 변환 실패 시 무시
            continue

        # 2. tritur.json 확인
        if field_name in file_config:
            try:
                overrides[field_name] = _clamp(field_name, converter(file_config[field_name]))
            except (ValueError, TypeError):
                pass

    return Config(**overrides)


# 싱글턴 캐시
_cached_config: Optional[Config] = None


def get_config(config_path: str = "tritur.json") -> Config:
    """설정 싱글턴 반환 (최초 호출 시 로드)"""
    global _cached_config
    if _cached_config is None:
        _cached_config = load_config(config_path)
    return _cached_config


def reset_config() -> None:
    """설정 캐시 초기화 (테스트용)"""
    global _cached_config
    _cached_config = None
