"""
tritur 실행 설정과 TSV 보고서

RunConfig 는 한 번의 CLI 실행을 완전히 결정하는 (명령, 옵션) 묶음이며,
보고서 메타데이터 첫 줄로 직렬화됩니다. 보고서는 탭 구분 + 헤더 행 +
'#' 메타데이터 줄 형식 하나만 씁니다.

사용법:
    from tritur.report import RunConfig, TsvReport
    run = RunConfig.from_namespace(args)
    report = TsvReport(["graph", "n", "tau"], run.metadata())
    report.add_row(["a.tri", 7, 1])
    report.write("out/report.tsv")
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from logging_config import get_logger
from tritur.errors import InvalidArgumentError

logger = get_logger("report")

# 출력 바이트에 영향을 주지 않는 옵션
_NON_DETERMINING = frozenset({"threads", "log_level", "log_format", "log_file", "timings"})


def _cell(value) -> str:
    if value is None:
        return "-"
    text = str(value)
    if "\t" in text or "\n" in text:
        raise InvalidArgumentError(f"TSV cell contains a tab or newline: {text!r}")
    return text


@dataclass(frozen=True)
class RunConfig:
    """명령과 정렬된 옵션 목록"""

    command: str
    options: tuple[tuple[str, str], ...]

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> RunConfig:
        values = {
            key: _cell(value)
            for key, value in vars(args).items()
            if key != "command" and key not in _NON_DETERMINING
        }
        return cls(args.command, tuple(sorted(values.items())))

    def to_line(self) -> str:
        parts = [f"command={self.command}"]
        parts.extend(f"{key}={value}" for key, value in self.options)
        return " ".join(parts)

    def metadata(self) -> list[tuple[str, str]]:
        return [("run", self.to_line())]


class TsvReport:
    """헤더 + 행 + '#' 메타데이터"""

    def __init__(self, columns: Sequence[str], metadata: Optional[Iterable[tuple[str, str]]] = None):
        self.columns = list(columns)
        self.metadata: list[tuple[str, str]] = list(metadata or [])
        self.rows: list[list[str]] = []

    def add_metadata(self, items: Iterable[tuple[str, str]]) -> None:
        self.metadata.extend(items)

    def add_row(self, values: Sequence) -> None:
        if len(values) != len(self.columns):
            raise InvalidArgumentError(
                f"row has {len(values)} cells, expected {len(self.columns)}"
            )
        self.rows.append([_cell(v) for v in values])

    def render(self) -> str:
        lines = [f"# {key}: {_cell(value)}" for key, value in self.metadata]
        lines.append("\t".join(self.columns))
        lines.extend("\t".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="ascii")
        logger.info(f"wrote report with {len(self.rows)} rows to {path}")
        return path


def read_tsv(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """render() 의 역: (메타데이터, 행 사전 목록)"""
    metadata: dict[str, str] = {}
    header: Optional[list[str]] = None
    rows: list[dict[str, str]] = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = value
        elif header is None:
            header = line.split("\t")
        elif line:
            rows.append(dict(zip(header, line.split("\t"))))
    return metadata, rows


def config_metadata(items: Iterable[tuple[str, str]]) -> list[tuple[str, str]]:
    """Config.as_metadata() 에서 출력에 영향을 주지 않는 항목을 뺀 것"""
    return [
        (f"default.{key}", value)
        for key, value in items
        if key not in _NON_DETERMINING and not key.startswith("log_")
    ]
