"""report 모듈 테스트"""
import argparse

import pytest

from tritur.errors import InvalidArgumentError
from tritur.report import RunConfig, TsvReport, config_metadata, read_tsv


class TestRunConfig:
    """실행 설정 직렬화"""

    def test_from_namespace_drops_non_determining(self):
        args = argparse.Namespace(command="check", pattern="kttt", t=2, threads=4,
                                  budget=None, log_level="DEBUG", timings=True)
        run = RunConfig.from_namespace(args)
        assert run.to_line() == "command=check budget=- pattern=kttt t=2"
        assert run.metadata() == [("run", "command=check budget=- pattern=kttt t=2")]

    def test_same_options_same_line(self):
        a = argparse.Namespace(command="report", t=2, pattern="triangle", threads=1)
        b = argparse.Namespace(command="report", pattern="triangle", threads=8, t=2)
        assert RunConfig.from_namespace(a) == RunConfig.from_namespace(b)


class TestTsvReport:
    """TSV 렌더링"""

    def test_render_layout(self):
        report = TsvReport(["graph", "n", "verdict"], [("run", "command=report")])
        report.add_row(["a.tri", 7, "free"])
        report.add_row(["b.tri", 3, None])
        assert report.render() == (
            "# run: command=report\n"
            "graph\tn\tverdict\n"
            "a.tri\t7\tfree\n"
            "b.tri\t3\t-\n"
        )

    def test_read_back(self, tmp_path):
        report = TsvReport(["section", "key", "value"])
        report.add_metadata([("run", "command=analyze tau=1")])
        report.add_row(["regularise", "tau", 1])
        path = report.write(tmp_path / "sub" / "r.tsv")
        metadata, rows = read_tsv(path.read_text(encoding="ascii"))
        assert metadata == {"run": "command=analyze tau=1"}
        assert rows == [{"section": "regularise", "key": "tau", "value": "1"}]

    def test_row_length_checked(self):
        report = TsvReport(["a", "b"])
        with pytest.raises(InvalidArgumentError):
            report.add_row([1])

    @pytest.mark.parametrize("bad", ["x\ty", "x\ny"])
    def test_cells_reject_separators(self, bad):
        report = TsvReport(["a"])
        with pytest.raises(InvalidArgumentError):
            report.add_row([bad])


class TestConfigMetadata:
    """기본 설정 메타데이터"""

    def test_prefix_and_filter(self):
        items = [("search_budget", "100"), ("threads", "4"), ("log_level", "INFO"), ("log_dir", "x")]
        assert config_metadata(items) == [("default.search_budget", "100")]
