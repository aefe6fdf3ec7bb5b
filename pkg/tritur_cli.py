"""
tritur 명령행 도구

생성, 패턴 탐지, 부스터 분석, 인증서 검증, 일괄 보고서를 파일 위에서 실행합니다.
같은 인자와 같은 시드는 같은 바이트를 만듭니다 (스레드 수와 무관).

종료 코드:
    0   패턴 없음 / 성공
    1   파싱, 사용법, 구성 불가 오류
    2   탐색 예산 초과
    3   요청한 τ 에서 δ ≥ n + τ 불성립
    10  패턴 발견 (증거 파일 기록)
    11  인증서 불일치

사용법:
    python tritur_cli.py gen andrasfai --k 2
    python tritur_cli.py gen bundle --t 2 --k 2 --sigma 7 --gadget pg --q 2
    python tritur_cli.py check out/bundle-t2-k2-s7-pg.tri --pattern kttt --t 2
    python tritur_cli.py analyze out/bundle-t2-k2-s7-pg.tri --tau 3 --initial-config --squads
    python tritur_cli.py verify-cert --graph out/g.tri --cert out/g.certs
    python tritur_cli.py report out/ --pattern kttt --t 2 --timings
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

from config import Config, get_config
from logging_config import get_logger, setup_logging
from tritur.boosters import (
    best_squad,
    booster_histogram,
    certify_booster,
    classify_edges,
    heavy_histogram,
    regularise,
)
from tritur.certificates import verify_text, write_certificates
from tritur.constructions import (
    Recipe,
    andrasfai,
    complete_tripartite,
    compose_extremal,
    parse_bundle,
    pg_incidence,
    random_deletion_free,
    serialize_sidecar,
    two_pair_example,
)
from tritur.errors import (
    CertificateMismatch,
    InfeasibleError,
    SearchBudgetExceeded,
    TriturError,
)
from tritur.graph_core import (
    BipartiteGraph,
    TripartiteGraph,
    min_degree,
    parse_graph,
    serialize_graph,
    tau_of,
)
from tritur.initial_config import initial_configuration
from tritur.metrics import get_metrics
from tritur.patterns import contains_ktt, contains_kttt, find_triangle, kst_threshold
from tritur.report import RunConfig, TsvReport, config_metadata

logger = get_logger("cli")

EXIT_FREE = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_INFEASIBLE = 3
EXIT_FOUND = 10
EXIT_MISMATCH = 11

Graph = Union[TripartiteGraph, BipartiteGraph]


class TriturArgumentParser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 1 로 (2 는 예산 초과 전용)"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    """모든 서브커맨드가 공유하는 플래그"""
    common = TriturArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="작업 스레드 수 (기본: TRITUR_THREADS)")
    common.add_argument("--budget", type=int, help="탐색 예산 (검사할 부분집합 수 상한)")
    common.add_argument("--output", help="출력 디렉터리 (기본: output_dir)")
    common.add_argument("--log-level", help="로그 레벨 (DEBUG, INFO, WARNING, ...)")
    common.add_argument("--log-format", choices=["text", "json"], help="로그 포맷")
    common.add_argument("--timings", action="store_true", help="보고서에 실행 시간 포함")
    return common


def build_parser() -> argparse.ArgumentParser:
    """argparse 파서 구성"""
    parser = TriturArgumentParser(
        prog="tritur",
        description="삼분 그래프 Turán 도구",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = _common_flags()
    subparsers = parser.add_subparsers(dest="command", help="서브커맨드")

    # ========== gen ==========
    gen_parser = subparsers.add_parser("gen", help="그래프 생성")
    gen_sub = gen_parser.add_subparsers(dest="gen_kind", help="생성할 그래프 종류")

    gen_andrasfai = gen_sub.add_parser("andrasfai", parents=[common], help="Andrásfai 그래프 Γ_k")
    gen_andrasfai.add_argument("--k", type=int, required=True)

    gen_bundle = gen_sub.add_parser("bundle", parents=[common], help="K_{t,t,t}-free 극값 묶음")
    gen_bundle.add_argument("--t", type=int, required=True)
    gen_bundle.add_argument("--k", type=int, required=True)
    gen_bundle.add_argument("--sigma", type=int, required=True)
    gen_bundle.add_argument("--gadget", choices=["pg", "random", "supplied"], default="pg")
    gen_bundle.add_argument("--q", type=int, help="사영평면 차수 (pg)")
    gen_bundle.add_argument("--seed", type=int, help="난수 시드 (random)")
    gen_bundle.add_argument("--trim", type=int, default=0, help="가젯 최소차수 트리밍 기준")
    gen_bundle.add_argument("--size", type=int, help="random 가젯 표본 크기 (기본 n)")
    gen_bundle.add_argument("--gadget-file", help="supplied 가젯 BIP 파일")

    gen_gadget = gen_sub.add_parser("gadget", parents=[common], help="K_{t,t}-free 이분 가젯")
    gen_gadget.add_argument("--kind", choices=["pg", "random"], required=True)
    gen_gadget.add_argument("--q", type=int)
    gen_gadget.add_argument("--n", type=int)
    gen_gadget.add_argument("--t", type=int, default=2)
    gen_gadget.add_argument("--seed", type=int)

    gen_complete = gen_sub.add_parser("complete", parents=[common], help="완전 삼분 그래프")
    gen_complete.add_argument("--n1", type=int, required=True)
    gen_complete.add_argument("--n2", type=int, required=True)
    gen_complete.add_argument("--n3", type=int, required=True)

    gen_two_pair = gen_sub.add_parser("two-pair", parents=[common], help="V1–V2, V1–V3 완전 그래프")
    gen_two_pair.add_argument("--n", type=int, required=True)

    # ========== check ==========
    check_parser = subparsers.add_parser("check", parents=[common], help="금지 패턴 탐지")
    check_parser.add_argument("graph", help="TRI/BIP 그래프 파일")
    check_parser.add_argument("--pattern", choices=["triangle", "ktt", "kttt"], default="kttt")
    check_parser.add_argument("--t", type=int, help="패턴 크기 (기본: default_t)")
    check_parser.add_argument("--witness", help="증거 파일 경로 (기본: 출력 디렉터리/<이름>.witness)")

    # ========== analyze ==========
    analyze_parser = subparsers.add_parser("analyze", parents=[common], help="부스터 분석")
    analyze_parser.add_argument("graph", help="TRI 그래프 파일")
    analyze_parser.add_argument("--tau", type=int, help="τ (기본: max(1, δ − n))")
    analyze_parser.add_argument("--t", type=int, help="스쿼드의 t (기본: default_t)")
    analyze_parser.add_argument("--cert-sample", type=int, help="출력할 코디그리 인증서 수")
    analyze_parser.add_argument("--initial-config", action="store_true", help="초기 배치 절차 실행")
    analyze_parser.add_argument("--squads", action="store_true", help="최대 r 스쿼드 탐색")

    # ========== verify-cert ==========
    verify_parser = subparsers.add_parser("verify-cert", parents=[common], help="인증서 재검증")
    verify_parser.add_argument("--graph", required=True, help="그래프 파일")
    verify_parser.add_argument("--cert", required=True, help="인증서 레코드 파일")

    # ========== report ==========
    report_parser = subparsers.add_parser("report", parents=[common], help="일괄 보고서")
    report_parser.add_argument("paths", nargs="+", help="그래프 파일 또는 디렉터리")
    report_parser.add_argument("--pattern", choices=["triangle", "kttt"], default="kttt")
    report_parser.add_argument("--t", type=int, help="패턴 크기 (기본: default_t)")

    return parser


# ============================================================
# 공용 도우미
# ============================================================

def _effective_config(args) -> Config:
    """명령행 플래그 > 환경변수 > tritur.json > 기본값"""
    cfg = get_config()
    overrides = {}
    if getattr(args, "threads", None) is not None:
        overrides["threads"] = max(1, args.threads)
    if getattr(args, "budget", None) is not None:
        overrides["search_budget"] = max(1, args.budget)
    if getattr(args, "output", None):
        overrides["output_dir"] = args.output
    if getattr(args, "log_level", None):
        overrides["log_level"] = args.log_level.upper()
    if getattr(args, "log_format", None):
        overrides["log_format"] = args.log_format
    return replace(cfg, **overrides)


def load_graph(path: Union[str, Path]) -> Graph:
    """그래프 파일 읽기 (묶음 파일이면 U1/U2/RECIPE 줄을 건너뜀)"""
    text = Path(path).read_text(encoding="ascii")
    logger.debug("loading graph", extra={"graph": str(path)})
    if any(line.startswith("RECIPE ") for line in text.splitlines()):
        header = parse_bundle(text)
        if header.graph is None:
            raise TriturError(f"{path}: bundle file has no graph block")
        return header.graph
    return parse_graph(text)


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii")
    return path


def _run_metadata(args, cfg: Config) -> list[tuple[str, str]]:
    metadata = RunConfig.from_namespace(args).metadata()
    metadata.extend(config_metadata(cfg.as_metadata()))
    return metadata


# ============================================================
# gen
# ============================================================

def cmd_gen(args, cfg: Config) -> int:
    out = Path(cfg.output_dir)
    if args.gen_kind == "andrasfai":
        graph = andrasfai(args.k).as_tripartite()
        path = _write(out / f"andrasfai-k{args.k}.tri", serialize_graph(graph))
    elif args.gen_kind == "bundle":
        seed = cfg.seed if args.seed is None else args.seed
        supplied = None
        if args.gadget == "supplied":
            if not args.gadget_file:
                raise TriturError("--gadget supplied needs --gadget-file")
            supplied = load_graph(args.gadget_file)
            if not isinstance(supplied, BipartiteGraph):
                raise TriturError(f"{args.gadget_file}: gadget must be a BIP graph")
        recipe = Recipe(
            t=args.t, k=args.k, sigma=args.sigma, gadget=args.gadget,
            q=args.q, seed=seed, trim=args.trim, size=args.size,
        )
        bundle = compose_extremal(recipe, supplied, limit=cfg.search_budget)
        stem = f"bundle-t{args.t}-k{args.k}-s{args.sigma}-{args.gadget}"
        path = _write(out / f"{stem}.tri", serialize_graph(bundle.graph))
        _write(out / f"{stem}.recipe", serialize_sidecar(bundle))
        print(f"n={bundle.n} delta={bundle.min_degree} tau={bundle.achieved_tau}")
    elif args.gen_kind == "gadget":
        if args.kind == "pg":
            if args.q is None:
                raise TriturError("--kind pg needs --q")
            graph = pg_incidence(args.q)
            name = f"gadget-pg-q{args.q}.bip"
        else:
            if args.n is None:
                raise TriturError("--kind random needs --n")
            seed = cfg.seed if args.seed is None else args.seed
            graph = random_deletion_free(args.n, args.t, seed, limit=cfg.search_budget)
            name = f"gadget-random-n{args.n}-t{args.t}-seed{seed}.bip"
        path = _write(out / name, serialize_graph(graph))
    elif args.gen_kind == "complete":
        graph = complete_tripartite(args.n1, args.n2, args.n3)
        path = _write(out / f"complete-{args.n1}-{args.n2}-{args.n3}.tri", serialize_graph(graph))
    elif args.gen_kind == "two-pair":
        graph = two_pair_example(args.n)
        path = _write(out / f"two-pair-{args.n}.tri", serialize_graph(graph))
    else:
        print("Error: gen 서브커맨드가 필요합니다", file=sys.stderr)
        return EXIT_ERROR
    print(path)
    return EXIT_FREE


# ============================================================
# check
# ============================================================

def _detect(graph: Graph, pattern: str, t: int, cfg: Config):
    if pattern == "ktt":
        if not isinstance(graph, BipartiteGraph):
            raise TriturError("pattern ktt needs a BIP graph")
        witness = contains_ktt(graph, t, limit=cfg.search_budget, threads=cfg.threads)
        threshold = kst_threshold(graph.left_size, graph.right_size, t, cfg.kst_constant)
        if graph.edge_count >= threshold and witness is None:
            logger.warning(f"e(H)={graph.edge_count} meets the K_cal threshold {threshold} but no K_{{{t},{t}}} found")
        else:
            logger.info(f"e(H)={graph.edge_count}, K_cal threshold {threshold}", extra={"pattern": "ktt", "t": t})
        return witness
    if not isinstance(graph, TripartiteGraph):
        raise TriturError(f"pattern {pattern} needs a TRI graph")
    if pattern == "triangle":
        return find_triangle(graph)
    return contains_kttt(graph, t, limit=cfg.search_budget, threads=cfg.threads)


def cmd_check(args, cfg: Config) -> int:
    graph = load_graph(args.graph)
    t = 1 if args.pattern == "triangle" else (args.t or cfg.default_t)
    witness = _detect(graph, args.pattern, t, cfg)
    if witness is None:
        print(f"{args.pattern} t={t}: free")
        return EXIT_FREE
    path = Path(args.witness) if args.witness else Path(cfg.output_dir) / f"{Path(args.graph).stem}.witness"
    write_certificates(path, [witness.to_record()], graph)
    print(f"{args.pattern} t={t}: found {witness.to_record()}")
    print(path)
    return EXIT_FOUND


# ============================================================
# analyze
# ============================================================

def cmd_analyze(args, cfg: Config) -> int:
    graph = load_graph(args.graph)
    if not isinstance(graph, TripartiteGraph):
        raise TriturError("analyze needs a TRI graph")
    reg = regularise(graph, args.tau)
    t = args.t or cfg.default_t
    sample = cfg.cert_sample if args.cert_sample is None else args.cert_sample

    labels = classify_edges(graph, reg, threads=cfg.threads)
    report = TsvReport(["section", "key", "value"], _run_metadata(args, cfg))
    report.add_row(["regularisation", "n", reg.n])
    report.add_row(["regularisation", "tau", reg.tau])
    report.add_row(["regularisation", "delta", min_degree(graph)])
    report.add_row(["regularisation", "chain_violations", len(reg.chain_violations(graph))])
    report.add_row(["regularisation", "forward_edges", len(labels)])
    report.add_row(["regularisation", "boosters", sum(1 for l in labels if l.is_booster)])
    for row in booster_histogram(labels):
        report.add_row(["booster_level", row.level, row.edges])
        report.add_row(["booster_min_codegree", row.level, row.min_codegree])
        report.add_row(["booster_max_codegree", row.level, row.max_codegree])
    for codegree, count in heavy_histogram(labels):
        report.add_row(["codegree", codegree, count])

    records = [
        certify_booster(graph, reg, label.u, label.v).to_record()
        for label in [l for l in labels if l.is_booster][:sample]
    ]

    if args.initial_config or args.squads:
        outcome = initial_configuration(graph, reg)
        report.add_row(["initial_config", "k", outcome.k])
        report.add_row(["initial_config", "variant", outcome.variant_name])
        report.add_row(["initial_config", "stage", outcome.stage])
        records.append(outcome.to_record())
        print(outcome.to_record())
        if args.squads:
            squad = best_squad(graph, reg, t, outcome.k)
            if squad is None:
                report.add_row(["squad", "r", None])
            else:
                report.add_row(["squad", "r", squad.r])
                report.add_row(["squad", "part", squad.part])
                report.add_row(["squad", "size", squad.vertices.size])
                records.append(squad.to_record(reg.tau))
                print(squad.to_record(reg.tau))

    stem = Path(args.graph).stem
    out = Path(cfg.output_dir)
    cert_path = write_certificates(out / f"{stem}.certs", records, graph)
    report.add_metadata(get_metrics().export_metadata(include_timings=args.timings))
    tsv_path = report.write(out / f"{stem}.analyze.tsv")
    print(f"tau={reg.tau} boosters={sum(1 for l in labels if l.is_booster)} certificates={len(records)}")
    print(tsv_path)
    print(cert_path)
    return EXIT_FREE


# ============================================================
# verify-cert
# ============================================================

def cmd_verify_cert(args, cfg: Config) -> int:
    graph = load_graph(args.graph)
    text = Path(args.cert).read_text(encoding="ascii")
    count = verify_text(graph, text)
    print(f"verified {count} records")
    return EXIT_FREE


# ============================================================
# report
# ============================================================

def _graph_files(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.tri")))
        else:
            files.append(p)
    return files


def cmd_report(args, cfg: Config) -> int:
    t = 1 if args.pattern == "triangle" else (args.t or cfg.default_t)
    columns = ["graph", "n", "tau", "delta", "verdict", "artifact"]
    if args.timings:
        columns.append("wall_time")
    report = TsvReport(columns, _run_metadata(args, cfg))
    out = Path(cfg.output_dir)

    for path in _graph_files(args.paths):
        with get_metrics().timed("graph_seconds") as watch:
            row = _report_row(path, args.pattern, t, cfg, out)
        if args.timings:
            row.append(f"{watch.seconds:.6f}")
        report.add_row(row)

    report.add_metadata(get_metrics().export_metadata(include_timings=args.timings))
    path = report.write(out / "report.tsv")
    print(path)
    return EXIT_FREE


def _report_row(path: Path, pattern: str, t: int, cfg: Config, out: Path) -> list:
    graph = load_graph(path)
    if not isinstance(graph, TripartiteGraph):
        raise TriturError(f"{path}: report needs TRI graphs")
    n = graph.n if graph.is_balanced else None
    tau = tau_of(graph) if graph.is_balanced else None
    artifact = None
    try:
        witness = _detect(graph, pattern, t, cfg)
    except SearchBudgetExceeded:
        verdict = "budget"
    else:
        verdict = "free" if witness is None else "found"
        if witness is not None:
            artifact = write_certificates(out / f"{path.stem}.witness", [witness.to_record()], graph)
    return [path.name, n, tau, min_degree(graph), verdict, artifact]


# ============================================================
# 엔트리포인트
# ============================================================

_COMMANDS = {
    "gen": cmd_gen,
    "check": cmd_check,
    "analyze": cmd_analyze,
    "verify-cert": cmd_verify_cert,
    "report": cmd_report,
}


def run(args, cfg: Config) -> int:
    """명령 실행 후 예외를 종료 코드로 변환"""
    try:
        with get_metrics().timed("command_seconds"):
            return _COMMANDS[args.command](args, cfg)
    except SearchBudgetExceeded as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InfeasibleError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CertificateMismatch as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (TriturError, OSError, UnicodeDecodeError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: Optional[list[str]] = None):
    """메인 엔트리포인트"""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_ERROR)
    if args.command == "gen" and not args.gen_kind:
        print("Error: gen 서브커맨드가 필요합니다", file=sys.stderr)
        sys.exit(EXIT_ERROR)

    cfg = _effective_config(args)
    setup_logging(
        level=cfg.log_level,
        log_format=cfg.log_format,
        log_file=cfg.log_file,
        max_bytes=cfg.log_max_bytes,
        backup_count=cfg.log_backup_count,
        command=args.command,
    )
    logger.debug(f"run: {RunConfig.from_namespace(args).to_line()}")
    sys.exit(run(args, cfg))


if __name__ == "__main__":
    main()
