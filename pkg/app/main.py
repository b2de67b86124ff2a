from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from pydantic import ValidationError

from core import diagnostics as codes
from core.config import CliConfig, Settings, load_settings
from core.diagnostics import Diagnostic, Severity
from core.engine import Engine, QueryTargetError, ResourceLimitError
from core.loader import load_program
from core.logging import configure_logging, logger
from core.output import format_answers, format_trace, query_text
from core.query import QueryError, parse_query
from core.scenario import ScenarioError, load_scenario, run_scenario

EXIT_OK = 0
EXIT_NO_ANSWER = 1
EXIT_COMPILE = 2
EXIT_RESOURCE = 3

PROMPT = "?- "


def _query_diagnostic(code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, 1, 1, code, message, "<query>")


def _print_diagnostics(diags: Sequence[Diagnostic], err: TextIO) -> None:
    for d in diags:
        print(d, file=err)


def _compile(paths: Sequence[Path], depth_limit: int, err: TextIO) -> Optional[Engine]:
    result = load_program(paths)
    _print_diagnostics(result.diagnostics, err)
    if result.program is None:
        return None
    return Engine(result.program, depth_limit, check=False)


def answer_query(engine: Engine, text: str, config: CliConfig, out: TextIO, err: TextIO, explain: bool = False) -> int:
    """Answer one query and print the result; return its exit code."""
    try:
        query = parse_query(text)
    except QueryError as e:
        print(e.diagnostic, file=err)
        return EXIT_COMPILE

    answers = engine.solve(query)
    if config.max_answers is not None:
        answers = itertools.islice(answers, config.max_answers)
    count = 0

    def counted():
        nonlocal count
        for a in answers:
            count += 1
            yield a

    try:
        for line in format_answers(counted(), config.format, query.truth_var):
            print(line, file=out)
        if explain and query.goal.is_ground():
            print(format_trace(engine.explain(query.goal.key, query.goal.args)), file=out)
    except QueryTargetError as e:
        print(_query_diagnostic(codes.QUERY_TARGET, str(e)), file=err)
        return EXIT_COMPILE
    except ResourceLimitError as e:
        print(_query_diagnostic(codes.RESOURCE_LIMIT, str(e)), file=err)
        return EXIT_RESOURCE

    logger.info({"event": "query", "query": query_text(query), "answers": count})
    return EXIT_OK if count else EXIT_NO_ANSWER


def repl(engine: Engine, config: CliConfig, inp: TextIO, out: TextIO, err: TextIO) -> int:
    interactive = inp.isatty()
    while True:
        if interactive:
            out.write(PROMPT)
            out.flush()
        line = inp.readline()
        if not line:
            break
        text = line.strip()
        if not text:
            continue
        if text in ("halt.", "halt", ":q"):
            break
        if text.startswith(":explain"):
            answer_query(engine, text[len(":explain"):].strip(), config, out, err, explain=True)
            continue
        answer_query(engine, text, config, out, err, explain=config.explain)
    return EXIT_OK


def _run_scenarios(config: CliConfig, out: TextIO, err: TextIO) -> int:
    code = EXIT_OK
    for path in config.scenario_paths:
        try:
            scenario = load_scenario(path)
        except ScenarioError as e:
            print(_query_diagnostic(codes.IO_ERROR, str(e)), file=err)
            code = max(code, EXIT_COMPILE)
            continue
        engine = _compile([*config.program_paths, *scenario.program_paths], config.depth_limit, err)
        if engine is None:
            code = max(code, EXIT_COMPILE)
            continue
        try:
            results = run_scenario(engine, scenario)
        except ResourceLimitError as e:
            print(_query_diagnostic(codes.RESOURCE_LIMIT, str(e)), file=err)
            code = max(code, EXIT_RESOURCE)
            continue
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {scenario.name}: {r.query}", file=out)
            for reason in r.reasons:
                print(f"  {reason}", file=out)
        if not all(r.passed for r in results):
            code = max(code, EXIT_NO_ANSWER)
    return code


def run(
    config: CliConfig,
    out: Optional[TextIO] = None,
    err: Optional[TextIO] = None,
    inp: Optional[TextIO] = None,
) -> int:
    """Load the programs and answer the configured queries.

    Exit codes: 0 every query answered, 1 some query had no answer (or a
    scenario step failed), 2 compile or query errors, 3 resource errors. The
    worst outcome wins.
    """
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    inp = sys.stdin if inp is None else inp

    if config.mode == "batch" and not config.queries:
        return _run_scenarios(config, out, err)

    engine = _compile(config.program_paths, config.depth_limit, err)
    if engine is None:
        return EXIT_COMPILE

    if config.mode == "repl":
        return repl(engine, config, inp, out, err)

    code = EXIT_OK
    for text in config.queries:
        code = max(code, answer_query(engine, text, config, out, err, explain=config.explain))
    if config.scenario_paths:
        code = max(code, _run_scenarios(config, out, err))
    return code


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfuzzy", description="Query RFuzzy programs")
    parser.add_argument("programs", nargs="*", type=Path, help=".rfz program files, merged in order")
    parser.add_argument("--query", "-q", action="append", default=[], help="query to answer (repeatable)")
    parser.add_argument("--repl", action="store_true", help="read queries interactively")
    parser.add_argument("--format", choices=["plain", "json"], default=settings.output_format)
    parser.add_argument("--max-answers", type=int, default=settings.max_answers)
    parser.add_argument("--depth-limit", type=int, default=settings.depth_limit)
    parser.add_argument("--explain", action="store_true", help="print the resolution trace of ground queries")
    parser.add_argument("--scenario", action="append", default=[], type=Path, help="scenario file to check (repeatable)")
    return parser


def config_from_args(argv: Optional[Sequence[str]], settings: Settings) -> CliConfig:
    parser = build_parser(settings)
    args = parser.parse_args(argv)
    batch = bool(args.query or args.scenario) and not args.repl
    try:
        return CliConfig(
            program_paths=args.programs,
            mode="batch" if batch else "repl",
            queries=args.query,
            scenario_paths=args.scenario,
            format=args.format,
            max_answers=args.max_answers,
            depth_limit=args.depth_limit,
            explain=args.explain,
        )
    except ValidationError as e:
        parser.error(str(e))


def main(argv: Optional[List[str]] = None) -> None:
    settings = load_settings()
    configure_logging(settings.log_level)
    config = config_from_args(argv, settings)
    sys.exit(run(config))


if __name__ == "__main__":
    main()
