from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Union

from loguru import logger

from . import diagnostics as codes
from .diagnostics import Diagnostic, Severity, has_errors
from .model import Program
from .parser import ParseResult, SourceUnit, insert_all, parse_declarations
from .validate import validate


def load_program(paths: Iterable[Union[str, Path]]) -> ParseResult:
    """Read program files in order and merge them into one program.

    Declarations from later files are inserted after earlier ones, so a
    conflict is reported against the later file. Unreadable files become
    io-error diagnostics.
    """
    diags: List[Diagnostic] = []
    program = Program()
    files = 0
    for raw in paths:
        path = Path(raw)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            logger.warning({"event": "program_read_failed", "path": str(path), "error": str(e)})
            diags.append(Diagnostic(Severity.ERROR, 1, 1, codes.IO_ERROR, f"cannot read {path}: {e}", str(path)))
            continue
        decls, parse_diags = parse_declarations(SourceUnit(text, str(path)))
        diags.extend(parse_diags)
        program, conflicts = insert_all(program, decls)
        diags.extend(conflicts)
        files += 1

    diags.extend(validate(program))
    ok = not has_errors(diags)
    logger.info(
        {
            "event": "program_loaded",
            "files": files,
            "declarations": sum(1 for _ in program.declarations()),
            "errors": sum(d.is_error for d in diags),
            "warnings": sum(not d.is_error for d in diags),
        }
    )
    return ParseResult(program if ok else None, diags)


__all__ = ["load_program"]
