"""Command-line front end: validate, convert, schema, docs, roundtrip."""

from __future__ import annotations

import argparse
import enum
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .diagnostics import Diagnostic, diag
from .registry import Registry, RegistryError, emit_docs, emit_schema, load_default, load_from_file
from .transformer import ConversionError, ConvertOptions, LossError, check_roundtrip, to_tbx, to_tei
from .validator import validate
from .xml_io import SerializationError, parse, serialize

REGISTRY_ENV = "TERMWEAVE_REGISTRY"


class ExitCode(enum.IntEnum):
    OK = 0
    INVALID = 1
    LOSS = 2
    FATAL = 3
    USAGE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


class _Input:
    def __init__(self, path: Path, relative: Path) -> None:
        self.path = path
        self.relative = relative
        self.name = str(path)


def _expand(paths: Sequence[str]) -> list[_Input]:
    inputs: list[_Input] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            for f in sorted(p.rglob("*.xml"), key=lambda x: x.relative_to(p).as_posix()):
                if f.is_file():
                    inputs.append(_Input(f, f.relative_to(p)))
        else:
            # Missing files surface as read errors later, in input order.
            inputs.append(_Input(p, Path(p.name)))
    return inputs


def _registry(path: Optional[str], err: TextIO) -> Optional[Registry]:
    path = path or os.environ.get(REGISTRY_ENV) or None
    if path is None:
        return load_default()
    try:
        return load_from_file(path)
    except (OSError, RegistryError) as exc:
        err.write(f"error: cannot load registry: {exc}\n")
        return None


def _read(item: _Input, err: TextIO) -> Optional[bytes]:
    try:
        return item.path.read_bytes()
    except OSError as exc:
        err.write(f"{item.name}: error: cannot read: {exc.strerror or exc}\n")
        return None


def _emit_lines(stream: TextIO, name: str, diagnostics: Sequence[Diagnostic]) -> None:
    for d in diagnostics:
        stream.write(d.as_line(name) + "\n")


def cmd_validate(args, out: TextIO, err: TextIO) -> ExitCode:
    reg = _registry(args.registry, err)
    if reg is None:
        return ExitCode.FATAL
    inputs = _expand(args.paths)
    code = ExitCode.OK
    for item in inputs:
        data = _read(item, err)
        if data is None:
            code = max(code, ExitCode.FATAL)
            continue
        result = parse(data, source_name=item.name)
        diagnostics = list(result.diagnostics)
        if result.document is not None:
            diagnostics += validate(result.document, reg).diagnostics
        else:
            code = max(code, ExitCode.FATAL)
        if any(d.is_error for d in diagnostics):
            code = max(code, ExitCode.INVALID)
        if args.format == "lines":
            _emit_lines(out, item.name, diagnostics)
            continue
        for d in diagnostics:
            loc = f"{d.location.line}:{d.location.column}:" if d.location else ""
            out.write(f"{item.name}:{loc} {d.code} {d.severity.value} {d.path}: {d.message}\n")
        errors = sum(d.is_error for d in diagnostics)
        others = len(diagnostics) - errors
        verdict = "unreadable" if result.document is None else ("invalid" if errors else "valid")
        out.write(f"{item.name}: {verdict} ({errors} error(s), {others} other finding(s))\n")
    return code


def cmd_convert(args, out: TextIO, err: TextIO) -> ExitCode:
    inputs = _expand(args.paths)
    code = ExitCode.OK
    if args.out is None and (len(inputs) != 1 or Path(args.paths[0]).is_dir()):
        err.write("error: --out is required unless exactly one input file is given\n")
        return ExitCode.USAGE
    opts = ConvertOptions(wrap_sources_as_bibl=args.wrap_bibl, strict_legacy=args.strict_legacy,
                          fail_on_loss=args.fail_on_loss)
    convert = to_tei if args.to == "tei" else to_tbx
    for item in inputs:
        data = _read(item, err)
        if data is None:
            code = max(code, ExitCode.FATAL)
            continue
        parsed = parse(data, source_name=item.name)
        _emit_lines(err, item.name, parsed.diagnostics)
        if parsed.document is None:
            code = max(code, ExitCode.FATAL)
            continue
        if any(d.is_error for d in parsed.diagnostics):
            code = max(code, ExitCode.INVALID)
        try:
            result = convert(parsed.document, opts)
        except LossError as exc:
            _emit_lines(err, item.name, [diag("TBX060", r.path, r.description) for r in exc.losses])
            code = max(code, ExitCode.LOSS)
            continue
        except ConversionError as exc:
            err.write(f"{item.name}: error: {exc}\n")
            code = max(code, ExitCode.USAGE)
            continue
        _emit_lines(err, item.name, result.diagnostics)
        _emit_lines(err, item.name, [diag("TBX060", r.path, r.description) for r in result.losses])
        try:
            payload = serialize(result.document)
        except SerializationError as exc:
            err.write(f"{item.name}: error: {exc}\n")
            code = max(code, ExitCode.FATAL)
            continue
        if args.out is None:
            out.write(payload.decode("utf-8"))
            continue
        target = Path(args.out) / item.relative
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(payload)
        except OSError as exc:
            err.write(f"{target}: error: cannot write: {exc.strerror or exc}\n")
            code = max(code, ExitCode.FATAL)
    return code


def cmd_schema(args, out: TextIO, err: TextIO) -> ExitCode:
    reg = _registry(args.registry, err)
    if reg is None:
        return ExitCode.FATAL
    out.write(emit_schema(reg))
    return ExitCode.OK


def cmd_docs(args, out: TextIO, err: TextIO) -> ExitCode:
    reg = _registry(args.registry, err)
    if reg is None:
        return ExitCode.FATAL
    out.write(emit_docs(reg))
    return ExitCode.OK


def cmd_roundtrip(args, out: TextIO, err: TextIO) -> ExitCode:
    inputs = _expand(args.paths)
    code = ExitCode.OK
    if not inputs:
        out.write("0 files\n")
        return code
    for item in inputs:
        data = _read(item, err)
        if data is None:
            code = max(code, ExitCode.FATAL)
            continue
        parsed = parse(data, source_name=item.name)
        if parsed.document is None:
            _emit_lines(err, item.name, parsed.diagnostics)
            code = max(code, ExitCode.FATAL)
            continue
        report = check_roundtrip(parsed.document)
        if report.equal:
            out.write(f"{item.name}\tequal\n")
        else:
            out.write(f"{item.name}\tdiverges at {report.divergence}\n")
            code = max(code, ExitCode.INVALID)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="termweave", description="TBX Basic / TEI blend toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate files or directories")
    p.add_argument("paths", nargs="+")
    p.add_argument("--registry", help=f"registry overlay file (default: ${REGISTRY_ENV})")
    p.add_argument("--format", choices=("text", "lines"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between mainstream TBX and the TEI blend")
    p.add_argument("paths", nargs="+")
    p.add_argument("--to", choices=("tei", "tbx"), required=True)
    p.add_argument("--strict-legacy", action="store_true",
                   help="restore bare IDREFs, xref and hi/@target when converting to TBX")
    p.add_argument("--wrap-bibl", action="store_true", help="wrap admin type=source text in tei:bibl")
    p.add_argument("--fail-on-loss", action="store_true")
    p.add_argument("--out", help="output directory (stdout when omitted and one file is given)")
    p.set_defaults(func=cmd_convert)

    for name, func, text in (("schema", cmd_schema, "print the compact grammar"),
                             ("docs", cmd_docs, "print the markdown element reference")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--registry", help=f"registry overlay file (default: ${REGISTRY_ENV})")
        p.set_defaults(func=func)

    p = sub.add_parser("roundtrip", help="check that files survive conversion there and back")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError:
        return ExitCode.USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return int(args.func(args, out, err))


def run() -> None:
    sys.exit(main())


__all__ = ["ExitCode", "build_parser", "main"]
