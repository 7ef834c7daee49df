"""TBX Basic entries in mainstream TBX and in the TEI blend: parse, validate, convert."""

from .diagnostics import Diagnostic, Severity, SourceLocation
from .model import Dialect, Document, canonicalize, collect_ids, resolve_pointer
from .registry import emit_docs, emit_schema, load_default, load_from_file, resolve
from .transformer import ConvertOptions, check_roundtrip, to_tbx, to_tei
from .validator import validate
from .xml_io import detect_dialect, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "ConvertOptions", "Diagnostic", "Dialect", "Document", "Severity", "SourceLocation",
    "canonicalize", "check_roundtrip", "collect_ids", "detect_dialect", "emit_docs",
    "emit_schema", "load_default", "load_from_file", "parse", "resolve", "resolve_pointer",
    "serialize", "to_tbx", "to_tei", "validate",
]
