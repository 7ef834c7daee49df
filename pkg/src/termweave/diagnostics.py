"""Coded diagnostics shared by the parser, validator, transformer and CLI."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


# Published code table. Codes never change meaning once assigned.
CODES: dict[str, tuple[Severity, str]] = {
    "TBX000": (Severity.ERROR, "malformed or unsupported input"),
    "TBX001": (Severity.ERROR, "unknown element"),
    "TBX002": (Severity.ERROR, "unknown namespace"),
    "TBX003": (Severity.INFO, "empty document"),
    "TBX010": (Severity.ERROR, "content-model violation"),
    "TBX011": (Severity.ERROR, "missing xml:lang on langSet"),
    "TBX020": (Severity.WARNING, "unknown data category"),
    "TBX021": (Severity.ERROR, "data category at wrong level"),
    "TBX022": (Severity.ERROR, "picklist value violation"),
    "TBX030": (Severity.ERROR, "duplicate id"),
    "TBX031": (Severity.ERROR, "dangling local pointer"),
    "TBX032": (Severity.INFO, "external pointer"),
    "TBX040": (Severity.WARNING, "duplicate language section"),
    "TBX050": (Severity.INFO, "hi/@target migrated to ref"),
    "TBX051": (Severity.WARNING, "ambiguous pointer target"),
    "TBX060": (Severity.WARNING, "conversion loss"),
}


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int
    byte_offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    path: str
    message: str
    location: Optional[SourceLocation] = None

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def as_line(self, source: str) -> str:
        """Tab-separated record: file, code, severity, path, line, column, message."""
        line = str(self.location.line) if self.location else ""
        column = str(self.location.column) if self.location else ""
        message = " ".join(self.message.split())
        return "\t".join(
            [source, self.code, self.severity.value, self.path, line, column, message]
        )

    def __str__(self) -> str:
        where = f" ({self.location})" if self.location else ""
        return f"{self.code} {self.severity.value} {self.path}{where}: {self.message}"


def diag(
    code: str,
    path: str,
    message: str,
    location: Optional[SourceLocation] = None,
    severity: Optional[Severity] = None,
) -> Diagnostic:
    """Build a diagnostic with the table's default severity for *code*."""
    return Diagnostic(code, severity or CODES[code][0], path, message, location)
