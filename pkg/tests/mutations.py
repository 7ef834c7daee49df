"""Mutation table: each mutant is the Keilriemen sample entry with one seeded defect.

Run ``python3 tests/mutations.py`` to regenerate ``tests/fixtures/mutants``.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Callable, NamedTuple

FIXTURES = Path(__file__).parent / "fixtures"
MUTANT_DIR = FIXTURES / "mutants"

DE_TIG_ADMIN = '      <admin type="source">De Coster, ...</admin>\n    </tig>'


class Mutant(NamedTuple):
    name: str
    code: str
    stage: str  # "validate", "to_tei" or "to_tbx"
    base: str
    edit: Callable[[str], str]


def _once(old: str, new: str) -> Callable[[str], str]:
    def edit(text: str) -> str:
        assert text.count(old) >= 1, old
        return text.replace(old, new, 1)
    return edit


def _all(old: str, new: str) -> Callable[[str], str]:
    def edit(text: str) -> str:
        assert old in text, old
        return text.replace(old, new)
    return edit


def _truncate(text: str) -> str:
    return text[: len(text) // 2]


def _drop_lang_sets(text: str) -> str:
    return re.sub(r"\s*<langSet.*?</langSet>", "", text, flags=re.S)


def _empty(_text: str) -> str:
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            '<martif xmlns="http://www.tbx.org" type="TBX-Basic">\n'
            "  <text>\n    <body/>\n  </text>\n</martif>\n")


def _in_de_tig(snippet: str) -> Callable[[str], str]:
    return _once(DE_TIG_ADMIN, DE_TIG_ADMIN.replace("\n    </tig>", f"\n      {snippet}\n    </tig>"))


MUTANTS: tuple[Mutant, ...] = (
    Mutant("truncated", "TBX000", "validate", "figure3.xml", _truncate),
    Mutant("unknown-element", "TBX001", "validate", "figure3.xml",
           _once('<langSet xml:lang="de">', '<langSet xml:lang="de">\n    <banana>split</banana>')),
    Mutant("unknown-namespace", "TBX002", "validate", "figure3.xml",
           _once('<langSet xml:lang="de">', '<langSet xml:lang="de">\n    <x:foo xmlns:x="urn:example:other"/>')),
    Mutant("empty-document", "TBX003", "validate", "figure3.xml", _empty),
    Mutant("no-langset", "TBX010", "validate", "figure3.xml", _drop_lang_sets),
    Mutant("termnote-after-admin", "TBX010", "validate", "figure3.xml",
           _in_de_tig('<termNote type="partOfSpeech">noun</termNote>')),
    Mutant("missing-lang", "TBX011", "validate", "figure3.xml",
           _once('<langSet xml:lang="fr">', "<langSet>")),
    Mutant("unknown-datacat", "TBX020", "validate", "figure3.xml",
           _once(DE_TIG_ADMIN, DE_TIG_ADMIN.replace("source", "frobnicate"))),
    Mutant("wrong-level", "TBX021", "validate", "figure3.xml",
           _in_de_tig('<descrip type="subjectField">Mechanik</descrip>')),
    Mutant("picklist", "TBX022", "validate", "figure3.xml",
           _once("<term>Keilriemen</term>",
                 '<term>Keilriemen</term>\n      <termNote type="partOfSpeech">nounish</termNote>')),
    Mutant("duplicate-id", "TBX030", "validate", "figure3.xml", _all("<tig>", '<tig xml:id="a">')),
    Mutant("dangling-pointer", "TBX031", "validate", "figure3.xml",
           _in_de_tig('<ref target="#ghost">nowhere</ref>')),
    Mutant("external-pointer", "TBX032", "validate", "figure3.xml",
           _in_de_tig('<xref target="http://example.org/x">elsewhere</xref>')),
    Mutant("duplicate-language", "TBX040", "validate", "figure3.xml",
           _once('<langSet xml:lang="fr">', '<langSet xml:lang="DE">')),
    Mutant("hi-target", "TBX050", "to_tei", "figure3.xml",
           lambda t: _in_de_tig('<note>see <hi target="fig1">Keilriemen</hi></note>')(
               _once("<tig>", '<tig xml:id="fig1">')(t))),
    Mutant("ambiguous-target", "TBX051", "to_tei", "figure3.xml",
           lambda t: _in_de_tig('<ref target="kr.1">Keilriemen</ref>')(
               _once("<tig>", '<tig xml:id="kr.1">')(t))),
    Mutant("lossy-bibl", "TBX060", "to_tbx", "figure3-tei.xml",
           _once(DE_TIG_ADMIN, DE_TIG_ADMIN.replace(
               "De Coster, ...", '<tei:bibl n="1">De Coster, ...</tei:bibl>'))),
)


def build() -> dict[str, bytes]:
    out = {}
    for m in MUTANTS:
        text = (FIXTURES / m.base).read_text(encoding="utf-8")
        out[f"{m.name}.xml"] = m.edit(text).encode("utf-8")
    return out


def write() -> None:
    MUTANT_DIR.mkdir(exist_ok=True)
    for name, data in build().items():
        (MUTANT_DIR / name).write_bytes(data)


if __name__ == "__main__":
    write()
