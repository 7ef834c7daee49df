import pytest

from conftest import load
from corpus_gen import corpus
from termweave.diagnostics import Severity
from termweave.model import (
    Admin, DescripGrp, Dialect, Document, GlobalAttrs, LangSet, Namespace, Note, Term,
    TermEntry, TermSection, Text, canonicalize, text_content,
)
from termweave.xml_io import SerializationError, detect_dialect, parse, serialize

TBX = 'xmlns="http://www.tbx.org"'


def _consistent(data: bytes, loc) -> bool:
    head = data[: loc.byte_offset]
    line = head.count(b"\n") + 1
    column = len(head) - (head.rfind(b"\n") + 1) + 1
    return (line, column) == (loc.line, loc.column)


class TestParse:
    def test_figure3_model(self):
        result = load("figure3.xml")
        assert result.ok and result.diagnostics == []
        doc = result.document
        assert doc.dialect is Dialect.MAINSTREAM_TBX
        entry = doc.entries[0]
        (descrip,) = entry.aux
        assert (descrip.type, descrip.attrs.lang, text_content(descrip)) == \
            ("subjectField", "fr", "Industrie mécanique")
        de, fr = entry.lang_sets
        assert (de.attrs.lang, fr.attrs.lang) == ("de", "fr")
        grp, note = de.aux
        assert isinstance(grp, DescripGrp) and isinstance(note, Note)
        assert text_content(grp.descrip).startswith("endloser Riemen mit trapezförmigem")
        (source,) = grp.companions
        assert text_content(source) == "De Coster, Wörterbuch,\nKraftfahrzeugtechnik, SAUR, München, 1982"
        (tig,) = de.tigs
        assert text_content(tig.term) == "Keilriemen"
        assert [a.type for a in tig.aux] == ["source"]

    def test_figure3_tei_variant(self):
        result = load("figure3-tei.xml")
        assert result.diagnostics == []
        doc = result.document
        assert doc.dialect is Dialect.TEI_BLEND
        de = doc.entries[0].lang_sets[0]
        assert de.tigs[0].term.origin is Namespace.TEI
        assert de.aux[1].origin is Namespace.TEI

    def test_minimal_entry(self):
        result = parse(f"<termEntry {TBX}/>".encode())
        assert result.diagnostics == []
        assert result.document.entries == (TermEntry(),)

    def test_unknown_element(self):
        data = (f'<termEntry {TBX}><langSet xml:lang="en">\n  <banana><x/>y</banana>'
                "<tig><term>a</term></tig></langSet></termEntry>").encode()
        result = parse(data)
        (d,) = result.diagnostics
        assert d.code == "TBX001" and d.path == "/termEntry[1]/langSet[1]/banana[1]"
        assert (d.location.line, d.location.column) == (2, 3) and _consistent(data, d.location)
        ls = result.document.entries[0].lang_sets[0]
        assert ls.attrs.lang == "en" and len(ls.tigs) == 1

    def test_unknown_namespace(self):
        data = f'<termEntry {TBX}><x:foo xmlns:x="urn:other"/><bar xmlns=""/></termEntry>'.encode()
        codes = [d.code for d in parse(data).diagnostics]
        assert codes == ["TBX002", "TBX002"]

    @pytest.mark.parametrize("data", [
        b"not xml",
        b"<termEntry xmlns='http://www.tbx.org'><langSet>",
        '<?xml version="1.0" encoding="ISO-8859-1"?><termEntry/>'.encode(),
        '<termEntry xmlns="http://www.tbx.org"/>'.encode("utf-16"),
        b'<!DOCTYPE t [<!ENTITY e "x">]><termEntry xmlns="http://www.tbx.org"/>',
    ])
    def test_fatal(self, data):
        result = parse(data)
        assert result.document is None and not result.ok
        assert [d.code for d in result.diagnostics] == ["TBX000"]
        assert result.diagnostics[0].severity is Severity.ERROR
        assert _consistent(data, result.diagnostics[0].location)

    def test_locations_in_bounds(self):
        data = (f'<termEntry {TBX}>\n<langSet xml:lang="en"><tig><term>a<bpt i="1">x</bpt></term>'
                '<admin>z</admin><banana/></tig></langSet></termEntry>').encode()
        for d in parse(data).diagnostics:
            assert d.location is not None and 0 <= d.location.byte_offset < len(data)
            assert _consistent(data, d.location)

    def test_wrapper_and_base(self):
        data = (f'<martif {TBX} xml:base="http://example.org/tb/"><text><body>'
                "<termEntry/><termEntry/></body></text></martif>").encode()
        doc = parse(data).document
        assert len(doc.entries) == 2 and doc.base_uri == "http://example.org/tb/"

    def test_character_references(self):
        data = f'<termEntry {TBX}><note>a &amp; b &#233; &lt;</note></termEntry>'.encode()
        assert text_content(parse(data).document) == "a & b é <"


class TestDetect:
    def test_tei(self, fixtures):
        assert detect_dialect((fixtures / "figure3-tei.xml").read_bytes()) is Dialect.TEI_BLEND

    def test_mainstream(self, fixtures):
        assert detect_dialect((fixtures / "figure3.xml").read_bytes()) is Dialect.MAINSTREAM_TBX

    def test_vacuous(self):
        assert detect_dialect(b"<root/>") is Dialect.MAINSTREAM_TBX

    def test_tei_outside_entry_ignored(self):
        data = b'<TEI xmlns="http://www.tei-c.org/ns/1.0"><termEntry xmlns="http://www.tbx.org"/></TEI>'
        assert detect_dialect(data) is Dialect.MAINSTREAM_TBX

    def test_malformed(self):
        with pytest.raises(ValueError):
            detect_dialect(b"<a>")


class TestSerialize:
    def test_self_closing_note(self):
        doc = Document(dialect=Dialect.MAINSTREAM_TBX, entries=(TermEntry(children=(Note(),)),))
        assert b"<note/>" in serialize(doc)

    def test_rejects_tei_in_mainstream(self):
        term = Term(origin=Namespace.TEI, content=(Text("x"),))
        ls = LangSet(attrs=GlobalAttrs(lang="en"), children=(TermSection(children=(term,)),))
        doc = Document(dialect=Dialect.MAINSTREAM_TBX, entries=(TermEntry(children=(ls,)),))
        with pytest.raises(SerializationError) as info:
            serialize(doc)
        assert info.value.path == "/termEntry[1]/langSet[1]/tig[1]/term[1]"

    def test_tei_prefix(self, fixtures):
        out = serialize(load("figure3-tei.xml").document).decode()
        assert "<tei:term>Keilriemen</tei:term>" in out
        assert 'xmlns:tei="http://www.tei-c.org/ns/1.0"' in out

    def test_attribute_order_and_escaping(self):
        admin = Admin(attrs=GlobalAttrs(id="a1", lang="en", n='say "x"'), type="source",
                      content=(Text("a & <b> \"c\""),))
        doc = Document(dialect=Dialect.MAINSTREAM_TBX, entries=(TermEntry(children=(admin,)),))
        out = serialize(doc).decode()
        assert '<admin xml:id="a1" xml:lang="en" type="source" n="say &quot;x&quot;">' \
               'a &amp; &lt;b&gt; "c"</admin>' in out

    def test_deterministic(self, fixtures):
        doc = load("mainstream.xml").document
        assert serialize(doc) == serialize(canonicalize(doc)) == serialize(parse(serialize(doc)).document)

    @pytest.mark.parametrize("name", ["figure3.xml", "figure3-tei.xml", "mainstream.xml", "lossy-bibl.xml",
                                      "migrate-xref.xml", "migrate-idref.xml", "migrate-hi-target.xml"])
    def test_fixture_round_trip(self, name):
        doc = load(name).document
        again = parse(serialize(doc))
        assert again.diagnostics == []
        assert canonicalize(again.document) == canonicalize(doc)

    def test_corpus_round_trip(self):
        for doc in corpus(30):
            again = parse(serialize(doc))
            assert again.diagnostics == []
            assert canonicalize(again.document) == canonicalize(doc)

    def test_preserve_space(self):
        data = (f'<termEntry {TBX} xml:space="preserve"><langSet xml:lang="en"><tig>'
                "<term>a</term></tig></langSet></termEntry>").encode()
        doc = parse(data).document
        out = serialize(doc)
        assert b"<langSet xml:lang=\"en\"><tig><term>a</term></tig></langSet>" in out
        assert canonicalize(parse(out).document) == canonicalize(doc)

    def test_wrapped_output_for_many_entries(self):
        doc = load("mainstream.xml").document
        assert serialize(doc).startswith(b'<?xml version="1.0" encoding="UTF-8"?>\n<martif')
