import pytest

from conftest import load
from corpus_gen import corpus
from oracles import oracle_accepts
from termweave.diagnostics import Severity
from termweave.model import Dialect, Document, iter_nodes
from termweave.registry import resolve
from termweave.validator import Verdict, child_symbols, validate, validate_pointers
from termweave.xml_io import parse, serialize

HEAD = '<termEntry xmlns="http://www.tbx.org">'


def entry(body: str, *, langset: str = '<langSet xml:lang="en"><tig><term>x</term>{tig}</tig></langSet>',
          tig: str = "") -> Document:
    data = HEAD + body + langset.format(tig=tig) + "</termEntry>"
    result = parse(data.encode())
    assert result.diagnostics == [], result.diagnostics
    return result.document


def codes(doc, reg):
    return validate(doc, reg).codes


class TestStructure:
    def test_figure3(self, registry):
        for name in ("figure3.xml", "figure3-tei.xml", "mainstream.xml"):
            report = validate(load(name).document, registry)
            assert report.verdict is Verdict.VALID
            assert [d for d in report.diagnostics if d.severity is not Severity.INFO] == []

    def test_no_langset(self, registry):
        doc = parse(f"{HEAD}</termEntry>".encode()).document
        report = validate(doc, registry)
        (d,) = report.diagnostics
        assert d.code == "TBX010" and d.path == "/termEntry[1]"
        assert "langSet+" in d.message

    def test_order_violation(self, registry):
        doc = entry("", tig='<admin type="source">s</admin><termNote type="partOfSpeech">noun</termNote>')
        (d,) = validate(doc, registry).diagnostics
        assert d.code == "TBX010" and d.path.endswith("/tig[1]")
        assert "[term, admin, termNote]" in d.message
        assert not oracle_accepts(resolve(registry).element("tig").content, ["term", "admin", "termNote"])

    def test_missing_lang(self, registry):
        doc = entry("", langset="<langSet><tig><term>x</term></tig></langSet>")
        assert codes(doc, registry) == ["TBX011"]

    def test_duplicate_language_is_warning(self, registry):
        doc = entry('<langSet xml:lang="EN"><tig><term>y</term></tig></langSet>')
        report = validate(doc, registry)
        assert report.codes == ["TBX040"] and report.verdict is Verdict.VALID

    def test_unpaired_bpt(self, registry):
        doc = entry("", tig='<note>a<bpt i="1">&lt;b&gt;</bpt>b</note>')
        assert codes(doc, registry) == ["TBX010"]

    def test_bad_date(self, registry):
        doc = entry('<transacGrp><transac type="transactionType">origination</transac>'
                    "<date>28.02.2014</date></transacGrp>")
        assert codes(doc, registry) == ["TBX010"]

    def test_term_rejects_foreign(self, registry):
        doc = entry("", langset='<langSet xml:lang="en"><tig><term>x<foreign>y</foreign></term></tig></langSet>')
        assert codes(doc, registry) == ["TBX010"]

    def test_agrees_with_oracle_on_corpus(self, registry):
        resolved = resolve(registry)
        matchers = registry.matchers
        docs = corpus(10) + [load(n).document for n in ("figure3.xml", "mainstream.xml")]
        for doc in docs:
            for _, node in iter_nodes(doc):
                tag = "ref" if node.tag == "xref" else node.tag
                if tag not in resolved.elements:
                    continue
                symbols = child_symbols(node, doc.dialect)
                assert matchers[tag].accepts(symbols) == oracle_accepts(resolved.element(tag).content, symbols)


class TestDatacats:
    def test_entry_level_subject_field(self, registry):
        assert codes(entry('<descrip type="subjectField">x</descrip>'), registry) == []

    def test_subject_field_in_tig(self, registry):
        doc = entry("", tig='<descrip type="subjectField">x</descrip>')
        assert codes(doc, registry) == ["TBX021"]

    def test_unknown_is_warning(self, registry):
        report = validate(entry('<admin type="frobnicate">x</admin>'), registry)
        assert report.codes == ["TBX020"] and report.verdict is Verdict.VALID
        assert report.diagnostics[0].severity is Severity.WARNING

    def test_picklist(self, registry):
        doc = entry("", tig='<termNote type="partOfSpeech">nounish</termNote>')
        assert codes(doc, registry) == ["TBX022"]
        doc = entry("", tig='<termNote type="partOfSpeech"> noun </termNote>')
        assert codes(doc, registry) == []

    def test_level_from_group_ancestor(self, registry):
        body = '<descripGrp><descrip type="definition">d</descrip><admin type="projectSubset">p</admin></descripGrp>'
        assert codes(entry(body), registry) == []
        doc = entry("", langset='<langSet xml:lang="en">' + body + "<tig><term>x</term></tig></langSet>")
        assert codes(doc, registry) == ["TBX021"]


class TestPointers:
    def test_resolvable(self, registry):
        doc = entry("", langset='<langSet xml:lang="en"><tig xml:id="t1"><term>x</term>'
                               '<ref target="#t1">me</ref></tig></langSet>')
        assert codes(doc, registry) == []

    def test_dangling(self, registry):
        doc = entry("", tig='<ref target="#ghost">x</ref>')
        assert codes(doc, registry) == ["TBX031"]

    def test_dangling_legacy_idref(self, registry):
        doc = entry("", tig='<ref target="ghost">x</ref>')
        assert codes(doc, registry) == ["TBX031"]

    def test_external_is_info(self, registry):
        doc = entry("", tig='<xref target="http://example.org/x">x</xref>')
        report = validate(doc, registry)
        assert report.codes == ["TBX032"] and report.verdict is Verdict.VALID

    def test_duplicate_ids(self):
        data = (f'{HEAD}<note xml:id="a">n</note><langSet xml:lang="en"><tig xml:id="a"><term>x</term>'
                "</tig></langSet></termEntry>").encode()
        (d,) = validate_pointers(parse(data).document)
        assert d.code == "TBX030"
        assert "/termEntry[1]/note[1]" in d.message and "/termEntry[1]/langSet[1]/tig[1]" in d.message

    def test_invalid_uri(self, registry):
        doc = entry("", tig='<ref target="a b">x</ref>')
        assert codes(doc, registry) == ["TBX031"]


class TestReport:
    def test_empty_document(self, registry):
        doc = Document(dialect=Dialect.MAINSTREAM_TBX)
        report = validate(doc, registry)
        assert report.codes == ["TBX003"] and report.verdict is Verdict.VALID
        assert report.diagnostics[0].message == "no entries"
        assert report.counts == {Severity.ERROR: 0, Severity.WARNING: 0, Severity.INFO: 1}

    def test_deterministic_and_pure(self, registry):
        doc = load("mainstream.xml").document
        before = serialize(doc)
        assert validate(doc, registry) == validate(doc, registry)
        assert serialize(doc) == before

    @pytest.mark.parametrize("dialect", list(Dialect))
    def test_corpus_valid(self, registry, dialect):
        from termweave.transformer import to_tei
        for doc in corpus(15):
            if dialect is Dialect.TEI_BLEND:
                doc = to_tei(doc).document
            assert validate(doc, registry).verdict is Verdict.VALID
