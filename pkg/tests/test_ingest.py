import io
import json

import pytest
from hypothesis import given, strategies as st

from hcstylo import (
    Corpus,
    CorpusFormatError,
    Document,
    FeatureToken,
    TokenKind,
    classify_morph,
    collapse_names,
    emit_jsonl,
    expand_ngrams,
    freq_table,
    parse_jsonl,
    parse_morph_xml,
    vocabulary,
)

from conftest import lemma_doc


# --- tokens ---------------------------------------------------------------

def test_token_constructors_and_render():
    assert FeatureToken.lemma("8085").render() == "8085"
    assert FeatureToken.proper_name().render() == "<Np>"
    assert FeatureToken.gentilic().render() == "<Ng>"
    gram = FeatureToken.ngram([FeatureToken.lemma("1"), FeatureToken.proper_name()])
    assert gram.render() == "1 <Np>"
    assert gram.arity == 2
    assert FeatureToken.lemma("1").arity == 1


def test_token_validation():
    with pytest.raises(ValueError):
        FeatureToken.lemma("")
    with pytest.raises(ValueError):
        FeatureToken(TokenKind.PROPER_NAME, "x")
    with pytest.raises(ValueError):
        FeatureToken.ngram([FeatureToken.lemma("1")])
    with pytest.raises(ValueError):
        FeatureToken.ngram([FeatureToken.lemma("1"),
                            FeatureToken.ngram([FeatureToken.lemma("2"), FeatureToken.lemma("3")])])


def test_token_total_order_and_hash():
    toks = [FeatureToken.gentilic(), FeatureToken.lemma("2"), FeatureToken.lemma("10"),
            FeatureToken.proper_name(),
            FeatureToken.ngram([FeatureToken.lemma("1"), FeatureToken.lemma("2")])]
    ordered = sorted(toks)
    # lemmas first (lexicographic ids), then <Np>, <Ng>, then n-grams
    assert [t.render() for t in ordered] == ["10", "2", "<Np>", "<Ng>", "1 2"]
    assert len({hash(t) for t in toks}) == len(toks)
    assert FeatureToken.lemma("5") == FeatureToken.lemma("5")


# --- documents / corpora ---------------------------------------------------

def test_document_validation():
    with pytest.raises(ValueError):
        Document("", (FeatureToken.lemma("1"),))
    with pytest.raises(ValueError):
        lemma_doc("d", ["1", "2"], morphs=("HNp",))
    doc = lemma_doc("d", ["1", "2"], morphs=("HNp", ""))
    assert len(doc) == 2


def test_corpus_unique_ids():
    d = lemma_doc("a", ["1"])
    with pytest.raises(CorpusFormatError):
        Corpus("c", (d, lemma_doc("a", ["2"])))
    with pytest.raises(ValueError):
        Corpus("c", ())


# --- jsonl -----------------------------------------------------------------

def test_parse_jsonl_single_token_passthrough():
    line = b'{"doc_id": "Gen1", "tokens": [{"lemma": "430", "morph": "HNcmpa"}]}\n'
    corpus = parse_jsonl(io.BytesIO(line), corpus_id="g")
    assert corpus.corpus_id == "g"
    doc = corpus.documents[0]
    assert doc.doc_id == "Gen1"
    assert doc.tokens == (FeatureToken.lemma("430"),)
    assert doc.morphs == ("HNcmpa",)


def test_parse_jsonl_duplicate_doc_id():
    data = b'{"doc_id": "A", "tokens": [{"lemma": "1"}]}\n' \
           b'{"doc_id": "A", "tokens": [{"lemma": "2"}]}\n'
    with pytest.raises(CorpusFormatError, match="duplicate"):
        parse_jsonl(io.BytesIO(data))


def test_parse_jsonl_preserves_file_order():
    lines = "".join(json.dumps({"doc_id": f"d{i}", "tokens": [{"lemma": str(i)}]}) + "\n"
                    for i in range(3))
    corpus = parse_jsonl(io.StringIO(lines))
    assert [d.doc_id for d in corpus.documents] == ["d0", "d1", "d2"]


def test_parse_jsonl_errors_carry_line_numbers():
    data = b'{"doc_id": "A", "tokens": [{"lemma": "1"}]}\n{oops\n'
    with pytest.raises(CorpusFormatError, match="line 2"):
        parse_jsonl(io.BytesIO(data))
    with pytest.raises(CorpusFormatError, match="no tokens"):
        parse_jsonl(io.BytesIO(b'{"doc_id": "A", "tokens": []}\n'))


def test_parse_jsonl_verse_all_or_none():
    bad = json.dumps({"doc_id": "A", "tokens": [{"lemma": "1", "verse": 1}, {"lemma": "2"}]})
    with pytest.raises(CorpusFormatError, match="verse"):
        parse_jsonl(io.StringIO(bad))


def test_jsonl_round_trip():
    corpus = Corpus("c", (
        lemma_doc("d1", ["1", "2", "1"], verse_count=2, source_ref="x",
                  morphs=("HNp", "", "Ncfsa"), verse_ids=(1, 1, 2)),
        Document("d2", (FeatureToken.proper_name(), FeatureToken.lemma("9"))),
    ))
    buf = io.StringIO()
    emit_jsonl(corpus, buf)
    assert parse_jsonl(io.StringIO(buf.getvalue()), corpus_id="c") == corpus


@given(st.lists(
    st.tuples(st.lists(st.sampled_from("abcde"), min_size=1, max_size=30),
              st.integers(min_value=0, max_value=40)),
    min_size=1, max_size=8))
def test_jsonl_round_trip_property(doc_specs):
    docs = tuple(
        Document(f"d{i}", tuple(FeatureToken.lemma(x) for x in lemmas), verse_count=vc)
        for i, (lemmas, vc) in enumerate(doc_specs))
    corpus = Corpus("c", docs)
    buf = io.StringIO()
    emit_jsonl(corpus, buf)
    assert parse_jsonl(io.StringIO(buf.getvalue()), corpus_id="c") == corpus


def test_emit_jsonl_rejects_ngram_documents():
    doc = lemma_doc("d", ["1", "2", "3"])
    with pytest.raises(ValueError):
        emit_jsonl(Corpus("c", (expand_ngrams(doc, 2),)), io.StringIO())


# --- morphology classification / collapsing --------------------------------

@pytest.mark.parametrize("code,expected", [
    ("HNp", "proper-name"),
    ("Np", "proper-name"),
    ("ANp", "proper-name"),
    ("HNg", "gentilic"),
    ("Ngmpa", "gentilic"),
    ("HNcmpa", "other"),
    ("HVqp3ms", "other"),
    ("Ag", "other"),      # adjective, not a noun code
    ("R", "other"),
    ("", "other"),
])
def test_classify_morph(code, expected):
    assert classify_morph(code) == expected


def test_collapse_names_examples():
    doc = lemma_doc("d", ["85", "8085", "x"], morphs=("HNp", "HVqp3ms", "HNg"))
    out = collapse_names(doc)
    assert out.tokens == (FeatureToken.proper_name(), FeatureToken.lemma("8085"),
                          FeatureToken.gentilic())


def test_collapse_names_explicit_morphs_and_errors():
    doc = lemma_doc("d", ["85"])
    assert collapse_names(doc, ["Np"]).tokens == (FeatureToken.proper_name(),)
    with pytest.raises(ValueError, match="morphs length"):
        collapse_names(doc, ["Np", "Np"])
    # no morphology anywhere: fail-open, nothing collapses
    assert collapse_names(doc) == doc


@given(st.lists(st.tuples(st.sampled_from(["1", "2", "3"]),
                          st.sampled_from(["HNp", "HNg", "HNcmpa", ""])),
                min_size=1, max_size=25))
def test_collapse_names_idempotent_and_length_preserving(pairs):
    doc = Document("d", tuple(FeatureToken.lemma(l) for l, _ in pairs),
                   morphs=tuple(m for _, m in pairs))
    once = collapse_names(doc)
    assert len(once.tokens) == len(doc.tokens)
    assert collapse_names(once) == once


# --- n-grams ----------------------------------------------------------------

def test_expand_ngrams_windows():
    doc = lemma_doc("d", ["a", "b", "c"])
    grams = expand_ngrams(doc, 2).tokens
    assert [g.render() for g in grams] == ["a b", "b c"]
    assert expand_ngrams(lemma_doc("d", ["a"]), 2).tokens == ()
    grams3 = expand_ngrams(lemma_doc("d", ["a", "b", "c", "d"]), 3).tokens
    assert [g.render() for g in grams3] == ["a b c", "b c d"]


def test_expand_ngrams_identity_and_errors():
    doc = lemma_doc("d", ["a", "b"])
    assert expand_ngrams(doc, 1) is doc
    with pytest.raises(ValueError):
        expand_ngrams(doc, 0)


def test_expand_ngrams_within_verse():
    doc = lemma_doc("d", ["a", "b", "c", "d"], verse_ids=(1, 1, 2, 2))
    grams = expand_ngrams(doc, 2, within_verse=True).tokens
    assert [g.render() for g in grams] == ["a b", "c d"]


@given(st.lists(st.sampled_from("abc"), max_size=30), st.integers(1, 5))
def test_expand_ngrams_length_law(lemmas, n):
    doc = Document("d", tuple(FeatureToken.lemma(x) for x in lemmas))
    out = expand_ngrams(doc, n)
    assert len(out.tokens) == max(0, len(lemmas) - n + 1)


# --- frequency tables --------------------------------------------------------

def test_freq_table_counts():
    a, b = FeatureToken.lemma("a"), FeatureToken.lemma("b")
    t = freq_table([a, b, a])
    assert t.counts == {a: 2, b: 1} and t.total == 3
    empty = freq_table([])
    assert empty.counts == {} and empty.total == 0


@given(st.lists(st.sampled_from("abcdef"), max_size=60))
def test_freq_table_total_and_multiset(lemmas):
    toks = [FeatureToken.lemma(x) for x in lemmas]
    t = freq_table(toks)
    assert t.total == len(toks)
    rebuilt = sorted(w for w, c in t.counts.items() for _ in range(c))
    assert rebuilt == sorted(toks)


def test_table_subtraction_roundtrip():
    a, b = FeatureToken.lemma("a"), FeatureToken.lemma("b")
    t1 = freq_table([a, a, b])
    t2 = freq_table([a, b])
    assert (t1 + t2) - t2 == t1
    with pytest.raises(ValueError):
        t2 - t1


def test_vocabulary():
    a, b = FeatureToken.lemma("a"), FeatureToken.lemma("b")
    assert vocabulary(freq_table([a]), freq_table([b, b])) == [a, b]
    assert vocabulary(freq_table([a]), freq_table([a, a, a])) == [a]
    assert vocabulary(freq_table([]), freq_table([])) == []


# --- XML importer ------------------------------------------------------------

OSIS = """<?xml version="1.0" encoding="utf-8"?>
<osis xmlns="http://example.org/osis">
 <osisText>
  <div type="book">
   <chapter osisID="Gen.1">
    <verse osisID="Gen.1.1">
     <w lemma="b/7225" morph="HR/Ncfsa">word1</w>
     <w lemma="1254 a" morph="HVqp3ms">word2</w>
    </verse>
    <verse osisID="Gen.1.2">
     <w lemma="430" morph="HNcmpa">word3</w>
     <w lemma="c/85" morph="HC/Np">word4</w>
     <w lemma="l/m/120" morph="HR/R/Ncmsa">word5</w>
    </verse>
   </chapter>
   <chapter osisID="Gen.2">
    <verse osisID="Gen.2.1">
     <w lemma="430" morph="HNcmpa">word6</w>
    </verse>
   </chapter>
  </div>
 </osisText>
</osis>
"""


def test_parse_morph_xml_structure():
    corpus = parse_morph_xml(io.StringIO(OSIS), corpus_id="gen")
    assert [d.doc_id for d in corpus.documents] == ["Gen.1", "Gen.2"]
    doc = corpus.documents[0]
    # b/7225 -> two lemmas; l/m/120 -> three lemmas
    assert [t.render() for t in doc.tokens] == ["b", "7225", "1254 a", "430", "c", "85", "l", "m", "120"]
    assert doc.verse_count == 2
    assert doc.verse_ids == (1, 1, 1, 2, 2, 2, 2, 2, 2)
    assert doc.morphs == ("HR", "Ncfsa", "HVqp3ms", "HNcmpa", "HC", "Np", "HR", "R", "Ncmsa")


def test_parse_morph_xml_collapse_flows_through():
    corpus = parse_morph_xml(io.StringIO(OSIS), corpus_id="gen")
    collapsed = collapse_names(corpus.documents[0])
    assert collapsed.tokens[5] == FeatureToken.proper_name()
    assert collapsed.tokens[3] == FeatureToken.lemma("430")


def test_parse_morph_xml_errors():
    with pytest.raises(CorpusFormatError, match="malformed XML"):
        parse_morph_xml(io.StringIO("<osis><chapter>"))
    missing = OSIS.replace(' lemma="430"', "", 1)
    with pytest.raises(CorpusFormatError, match="word3"):
        parse_morph_xml(io.StringIO(missing))
    with pytest.raises(CorpusFormatError, match="no chapter"):
        parse_morph_xml(io.StringIO("<osis></osis>"))


def test_parse_morph_xml_skips_variant_notes():
    xml = """<osis><chapter osisID="X.1"><verse osisID="X.1.1">
      <w lemma="1" morph="HNcmsa">main</w>
      <note type="variant"><catchWord>main</catchWord>
        <rdg type="x-qere"><w lemma="999" morph="HNcmsa">variant</w></rdg>
      </note>
      <w lemma="2" morph="HNcmsa">next</w>
    </verse></chapter></osis>"""
    doc = parse_morph_xml(io.StringIO(xml)).documents[0]
    assert [t.render() for t in doc.tokens] == ["1", "2"]


def test_parse_morph_xml_word_count():
    words = "".join(f'<w lemma="{i % 7}" morph="HNcmpa">w</w>' for i in range(80))
    verses = "".join(f'<verse osisID="X.1.{v}">{words if v == 1 else ""}</verse>'
                     for v in range(1, 6))
    xml = f'<osis><chapter osisID="X.1">{verses}</chapter></osis>'
    doc = parse_morph_xml(io.StringIO(xml)).documents[0]
    assert len(doc.tokens) == 80
    assert doc.verse_count == 5
