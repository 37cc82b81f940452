"""Corpus ingestion: feature tokens, documents, frequency tables.

Two input formats are supported:

* JSONL, one document per line::

      {"doc_id": "Gen.1",
       "tokens": [{"lemma": "430", "morph": "HNcmpa"}, ...],
       "verse_count": 31,
       "source_ref": "..."}

  ``morph`` is optional per token and is kept so that proper-name /
  gentilic collapsing can run after parsing.  ``verse`` (a 1-based verse
  number per token) is an optional extension used for verse-aware
  windowing and truncation; if one token in a document carries it, all
  must.

* OSHB-style morphology XML: ``chapter`` elements containing ``verse``
  elements containing ``w`` elements with ``lemma`` and ``morph``
  attributes.  A multi-part lemma attribute ("b/1121") yields one token
  per part, in order, so a single written word may produce two or three
  lemma tokens.  Each chapter becomes one document.

Lemma identifiers are opaque strings; no normalization is applied beyond
splitting multi-part attributes.  Proper-name and gentilic lemmas can be
collapsed to the designated codes ``<Np>`` and ``<Ng>`` so that only their
aggregate frequencies matter.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from functools import total_ordering
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union
from xml.etree import ElementTree

PROPER_NAME_CODE = "<Np>"
GENTILIC_CODE = "<Ng>"


class CorpusFormatError(ValueError):
    """An input stream violates the corpus format."""


class TokenKind(IntEnum):
    LEMMA = 0
    PROPER_NAME = 1
    GENTILIC = 2
    NGRAM = 3


@total_ordering
@dataclass(frozen=True, slots=True)
class FeatureToken:
    """A countable text feature.

    Either a unigram (a lemma id or one of the ``<Np>``/``<Ng>`` collapse
    codes) or an n-gram of unigrams.  Tokens are immutable, hashable and
    totally ordered (kind, then lemma id, then parts), so feature lists
    sort deterministically.
    """

    kind: TokenKind
    lemma_id: str = ""
    parts: tuple["FeatureToken", ...] = ()

    def __post_init__(self):
        if self.kind is TokenKind.NGRAM:
            if len(self.parts) < 2:
                raise ValueError("n-gram token needs at least two parts")
            if any(p.kind is TokenKind.NGRAM for p in self.parts):
                raise ValueError("n-gram parts must be unigrams")
            if self.lemma_id:
                raise ValueError("n-gram token carries no lemma_id")
        else:
            if self.parts:
                raise ValueError("unigram token carries no parts")
            if self.kind is TokenKind.LEMMA and not self.lemma_id:
                raise ValueError("lemma token needs a nonempty lemma_id")
            if self.kind is not TokenKind.LEMMA and self.lemma_id:
                raise ValueError("collapse codes carry no lemma_id")

    @staticmethod
    def lemma(lemma_id: str) -> "FeatureToken":
        return FeatureToken(TokenKind.LEMMA, lemma_id)

    @staticmethod
    def proper_name() -> "FeatureToken":
        return FeatureToken(TokenKind.PROPER_NAME)

    @staticmethod
    def gentilic() -> "FeatureToken":
        return FeatureToken(TokenKind.GENTILIC)

    @staticmethod
    def ngram(parts: Sequence["FeatureToken"]) -> "FeatureToken":
        return FeatureToken(TokenKind.NGRAM, parts=tuple(parts))

    @property
    def arity(self) -> int:
        return len(self.parts) if self.kind is TokenKind.NGRAM else 1

    def sort_key(self):
        return (int(self.kind), self.lemma_id,
                tuple(p.sort_key() for p in self.parts))

    def __lt__(self, other: "FeatureToken") -> bool:
        if not isinstance(other, FeatureToken):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def render(self) -> str:
        if self.kind is TokenKind.LEMMA:
            return self.lemma_id
        if self.kind is TokenKind.PROPER_NAME:
            return PROPER_NAME_CODE
        if self.kind is TokenKind.GENTILIC:
            return GENTILIC_CODE
        return " ".join(p.render() for p in self.parts)


@dataclass(frozen=True, slots=True)
class Document:
    """An ordered sequence of unigram tokens plus identity metadata.

    ``morphs`` and ``verse_ids``, when nonempty, align 1:1 with ``tokens``.
    ``verse_count`` of 0 means unknown.
    """

    doc_id: str
    tokens: tuple[FeatureToken, ...]
    verse_count: int = 0
    source_ref: str = ""
    morphs: tuple[str, ...] = ()
    verse_ids: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "morphs", tuple(self.morphs))
        object.__setattr__(self, "verse_ids", tuple(self.verse_ids))
        if not self.doc_id:
            raise ValueError("doc_id must be nonempty")
        if self.verse_count < 0:
            raise ValueError("verse_count must be nonnegative")
        for name in ("morphs", "verse_ids"):
            aligned = getattr(self, name)
            if aligned and len(aligned) != len(self.tokens):
                raise ValueError(f"{name} must align 1:1 with tokens")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, slots=True)
class Corpus:
    """A named set of documents treated as homogeneous authorship."""

    corpus_id: str
    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        if not self.corpus_id:
            raise ValueError("corpus_id must be nonempty")
        if not self.documents:
            raise ValueError(f"corpus {self.corpus_id!r} has no documents")
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusFormatError(
                    f"duplicate doc_id {doc.doc_id!r} in corpus {self.corpus_id!r}")
            seen.add(doc.doc_id)

    def __len__(self) -> int:
        return len(self.documents)

    def without_index(self, i: int) -> "Corpus":
        """The corpus with document ``i`` removed; needs >= 2 documents."""
        if len(self.documents) < 2:
            raise ValueError("cannot remove a document from a 1-document corpus")
        docs = self.documents[:i] + self.documents[i + 1:]
        return Corpus(self.corpus_id, docs)


@dataclass(frozen=True)
class FrequencyTable:
    """Feature -> occurrence count for one text; no zero entries stored."""

    counts: Mapping[FeatureToken, int] = field(default_factory=dict)
    total: int = 0

    def __post_init__(self):
        if any(v <= 0 for v in self.counts.values()):
            raise ValueError("frequency tables store positive counts only")
        if self.total != sum(self.counts.values()):
            raise ValueError("total must equal the sum of counts")

    @staticmethod
    def from_tokens(tokens: Iterable[FeatureToken]) -> "FrequencyTable":
        counts = Counter(tokens)
        return FrequencyTable(dict(counts), sum(counts.values()))

    def get(self, w: FeatureToken) -> int:
        return self.counts.get(w, 0)

    def features(self) -> Iterator[FeatureToken]:
        return iter(self.counts)

    def __add__(self, other: "FrequencyTable") -> "FrequencyTable":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return FrequencyTable(dict(merged), self.total + other.total)

    def __sub__(self, other: "FrequencyTable") -> "FrequencyTable":
        # integer subtraction, so repeated add/sub round-trips exactly
        merged = dict(self.counts)
        for w, c in other.counts.items():
            left = merged.get(w, 0) - c
            if left < 0:
                raise ValueError(f"cannot subtract {c} of {w.render()!r}: only {left + c} present")
            if left == 0:
                merged.pop(w, None)
            else:
                merged[w] = left
        return FrequencyTable(merged, self.total - other.total)


def freq_table(tokens: Iterable[FeatureToken]) -> FrequencyTable:
    """Count occurrences of each feature; total equals the input length."""
    return FrequencyTable.from_tokens(tokens)


def vocabulary(t1: FrequencyTable, t2: FrequencyTable) -> list[FeatureToken]:
    """Sorted union of the features occurring at least once in either table."""
    return sorted(set(t1.counts) | set(t2.counts))


# ---------------------------------------------------------------------------
# morphology classification and name collapsing

def classify_morph(code: str) -> str:
    """Classify a morphology code as "proper-name", "gentilic" or "other".

    Understands OSHB-style codes: an optional leading language marker (H or
    A, only when followed by an uppercase part-of-speech letter), then the
    part of speech; nouns ("N...") with type letter 'p' are proper names and
    type letter 'g' gentilic nouns.  Anything unrecognized, including the
    empty string, is "other".
    """
    s = code
    if len(s) >= 2 and s[0] in "HA" and s[1].isupper():
        s = s[1:]
    if len(s) >= 2 and s[0] == "N":
        if s[1] == "p":
            return "proper-name"
        if s[1] == "g":
            return "gentilic"
    return "other"


def collapse_names(doc: Document, morphs: Sequence[str] | None = None) -> Document:
    """Replace proper-name / gentilic lemmas with the ``<Np>``/``<Ng>`` codes.

    ``morphs`` defaults to the codes stored on the document; without any
    morphology every token classifies as "other" and the document is
    returned unchanged.  Idempotent, order- and length-preserving.
    """
    if any(t.kind is TokenKind.NGRAM for t in doc.tokens):
        raise ValueError("collapse_names applies to unigram documents only")
    if morphs is None:
        morphs = doc.morphs
        if not morphs:
            return doc
    if len(morphs) != len(doc.tokens):
        raise ValueError(
            f"morphs length {len(morphs)} != token count {len(doc.tokens)} "
            f"in document {doc.doc_id!r}")
    out = []
    for tok, code in zip(doc.tokens, morphs):
        cls = classify_morph(code)
        if cls == "proper-name":
            out.append(FeatureToken.proper_name())
        elif cls == "gentilic":
            out.append(FeatureToken.gentilic())
        else:
            out.append(tok)
    return Document(doc.doc_id, tuple(out), doc.verse_count, doc.source_ref,
                    tuple(morphs), doc.verse_ids)


def expand_ngrams(doc: Document, n: int, within_verse: bool = False) -> Document:
    """All contiguous length-``n`` windows of the document, as arity-n tokens.

    ``n`` = 1 is the identity.  Windows never cross document boundaries; with
    ``within_verse`` and per-token verse numbers present they do not cross
    verse boundaries either.  Token count is max(0, len - n + 1).
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    if n == 1:
        return doc
    if any(t.kind is TokenKind.NGRAM for t in doc.tokens):
        raise ValueError("expand_ngrams applies to unigram documents only")
    toks = doc.tokens
    grams = []
    for i in range(len(toks) - n + 1):
        if within_verse and doc.verse_ids and doc.verse_ids[i] != doc.verse_ids[i + n - 1]:
            continue
        grams.append(FeatureToken.ngram(toks[i:i + n]))
    return Document(doc.doc_id, tuple(grams), doc.verse_count, doc.source_ref)


# ---------------------------------------------------------------------------
# JSONL reader / writer

_Stream = Union[IO[str], IO[bytes], Iterable[str], Iterable[bytes]]


def _decode_lines(stream: _Stream) -> Iterator[str]:
    for raw in stream:
        if isinstance(raw, bytes):
            try:
                yield raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise CorpusFormatError(f"input is not UTF-8: {e}") from None
        else:
            yield raw


def _token_from_lemma(lemma: str) -> FeatureToken:
    if lemma == PROPER_NAME_CODE:
        return FeatureToken.proper_name()
    if lemma == GENTILIC_CODE:
        return FeatureToken.gentilic()
    return FeatureToken.lemma(lemma)


def parse_jsonl(stream: _Stream, corpus_id: str = "corpus") -> Corpus:
    """Parse a JSONL corpus stream (see module docstring for the line schema).

    Documents come back in file order with token order preserved; morph codes
    are retained for :func:`collapse_names`.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(_decode_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"line {lineno}: malformed JSON: {e.msg}") from None
        if not isinstance(obj, dict):
            raise CorpusFormatError(f"line {lineno}: expected a JSON object")
        doc_id = obj.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise CorpusFormatError(f"line {lineno}: missing or empty doc_id")
        if doc_id in seen:
            raise CorpusFormatError(f"line {lineno}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        raw_tokens = obj.get("tokens")
        if not isinstance(raw_tokens, list) or not raw_tokens:
            raise CorpusFormatError(f"line {lineno}: document {doc_id!r} has no tokens")
        tokens, morphs, verses = [], [], []
        any_morph = any_verse = False
        for pos, t in enumerate(raw_tokens):
            if not isinstance(t, dict) or not isinstance(t.get("lemma"), str) or not t["lemma"]:
                raise CorpusFormatError(
                    f"line {lineno}: token {pos} of {doc_id!r} needs a nonempty lemma")
            tokens.append(_token_from_lemma(t["lemma"]))
            morphs.append(str(t.get("morph", "")))
            any_morph = any_morph or "morph" in t
            if "verse" in t:
                any_verse = True
                verses.append(int(t["verse"]))
            else:
                verses.append(0)
        if any_verse and 0 in verses:
            raise CorpusFormatError(
                f"line {lineno}: document {doc_id!r} mixes tokens with and without verse numbers")
        docs.append(Document(
            doc_id,
            tuple(tokens),
            verse_count=int(obj.get("verse_count", 0)),
            source_ref=str(obj.get("source_ref", "")),
            morphs=tuple(morphs) if any_morph else (),
            verse_ids=tuple(verses) if any_verse else (),
        ))
    if not docs:
        raise CorpusFormatError("no documents in stream")
    return Corpus(corpus_id, tuple(docs))


def emit_jsonl(corpus: Corpus, stream: IO[str]) -> None:
    """Write a corpus in the canonical JSONL form (unigram documents only).

    ``parse_jsonl(emit_jsonl(c))`` reproduces ``c`` exactly.
    """
    for doc in corpus.documents:
        if any(t.kind is TokenKind.NGRAM for t in doc.tokens):
            raise ValueError("the JSONL corpus format carries unigram documents only")
        toks = []
        for i, tok in enumerate(doc.tokens):
            entry: dict = {"lemma": tok.render()}
            if doc.morphs:
                entry["morph"] = doc.morphs[i]
            if doc.verse_ids:
                entry["verse"] = doc.verse_ids[i]
            toks.append(entry)
        obj: dict = {"doc_id": doc.doc_id, "tokens": toks}
        if doc.verse_count:
            obj["verse_count"] = doc.verse_count
        if doc.source_ref:
            obj["source_ref"] = doc.source_ref
        stream.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# OSHB-style XML importer

def _local_name(tag) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def parse_morph_xml(stream: IO[bytes] | IO[str] | str, corpus_id: str = "corpus") -> Corpus:
    """Parse an OSHB-style morphology XML document into a corpus.

    One document per ``chapter`` element; multi-part lemma attributes split
    into one token per part.  Namespaces are ignored (local tag names only).
    """
    try:
        root = ElementTree.parse(stream).getroot()
    except ElementTree.ParseError as e:
        raise CorpusFormatError(f"malformed XML: {e}") from None

    chapters = [el for el in root.iter() if _local_name(el.tag) == "chapter"]
    if not chapters:
        raise CorpusFormatError("no chapter elements found")
    docs = []
    for idx, chapter in enumerate(chapters, start=1):
        doc_id = chapter.get("osisID") or chapter.get("n") or f"{corpus_id}-ch{idx}"
        verses = [el for el in chapter.iter() if _local_name(el.tag) == "verse"]
        groups = [(v_no, verse) for v_no, verse in enumerate(verses, start=1)] or [(0, chapter)]
        # variant readings sit in note elements; counting them would double words
        in_notes = {id(w) for el in chapter.iter() if _local_name(el.tag) == "note"
                    for w in el.iter() if _local_name(w.tag) == "w"}
        tokens: list[FeatureToken] = []
        morphs: list[str] = []
        verse_ids: list[int] = []
        for v_no, group in groups:
            for w in group.iter():
                if _local_name(w.tag) != "w" or id(w) in in_notes:
                    continue
                lemma_attr = w.get("lemma")
                if lemma_attr is None:
                    word = "".join(w.itertext()).strip()
                    raise CorpusFormatError(
                        f"word {word!r} in {doc_id} is missing its lemma attribute")
                lemma_parts = [p.strip() for p in lemma_attr.split("/") if p.strip()]
                if not lemma_parts:
                    word = "".join(w.itertext()).strip()
                    raise CorpusFormatError(
                        f"word {word!r} in {doc_id} has an empty lemma attribute")
                morph_parts = (w.get("morph") or "").split("/")
                for j, part in enumerate(lemma_parts):
                    tokens.append(_token_from_lemma(part))
                    morphs.append(morph_parts[j] if j < len(morph_parts) else "")
                    verse_ids.append(v_no)
        docs.append(Document(
            doc_id,
            tuple(tokens),
            verse_count=len(verses),
            source_ref="",
            morphs=tuple(morphs),
            verse_ids=tuple(verse_ids) if verses else (),
        ))
    return Corpus(corpus_id, tuple(docs))
