"""Word-frequency authorship analysis via Higher Criticism of exact binomial
allocation tests: discrepancy scoring, same-author verification, attribution,
discriminating-feature explanation, and robustness harnesses."""

from .attribution import (
    AttributionReport,
    DegenerateSpreadError,
    LooModel,
    VerificationResult,
    attribute,
    decide,
    fit_loo_model,
    jarque_bera,
    t_test,
    verify,
)
from .binom import (
    BinomialTestRecord,
    DegenerateRateError,
    allocation_pvalues,
    exact_binomial_p,
    leave_out_rate,
    pooled_count,
    test_all,
)
from .discrepancy import (
    DiscrepancyResult,
    FeatureSpace,
    corpus_corpus,
    discrepancy_matrix,
    doc_corpus,
    doc_doc,
    leave_one_out,
    leave_one_out_scores,
)
from .hc import HcResult, hc_statistic, hct_select
from .ingest import (
    Corpus,
    CorpusFormatError,
    Document,
    FeatureToken,
    FrequencyTable,
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
from .robustness import (
    RobustnessReport,
    SyntheticAuthorSpec,
    attribution_accuracy,
    bootstrap_accuracy,
    gamma_sweep,
    generate_author,
    kfold_accuracy,
    length_sweep,
    synthetic_suite,
)

__version__ = "0.1.0"
