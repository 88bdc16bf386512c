"""Compositionality test suites and consistency metrics for machine
translation backends: template-based systematicity, substitutivity and
overgeneralisation data, a neutral translation protocol with built-in
mock oracles, and the consistency/overgeneralisation measures with
reporting."""

from .bridge import (
    BackendSpec,
    MockDictionary,
    MockVolatile,
    TranslationRecord,
    mock_dictionary,
    mock_volatile,
    translate_batch,
)
from .corpus import FrequencyProfile, ParallelCorpus, ingest, ingest_pairs
from .errors import (
    BackendError,
    BindingSpaceExhaustedError,
    CompoevalError,
    ProtocolError,
    ValidationError,
)
from .lexicon import Lexicon, LexiconEntry, load_lexicon
from .metrics import (
    EvalResult,
    OvergenCurve,
    consistency_conj,
    consistency_full,
    consistency_one_word,
    detect_overgeneralisation,
    normalize,
    overgen_curve,
    pearson,
    phase_analysis,
    split_conjuncts,
    synonym_consistency,
    token_diff,
)
from .report import aggregate, emit, plot_curves
from .suites import IdiomSpec, OvergenSource, SuiteBuilder, SynonymPair, TestPair, load_idioms, load_synonyms
from .templates import BoundSentence, Template, TemplateSet, conjoin, load_templates
from .treegen import (
    SemiNaturalGenerator,
    Tree,
    count_fragments,
    harvest_fillers,
    match_fragment,
    parse_bracketed,
    serialize,
)

__version__ = "0.1.0"
