"""Text-only brain for a TV-watching companion robot.

Keyword extraction from a simulated TV feed, template-based disclosure and
question generation, a two-mode session state machine with Poisson-scheduled
utterances, and topic-linked multi-engine dialog scored by Word Mover's
Distance.
"""

from .embeddings import (
    EmbeddingStore,
    OutOfVocabularyError,
    VectorFormatError,
    cosine_similarity,
    dump_vectors,
    load_vectors,
    synthetic_store,
)
from .wmd import TransportPlan, WeightedDoc, nbow, relaxed_wmd, to_similarity, wmd
from .keywords import (
    FeedEvent,
    Keyword,
    KeywordPool,
    SimpleTokenizer,
    load_feed,
    load_stopwords,
    load_user_dictionary,
    tokenize_default,
)
from .templates import (
    TemplateCorpus,
    Utterance,
    UtteranceTemplate,
    dump_templates,
    load_templates,
    realize,
    select_template,
)
from .dialog import (
    BuiltinGenerative,
    Candidate,
    DialogContext,
    DialogManager,
    RemoteGenerative,
    RetrievalEngine,
    ScoredCandidate,
    available_engines,
    load_engine_corpus,
)
from .session import (
    Session,
    SessionConfig,
    TranscriptEntry,
    draw_utterance_kind,
    schedule_next,
)
from .scenario import Scenario, load_scenario, run_scenario
from .stats import TurnStats, format_stats_table, parse_transcript, turn_stats

__version__ = "0.1.0"
