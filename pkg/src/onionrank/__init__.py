"""Content-based influence ranking for onion-service corpora.

The pipeline: ingest a scraped corpus, extract the 40-dimensional
per-domain feature vector, train a scoring network under a pointwise,
pairwise, or listwise loss, and evaluate rankings with NDCG against
majority-voted human gains, side by side with four link-based
baselines.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    Domain,
    LinkGraph,
    PageDocument,
    VisualRecord,
    derive_link_graph,
    ingest_corpus,
    load_visual_records,
)
from .crossval import (
    BASELINE_CONFIGS,
    DEFAULT_K_GRID,
    CvResult,
    FoldPlan,
    NdcgCurve,
    compare_baselines,
    cross_validate,
)
from .errors import ConfigError, CorpusError, DataFormatError, OnionRankError, TrainingError
from .features import (
    FEATURE_GROUPS,
    FEATURE_NAMES,
    FeatureConfig,
    FeatureMatrix,
    StandardizationStats,
    assemble_feature_matrix,
    build_clone_index,
    extract_graph_features,
    extract_html_features,
    extract_ne_features,
    extract_text_features,
    extract_visual_features,
    load_gazetteer,
    standardize,
)
from .graphalg import (
    CentralityResult,
    HitsScores,
    RankingResult,
    centralities,
    hits,
    katz,
    kshell,
    load_edgelist,
    pagerank,
    save_edgelist,
    torank,
)
from .groundtruth import (
    AnnotationRecord,
    AssignmentPlan,
    assignment_plan,
    build_ground_truth,
    gain,
    load_questionnaire,
    majority_vote,
)
from .ltr import (
    JudgedDomain,
    ModelParams,
    TrainConfig,
    forward,
    loss_listnet,
    loss_pointwise,
    loss_ranknet,
    predict_rank,
    train,
)
from .metrics import dcg_at_k, ndcg_at_k
from .segmentation import load_lexicon, segment_address
from .synth import SynthConfig, SynthOutput, generate_corpus
from .tfidf import TfIdfModel, build_tfidf_model, tokenize
