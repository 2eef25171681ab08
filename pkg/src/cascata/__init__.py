"""Cascade detection, sentiment classification and heavy-tail statistics for follower networks."""
from .cascade import Cascade, detect_cascades, exposure, seed_sentiment_group
from .classify import (CascadeRatios, ContentLabel, SentimentLabel, cascade_ratios, classify_cascades,
                       label_content, label_sentiment)
from .corpus import Annotation, Corpus, TweetRecord, parse_stream, read_corpus, window_index
from .errors import CascataError, CollinearityError, DataError, DegenerateDataError
from .lexicon import CategoryLexicon, CorpusMeans, SentimentLexicon, annotate, corpus_means, tokenize
from .network import FollowerGraph, k_core_decomposition, load_edges, read_edges
from .synth import SynthConfig, gen_corpus, gen_graph, sample_discrete_power_law
from .userlevel import UserFeatures, engagement_regressions, neighborhood_correlation, user_features

__version__ = "0.1.0"
