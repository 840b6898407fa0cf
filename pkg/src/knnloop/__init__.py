"""Online-learning translation engine.

A pluggable base model is augmented with two incremental exact
nearest-neighbor memories: a token datastore that caches corrected
translations and votes on the next token, and a policy datastore that
predicts, per decoding step, how much to trust those votes. Corrections
folded in during a session immediately influence subsequent output.
"""

from .base_model import BaseModel, LexiconStubModel, ModelOutput, load_lexicon
from .core import (
    BOS_ID,
    EOS_ID,
    UNK_ID,
    ContextVector,
    Distribution,
    Sentence,
    Token,
    Vocabulary,
    argmax_token,
    interpolate,
)
from .nn_index import ExactNNIndex, Neighbor, kernel_name
from .policy_knn import PolicyDatastore, PolicyFeature, build_features, induce_value
from .session import (
    AdaptReport,
    PolicyMode,
    Session,
    SessionConfig,
    TokenDiagnostics,
    TranslationResult,
)
from .token_knn import TokenDatastore, TokenNeighborSet, knn_distribution

__version__ = "0.1.0"

__all__ = [
    "BOS_ID",
    "EOS_ID",
    "UNK_ID",
    "AdaptReport",
    "BaseModel",
    "ContextVector",
    "Distribution",
    "ExactNNIndex",
    "LexiconStubModel",
    "ModelOutput",
    "Neighbor",
    "PolicyDatastore",
    "PolicyFeature",
    "PolicyMode",
    "Sentence",
    "Session",
    "SessionConfig",
    "Token",
    "TokenDatastore",
    "TokenDiagnostics",
    "TokenNeighborSet",
    "TranslationResult",
    "Vocabulary",
    "argmax_token",
    "build_features",
    "induce_value",
    "interpolate",
    "kernel_name",
    "knn_distribution",
    "load_lexicon",
    "__version__",
]
