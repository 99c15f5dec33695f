"""BiLSTM morphosyntactic tagging with lexicon features and stepwise category tagging."""
from .corpus import (
    Sentence,
    TaggedCorpus,
    Token,
    Vocabulary,
    augment_training,
    build_vocabulary,
    folds_split,
    load_corpus,
)
from .evaluation import EvalReport, cross_validate, error_reduction, evaluate, top_confusions
from .lexicon import LabelInventory, MorphLexicon, coverage, encode_nhot, load_labels, load_lexicon
from .tagger import (
    ModelConfig,
    Mode,
    TaggerModel,
    build_model,
    encode_token,
    fit,
    load_model,
    save_model,
    tag_sentence,
    train,
    train_stepwise,
)
from .tagset import (
    CoarseInventory,
    MnemonicTag,
    TagInventory,
    build_coarse_inventory,
    build_inventory,
    coarse_of,
    load_tagset,
    parse_tag,
)

__version__ = "0.1.0"

__all__ = [
    "CoarseInventory",
    "EvalReport",
    "LabelInventory",
    "MnemonicTag",
    "Mode",
    "ModelConfig",
    "MorphLexicon",
    "Sentence",
    "TagInventory",
    "TaggedCorpus",
    "TaggerModel",
    "Token",
    "Vocabulary",
    "augment_training",
    "build_coarse_inventory",
    "build_inventory",
    "build_model",
    "build_vocabulary",
    "coarse_of",
    "coverage",
    "cross_validate",
    "encode_nhot",
    "encode_token",
    "error_reduction",
    "evaluate",
    "fit",
    "folds_split",
    "load_corpus",
    "load_labels",
    "load_lexicon",
    "load_model",
    "load_tagset",
    "parse_tag",
    "save_model",
    "tag_sentence",
    "top_confusions",
    "train",
    "train_stepwise",
]
