from .artifact import ModelArtifact, deserialize, predict, predict_matrix, serialize
from .attribution import Attribution, attribute
from .data import TrainingSet
from .forest import ForestParams, train_forest
from .gbdt import GbdtParams, train_gbdt
from .logistic import LogisticParams, train_logistic

__all__ = [
    "Attribution",
    "ForestParams",
    "GbdtParams",
    "LogisticParams",
    "ModelArtifact",
    "TrainingSet",
    "attribute",
    "deserialize",
    "predict",
    "predict_matrix",
    "serialize",
    "train_forest",
    "train_gbdt",
    "train_logistic",
]
