"""Classifier families: multinomial Naive Bayes, Random Forest, Pegasos SVM.

One algorithm per family; further trainers (discriminative NB, Bayes nets,
SMO-style SVMs, neural nets) are extension points behind AlgorithmSpec.
"""

from .base import (
    AlgorithmSpec,
    NaiveBayesParams,
    PegasosParams,
    RandomForestParams,
    TrainedModel,
    load_model,
    predict,
    predict_many,
    save_model,
    score,
    score_many,
    train,
)

__all__ = [
    "AlgorithmSpec",
    "NaiveBayesParams",
    "PegasosParams",
    "RandomForestParams",
    "TrainedModel",
    "train",
    "predict",
    "predict_many",
    "score",
    "score_many",
    "save_model",
    "load_model",
]
