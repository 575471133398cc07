"""The four classifiers with a uniform train/predict/importance contract."""

from .base import Dataset, argmax_lowest, load_model, save_model, train
from .forest import ForestConfig, ForestModel, train_forest
from .logistic import LogisticConfig, LogisticModel, train_logistic
from .rulefit import Rule, RulefitConfig, RulefitModel, train_rulefit
from .tree import Node, TreeConfig, TreeModel, train_tree

LEARNER_KINDS = ("logistic", "tree", "forest", "rulefit")

__all__ = [
    "Dataset",
    "ForestConfig",
    "ForestModel",
    "LEARNER_KINDS",
    "LogisticConfig",
    "LogisticModel",
    "Node",
    "Rule",
    "RulefitConfig",
    "RulefitModel",
    "TreeConfig",
    "TreeModel",
    "argmax_lowest",
    "load_model",
    "save_model",
    "train",
    "train_forest",
    "train_logistic",
    "train_rulefit",
    "train_tree",
]
