"""Learning multiclass classifiers from noisy labels for non-decomposable
performance measures (H-mean, Q-mean, G-mean, Micro F1).

Class labels are 1-based everywhere. Confusion matrices are (true class,
predicted class) joint-probability arrays.
"""

from nclearn._core import (
    CpeModel,
    NcbsResult,
    NcfwResult,
    NoiseModel,
    __version__,
    bayes_oracle,
    correct_confusion,
    correct_loss,
    correct_probs,
    evaluate,
    evaluate_corrected,
    flip_labels,
    gen_synthetic,
    gradient,
    induced_one_norm,
    invert,
    micro_f1_parts,
    run_ncbs,
    run_ncfw,
    train_cpe,
    true_eta,
)

__all__ = [
    "CpeModel",
    "NcbsResult",
    "NcfwResult",
    "NoiseModel",
    "__version__",
    "bayes_oracle",
    "correct_confusion",
    "correct_loss",
    "correct_probs",
    "evaluate",
    "evaluate_corrected",
    "flip_labels",
    "gen_synthetic",
    "gradient",
    "induced_one_norm",
    "invert",
    "micro_f1_parts",
    "run_ncbs",
    "run_ncfw",
    "train_cpe",
    "true_eta",
]
