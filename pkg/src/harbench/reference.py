"""Read-only published results used as comparison columns in reports.

Two tables of reported numbers ship with the library: the benchmark rows
for the two models on this dataset (per input representation, with
training times from the original hardware), and the wider literature
baselines for the same recognition task. They are constants for report
rendering only; nothing in the library derives from them.
"""

from dataclasses import dataclass
from types import MappingProxyType


@dataclass(frozen=True)
class ReferenceRow:
    model: str
    input: str
    accuracy: float
    accuracy_std: float
    f1: float
    f1_std: float
    auc: float
    auc_std: float
    train_time_s: float
    source: str = "reported"


# Benchmark rows: model x input, mean +/- std over 10 random repartitions.
BENCHMARK_RESULTS = (
    ReferenceRow("gbdt", "precomputed", 0.9896, 0.0022, 0.9896, 0.0022, 0.9999, 0.0000, 26.9),
    ReferenceRow("minirocket", "precomputed", 0.9881, 0.0031, 0.9886, 0.0029, 0.9932, 0.0018, 80.1),
    ReferenceRow("minirocket", "channel:total_acc_x", 0.9040, 0.0050, 0.9088, 0.0051, 0.9454, 0.0030, 73.6),
    ReferenceRow("minirocket", "channel:total_acc_y", 0.9350, 0.0054, 0.9388, 0.0051, 0.9633, 0.0031, 73.8),
    ReferenceRow("minirocket", "channel:total_acc_z", 0.8721, 0.0039, 0.8801, 0.0036, 0.9282, 0.0022, 73.8),
    ReferenceRow("minirocket", "channel:body_gyro_x", 0.8184, 0.0073, 0.8249, 0.0073, 0.8951, 0.0043, 74.1),
    ReferenceRow("minirocket", "channel:body_gyro_y", 0.7940, 0.0052, 0.8065, 0.0049, 0.8844, 0.0029, 74.0),
    ReferenceRow("minirocket", "channel:body_gyro_z", 0.8046, 0.0056, 0.8157, 0.0058, 0.8902, 0.0033, 74.5),
    ReferenceRow("minirocket", "channel:body_acc_x", 0.8111, 0.0089, 0.8232, 0.0086, 0.8945, 0.0051, 73.1),
    ReferenceRow("minirocket", "channel:body_acc_y", 0.7791, 0.0057, 0.7922, 0.0055, 0.8765, 0.0033, 73.1),
    ReferenceRow("minirocket", "channel:body_acc_z", 0.7399, 0.0072, 0.7565, 0.0069, 0.8550, 0.0040, 73.0),
)


@dataclass(frozen=True)
class LiteratureRow:
    model: str
    accuracy: float
    f1: float = None   # not reported for every model
    auc: float = None
    source: str = "reported"


# Literature baselines on the same task (accuracy; F1/AUC where reported).
LITERATURE_BASELINES = (
    LiteratureRow("XGBoost", 0.990, 0.990, 0.999),
    LiteratureRow("Minirocket", 0.988, 0.989, 0.993),
    LiteratureRow("SGD", 0.446, 0.427, 0.664),
    LiteratureRow("Naive Bayes", 0.736, 0.747, 0.734),
    LiteratureRow("DT", 0.748, 0.746, 0.850),
    LiteratureRow("kNN", 0.707, 0.706, 0.895),
    LiteratureRow("RF", 0.818, 0.818, 0.966),
    LiteratureRow("NN", 0.856, 0.857, 0.974),
    LiteratureRow("SVM", 0.878, 0.872, 0.988),
    LiteratureRow("LSTM", 0.900),
    LiteratureRow("CNN", 0.975),
)

BENCHMARK_BY_KEY = MappingProxyType(
    {(r.model, r.input): r for r in BENCHMARK_RESULTS}
)

BEST_LITERATURE_ACCURACY = max(r.accuracy for r in LITERATURE_BASELINES[2:])
