"""Benchmark engine for smartphone-sensor human-activity recognition.

Subpackages and modules:

* :mod:`harbench.dataset` — load/verify the official file layout into an
  immutable pooled bundle.
* :mod:`harbench.pipeline` — noise filtering, gravity split, jerk,
  spectra and the 561-entry feature catalog.
* :mod:`harbench.minirocket` — deterministic dilated-convolution transform
  with PPV pooling and a ridge head.
* :mod:`harbench.gbdt` — histogram gradient-boosted trees on the softmax
  objective.
* :mod:`harbench.evaluation` — seeded Monte Carlo cross-validation and
  metrics (accuracy, macro-F1, one-vs-one AUC, confusion).
* :mod:`harbench.reference` — published comparison rows for reports.
* :mod:`harbench.cli` — the ``harbench`` command.
"""

__version__ = "0.1.0"

from . import dataset, errors, evaluation, gbdt, minirocket, pipeline, reference, ridge
from .dataset import DatasetBundle, load_bundle, select_channel, verify_bundle
from .evaluation import EvalReport, run_mccv

__all__ = [
    "DatasetBundle",
    "EvalReport",
    "__version__",
    "dataset",
    "errors",
    "evaluation",
    "gbdt",
    "load_bundle",
    "minirocket",
    "pipeline",
    "reference",
    "ridge",
    "run_mccv",
    "select_channel",
    "verify_bundle",
]
