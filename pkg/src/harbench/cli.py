"""Command-line front end.

Subcommands::

    harbench verify <root>
    harbench run --config cfg.json [--model M --input I --iterations N
                  --train-fraction F --out DIR --seed-base S]
    harbench report <run_dir>... [--out DIR]
    harbench features compute <root> --out features.csv

Exit codes: 0 ok, 1 validation error (including usage), 2 data defect,
3 compute failure. Config files are flat JSON; command-line flags override
file values. All outputs are UTF-8; CSV uses ',' with '.' decimals.
"""

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dataset import load_bundle, verify_bundle
from .errors import (
    DataDefectError,
    HarBenchError,
    MissingReport,
    SchemaVersionMismatch,
    ValidationError,
)
from .evaluation import EvalReport, REPORT_SCHEMA_VERSION, run_mccv
from .pipeline import build_full_catalog, compute_feature_matrix
from .reference import BENCHMARK_RESULTS, LITERATURE_BASELINES

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DATA_DEFECT = 2
EXIT_COMPUTE = 3

# Flat config keys that override model defaults; anything else is rejected.
GBDT_OVERRIDES = (
    "rounds", "max_depth", "eta", "lambda_l2", "alpha_l1", "gamma",
    "min_child_weight", "n_bins", "tree_method",
)
MINIROCKET_OVERRIDES = ("target_features", "lambda_grid")


@dataclass
class ExperimentConfig:
    dataset_root: str
    model: str
    input: str = "precomputed"
    iterations: int = 10
    train_fraction: float = 0.7
    seed_base: int = 0
    split_mode: str = "instance"
    output_dir: str = "."
    model_params: dict = field(default_factory=dict)

    @classmethod
    def from_flat_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        core = {f.name for f in fields(cls)} - {"model_params"}
        known_overrides = set(GBDT_OVERRIDES) | set(MINIROCKET_OVERRIDES)
        params = {}
        kwargs = {}
        for key, value in raw.items():
            if key in core:
                kwargs[key] = value
            elif key in known_overrides:
                params[key] = value
            else:
                raise ValidationError(f"unknown config key {key!r}")
        if "dataset_root" not in kwargs:
            raise ValidationError("config needs dataset_root")
        if "model" not in kwargs:
            raise ValidationError("config needs model")
        cfg = cls(model_params=params, **kwargs)
        cfg.validate()
        return cfg

    def validate(self):
        if self.model not in ("gbdt", "minirocket"):
            raise ValidationError(f"unknown model {self.model!r}")
        allowed = GBDT_OVERRIDES if self.model == "gbdt" else MINIROCKET_OVERRIDES
        for key in self.model_params:
            if key not in allowed:
                raise ValidationError(
                    f"override {key!r} does not apply to model {self.model!r}"
                )
        if self.iterations < 1:
            raise ValidationError("iterations must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train_fraction must be in (0, 1)")

    def to_flat_dict(self) -> dict:
        out = {
            "dataset_root": self.dataset_root,
            "model": self.model,
            "input": self.input,
            "iterations": self.iterations,
            "train_fraction": self.train_fraction,
            "seed_base": self.seed_base,
            "split_mode": self.split_mode,
            "output_dir": self.output_dir,
        }
        out.update(self.model_params)
        return out


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the validation code on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _build_parser():
    parser = _Parser(prog="harbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="load and sanity-check a dataset directory")
    p_verify.add_argument("root")

    p_run = sub.add_parser("run", help="run one Monte Carlo experiment")
    p_run.add_argument("--config", help="flat JSON experiment config")
    p_run.add_argument("--dataset-root")
    p_run.add_argument("--model", choices=("gbdt", "minirocket"))
    p_run.add_argument("--input", help="'precomputed' or 'channel:<name>'")
    p_run.add_argument("--iterations", type=int)
    p_run.add_argument("--train-fraction", type=float)
    p_run.add_argument("--seed-base", type=int)
    p_run.add_argument("--split-mode", choices=("instance", "subject", "stratified"))
    p_run.add_argument("--out", help="output directory")

    p_report = sub.add_parser("report", help="merge run reports with published rows")
    p_report.add_argument("run_dirs", nargs="+")
    p_report.add_argument("--out", help="also write comparison.md/.csv here")

    p_features = sub.add_parser("features", help="feature pipeline commands")
    f_sub = p_features.add_subparsers(dest="features_command", required=True)
    p_compute = f_sub.add_parser("compute", help="recompute the feature matrix")
    p_compute.add_argument("root")
    p_compute.add_argument("--out", required=True, help="output CSV path")

    return parser


def cmd_verify(root) -> int:
    bundle = load_bundle(root)
    report = verify_bundle(bundle)
    print(report.summary())
    return EXIT_OK


def _load_run_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ValidationError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ValidationError("config must be a JSON object")
    overrides = {
        "dataset_root": args.dataset_root,
        "model": args.model,
        "input": args.input,
        "iterations": args.iterations,
        "train_fraction": args.train_fraction,
        "seed_base": args.seed_base,
        "split_mode": args.split_mode,
        "output_dir": args.out,
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_flat_dict(raw)


def cmd_run(config: ExperimentConfig) -> int:
    from . import __version__

    bundle = load_bundle(config.dataset_root)
    report = run_mccv(
        bundle,
        model=config.model,
        input_spec=config.input,
        iterations=config.iterations,
        train_fraction=config.train_fraction,
        seed_base=config.seed_base,
        model_params=config.model_params,
        split_mode=config.split_mode,
    )
    out = report.write(config.output_dir)
    manifest = {
        "config": config.to_flat_dict(),
        "seeds": [config.seed_base + i for i in range(config.iterations)],
        "library_version": __version__,
        "written_at_unix": time.time(),
    }
    (out / "run-manifest.json").write_text(json.dumps(manifest, indent=2))
    mean_acc, std_acc = report.aggregate("accuracy")
    print(f"{config.model} on {config.input}: accuracy {mean_acc:.4f}±{std_acc:.4f}")
    print(f"artifacts written to {out}")
    return EXIT_OK


def _load_report(run_dir) -> EvalReport:
    path = Path(run_dir) / "report.json"
    if not path.is_file():
        raise MissingReport(f"no report.json in {run_dir}")
    doc = json.loads(path.read_text())
    if doc.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"{path}: schema {doc.get('schema_version')} != {REPORT_SCHEMA_VERSION}"
        )
    return EvalReport.from_json_dict(doc)


def _comparison_rows(reports):
    rows = []
    for rep in reports:
        acc, acc_std = rep.aggregate("accuracy")
        f1, f1_std = rep.aggregate("macro_f1")
        auc, auc_std = rep.aggregate("ovo_auc")
        rows.append(
            {
                "model": rep.model, "input": rep.input,
                "accuracy": acc, "accuracy_std": acc_std,
                "f1": f1, "f1_std": f1_std, "auc": auc, "auc_std": auc_std,
                "train_time_s": rep.total_train_time(), "source": "measured",
            }
        )
    for ref in BENCHMARK_RESULTS:
        rows.append(
            {
                "model": ref.model, "input": ref.input,
                "accuracy": ref.accuracy, "accuracy_std": ref.accuracy_std,
                "f1": ref.f1, "f1_std": ref.f1_std,
                "auc": ref.auc, "auc_std": ref.auc_std,
                "train_time_s": ref.train_time_s, "source": ref.source,
            }
        )
    for lit in LITERATURE_BASELINES:
        rows.append(
            {
                "model": lit.model, "input": "precomputed",
                "accuracy": lit.accuracy, "accuracy_std": None,
                "f1": lit.f1, "f1_std": None, "auc": lit.auc, "auc_std": None,
                "train_time_s": None, "source": lit.source,
            }
        )
    rows.sort(key=lambda r: -r["accuracy"])
    return rows


def _fmt(value, std=None):
    if value is None:
        return "-"
    if std is None:
        return f"{value:.4f}"
    return f"{value:.4f}±{std:.4f}"


def _comparison_markdown(rows) -> str:
    lines = [
        "| model | input | accuracy | F1 | AUC | train time (s) | source |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            "| {model} | {input} | {acc} | {f1} | {auc} | {t} | {source} |".format(
                model=r["model"],
                input=r["input"],
                acc=_fmt(r["accuracy"], r["accuracy_std"]),
                f1=_fmt(r["f1"], r["f1_std"]),
                auc=_fmt(r["auc"], r["auc_std"]),
                t="-" if r["train_time_s"] is None else f"{r['train_time_s']:.1f}",
                source=r["source"],
            )
        )
    return "\n".join(lines) + "\n"


def _comparison_csv(rows) -> str:
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(
        buf,
        fieldnames=[
            "model", "input", "accuracy", "accuracy_std", "f1", "f1_std",
            "auc", "auc_std", "train_time_s", "source",
        ],
    )
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def cmd_report(run_dirs, out_dir=None) -> int:
    reports = [_load_report(d) for d in run_dirs]
    rows = _comparison_rows(reports)
    md = _comparison_markdown(rows)
    print(md, end="")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.md").write_text(md)
        (out / "comparison.csv").write_text(_comparison_csv(rows))
        print(f"comparison written to {out}")
    return EXIT_OK


def cmd_features_compute(root, out_csv) -> int:
    bundle = load_bundle(root)
    catalog = build_full_catalog()
    matrix = compute_feature_matrix(bundle.inertial.data, catalog)
    out = Path(out_csv)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(catalog.names)
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])
    sidecar = out.with_suffix(out.suffix + ".meta.json")
    sidecar.write_text(json.dumps(catalog.to_dict(), indent=2))
    print(f"wrote {matrix.shape[0]} x {matrix.shape[1]} features to {out}")
    print(f"catalog sidecar: {sidecar}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.root)
        if args.command == "run":
            return cmd_run(_load_run_config(args))
        if args.command == "report":
            return cmd_report(args.run_dirs, args.out)
        if args.command == "features":
            return cmd_features_compute(args.root, args.out)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DataDefectError as exc:
        print(f"data defect: {exc}", file=sys.stderr)
        return EXIT_DATA_DEFECT
    except HarBenchError as exc:
        print(f"compute failure: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"data defect: {exc}", file=sys.stderr)
        return EXIT_DATA_DEFECT


if __name__ == "__main__":
    sys.exit(main())
