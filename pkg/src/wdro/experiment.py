"""Poisoning sweeps: split, poison, standardize, train, evaluate on clean test data.

One :class:`CurvePoint` is produced per ``(beta, regularizer)`` cell,
averaging over seeded trials. Outputs are newline-delimited JSON, a flat
CSV and a manifest, all byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .attacks import AttackSpec, poison
from .core import NormSpec, Regularizer, RobustConfig
from .data import SCHEMAS, DatasetSchema, LoadReport, load_csv, split_half, standardize, synth_linear
from .exceptions import InvalidParams, WdroError
from .regularizers import check_compatible
from .training import TrainConfig, evaluate, train

log = logging.getLogger(__name__)

DESIGN_NOTES = (
    "train/test: seeded half split, train half ceil(n/2); test half always clean",
    "poisoning applied to raw training features/labels before standardization",
    "poison count floor(beta * n_train), uniform without replacement",
    "feature_gaussian replaces each selected record's features by iid N(0, variance)",
    "features standardized with train-half statistics (population variance); outputs untouched",
    "data bounds X, Y computed on the standardized poisoned training half",
    "solver: subgradient descent, step step0/(sqrt(t) * curvature scale), theta0 = 0, best iterate",
    "per-trial split seed = seed + trial; poison seed = seed + cell index (beta_index * trials + trial)",
    "weights (c1, c2) penalise c1 ||theta||_*^2 + c2 ||theta||_*; rho entries use rho * L(theta)",
)


@dataclass(frozen=True)
class RegSetting:
    """One curve: a regularizer with either explicit weights or a radius."""

    kind: str = "none"
    c1: float = 0.0
    c2: float = 0.0
    rho: Optional[float] = None
    label: Optional[str] = None

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.is_baseline:
            return "baseline"
        if self.rho is not None:
            return f"{self.kind}(rho={self.rho:g})"
        return f"c1={self.c1:g},c2={self.c2:g}"

    @property
    def is_baseline(self) -> bool:
        return self.kind == "none" or (self.rho is None and self.c1 == 0 and self.c2 == 0) or self.rho == 0

    def robust_config(self, paper_literal_absolute=False) -> RobustConfig:
        if self.is_baseline:
            return RobustConfig(rho=0.0, regularizer=Regularizer.NONE)
        if self.rho is not None:
            return RobustConfig(rho=self.rho, regularizer=Regularizer(self.kind),
                                paper_literal_absolute=paper_literal_absolute)
        return RobustConfig(regularizer=Regularizer(self.kind), weights=(self.c1, self.c2),
                            paper_literal_absolute=paper_literal_absolute)


@dataclass
class ExperimentConfig:
    dataset: dict
    attack: dict
    betas: list
    regularizers: list
    family: str = "linear"
    loss: str = "quadratic"
    trials: int = 5
    seed: int = 0
    norm: str = "l2"
    train: dict = field(default_factory=dict)
    paper_literal_absolute: bool = False

    def __post_init__(self):
        self.regularizers = [r if isinstance(r, RegSetting) else RegSetting(**r) for r in self.regularizers]
        self.betas = [float(b) for b in self.betas]
        if not self.betas or self.betas[0] != 0.0 or self.betas != sorted(self.betas):
            raise InvalidParams("beta grid must be sorted ascending and start at 0")
        if any(not 0 <= b < 1 for b in self.betas):
            raise InvalidParams("every beta must lie in [0, 1)")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidParams("trials must be a positive integer")
        if not self.regularizers:
            raise InvalidParams("at least one regularizer setting is required")
        names = [r.name for r in self.regularizers]
        if len(set(names)) != len(names):
            raise InvalidParams(f"regularizer labels must be unique, got {names}")
        for r in self.regularizers:
            if not r.is_baseline and r.rho is not None:
                check_compatible(r.kind, self.loss)
        NormSpec.coerce(self.norm)
        AttackSpec(beta=0.0, **self.attack)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["regularizers"] = [asdict(r) for r in self.regularizers]
        return out


@dataclass
class CurvePoint:
    beta: float
    label: str
    mean_test_loss: float
    per_trial_losses: list
    theta_norms: list
    metadata: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CurvePoint":
        return cls(**json.loads(line))


def _load_dataset(spec: dict):
    """Return ``(dataset, provenance dict, load report or None)``."""
    if "synthetic" in spec:
        syn = dict(spec["synthetic"])
        d = synth_linear(syn["n"], syn["p_x"], syn["theta_star"], syn.get("noise_sd", 0.0), syn.get("seed", 0))
        digest = hashlib.sha256(d.X.tobytes() + d.y.tobytes()).hexdigest()
        return d, {"synthetic": syn, "sha256": digest}, None
    name = spec.get("name")
    if "schema" in spec:
        schema = DatasetSchema(**spec["schema"])
    elif name in SCHEMAS:
        schema = SCHEMAS[name]
    else:
        raise InvalidParams(f"unknown dataset {name!r} and no schema given")
    report = LoadReport(str(spec["path"]))
    d = load_csv(spec["path"], schema, report)
    return d, {"name": schema.name, "path": str(spec["path"]), "sha256": report.sha256,
               "rows": report.rows_kept, "rows_dropped": report.rows_dropped}, report


def _run_cell(d, cfg: ExperimentConfig, beta_idx, trial):
    beta = cfg.betas[beta_idx]
    split_seed = cfg.seed + trial
    cell_index = beta_idx * cfg.trials + trial
    poison_seed = cfg.seed + cell_index
    train_raw, test_raw = split_half(d, split_seed)
    attack = AttackSpec(beta=beta, seed=poison_seed, **cfg.attack)
    poisoned, idx = poison(train_raw, attack)
    tr, te, _ = standardize(poisoned, test_raw)
    norm = NormSpec.coerce(cfg.norm)
    tc = TrainConfig(**cfg.train)
    results = []
    for reg in cfg.regularizers:
        rc = reg.robust_config(cfg.paper_literal_absolute)
        try:
            report = train(tr, (cfg.family, cfg.loss), rc, tc, norm)
        except WdroError as exc:
            raise type(exc)(f"[beta={beta}, regularizer={reg.name}, trial={trial}] {exc}") from exc
        results.append({
            "test_loss": evaluate(report.theta_hat, te),
            "theta_norm": float(norm.dual_norm(report.theta_hat.theta)),
            "iterations": report.iterations,
            "converged": report.converged,
            "objective": report.objective,
        })
    meta = {"split_seed": split_seed, "poison_seed": poison_seed, "poisoned": int(idx.size)}
    return meta, results


def run_experiment(cfg: ExperimentConfig, out_dir=None, jobs: int = 1):
    """Run the sweep; write ``curves.jsonl``, ``curves.csv`` and ``manifest.json`` to ``out_dir``.

    Returns the list of :class:`CurvePoint`, ordered by beta, then by
    regularizer as listed in the config.
    """
    d, provenance, load_report = _load_dataset(cfg.dataset)
    cells = [(b, t) for b in range(len(cfg.betas)) for t in range(cfg.trials)]
    if jobs == 1:
        outputs = [_run_cell(d, cfg, b, t) for b, t in cells]
    else:
        from joblib import Parallel, delayed

        outputs = Parallel(n_jobs=jobs)(delayed(_run_cell)(d, cfg, b, t) for b, t in cells)
    by_cell = dict(zip(cells, outputs))

    points = []
    for b, beta in enumerate(cfg.betas):
        for r, reg in enumerate(cfg.regularizers):
            per = [by_cell[(b, t)][1][r] for t in range(cfg.trials)]
            metas = [by_cell[(b, t)][0] for t in range(cfg.trials)]
            losses = [p["test_loss"] for p in per]
            points.append(CurvePoint(
                beta=beta,
                label=reg.name,
                mean_test_loss=float(np.mean(losses)),
                per_trial_losses=losses,
                theta_norms=[p["theta_norm"] for p in per],
                metadata={
                    "split_seeds": [m["split_seed"] for m in metas],
                    "poison_seeds": [m["poison_seed"] for m in metas],
                    "poisoned_counts": [m["poisoned"] for m in metas],
                    "iterations": [p["iterations"] for p in per],
                    "converged": [p["converged"] for p in per],
                    "objectives": [p["objective"] for p in per],
                },
            ))
    if out_dir is not None:
        write_outputs(points, cfg, provenance, load_report, out_dir)
    return points


def curves_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["beta", "label", "trial", "test_loss"])
    for p in points:
        for t, loss in enumerate(p.per_trial_losses):
            w.writerow([repr(p.beta), p.label, t, repr(loss)])
    return buf.getvalue()


def manifest(cfg: ExperimentConfig, provenance: dict) -> dict:
    return {
        "library": "wdro",
        "version": __version__,
        "config": cfg.to_dict(),
        "dataset": provenance,
        "design": list(DESIGN_NOTES),
    }


def write_outputs(points, cfg, provenance, load_report, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves.jsonl").write_text("".join(p.to_json() + "\n" for p in points), encoding="utf-8")
    (out / "curves.csv").write_text(curves_csv(points), encoding="utf-8")
    (out / "manifest.json").write_text(
        json.dumps(manifest(cfg, provenance), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if load_report is not None:
        (out / "load_report.txt").write_text(load_report.to_text(), encoding="utf-8")


def read_curves(path):
    with open(path, encoding="utf-8") as fh:
        return [CurvePoint.from_json(line) for line in fh if line.strip()]


def wine_like_theta(seed=7, p_x=11):
    """Coefficients for a synthetic stand-in with the Wine Quality shape."""
    rng = np.random.default_rng(seed)
    coef = np.round(rng.normal(0.0, 0.15, size=p_x), 4)
    return coef.tolist() + [5.6]


def default_config(wine_path=None, trials=5, seed=0) -> ExperimentConfig:
    """Label flipping to 10 on Wine Quality (or its synthetic stand-in)."""
    if wine_path is not None:
        dataset = {"name": "wine", "path": str(wine_path)}
    else:
        dataset = {"synthetic": {"n": 1599, "p_x": 11, "theta_star": wine_like_theta(),
                                 "noise_sd": 0.65, "seed": 2020}}
    return ExperimentConfig(
        dataset=dataset,
        attack={"kind": "label_flip_to", "value": 10.0},
        betas=[0.0, 0.1, 0.2, 0.3, 0.4],
        regularizers=[
            {"kind": "none"},
            {"kind": "conservative_linear", "rho": 0.001},
            {"kind": "conservative_linear", "rho": 0.01},
            {"kind": "conservative_linear", "rho": 0.1},
        ],
        trials=trials,
        seed=seed,
    )
