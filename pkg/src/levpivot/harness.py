"""Active-regression experiments over sample-size sweeps.

For every target sample size ``k`` and trial, a sampler picks rows of the
polynomial design matrix, only those labels are observed, a reweighted
least-squares fit is solved, and the fit is scored on the full data set by
``||A x - b||^2 / ||b||^2``.
"""
from dataclasses import asdict, dataclass, field
import csv
import json
import math

import numpy as np

from .errors import EmptyTreeError, TargetNotReachedError
from .features import PolynomialBasisSpec, chebyshev_grid, expand, scale_to_unit_box, unscale_from_unit_box
from .leverage import inclusion_probabilities, leverage_scores, uniform_probabilities
from .matrix import weighted_least_squares
from .problems import LabelOracle, evaluate_targets, make_problem, sample_domain
from .rng import RngState
from .sampler import SampleSet, bernoulli_sample, pivotal_sample, subsample_system, uniform_sample
from .tree import build_tree

SAMPLERS = (
    "pivotal_pca",
    "pivotal_coordinate",
    "bernoulli",
    "uniform",
    "chebyshev_grid",
    "pivotal_uniform",
    "bernoulli_uniform",
)
SCHEMA_VERSION = 1


def default_k_values(n_features, n, ratio=1.15):
    """Geometric sweep from the feature count up to ``n / 10``."""
    ks = []
    k = float(n_features)
    top = max(n_features, n // 10)
    while round(k) <= top:
        if not ks or round(k) > ks[-1]:
            ks.append(int(round(k)))
        k *= ratio
    return ks


@dataclass
class ExperimentConfig:
    problem: str
    sampler: str = "pivotal_pca"
    n: int = 10_000
    degree: int = 12
    k_values: list = field(default_factory=list)
    trials: int = 200
    seed: int = 0
    grid: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}; expected one of {SAMPLERS}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        self.k_values = [int(k) for k in self.k_values]

    def to_json(self):
        return json.dumps({"schema_version": SCHEMA_VERSION, **asdict(self)}, indent=2)

    @classmethod
    def from_dict(cls, obj):
        obj = {k: v for k, v in obj.items() if k != "schema_version"}
        return cls(**obj)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class ExperimentData:
    """Everything about a problem instance that does not depend on the sampler."""

    problem: object
    x: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    a: np.ndarray
    b: np.ndarray
    basis: PolynomialBasisSpec
    leverage: object
    opt_error: float


def _scaling_box(problem, x):
    if problem.bounded:
        return problem.lower, problem.upper
    # Gaussian inputs: symmetric box spanning the drawn data
    half = np.abs(x).max(axis=0)
    return -half, half


def prepare(cfg, labels=None):
    """Draw the raw points, build the design matrix and the reference labels."""
    problem = make_problem(cfg.problem)
    x = sample_domain(problem, cfg.n, RngState(cfg.seed, 0), grid=cfg.grid)
    lower, upper = _scaling_box(problem, x)
    basis = PolynomialBasisSpec(problem.dims, cfg.degree)
    a = expand(scale_to_unit_box(x, lower, upper), basis)
    b = evaluate_targets(problem, x) if labels is None else np.asarray(labels, dtype=np.float64)
    full = weighted_least_squares(a, b)
    opt = full.residual_norm_sq / float(b @ b)
    return ExperimentData(problem, x, lower, upper, a, b, basis, leverage_scores(a), opt)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    opt_error: float
    n_features: int
    k: np.ndarray
    trial: np.ndarray
    relative_error: np.ndarray
    labels_used: np.ndarray
    sample_size: np.ndarray

    @property
    def k_values(self):
        return np.unique(self.k)

    def medians(self):
        ks = self.k_values
        return ks, np.array([np.median(self.relative_error[self.k == k]) for k in ks])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sampler", "k", "trial", "relative_error"])
            for k, t, e in zip(self.k, self.trial, self.relative_error):
                w.writerow([self.config.sampler, int(k), int(t), repr(float(e))])

    def write_summary_csv(self, path):
        ks, med = self.medians()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sampler", "k", "median_error", "opt_error"])
            for k, m in zip(ks, med):
                w.writerow([self.config.sampler, int(k), repr(float(m)), repr(float(self.opt_error))])


def _draw(cfg, data, probs, tree, k, rng):
    n = data.a.shape[0]
    s = cfg.sampler
    if s in ("pivotal_pca", "pivotal_coordinate", "pivotal_uniform"):
        if tree is None:
            return SampleSet(np.arange(n), np.ones(n), k)
        return pivotal_sample(tree, probs, rng)
    if s in ("bernoulli", "bernoulli_uniform"):
        return bernoulli_sample(probs, rng)
    if s == "uniform":
        return uniform_sample(n, k, rng)
    raise ValueError(f"sampler {s!r} has no random draw")


def _fit_and_score(data, s, oracle):
    if len(s) == 0:
        return 1.0
    observed = np.zeros(data.a.shape[0])
    observed[s.indices] = oracle.query(s.indices)
    a_sub, b_sub = subsample_system(data.a, observed, s)
    x = weighted_least_squares(a_sub, b_sub).coefficients
    r = data.a @ x - data.b
    return float(r @ r) / float(data.b @ data.b)


def _run_k(cfg, data, kidx, k):
    n = data.a.shape[0]
    if cfg.sampler.endswith("_uniform"):
        probs = uniform_probabilities(n, k)
    elif cfg.sampler in ("pivotal_pca", "pivotal_coordinate", "bernoulli"):
        probs = inclusion_probabilities(data.leverage, k)
    else:
        probs = None
    tree = None
    if cfg.sampler.startswith("pivotal"):
        method = "coordinate" if cfg.sampler == "pivotal_coordinate" else "pca"
        try:
            tree = build_tree(data.x, probs, method)
        except EmptyTreeError:
            tree = None

    rows = []
    for trial in range(cfg.trials):
        oracle = LabelOracle(data.problem, data.x, data.b)
        rng = RngState(cfg.seed, 1 + kidx * cfg.trials + trial)
        s = _draw(cfg, data, probs, tree, k, rng)
        err = _fit_and_score(data, s, oracle)
        rows.append((k, trial, err, oracle.calls, len(s)))
    return rows


def _run_chebyshev(cfg, data):
    q = data.problem.dims
    rows = []
    seen = set()
    for k in cfg.k_values:
        m = max(1, int(math.floor(k ** (1.0 / q) + 1e-9)))
        if m in seen:
            continue
        seen.add(m)
        z = chebyshev_grid(m, q)
        pts = unscale_from_unit_box(z, data.lower, data.upper)
        labels = evaluate_targets(data.problem, pts)
        x = weighted_least_squares(expand(z, data.basis), labels).coefficients
        r = data.a @ x - data.b
        rows.append((m**q, 0, float(r @ r) / float(data.b @ data.b), m**q, m**q))
    return rows


def run_experiment(cfg, data=None, partial_path=None):
    """Run every ``(k, trial)`` pair of ``cfg``; ``data`` may be shared across samplers.

    On failure, rows finished so far are written to ``partial_path`` (if
    given) before the exception propagates.
    """
    if data is None:
        data = prepare(cfg)
    if not cfg.k_values:
        cfg.k_values = default_k_values(data.basis.n_terms, data.a.shape[0])
    rows = []
    try:
        if cfg.sampler == "chebyshev_grid":
            rows = _run_chebyshev(cfg, data)
        elif cfg.threads > 1:
            from joblib import Parallel, delayed

            chunks = Parallel(n_jobs=cfg.threads)(
                delayed(_run_k)(cfg, data, i, k) for i, k in enumerate(cfg.k_values))
            rows = [r for chunk in chunks for r in chunk]
        else:
            for i, k in enumerate(cfg.k_values):
                rows.extend(_run_k(cfg, data, i, k))
    except Exception:
        if partial_path is not None and rows:
            _result(cfg, data, rows).write_csv(partial_path)
        raise
    return _result(cfg, data, rows)


def _result(cfg, data, rows):
    arr = np.array(rows, dtype=np.float64).reshape(-1, 5)
    return ExperimentResult(cfg, data.opt_error, data.basis.n_terms, arr[:, 0].astype(int),
                            arr[:, 1].astype(int), arr[:, 2], arr[:, 3].astype(int), arr[:, 4].astype(int))


@dataclass(frozen=True)
class TargetTable:
    multiple: float
    samples: dict
    efficiency: float

    def as_dict(self):
        return {"schema_version": SCHEMA_VERSION, "multiple": self.multiple,
                "samples": self.samples, "efficiency": self.efficiency}


def crossing_k(result, multiple):
    """Smallest ``k`` whose median error reaches ``multiple * OPT``, linearly interpolated."""
    ks, med = result.medians()
    if math.isinf(multiple):
        return float(ks[0])
    if result.opt_error > 1e-12:
        threshold = multiple * result.opt_error
    else:
        threshold = 1e-10
    hit = np.flatnonzero(med <= threshold)
    if hit.size == 0:
        raise TargetNotReachedError(
            f"{result.config.sampler}: no k in the sweep reaches {multiple} x OPT")
    j = hit[0]
    if j == 0:
        return float(ks[0])
    k0, k1, e0, e1 = ks[j - 1], ks[j], med[j - 1], med[j]
    return float(k0 + (e0 - threshold) * (k1 - k0) / (e0 - e1))


def samples_to_target(result_curves, multiple):
    """Samples needed per sampler to reach ``multiple * OPT`` and the pivotal/Bernoulli ratio."""
    samples = {name: crossing_k(res, multiple) for name, res in result_curves.items()}
    pivotal = next((n for n in ("pivotal_pca", "pivotal_coordinate") if n in samples), None)
    eff = None
    if pivotal is not None and "bernoulli" in samples:
        eff = samples[pivotal] / samples["bernoulli"]
    return TargetTable(float(multiple), samples, eff)
