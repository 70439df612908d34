"""Monte-Carlo estimation of property probabilities.

Sample ``i`` of sweep point ``j`` is always drawn from the stream
``RngSeed(base, model, j, i)``.  Work is split into blocks that can run in
any order on any number of worker processes; counts are merged by plain
addition, so the output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import NormalDist
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import __version__
from .graph import (BinomialIntersectionParams, ErParams, ModelParams, _sample_k_subsets,
                    sample_binomial_intersection, sample_er, sample_rkg)
from .properties import Budget, Kind, PropertySpec, Verdict, check
from .seeding import RngSeed
from .theory import (critical_key_pool, critical_key_ring, critical_node_count, deviation,
                     er_coupling_probability, kappa_of, limit_probability, threshold_offset,
                     UnreachableTarget)

CSV_HEADER = ["model", "q", "n", "K", "P", "property", "k", "eps", "samples", "yes", "no",
              "unknown", "emp_prob", "emp_lo", "emp_hi", "wilson_lo", "wilson_hi",
              "predicted_prob", "seed"]

MODELS = ("rkg", "er", "binq")
BLOCK = 50
_Z95 = NormalDist().inv_cdf(0.975)


class ScanCapReached(RuntimeError):
    """The K scan hit its cap before the probability crossed the level."""


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def _params_obj(model: str, params: dict):
    if model == "rkg":
        return ModelParams(params["n"], params["q"], params["K"], params["P"])
    if model == "er":
        return ErParams(params["n"], params["s"])
    if model == "binq":
        return BinomialIntersectionParams(params["n"], params["x"], params["P"], params["q"])
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def sample_graph(model: str, params: dict, seed: RngSeed):
    p = _params_obj(model, params)
    if model == "rkg":
        return sample_rkg(p, seed)
    if model == "er":
        return sample_er(p, seed)
    return sample_binomial_intersection(p, seed)


def predicted_probability(model: str, params: dict, spec: PropertySpec) -> float | None:
    """Limiting probability at this point, or None where no law applies."""
    try:
        if model == "rkg":
            alpha = deviation(_params_obj(model, params), spec).alpha
        elif model == "er":
            n = params["n"]
            alpha = n * params["s"] - threshold_offset(n, kappa_of(spec))
        else:
            return None
    except ValueError:
        return None
    return limit_probability(spec, alpha).value


@dataclass(frozen=True)
class SweepPoint:
    model: str
    params: dict
    property: PropertySpec
    samples: int
    yes: int
    no: int
    unknown: int
    seed: int
    predicted: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.yes + self.no + self.unknown != self.samples:
            raise ValueError("verdict counts do not add up to the sample count")

    @property
    def emp_prob(self) -> float:
        return self.yes / self.samples

    @property
    def emp_interval(self) -> tuple[float, float]:
        return self.yes / self.samples, (self.yes + self.unknown) / self.samples

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.yes, self.samples)

    @property
    def stderr(self) -> float:
        p = self.emp_prob
        return math.sqrt(max(p * (1 - p), 0.25 / self.samples) / self.samples)

    def row(self) -> dict:
        p = self.params
        lo, hi = self.emp_interval
        wlo, whi = self.wilson
        return {
            "model": self.model,
            "q": p.get("q", ""),
            "n": p["n"],
            "K": p.get("K", ""),
            "P": p.get("P", ""),
            "property": str(self.property),
            "k": "" if self.property.k is None else self.property.k,
            "eps": "" if self.eps is None else _fmt(self.eps),
            "samples": self.samples,
            "yes": self.yes,
            "no": self.no,
            "unknown": self.unknown,
            "emp_prob": _fmt(self.emp_prob),
            "emp_lo": _fmt(lo),
            "emp_hi": _fmt(hi),
            "wilson_lo": _fmt(wlo),
            "wilson_hi": _fmt(whi),
            "predicted_prob": "" if self.predicted is None else _fmt(self.predicted),
            "seed": self.seed,
        }


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# --- sample evaluation ------------------------------------------------------

_CODE = {Verdict.YES: 0, Verdict.NO: 1, Verdict.UNKNOWN: 2}


def _evaluate_block(task) -> tuple[int, np.ndarray]:
    """Verdict counts, shape (len(specs), 3), for samples [start, stop)."""
    key, model, params, specs, base, point, start, stop, budget = task
    counts = np.zeros((len(specs), 3), dtype=np.int64)
    b = Budget(budget)
    for i in range(start, stop):
        g = sample_graph(model, params, RngSeed(base, model, point, i))
        for s_idx, spec in enumerate(specs):
            counts[s_idx, _CODE[check(g, spec, b).verdict]] += 1
    return key, counts


def _run(tasks: list, threads: int) -> dict:
    totals: dict = {}
    if threads <= 1 or len(tasks) <= 1:
        results = map(_evaluate_block, tasks)
        for key, c in results:
            totals[key] = totals.get(key, 0) + c
        return totals
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for key, c in pool.map(_evaluate_block, tasks, chunksize=1):
            totals[key] = totals.get(key, 0) + c
    return totals


def _blocks(key, model, params, specs, base, point, start, stop, budget):
    return [(key, model, params, tuple(specs), base, point, a, min(a + BLOCK, stop), budget)
            for a in range(start, stop, BLOCK)]


def _validate_point(model: str, params: dict, specs: Sequence[PropertySpec]) -> None:
    _params_obj(model, params)
    for spec in specs:
        if spec.kind is Kind.PERFECT_MATCHING and params["n"] % 2:
            raise ValueError(f"perfect-matching experiments need even n, got n={params['n']}")
        if spec.kind is Kind.HAMILTON_CYCLE and params["n"] < 3:
            raise ValueError("Hamilton-cycle experiments need n >= 3")


def estimate_points(model: str, params: dict, specs: Sequence[PropertySpec], samples: int = 500,
                    base_seed: int = 0, budget: Budget | None = None, point_index: int = 0,
                    threads: int = 1, first_sample: int = 0) -> list[SweepPoint]:
    """Evaluate several properties on the same sampled graphs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _validate_point(model, params, specs)
    budget = budget or Budget()
    tasks = _blocks(0, model, params, specs, base_seed, point_index,
                    first_sample, first_sample + samples, budget.max_work)
    counts = _run(tasks, threads)[0]
    return [SweepPoint(model, dict(params), spec, samples, int(c[0]), int(c[1]), int(c[2]),
                       base_seed, predicted_probability(model, params, spec))
            for spec, c in zip(specs, counts)]


def estimate_point(params: ModelParams | ErParams | dict, spec: PropertySpec, samples: int = 500,
                   base_seed: int = 0, budget: Budget | None = None, *, model: str | None = None,
                   point_index: int = 0, threads: int = 1) -> SweepPoint:
    model, params = _model_and_dict(params, model)
    return estimate_points(model, params, [spec], samples, base_seed, budget,
                           point_index, threads)[0]


def _model_and_dict(params, model):
    if isinstance(params, ModelParams):
        return model or "rkg", params.to_dict()
    if isinstance(params, ErParams):
        return model or "er", params.to_dict()
    if isinstance(params, BinomialIntersectionParams):
        return model or "binq", params.to_dict()
    return model or "rkg", dict(params)


# --- sweeps -----------------------------------------------------------------

AXES = {"rkg": ("K", "P", "n"), "er": ("n",), "binq": ("P", "n")}


@dataclass
class SweepConfig:
    model: str = "rkg"
    n: int = 1000
    q: int = 2
    K: int = 88
    P: int = 50000
    s: float = 0.01
    x: float = 0.001
    axis: str = "K"
    start: int = 70
    stop: int = 110
    step: int = 2
    properties: tuple = (PropertySpec.kconn(2),)
    samples: int = 500
    seed: int = 0
    budget: int = Budget().max_work
    threads: int = 1
    critical_p: float = 0.5

    def axis_values(self) -> list[int]:
        if self.step <= 0 or self.start > self.stop:
            raise ValueError(f"empty axis: from={self.start} to={self.stop} step={self.step}")
        return list(range(self.start, self.stop + 1, self.step))

    def point_params(self, value: int) -> dict:
        base = {"rkg": {"n": self.n, "q": self.q, "K": self.K, "P": self.P},
                "er": {"n": self.n, "s": self.s},
                "binq": {"n": self.n, "x": self.x, "P": self.P, "q": self.q}}[self.model]
        base[self.axis] = value
        return base

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.axis not in AXES[self.model]:
            raise ValueError(f"axis {self.axis!r} is not available for model {self.model!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.properties:
            raise ValueError("no properties requested")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        for v in self.axis_values():
            _validate_point(self.model, self.point_params(v), self.properties)

    def resolved(self) -> dict:
        """Everything that determines the output (the worker count does not)."""
        return {
            "model": self.model, "n": self.n, "q": self.q, "K": self.K, "P": self.P,
            "s": self.s, "x": self.x, "axis": self.axis, "from": self.start, "to": self.stop,
            "step": self.step, "properties": [str(p) for p in self.properties],
            "samples": self.samples, "seed": self.seed, "budget": self.budget,
            "critical_p": self.critical_p,
        }


def sweep(config: SweepConfig, threads: int | None = None) -> list[SweepPoint]:
    """One SweepPoint per (axis value, property), in axis order."""
    config.validate()
    threads = config.threads if threads is None else threads
    values = config.axis_values()
    tasks = []
    for j, v in enumerate(values):
        tasks += _blocks(j, config.model, config.point_params(v), config.properties, config.seed,
                         j, 0, config.samples, config.budget)
    totals = _run(tasks, threads)
    out = []
    for j, v in enumerate(values):
        params = config.point_params(v)
        for spec, c in zip(config.properties, totals[j]):
            out.append(SweepPoint(config.model, params, spec, config.samples, int(c[0]),
                                  int(c[1]), int(c[2]), config.seed,
                                  predicted_probability(config.model, params, spec)))
    return out


def critical_values(config: SweepConfig) -> dict[str, int | None]:
    """Theory critical value of the swept parameter for each property."""
    out = {}
    if config.model != "rkg":
        return out
    for spec in config.properties:
        try:
            if config.axis == "K":
                c = critical_key_ring(config.q, config.n, config.P, spec, config.critical_p)
            elif config.axis == "P":
                c = critical_key_pool(config.q, config.n, config.K, spec, config.critical_p)
            else:
                c = critical_node_count(config.q, config.K, config.P, spec, config.critical_p)
            out[str(spec)] = c.value
        except (UnreachableTarget, ValueError):
            out[str(spec)] = None
    return out


def write_csv(points: Iterable[SweepPoint], fh, config: SweepConfig | None = None,
              extra: dict | None = None) -> None:
    if config is not None or extra:
        fh.write(f"# qcomposite {__version__}\n")
        if config is not None:
            fh.write("# config: " + json.dumps(config.resolved(), sort_keys=True) + "\n")
            crit = critical_values(config)
            if crit:
                fh.write(f"# critical {config.axis} at p={config.critical_p}: "
                         + json.dumps(crit, sort_keys=True) + "\n")
        if extra:
            fh.write("# " + json.dumps(extra, sort_keys=True) + "\n")
    w = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    for pt in points:
        w.writerow(pt.row())


def csv_text(points: Iterable[SweepPoint], config: SweepConfig | None = None, extra=None) -> str:
    buf = io.StringIO()
    write_csv(points, buf, config, extra)
    return buf.getvalue()


def to_json(points: Iterable[SweepPoint], config: SweepConfig | None = None, extra=None) -> str:
    doc = {"tool": "qcomposite", "version": __version__}
    if config is not None:
        doc["config"] = config.resolved()
        doc["critical"] = critical_values(config)
    if extra:
        doc.update(extra)
    doc["rows"] = [pt.row() for pt in points]
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


# --- transition width -------------------------------------------------------

@dataclass
class TransitionWidthEstimate:
    eps: float
    K_minus: int
    K_plus: int
    points: dict = field(default_factory=dict)
    confirmations: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.K_plus - self.K_minus

    def consistent(self) -> bool:
        c = self.confirmations

        def ok(K, level):
            below = c.get(K - 1)
            return c[K].emp_prob >= level and (below is None or below.emp_prob < level)

        return (self.K_minus <= self.K_plus and ok(self.K_minus, self.eps)
                and ok(self.K_plus, 1 - self.eps))


def empirical_transition_width(q: int, n: int, P: int, spec: PropertySpec, eps: float,
                               samples: int = 500, base_seed: int = 0,
                               budget: Budget | None = None, threads: int = 1,
                               k_max: int | None = None) -> TransitionWidthEstimate:
    """Scan K upward from q for the first K reaching eps and 1 - eps, then
    re-check both boundaries with twice the samples.

    Sample streams are addressed by K, so the doubled estimate at K reuses
    the scan's graphs and adds as many new ones.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    cap = min(P, k_max if k_max is not None else max(q, math.ceil(math.sqrt(P))))
    cache: dict = {}

    def est(K: int, s: int) -> SweepPoint:
        if (K, s) not in cache:
            pt = estimate_points("rkg", {"n": n, "q": q, "K": K, "P": P}, [spec], s, base_seed,
                                 budget, point_index=K, threads=threads)[0]
            cache[K, s] = replace(pt, eps=eps)
        return cache[K, s]

    scan = {}
    k_minus = None
    K = q
    while True:
        if K > cap:
            raise ScanCapReached(f"no crossing of {1 - eps if k_minus else eps} up to K = {cap}")
        pt = est(K, samples)
        scan[K] = pt
        if k_minus is None and pt.emp_prob >= eps:
            k_minus = K
        if pt.emp_prob >= 1 - eps:
            k_plus = K
            break
        K += 1

    double = 2 * samples

    def confirm(K: int, level: float) -> int:
        while True:
            if est(K, double).emp_prob < level:
                K += 1
                if K > cap:
                    raise ScanCapReached(f"confirmation ran past K = {cap}")
                continue
            if K - 1 < q or est(K - 1, double).emp_prob < level:
                return K
            K -= 1

    k_minus = confirm(k_minus, eps)
    k_plus = confirm(k_plus, 1 - eps)
    if k_minus > k_plus:
        k_minus = confirm(k_plus, eps)
    confirmations = {K: pt for (K, s), pt in cache.items() if s == double}
    return TransitionWidthEstimate(eps, k_minus, k_plus, scan, confirmations)


# --- coupling ---------------------------------------------------------------

class CouplingResult(NamedTuple):
    rkg: SweepPoint
    er: SweepPoint

    @property
    def difference(self) -> float:
        return self.rkg.emp_prob - self.er.emp_prob


def coupling_experiment(q: int, K: int, P: int, n: int, spec: PropertySpec, samples: int = 500,
                        base_seed: int = 0, budget: Budget | None = None,
                        threads: int = 1) -> CouplingResult:
    """Property probability of G_q(n, K, P) next to that of the Erdos-Renyi
    graph with the same edge probability, on independent streams."""
    s = er_coupling_probability(q, K, P)
    rkg = estimate_points("rkg", {"n": n, "q": q, "K": K, "P": P}, [spec], samples, base_seed,
                          budget, threads=threads)[0]
    er = estimate_points("er", {"n": n, "s": s}, [spec], samples, base_seed, budget,
                         threads=threads)[0]
    return CouplingResult(rkg, er)


# --- two-node edge frequency ------------------------------------------------

def pair_edge_frequency(q: int, K: int, P: int, pairs: int, base_seed: int = 0,
                        chunk: int = 50_000) -> int:
    """Number of independent ring pairs sharing at least q keys.

    Rings come from the same K-subset sampler as sample_key_assignment;
    chunk c uses stream RngSeed(base_seed, "pairs", c).
    """
    ModelParams(2, q, K, P)
    hits = 0
    for c, start in enumerate(range(0, pairs, chunk)):
        m = min(chunk, pairs - start)
        rings = _sample_k_subsets(RngSeed(base_seed, "pairs", c).generator(), 2 * m, K, P)
        both = np.sort(np.concatenate([rings[0::2], rings[1::2]], axis=1), axis=1)
        shared = (both[:, 1:] == both[:, :-1]).sum(axis=1)
        hits += int((shared >= q).sum())
    return hits
