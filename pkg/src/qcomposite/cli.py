"""Command-line interface: ``qcomposite <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__
from .graph import (BinomialIntersectionParams, ErParams, ModelParams, graph_from_json,
                    graph_to_dict)
from .montecarlo import (AXES, MODELS, SweepConfig, coupling_experiment, csv_text,
                         empirical_transition_width, sample_graph,
                         sweep, to_json)
from .properties import Budget, PropertySpec, check, verify_outcome
from .seeding import RngSeed
from .theory import (critical_key_pool, critical_key_ring, critical_node_count, deviation,
                     exact_edge_probability, asymptotic_edge_probability, limit_probability,
                     predicted_width)

PRESETS = Path(__file__).parent / "presets"


class UsageError(Exception):
    """Bad flags, bad config or insane parameters (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- config files -----------------------------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(SweepConfig)}
_CONFIG_KEYS = {"from": "start", "to": "stop"}
_CONFIG_KEYS.update({k: k for k in _FIELDS if k not in ("start", "stop")})


def parse_properties(text: str, k: int | None = None) -> tuple[PropertySpec, ...]:
    specs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item and k is not None:
            spec = PropertySpec.parse(item) if item in ("ham", "pm") else PropertySpec.parse(f"{item}:{k}")
        else:
            spec = PropertySpec.parse(item)
        specs.append(spec)
    if not specs:
        raise ValueError("no properties given")
    return tuple(specs)


def _convert(key: str, raw: str):
    if key == "properties":
        return parse_properties(raw)
    if key in ("model", "axis"):
        return raw
    if key in ("s", "x", "critical_p"):
        return float(raw)
    return int(raw)


def parse_config(text: str, origin: str = "<config>") -> dict:
    """Parse ``key = value`` lines into SweepConfig field overrides."""
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{origin}:{lineno}: unknown key {key!r}")
        name = _CONFIG_KEYS[key]
        if name in out:
            raise UsageError(f"{origin}:{lineno}: duplicate key {key!r}")
        try:
            out[name] = _convert(name, raw)
        except ValueError as exc:
            raise UsageError(f"{origin}:{lineno}: bad value for {key!r}: {exc}") from None
    return out


def load_config(path: str | os.PathLike) -> SweepConfig:
    """Read a preset or user config; missing keys keep their defaults."""
    p = Path(path)
    if not p.exists() and (PRESETS / p.name).exists():
        p = PRESETS / p.name
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    return SweepConfig(**parse_config(text, str(path)))


def dump_config(cfg: SweepConfig) -> str:
    lines = []
    for key, name in _CONFIG_KEYS.items():
        v = getattr(cfg, name)
        if name == "properties":
            v = ",".join(str(s) for s in v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


# --- argument parsing -------------------------------------------------------

def _model_flags(p, model=True):
    if model:
        p.add_argument("--model", choices=MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--P", type=int)
    p.add_argument("--s", type=float, help="edge probability (er)")
    p.add_argument("--x", type=float, help="key inclusion probability (binq)")


def _property_flags(p):
    p.add_argument("--property", action="append", metavar="SPEC",
                   help="minked:k, kconn:k, krobust:k, ham or pm; repeatable or comma separated")
    p.add_argument("--k", type=int, help="k for properties given without one")


def _run_flags(p):
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="work budget for three-valued checkers")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: CPU count); never changes the output")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qcomposite", description="q-composite random key graph experiments")
    ap.add_argument("--version", action="version", version=f"qcomposite {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample one graph and write it as JSON")
    _model_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("check", help="decide properties of a graph")
    p.add_argument("--graph", help="graph JSON file (otherwise sample from the model flags)")
    _model_flags(p)
    p.add_argument("--seed", type=int, default=0)
    _property_flags(p)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")

    p = sub.add_parser("predict", help="deviation and limiting probability")
    _model_flags(p, model=False)
    _property_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("threshold", help="solve for the critical K, P or n")
    p.add_argument("--solve", choices=("K", "P", "n"), required=True)
    _model_flags(p, model=False)
    _property_flags(p)
    p.add_argument("--p", type=float, required=True, help="target probability")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over one parameter")
    p.add_argument("--config", help="config file or preset name (e.g. fig2a.cfg)")
    _model_flags(p)
    p.add_argument("--axis", choices=("K", "P", "n"))
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="stop", type=int)
    p.add_argument("--step", type=int)
    _property_flags(p)
    _run_flags(p)
    p.add_argument("--critical-p", dest="critical_p", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")

    p = sub.add_parser("width", help="empirical transition width in K")
    _model_flags(p, model=False)
    _property_flags(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--k-max", dest="k_max", type=int)
    _run_flags(p)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")

    p = sub.add_parser("couple", help="random key graph next to its Erdos-Renyi coupling")
    _model_flags(p, model=False)
    _property_flags(p)
    _run_flags(p)
    p.add_argument("--out")
    return ap


# --- helpers ----------------------------------------------------------------

def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required flag(s) {' '.join(missing)}")


def _specs(args, single=False) -> tuple[PropertySpec, ...] | None:
    if not args.property:
        if args.k is not None:
            raise UsageError("--k given without --property")
        return None
    try:
        specs = parse_properties(",".join(args.property), args.k)
    except ValueError as exc:
        raise UsageError(f"bad --property: {exc}") from None
    if args.k is not None and not any(s.kind.takes_k for s in specs):
        raise UsageError("--k given but no property takes k")
    if single and len(specs) != 1:
        raise UsageError(f"{args.command}: exactly one --property expected")
    return specs


def _valid(factory, *a, **kw):
    """Build a parameter object; bad values are usage errors."""
    try:
        return factory(*a, **kw)
    except ValueError as exc:
        raise UsageError(f"invalid parameters: {exc}") from None


def _model_params(args, model: str) -> dict:
    if model == "rkg":
        _need(args, "n", "q", "K", "P")
        params = {"n": args.n, "q": args.q, "K": args.K, "P": args.P}
        _valid(ModelParams, **params)
    elif model == "er":
        _need(args, "n", "s")
        params = {"n": args.n, "s": args.s}
        _valid(ErParams, **params)
    else:
        _need(args, "n", "x", "P", "q")
        params = {"n": args.n, "x": args.x, "P": args.P, "q": args.q}
        _valid(BinomialIntersectionParams, **params)
    return params


def _budget(args) -> Budget:
    return Budget(args.budget) if args.budget is not None else Budget()


def _threads(args) -> int:
    if args.threads is None:
        return os.cpu_count() or 1
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    return args.threads


def _header(command: str, inputs: dict) -> dict:
    return {"tool": "qcomposite", "version": __version__, "command": command, "input": inputs}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _format(args) -> str:
    if args.format:
        return args.format
    return "json" if args.out and args.out.endswith(".json") else "csv"


# --- commands ---------------------------------------------------------------

def cmd_sample(args) -> None:
    model = args.model or "rkg"
    params = _model_params(args, model)
    seed = RngSeed(args.seed, model)
    g = sample_graph(model, params, seed)
    doc = graph_to_dict(g, model, params, seed)
    doc["generator"] = f"qcomposite {__version__}"
    _emit(json.dumps(doc, separators=(",", ":")) + "\n", args.out)


def cmd_check(args) -> None:
    specs = _specs(args)
    if specs is None:
        raise UsageError("check: --property is required")
    if args.graph:
        try:
            g = graph_from_json(Path(args.graph).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read graph {args.graph}: {exc.strerror}") from None
        source = {"graph": args.graph}
    else:
        model = args.model or "rkg"
        params = _model_params(args, model)
        g = sample_graph(model, params, RngSeed(args.seed, model))
        source = {"model": model, "params": params, "seed": RngSeed(args.seed, model).to_dict()}
    budget = _budget(args)
    results = []
    for spec in specs:
        out = check(g, spec, budget)
        row = {"property": str(spec), **out.to_dict()}
        row["certificate_verified"] = verify_outcome(g, spec, out)
        results.append(row)
    inputs = {**source, "n": g.n, "m": g.m, "properties": [str(s) for s in specs],
              "budget": budget.max_work}
    _emit(_dump({**_header("check", inputs), "results": results}), args.out)


def cmd_predict(args) -> None:
    specs = _specs(args)
    if specs is None:
        raise UsageError("predict: --property is required")
    _need(args, "n", "q", "K", "P")
    params = _valid(ModelParams, args.n, args.q, args.K, args.P)
    results = []
    for spec in specs:
        d = deviation(params, spec)
        lim = limit_probability(spec, d.alpha)
        results.append({"property": str(spec), "kappa": d.kappa, "scaling": d.scaling,
                        "scaling_in_unit_interval": d.scaling_in_unit_interval,
                        "alpha": d.alpha, "limit_probability": lim.value,
                        "indeterminate": lim.indeterminate})
    doc = _header("predict", {**params.to_dict(), "properties": [str(s) for s in specs]})
    doc["edge_probability"] = {"exact": exact_edge_probability(args.q, args.K, args.P),
                               "asymptotic": asymptotic_edge_probability(args.q, args.K, args.P)}
    doc["results"] = results
    _emit(_dump(doc), args.out)


def cmd_threshold(args) -> None:
    specs = _specs(args, single=True)
    if specs is None:
        raise UsageError("threshold: --property is required")
    spec = specs[0]
    solve = args.solve
    if getattr(args, solve) is not None:
        raise UsageError(f"conflicting flags: --solve {solve} with --{solve}")
    if not 0.0 < args.p < 1.0:
        raise UsageError("--p must lie in (0, 1)")
    if solve == "K":
        _need(args, "q", "n", "P")
        res = critical_key_ring(args.q, args.n, args.P, spec, args.p)
    elif solve == "P":
        _need(args, "q", "n", "K")
        res = critical_key_pool(args.q, args.n, args.K, spec, args.p)
    else:
        _need(args, "q", "K", "P")
        res = critical_node_count(args.q, args.K, args.P, spec, args.p)
    inputs = {"solve": solve, "q": args.q, "n": args.n, "K": args.K, "P": args.P,
              "property": str(spec), "p": args.p}
    _emit(_dump({**_header("threshold", inputs), "result": res.to_dict()}), args.out)


def resolve_sweep_config(args) -> SweepConfig:
    """Defaults, then the config file, then flags."""
    fields: dict = {}
    if args.config:
        fields.update(vars(load_config(args.config)))
        file_threads = "threads" in _read_config_keys(args.config)
    else:
        file_threads = False
    axis = args.axis or fields.get("axis", SweepConfig.axis)
    for name in ("n", "q", "K", "P"):
        if name == axis and getattr(args, name) is not None:
            raise UsageError(f"conflicting flags: --axis {axis} sweeps {axis}; drop --{name}")
    for name in ("model", "n", "q", "K", "P", "s", "x", "axis", "start", "stop", "step",
                 "samples", "seed", "budget", "critical_p"):
        v = getattr(args, name, None)
        if v is not None:
            fields[name] = v
    specs = _specs(args)
    if specs is not None:
        fields["properties"] = specs
    if args.threads is not None or not file_threads:
        fields["threads"] = _threads(args)
    cfg = SweepConfig(**fields)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _read_config_keys(path) -> set[str]:
    p = Path(path)
    if not p.exists():
        p = PRESETS / p.name
    return set(parse_config(p.read_text(), str(path)))


def cmd_sweep(args) -> None:
    cfg = resolve_sweep_config(args)
    points = sweep(cfg)
    text = to_json(points, cfg) if _format(args) == "json" else csv_text(points, cfg)
    _emit(text, args.out)


def cmd_width(args) -> None:
    specs = _specs(args, single=True)
    spec = specs[0] if specs else PropertySpec.kconn(1)
    _need(args, "q", "n", "P")
    if not 0.0 < args.eps < 0.5:
        raise UsageError(f"--eps must lie in (0, 1/2), got {args.eps}")
    _valid(ModelParams, args.n, args.q, args.q, args.P)
    samples = args.samples or 500
    seed = args.seed or 0
    budget = _budget(args)
    est = empirical_transition_width(args.q, args.n, args.P, spec, args.eps, samples, seed,
                                     budget, _threads(args), args.k_max)
    try:
        theory = predicted_width(args.q, args.n, args.P, spec, args.eps)
    except ValueError:
        theory = None
    summary = {"eps": args.eps, "K_minus": est.K_minus, "K_plus": est.K_plus,
               "width": est.width, "predicted_width": theory}
    inputs = {"q": args.q, "n": args.n, "P": args.P, "property": str(spec), "eps": args.eps,
              "samples": samples, "seed": seed, "budget": budget.max_work,
              "k_max": args.k_max}
    points = [est.points[K] for K in sorted(est.points)]
    points += [est.confirmations[K] for K in sorted(est.confirmations)]
    if _format(args) == "json":
        text = to_json(points, extra={"input": inputs, "width": summary})
    else:
        text = csv_text(points, extra={"input": inputs, "width": summary})
    _emit(text, args.out)


def cmd_couple(args) -> None:
    specs = _specs(args, single=True)
    spec = specs[0] if specs else PropertySpec.kconn(1)
    _need(args, "q", "K", "P", "n")
    _valid(ModelParams, args.n, args.q, args.K, args.P)
    samples = args.samples or 500
    seed = args.seed or 0
    budget = _budget(args)
    res = coupling_experiment(args.q, args.K, args.P, args.n, spec, samples, seed, budget,
                              _threads(args))
    inputs = {"q": args.q, "K": args.K, "P": args.P, "n": args.n, "property": str(spec),
              "samples": samples, "seed": seed, "budget": budget.max_work}
    doc = {**_header("couple", inputs), "er_s": res.er.params["s"],
           "rkg": res.rkg.row(), "er": res.er.row(), "difference": res.difference}
    _emit(_dump(doc), args.out)


COMMANDS = {"sample": cmd_sample, "check": cmd_check, "predict": cmd_predict,
            "threshold": cmd_threshold, "sweep": cmd_sweep, "width": cmd_width,
            "couple": cmd_couple}


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
