"""Command-line driver.

Commands: sample, count, cexpect, rates, catalog, scaling, planted, figure1,
tailscan.  Every command accepts --config <json> plus explicit flags that
override the file.  Exit codes: 0 success, 2 configuration error,
3 infeasible or refused experiment, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import asymptotics as asy
from . import conditional_counts as cc
from . import deviation_optimizer as do
from . import graph_model as gm
from . import subgraph_catalog as sc
from .errors import (
    BudgetExceededError,
    ConfigError,
    DataError,
    InfeasibleError,
    ParameterError,
)
from .experiments import (
    ExperimentConfig,
    Report,
    config_from_sources,
    run_catalog_rate_table,
    run_expectation_scaling,
    run_planted_hub_experiment,
    run_tail_probability_scan,
    write_report,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _add_common(p):
    p.add_argument("--config", help="flat JSON config file; flags override it")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--pattern", help="pattern file ('k m' header + edge lines)")
    p.add_argument("--n-grid", type=int, nargs="+", dest="n_grid")
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--format", dest="fmt", choices=["csv", "json-lines"])


def _overrides(args, extra=()):
    keys = ["alpha", "gamma", "k", "pattern", "n_grid", "replicas", "seed",
            "workers", "out", "fmt", *extra]
    out = {}
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _config(args, kind, extra=()):
    cfg = config_from_sources(args.config, {**_overrides(args, extra),
                                            "kind": kind})
    return cfg


def _emit(report: Report, cfg: ExperimentConfig):
    write_report(report, cfg.out, cfg.fmt)
    print(json.dumps({"kind": report.kind, **report.summary}, sort_keys=True))


def _pattern_from(cfg: ExperimentConfig) -> sc.SubgraphPattern:
    if cfg.pattern:
        return sc.load_pattern(cfg.pattern)
    return sc.clique_pattern(cfg.k)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    cfg = _config(args, "sample")
    n = cfg.n_grid[-1] if args.n is None else args.n
    w = gm.sample_weights(n, cfg.alpha, cfg.seed)
    G = gm.sample_graph(w, (cfg.seed, 1))
    payload_cfg = {"kind": "sample", "n": n, "alpha": cfg.alpha,
                   "seed": cfg.seed}
    if cfg.out is None:
        print(json.dumps({**payload_cfg, "edges": G.edge_count}))
        return EXIT_OK
    if cfg.fmt == "json-lines":
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"record": "config", **payload_cfg}) + "\n")
            fh.write(json.dumps({"record": "weights",
                                 "weights": w.weights.tolist()}) + "\n")
            for u, v in G.edges:
                fh.write(json.dumps({"record": "edge", "u": int(u),
                                     "v": int(v)}) + "\n")
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write("# config: " + json.dumps(payload_cfg, sort_keys=True) + "\n")
            fh.write("record,a,b\n")
            for i, wi in enumerate(w.weights):
                fh.write(f"weight,{i},{wi!r}\n")
            for u, v in G.edges:
                fh.write(f"edge,{u},{v}\n")
    print(json.dumps({**payload_cfg, "edges": G.edge_count, "out": cfg.out}))
    return EXIT_OK


def _load_graph_jsonl(path) -> gm.GraphSample:
    n = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("record") == "config":
                n = rec.get("n")
            elif rec.get("record") == "edge":
                edges.append((rec["u"], rec["v"]))
    if n is None:
        raise DataError(f"{path}: missing config record with the vertex count")
    return gm.GraphSample(n, edges)


def cmd_count(args) -> int:
    cfg = _config(args, "count")
    H = _pattern_from(cfg)
    if args.graph:
        G = _load_graph_jsonl(args.graph)
        count = (sc.count_cliques(G, H.k) if H.is_clique()
                 else sc.count_subgraph_copies(G, H))
        print(json.dumps({"kind": "count", "graph": args.graph,
                          "k": H.k, "count": count}))
        return EXIT_OK
    n = cfg.n_grid[-1] if args.n is None else args.n
    counts = []
    for r in range(cfg.replicas):
        w = gm.sample_weights(n, cfg.alpha, (cfg.seed, 0, r, 0))
        G = gm.sample_graph(w, (cfg.seed, 0, r, 1))
        counts.append(sc.count_cliques(G, H.k) if H.is_clique()
                      else sc.count_subgraph_copies(G, H))
    mean = sum(counts) / len(counts)
    report = Report(
        kind="count",
        config={"kind": "count", "n": n, "alpha": cfg.alpha, "seed": cfg.seed,
                "replicas": cfg.replicas, "k": H.k},
        columns=("replica", "count"),
        rows=list(enumerate(counts)),
        summary={"mean": mean},
    )
    write_report(report, cfg.out, cfg.fmt)
    print(json.dumps({"kind": "count", "n": n, "mean": mean,
                      "replicas": cfg.replicas}))
    return EXIT_OK


def cmd_cexpect(args) -> int:
    cfg = _config(args, "cexpect", extra=("mode", "samples"))
    H = _pattern_from(cfg)
    n = cfg.n_grid[-1] if args.n is None else args.n
    w = gm.sample_weights(n, cfg.alpha, cfg.seed)
    if H.is_clique():
        est = cc.conditional_expected_cliques(
            w, H.k, mode=cfg.mode, samples=cfg.samples, seed=(cfg.seed, 1)
        )
    else:
        est = cc.conditional_expected_subgraphs(
            w, H, mode=cfg.mode, samples=cfg.samples, seed=(cfg.seed, 1)
        )
    print(json.dumps({"kind": "cexpect", "n": n, "k": H.k,
                      "value": est.value, "stderr": est.stderr,
                      "mode": est.mode}))
    return EXIT_OK


def cmd_rates(args) -> int:
    cfg = _config(args, "rates")
    if cfg.gamma is None or cfg.gamma <= 0:
        raise ConfigError("rates needs --gamma > 0")
    H = _pattern_from(cfg)
    typical = do.solve_typical_exponent(H, cfg.alpha)
    conc = do.check_concentration(H, cfg.alpha)
    tail = do.solve_tail_rate(H, cfg.alpha, cfg.gamma)
    growth = None
    if not tail.feasible:
        growth = do.solve_hub_growth_exponent(H, cfg.alpha, cfg.gamma)
    payload = {
        "kind": "rates",
        "alpha": cfg.alpha,
        "gamma": cfg.gamma,
        "k": H.k,
        "edges": list(H.edges),
        "typical": typical.to_json_dict(),
        "concentrated": conc,
        "tail": tail.to_json_dict(),
        "hub_growth": None if growth is None else growth.to_json_dict(),
    }
    text = json.dumps(payload, sort_keys=True, indent=1)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_catalog(args) -> int:
    cfg = _config(args, "catalog")
    patterns = sc.enumerate_connected(cfg.k)
    rows = [
        (i, f"{p.canonical_code:x}", p.k, p.edge_count,
         ";".join(f"{u}-{v}" for u, v in p.edges))
        for i, p in enumerate(patterns)
    ]
    report = Report(
        kind="catalog",
        config={"kind": "catalog", "k": cfg.k},
        columns=("index", "code", "k", "edges", "edge_list"),
        rows=rows,
        summary={"patterns": len(rows)},
    )
    write_report(report, cfg.out, cfg.fmt)
    print(json.dumps({"kind": "catalog", "k": cfg.k, "patterns": len(rows)}))
    return EXIT_OK


def cmd_scaling(args) -> int:
    cfg = _config(args, "scaling", extra=("count_mode", "slope_tol"))
    report = run_expectation_scaling(cfg)
    _emit(report, cfg)
    return EXIT_OK


def cmd_planted(args) -> int:
    cfg = _config(args, "planted", extra=("excess",))
    report = run_planted_hub_experiment(cfg)
    _emit(report, cfg)
    return EXIT_OK


def cmd_figure1(args) -> int:
    cfg = _config(args, "rate_table", extra=("oracle_grid",))
    if cfg.gamma is None:
        raise ConfigError("figure1 needs --gamma")
    report = run_catalog_rate_table(cfg.alpha, cfg.gamma, cfg.k,
                                    oracle_grid=cfg.oracle_grid, seed=cfg.seed)
    write_report(report, cfg.out, cfg.fmt)
    print(json.dumps({"kind": "rate_table", **report.summary}, sort_keys=True))
    return EXIT_OK


def cmd_tailscan(args) -> int:
    cfg = _config(args, "tailscan", extra=("slope_tol", "min_frequency"))
    report = run_tail_probability_scan(cfg)
    _emit(report, cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="irgdev",
        description="Clique/subgraph count deviations in heavy-tailed "
                    "random graphs: sampling, counting, exact rate "
                    "optimization, scaling experiments.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample weights and one graph")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("count", help="count cliques or pattern copies")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--graph", help="json-lines graph file from `sample`")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("cexpect", help="conditional expected count")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=["exact", "sampled"])
    p.add_argument("--samples", type=int)
    p.set_defaults(fn=cmd_cexpect)

    p = sub.add_parser("rates", help="rate exponents for one pattern")
    _add_common(p)
    p.set_defaults(fn=cmd_rates)

    p = sub.add_parser("catalog", help="connected pattern catalog")
    _add_common(p)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("scaling", help="count scaling across sizes")
    _add_common(p)
    p.add_argument("--count-mode", dest="count_mode",
                   choices=["realized", "conditional"])
    p.add_argument("--slope-tol", dest="slope_tol", type=float)
    p.set_defaults(fn=cmd_scaling)

    p = sub.add_parser("planted", help="planted threshold-hub mean shift")
    _add_common(p)
    p.add_argument("--excess", type=float, help="target excess factor")
    p.set_defaults(fn=cmd_planted)

    p = sub.add_parser("figure1", help="rate table over the full catalog")
    _add_common(p)
    p.add_argument("--oracle-grid", dest="oracle_grid", type=int)
    p.set_defaults(fn=cmd_figure1)

    p = sub.add_parser("tailscan", help="tail frequency scan across sizes")
    _add_common(p)
    p.add_argument("--slope-tol", dest="slope_tol", type=float)
    p.add_argument("--min-frequency", dest="min_frequency", type=float)
    p.set_defaults(fn=cmd_tailscan)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (ConfigError, ParameterError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, BudgetExceededError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
