"""Command-line front end.

Every command that writes ``--out`` also writes ``<out>.manifest.json``
recording the argv, input hashes and resolved configuration; ``replay``
re-runs a manifest.
"""
import argparse
import os
import sys

import numpy as np

from . import io
from .constraints import BetaPolicy, ConstraintList, labels_to_list, materialize, resolve_beta
from .errors import CSPError, FormatError
from .evaluation import ari, beta_sweep, convergence_experiment, satisfaction_ratio, spectral_learning_baseline
from .graph import PointCloud, rbf_affinity, two_moons
from .solver import csp_k_way, csp_two_way, feasible_set, jnr_samples, transfer_cut

MODES = {"embed": "embed_kmeans", "sign": "sign_kmeans", "wsign": "weighted_sign_kmeans"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CSPError(f"{self.prog}: {message}")


def _sigma(text):
    return "auto" if text == "auto" else float(text)


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _shared(p, out_required=True):
    p.add_argument("--beta", default="frac:0.5", help="<real>, auto (constraint-count heuristic) or frac:t")
    p.add_argument("--sigma", type=_sigma, default="auto", help="RBF width for points-csv input, or auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=out_required)
    p.add_argument("--jobs", type=int, default=1)


def _graph_inputs(p):
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=io.FORMATS, default="dense-csv")
    p.add_argument("--constraints", help="constraint file (i j w per line)")
    p.add_argument("--labels", help="partial labels (int or ? per line) turned into constraints")


def build_parser():
    p = _Parser(prog="cspectral", description="Constrained spectral clustering")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="two-way constrained cut")
    _graph_inputs(c)
    _shared(c)
    c.add_argument("--discretize", choices=["sign", "two-means"], default="sign")

    k = sub.add_parser("kway", help="K-way constrained partition")
    _graph_inputs(k)
    _shared(k)
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--mode", choices=sorted(MODES), default="embed")

    t = sub.add_parser("transfer", help="cut a target graph using a source graph as soft must-links")
    t.add_argument("--source", required=True)
    t.add_argument("--target", required=True)
    t.add_argument("--format", choices=io.FORMATS, default="dense-csv")
    _shared(t)

    s = sub.add_parser("sweep-beta", help="solve over a grid of beta fractions")
    _graph_inputs(s)
    _shared(s)
    s.add_argument("--t-grid", type=_floats, default=[0.1, 0.3, 0.5, 0.7, 0.9])
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--metric", choices=["purity", "cost", "satisfied_ratio", "beta"], default="purity")
    s.add_argument("--plot", help="also render the sweep to this image file")

    v = sub.add_parser("converge", help="ARI versus number of random constraints")
    v.add_argument("--points", required=True, help="points-csv with a label column")
    _shared(v)
    v.add_argument("--counts", type=_ints, default=[10, 50, 100, 200, 300, 400, 500])
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--strategy", choices=["uniform", "misclustered"], default="uniform")
    v.add_argument("--plot", help="also render the curve to this image file")
    v.set_defaults(beta="frac:0.9")

    j = sub.add_parser("jnr", help="joint numerical range samples (cost, purity)")
    _graph_inputs(j)
    _shared(j)
    j.add_argument("--plot", help="also render the scatter to this image file")

    g = sub.add_parser("gen", help="generate synthetic data")
    g.add_argument("dataset", choices=["two-moons"])
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--background", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    e = sub.add_parser("eval-ari", help="adjusted Rand index of two labelings")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--out")

    b = sub.add_parser("baseline-sl", help="Spectral Learning baseline (affinity overwrite)")
    _graph_inputs(b)
    _shared(b)
    b.add_argument("--k", type=int, default=2)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("--manifest", required=True)
    return p


def _load_graph(path, fmt, sigma):
    obj = io.load_graph(path, fmt)
    if isinstance(obj, PointCloud):
        return rbf_affinity(obj, sigma), obj
    return obj, None


def _constraints(args, graph):
    if args.constraints and args.labels:
        raise CSPError("give either --constraints or --labels, not both")
    if args.constraints:
        return io.read_constraints(args.constraints, graph.n)
    if args.labels:
        labels = io.read_labels(args.labels)
        if len(labels) != graph.n:
            raise FormatError(f"{len(labels)} labels for {graph.n} nodes", args.labels)
        return labels_to_list(labels)
    return ConstraintList(graph.n, ())


def _result(part, graph, clist):
    cut = part.cut
    fs = part.feasible
    out = {
        "labels": [int(x) for x in part.labels],
        "indicator": [float(x) for x in cut.u],
        "eigenvalue": cut.lam,
        "cost": cut.cost,
        "purity": cut.purity,
        "beta": part.beta,
        "vol": graph.vol,
    }
    if clist is not None and len(clist):
        out["satisfied_ratio"] = satisfaction_ratio(part, clist)
    out["n_feasible"] = len(fs) if fs is not None else len(part.cuts)
    out["filtered_complex"] = fs.n_complex if fs is not None else 0
    out["filtered_nonpositive"] = fs.n_nonpositive if fs is not None else 0
    return out


def _plot(kind, path, data, **kw):
    from . import plotting

    getattr(plotting, kind)(path, data, **kw)
    return [path]


def cmd_cluster(args):
    graph, _ = _load_graph(args.graph, args.format, args.sigma)
    clist = _constraints(args, graph)
    cm = materialize(clist, graph)
    part = csp_two_way(graph, cm, BetaPolicy.parse(args.beta), len(clist), args.discretize, args.seed)
    res = _result(part, graph, clist)
    res["discretize"] = args.discretize
    io.write_json(args.out, res)
    return [args.out], {"beta": part.beta, "k": 2}


def cmd_kway(args):
    graph, _ = _load_graph(args.graph, args.format, args.sigma)
    clist = _constraints(args, graph)
    cm = materialize(clist, graph)
    part = csp_k_way(graph, cm, BetaPolicy.parse(args.beta), args.k, MODES[args.mode], args.seed, len(clist))
    res = _result(part, graph, clist)
    res["k"] = args.k
    res["mode"] = MODES[args.mode]
    res["indicators"] = [[float(x) for x in c.u] for c in part.cuts]
    io.write_json(args.out, res)
    return [args.out], {"beta": part.beta, "k": args.k}


def cmd_transfer(args):
    target, _ = _load_graph(args.target, args.format, args.sigma)
    source, _ = _load_graph(args.source, args.format, args.sigma)
    part, cost = transfer_cut(target, source, BetaPolicy.parse(args.beta))
    res = _result(part, target, None)
    res["transfer_cost"] = cost
    io.write_json(args.out, res)
    return [args.out], {"beta": part.beta, "k": 2}


def cmd_sweep_beta(args):
    graph, _ = _load_graph(args.graph, args.format, args.sigma)
    clist = _constraints(args, graph)
    cm = materialize(clist, graph)
    metric = args.metric
    if metric == "satisfied_ratio" and not len(clist):
        raise CSPError("satisfied_ratio needs constraints")
    res = beta_sweep(graph, cm, args.t_grid, args.k, clist if len(clist) else None, metric, args.seed)
    io.write_sweep_csv(args.out, res)
    outputs = [args.out]
    if args.plot:
        outputs += _plot("sweep", args.plot, res, xlabel="beta fraction t", ylabel=metric)
    return outputs, {"k": args.k, "t_grid": list(args.t_grid), "metric": metric}


def cmd_converge(args):
    points = io.read_points(args.points, has_labels=True)
    policy = BetaPolicy.parse(args.beta)
    res = convergence_experiment(points, args.counts, args.trials, args.seed, args.sigma, policy,
                                 args.strategy, args.jobs)
    io.write_sweep_csv(args.out, res)
    outputs = [args.out]
    if args.plot:
        outputs += _plot("sweep", args.plot, res, xlabel="number of constraints", ylabel="ARI")
    return outputs, {"counts": list(args.counts), "trials": args.trials, "strategy": args.strategy}


def cmd_jnr(args):
    graph, _ = _load_graph(args.graph, args.format, args.sigma)
    clist = _constraints(args, graph)
    cm = materialize(clist, graph)
    beta = resolve_beta(BetaPolicy.parse(args.beta), cm, graph, 2, len(clist))
    samples = jnr_samples(graph, cm, feasible_set(graph, cm, beta).cuts, include_unconstrained=True)
    io.write_table_csv(args.out, ["cost", "purity", "origin"],
                       [(s.cost_coord, s.purity_coord, s.origin) for s in samples])
    outputs = [args.out]
    if args.plot:
        outputs += _plot("jnr", args.plot, samples, threshold=beta / graph.vol)
    return outputs, {"beta": beta}


def cmd_gen(args):
    pts = two_moons(args.n, args.noise, args.background, args.seed)
    io.write_points(args.out, pts)
    return [args.out], {"n": args.n, "noise": args.noise, "background": args.background}


def cmd_eval_ari(args):
    value = ari(io.read_label_source(args.pred), io.read_label_source(args.truth))
    print(f"{value:.17g}")
    if args.out:
        io.write_json(args.out, {"ari": value})
        return [args.out], {}
    return [], {}


def cmd_baseline_sl(args):
    graph, _ = _load_graph(args.graph, args.format, args.sigma)
    clist = _constraints(args, graph)
    part = spectral_learning_baseline(graph, clist, args.k, args.seed)
    res = {"labels": [int(x) for x in part.labels], "k": args.k}
    if len(clist):
        res["satisfied_ratio"] = satisfaction_ratio(part, clist)
    io.write_json(args.out, res)
    return [args.out], {"k": args.k}


def cmd_replay(args):
    man = io.read_json(args.manifest)
    for item in man.get("inputs", []):
        if io.file_sha256(item["path"]) != item["sha256"]:
            raise CSPError(f"input changed since the manifest was written: {item['path']}")
    here = os.getcwd()
    os.chdir(man["cwd"])
    try:
        return dispatch(man["argv"])
    finally:
        os.chdir(here)


COMMANDS = {
    "cluster": cmd_cluster,
    "kway": cmd_kway,
    "transfer": cmd_transfer,
    "sweep-beta": cmd_sweep_beta,
    "converge": cmd_converge,
    "jnr": cmd_jnr,
    "gen": cmd_gen,
    "eval-ari": cmd_eval_ari,
    "baseline-sl": cmd_baseline_sl,
}

_INPUT_FLAGS = ("graph", "constraints", "labels", "source", "target", "points", "pred", "truth")


def _write_manifest(args, argv, outputs, config):
    inputs = []
    for name in _INPUT_FLAGS:
        path = getattr(args, name, None)
        if path:
            inputs.append({"flag": name, "path": os.path.abspath(path), "sha256": io.file_sha256(path)})
    full = {k: v for k, v in vars(args).items() if k != "command"}
    full.update(config)
    man = {
        "command": args.command,
        "argv": list(argv),
        "cwd": os.getcwd(),
        "inputs": inputs,
        "config": full,
        "outputs": [{"path": os.path.abspath(p), "sha256": io.file_sha256(p)} for p in outputs],
    }
    io.write_json(args.out + ".manifest.json", man)


def dispatch(argv):
    """Run one command; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.command == "replay":
            return cmd_replay(args)
        outputs, config = COMMANDS[args.command](args)
        if getattr(args, "out", None):
            _write_manifest(args, argv, outputs, config)
        return 0
    except CSPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
