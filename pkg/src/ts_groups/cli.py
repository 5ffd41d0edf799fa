"""Unified command-line front end.

Every command echoes its configuration (seed included) into the report
it emits, so identical configurations produce byte-identical reports up
to the timestamp and elapsed-time fields.  Exit codes: 0 success, 2
usage or malformed input, 3 resource limit, 4 precondition failure, 5
internal invariant breach.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import wraps
from typing import Optional

import click

from . import __version__
from .errors import (
    ConfigurationError,
    InternalInvariantError,
    MalformedInputError,
    PreconditionError,
    TsGroupsError,
)
from .groups import Limits, make_oracle
from .sequences import (
    label_tree_adversarial,
    label_tree_three_letters,
    random_tree_adversary,
    squarefree_ternary,
)
from .testers import (
    PropertySpec,
    SearchBudget,
    XiParams,
    burnside_pipeline,
    construct_xi,
    test_property,
    verify_product_aperiodicity,
)
from .toursupport import run_experiment_parallel
from .tours import (
    RelatedSet,
    SamplerConfig,
    folner_traversal_demo,
    tsp_exact,
    tsp_heuristic,
    ts_lambda_experiment,
)
from .forests import build_forest_p, build_forest_p10, verify_forest
from .trees import PlaneTernaryTree
from .words import format_word, parse_word


@dataclass
class RunConfig:
    subcommand: str
    options: dict
    seed: Optional[int] = None

    def to_dict(self):
        return {"subcommand": self.subcommand, "seed": self.seed, **self.options}


def limits_from_env() -> Limits:
    mb = os.environ.get("TS_GROUPS_BUDGET_MB")
    if not mb:
        return Limits()
    try:
        cap = max(1, int(mb)) * 10_000
    except ValueError:
        raise ConfigurationError(f"bad TS_GROUPS_BUDGET_MB value {mb!r}")
    return Limits(ball_elements=cap, frontier=cap * 10)


def emit_report(config: RunConfig, payload: dict, out: Optional[str], fmt: str,
                started: float, csv_rows=None):
    report = {
        "schema": 1,
        "version": __version__,
        "config": config.to_dict(),
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": round(time.perf_counter() - started, 3),
        **payload,
    }
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if csv_rows is None:
            raise ConfigurationError("this command has no CSV projection")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_rows[0]) if csv_rows else ["empty"])
        writer.writeheader()
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in report.items()) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def cli_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TsGroupsError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _read_elements(oracle, path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    return tuple(oracle.parse_element(ln) for ln in lines)


def _read_word(path, rank=2):
    with open(path) as fh:
        return parse_word(fh.read(), rank)


def _xi_argument(oracle, text):
    """Accept either an element in text form or a path to a word file."""
    if os.path.exists(text):
        with open(text) as fh:
            return oracle.parse_element(fh.read().strip())
    return oracle.parse_element(text)


@click.group()
@click.version_option(__version__)
def main():
    """Word combinatorics and traveling-salesman bounds on Cayley
    metrics."""


# -- seq ---------------------------------------------------------------------


@main.group()
def seq():
    """Sequence generators."""


@seq.command("thue")
@click.option("--n", type=int, required=True, help="number of letters")
@cli_errors
def seq_thue(n):
    """Print the first N letters of the square-free ternary sequence."""
    click.echo(squarefree_ternary(n))


# -- tree --------------------------------------------------------------------


@main.group()
def tree():
    """Plane ternary tree labelings."""


@tree.command("label")
@click.option("--mode", type=click.Choice(["3letter", "adversarial"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--vertices", type=int, default=60, show_default=True)
@click.option("--tree-file", type=click.Path(exists=True), default=None,
              help="read the tree instead of generating one")
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def tree_label(mode, seed, vertices, tree_file, out):
    """Label a tree and dump edges as TSV: edge_from edge_to token."""
    if tree_file:
        with open(tree_file) as fh:
            t = PlaneTernaryTree.parse(fh.read())
    else:
        t = PlaneTernaryTree.random(vertices, seed)
    if mode == "3letter":
        labeled = label_tree_three_letters(t)
    else:
        labeled = label_tree_adversarial(t, set("wxyz"), random_tree_adversary(seed))
    lines = [
        f"{t.parent[child]}\t{child}\t{labeled.edge_labels[child]}"
        for child in sorted(labeled.edge_labels)
    ]
    text = "\n".join(lines) + ("\n" if lines else "")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


# -- tsp ---------------------------------------------------------------------


@main.command("tsp")
@click.option("--group", "descriptor", required=True)
@click.option("--set", "set_file", type=click.Path(exists=True), required=True)
@click.option("--exact/--heuristic", default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@cli_errors
def tsp_cmd(descriptor, set_file, exact, seed, out, fmt):
    """Solve the closed tour over a point-set file."""
    started = time.perf_counter()
    oracle = make_oracle(descriptor)
    pts = _read_elements(oracle, set_file)
    rset = RelatedSet(oracle, None, pts)
    tour = tsp_exact(rset) if exact else tsp_heuristic(rset, seed)
    config = RunConfig("tsp", {"group": descriptor, "set": set_file, "exact": exact}, seed)
    emit_report(
        config,
        {
            "L": tour.length,
            "kind": tour.kind,
            "order": [oracle.format_element(g) for g in tour.order],
        },
        out,
        fmt,
        started,
    )


# -- experiment --------------------------------------------------------------


@main.group()
def experiment():
    """Sampled experiments."""


@experiment.command("ts-lambda")
@click.option("--group", "descriptor", default="free:2", show_default=True)
@click.option("--xi", "xi_text", required=True)
@click.option("--lambda", "lam", required=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--style", type=click.Choice(["pairs", "chains", "mixed", "box-pairs"]),
              default="mixed", show_default=True)
@click.option("--max-size", type=int, default=12, show_default=True)
@click.option("--lprime", is_flag=True, help="also compute the credited cost")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json")
@cli_errors
def experiment_ts_lambda(descriptor, xi_text, lam, samples, seed, style, max_size,
                         lprime, jobs, out, fmt):
    """Sample related sets and test L(S) >= lambda |S|."""
    started = time.perf_counter()
    oracle = make_oracle(descriptor)
    xi = oracle.parse_element(xi_text)
    Fraction(lam)  # validates
    config = SamplerConfig(
        samples=samples, seed=seed, max_size=max_size, style=style,
        compute_lprime=lprime,
    )
    if jobs > 1:
        report = run_experiment_parallel(descriptor, xi_text, lam, config, jobs)
    else:
        report = ts_lambda_experiment(oracle, xi, lam, config)
    run_config = RunConfig(
        "experiment ts-lambda",
        {"group": descriptor, "xi": xi_text, "lambda": str(lam), "style": style,
         "samples": samples, "max_size": max_size, "jobs": jobs},
        seed,
    )
    emit_report(run_config, report.to_dict(), out, fmt, started,
                csv_rows=report.per_sample)


# -- forest ------------------------------------------------------------------


@main.group()
def forest():
    """Cluster-tree forest construction and verification."""


def _load_revised(descriptor, set_file, xi_text):
    oracle = make_oracle(descriptor)
    xi = _xi_argument(oracle, xi_text)
    pts = _read_elements(oracle, set_file)
    from .tours import revise

    return oracle, xi, revise(RelatedSet(oracle, xi, pts))


@forest.command("build")
@click.option("--mode", type=click.Choice(["P", "P10"]), required=True)
@click.option("--r", type=int, required=True)
@click.option("--group", "descriptor", default="free:2", show_default=True)
@click.option("--set", "set_file", type=click.Path(exists=True), required=True)
@click.option("--xi", "xi_text", required=True, help="xi word/element text")
@click.option("--tour", "tour_kind", type=click.Choice(["exact", "heuristic"]),
              default="exact", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def forest_build(mode, r, descriptor, set_file, xi_text, tour_kind, seed, out):
    """Build a forest over a related set and emit forest.json."""
    started = time.perf_counter()
    oracle, xi, rset = _load_revised(descriptor, set_file, xi_text)
    tour = tsp_exact(rset) if tour_kind == "exact" else tsp_heuristic(rset, seed)
    build = build_forest_p if mode == "P" else build_forest_p10
    fo = build(rset, r, tour)
    config = RunConfig(
        "forest build",
        {"mode": mode, "r": r, "group": descriptor, "set": set_file, "xi": xi_text,
         "tour": tour_kind},
        seed,
    )
    emit_report(config, fo.to_dict(oracle), out, "json", started)


@forest.command("verify")
@click.argument("forest_json", type=click.Path(exists=True), required=False)
@click.option("--mode", type=click.Choice(["P", "P10"]), default=None)
@click.option("--r", type=int, default=None)
@click.option("--group", "descriptor", default=None)
@click.option("--set", "set_file", type=click.Path(exists=True), default=None)
@click.option("--xi", "xi_text", default=None)
@click.option("--tour", "tour_kind", type=click.Choice(["exact", "heuristic"]),
              default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def forest_verify(forest_json, mode, r, descriptor, set_file, xi_text, tour_kind,
                  seed, out):
    """Re-check every forest invariant.

    Given a forest.json produced by `forest build`, its config echo
    supplies the inputs; the forest is rebuilt deterministically,
    compared against the stored trees, and re-verified.  The inputs can
    also be given explicitly through the options.
    """
    started = time.perf_counter()
    stored = None
    if forest_json is not None:
        with open(forest_json) as fh:
            stored = json.load(fh)
        cfg = stored["config"]
        mode = mode or cfg["mode"]
        r = r if r is not None else cfg["r"]
        descriptor = descriptor or cfg["group"]
        set_file = set_file or cfg["set"]
        xi_text = xi_text or cfg["xi"]
        tour_kind = tour_kind or cfg.get("tour", "exact")
        seed = seed if seed is not None else cfg.get("seed", 0)
    descriptor = descriptor or "free:2"
    if None in (mode, r, set_file, xi_text):
        raise ConfigurationError(
            "give a forest.json or all of --mode/--r/--set/--xi"
        )
    tour_kind = tour_kind or "exact"
    seed = seed or 0
    oracle, xi, rset = _load_revised(descriptor, set_file, xi_text)
    tour = tsp_exact(rset) if tour_kind == "exact" else tsp_heuristic(rset, seed)
    build = build_forest_p if mode == "P" else build_forest_p10
    fo = build(rset, r, tour)
    rep = verify_forest(fo, rset, r)
    payload = rep.to_dict()
    if stored is not None:
        rebuilt = fo.to_dict(oracle)
        payload["matches_stored"] = all(
            stored.get(k) == rebuilt[k]
            for k in ("mode", "r", "trees", "census", "certified_bound")
        )
    config = RunConfig(
        "forest verify",
        {"mode": mode, "r": r, "group": descriptor, "set": set_file, "xi": xi_text},
        seed,
    )
    emit_report(config, payload, out, "json", started)
    if not rep.ok or (stored is not None and not payload["matches_stored"]):
        raise InternalInvariantError("forest verification failed")


# -- property ----------------------------------------------------------------


@main.group(name="property")
def property_group():
    """Alternating-product property testers."""


@property_group.command("test")
@click.option("--family", type=click.Choice(["P", "P'", "P10", "P10'", "Pn'"]),
              required=True)
@click.option("--n", "n_ap", type=int, default=None, help="aperiodicity order for Pn'")
@click.option("--r", type=int, required=True)
@click.option("--group", "descriptor", default="free:2", show_default=True)
@click.option("--xi", "xi_text", default=None)
@click.option("--xi-from-lemma4", is_flag=True,
              help="use the constructed marker word as xi")
@click.option("--k-max", type=int, default=3, show_default=True)
@click.option("--samples", type=int, default=5000, show_default=True)
@click.option("--budget", type=int, default=None,
              help="overrides --samples and the exhaustion threshold")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def property_test(family, n_ap, r, descriptor, xi_text, xi_from_lemma4, k_max,
                  samples, budget, seed, out):
    """Search for counterexamples to an alternating-product property."""
    started = time.perf_counter()
    oracle = make_oracle(descriptor)
    if xi_from_lemma4:
        if not descriptor.startswith("free:"):
            raise ConfigurationError("--xi-from-lemma4 requires a free group")
        xi = construct_xi(seed).word
    elif xi_text is not None:
        xi = _xi_argument(oracle, xi_text)
    else:
        raise ConfigurationError("give --xi or --xi-from-lemma4")
    if family == "P":
        spec = PropertySpec("P", r=r, oracle=oracle, xi=xi)
    else:
        n_val = {"P'": 1, "P10": 10, "P10'": 10}.get(family, n_ap)
        if n_val is None:
            raise ConfigurationError("family Pn' needs --n")
        spec = PropertySpec("Pn'", r=r, oracle=oracle, xi=xi, n=n_val)
    env_cap = limits_from_env().ball_elements
    if budget is not None:
        samples = budget
    search = SearchBudget(
        k_max=k_max,
        samples=samples,
        seed=seed,
        exhaustive_limit=budget if budget is not None else SearchBudget().exhaustive_limit,
        ball_limit=min(SearchBudget().ball_limit, env_cap),
    )
    verdict = test_property(spec, search)
    config = RunConfig(
        "property test",
        {"family": family, "r": r, "group": descriptor,
         "xi": oracle.format_element(xi) if not xi_from_lemma4 else "<constructed>",
         "k_max": k_max, "samples": samples},
        seed,
    )
    emit_report(config, verdict.to_dict(), out, "json", started)


# -- xi ----------------------------------------------------------------------


@main.group()
def xi():
    """Marker-word construction."""


@xi.command("construct")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--desk-scale", is_flag=True)
@click.option("--out", type=click.Path(), default="xi.word", show_default=True,
              help="word file to write")
@click.option("--report", "report_out", type=click.Path(), default=None)
@cli_errors
def xi_construct(seed, desk_scale, out, report_out):
    """Construct the marker word and verify its contract."""
    started = time.perf_counter()
    params = XiParams.desk() if desk_scale else XiParams()
    rep = construct_xi(seed, params)
    if out:
        with open(out, "w") as fh:
            fh.write(format_word(rep.word) + "\n")
        click.echo(f"wrote {out} ({rep.n} letters)")
    config = RunConfig("xi construct", {"desk_scale": desk_scale}, seed)
    emit_report(config, rep.to_dict(), report_out, "json" if report_out else "text", started)


# -- lemma5 ------------------------------------------------------------------


@main.group()
def lemma5():
    """Long-product aperiodicity verification."""


@lemma5.command("verify")
@click.option("--xi", "xi_file", type=click.Path(exists=True), required=True)
@click.option("--xs", "xs_file", type=click.Path(exists=True), required=True)
@click.option("--eps", "eps_text", required=True, help='sign string like "+-+"')
@click.option("--desk-scale", is_flag=True)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def lemma5_verify(xi_file, xs_file, eps_text, desk_scale, out):
    """Check that the alternating product of the word files is
    500-aperiodic (50 at desk scale)."""
    started = time.perf_counter()
    xi_word = _read_word(xi_file)
    with open(xs_file) as fh:
        xs = [parse_word(ln.strip(), 2) for ln in fh if ln.strip()]
    eps = []
    for c in eps_text.strip():
        if c == "+":
            eps.append(1)
        elif c == "-":
            eps.append(-1)
        else:
            raise MalformedInputError(f"bad sign character {c!r}")
    bound = 50 if desk_scale else 500
    max_x = 24 if desk_scale else 192
    ok, analysis = verify_product_aperiodicity(
        xi_word, xs, eps, bound=bound, max_x_len=max_x, check_xi=not desk_scale
    )
    config = RunConfig("lemma5 verify", {"xi": xi_file, "xs": xs_file, "eps": eps_text,
                                          "desk_scale": desk_scale})
    emit_report(config, {"aperiodic": ok, "analysis": analysis}, out, "json", started)
    if not ok:
        raise PreconditionError("product failed the aperiodicity bound")


# -- burnside ----------------------------------------------------------------


@main.group()
def burnside():
    """End-to-end pipeline."""


@burnside.command("pipeline")
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--desk-scale", is_flag=True)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def burnside_cmd(samples, seed, desk_scale, out):
    """Marker word + sampled product verification + constant chain."""
    started = time.perf_counter()
    rep = burnside_pipeline(samples=samples, seed=seed, desk_scale=desk_scale)
    config = RunConfig("burnside pipeline", {"samples": samples, "desk_scale": desk_scale}, seed)
    emit_report(config, rep.to_dict(), out, "json", started)
    if not rep.ok:
        raise InternalInvariantError("a pipeline stage failed; see the report")


# -- folner ------------------------------------------------------------------


@main.group()
def folner():
    """Folner-set traversal demonstrations."""


@folner.command("demo")
@click.option("--box", "box_text", required=True, help='e.g. "0:9,0:9"')
@click.option("--xi", "xi_text", required=True, help='e.g. "3,0"')
@click.option("--group", "descriptor", default="abelian:2", show_default=True)
@click.option("--out", type=click.Path(), default=None)
@cli_errors
def folner_demo(box_text, xi_text, descriptor, out):
    """Spanning-tree traversal of a box and its ratio chain."""
    started = time.perf_counter()
    oracle = make_oracle(descriptor)
    box = []
    for part in box_text.split(","):
        lo, _, hi = part.partition(":")
        box.append((int(lo), int(hi)))
    xi_el = oracle.parse_element(xi_text)
    rep = folner_traversal_demo(oracle, box, xi_el)
    config = RunConfig("folner demo", {"box": box_text, "xi": xi_text, "group": descriptor})
    emit_report(config, rep.to_dict(), out, "json", started)


# -- replay ------------------------------------------------------------------


@main.command("replay")
@click.argument("report_file", type=click.Path(exists=True))
@cli_errors
def replay(report_file):
    """Re-verify the witnesses stored in a report."""
    with open(report_file) as fh:
        report = json.load(fh)
    config = report.get("config", {})
    sub = config.get("subcommand", "")
    if sub == "property test":
        witness = report.get("witness")
        if witness is None:
            click.echo("no witness to replay")
            return
        oracle = make_oracle(config["group"])
        if config["xi"] == "<constructed>":
            xi_el = construct_xi(config.get("seed") or 0).word
        else:
            xi_el = oracle.parse_element(config["xi"])
        fam = config["family"]
        if fam == "P":
            spec = PropertySpec("P", r=config["r"], oracle=oracle, xi=xi_el)
        else:
            n_val = {"P'": 1, "P10'": 10}.get(fam, config.get("n", 1))
            spec = PropertySpec("Pn'", r=config["r"], oracle=oracle, xi=xi_el, n=n_val)
        from .testers import _replay_witness

        if not _replay_witness(spec, witness):
            raise InternalInvariantError("stored witness failed replay")
        click.echo("witness replayed: ok")
    elif sub == "experiment ts-lambda":
        oracle = make_oracle(config["group"])
        xi_el = oracle.parse_element(config["xi"])
        lam = Fraction(config["lambda"])
        for v in report.get("violations", []):
            pts = tuple(oracle.parse_element(t) for t in v["elements"])
            rset = RelatedSet(oracle, xi_el, pts)
            tour = tsp_exact(rset)
            if tour.length != v["L"] or not Fraction(tour.length) < lam * rset.size:
                raise InternalInvariantError("stored violation failed replay")
        click.echo(f"replayed {len(report.get('violations', []))} violations: ok")
    else:
        raise ConfigurationError(f"no replay handler for {sub!r}")


if __name__ == "__main__":
    main()
