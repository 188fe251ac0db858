"""Command-line interface: ``slg <command> ...``.

Exit status: 0 success, 1 domain error, 2 usage error (including missing
input files).  ``--format json-lines`` prints one JSON object per line.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import derivation as dv
from . import estimation as est
from . import grammar as gr
from . import models as md
from . import search, smoothing, stats

ERROR_CODES = [
    (gr.GrammarError, "grammar"),
    (dv.DerivationSyntaxError, "derivation-syntax"),
    (dv.UnknownTreeError, "unknown-tree"),
    (md.ParamsSyntaxError, "params-syntax"),
    (md.MissingContextError, "missing-context"),
    (md.IllFormedError, "ill-formed"),
    (est.InvalidCorpusError, "invalid-corpus"),
    (est.EstimationError, "estimation"),
    (est.BudgetExceeded, "budget-exceeded"),
    (est.FragmentBlowup, "fragment-blowup"),
    (smoothing.CoverageError, "coverage"),
    (stats.DegenerateTableError, "degenerate-table"),
    (stats.SelectorError, "selector"),
    (gr.AddressError, "address"),
]


class UsageError(Exception):
    pass


def _read(path):
    if path is None:
        raise UsageError("missing required input file")
    if not os.path.exists(path) or os.path.isdir(path):
        raise UsageError("no such file: %s" % path)
    with open(path, encoding="utf-8") as f:
        return f.read()


def _prob(p) -> str:
    return md.format_prob(p)


class Out:
    def __init__(self, fmt, stream):
        self.fmt, self.stream = fmt, stream

    def line(self, text):
        print(text, file=self.stream)

    def record(self, rec: dict, text: str, csv_fields=None):
        if self.fmt == "json-lines":
            self.line(json.dumps(rec, sort_keys=True, ensure_ascii=False))
        elif self.fmt == "csv":
            fields = csv_fields or list(rec)
            self.line(",".join(_csv_cell(rec[k]) for k in fields))
        else:
            self.line(text)


def _csv_cell(v):
    s = "" if v is None else str(v)
    if any(ch in s for ch in ',"\n '):
        s = '"%s"' % s.replace('"', '""')
    return s


def _grammar(args):
    return gr.parse_grammar(_read(args.grammar))


def _corpus(path):
    return dv.parse_corpus(_read(path))


def _derivations(args):
    """(id, derivation) pairs selected by -d / -c."""
    entries = _corpus(args.corpus) if getattr(args, "corpus", None) else []
    if args.derivation is None:
        if not entries:
            raise UsageError("give -d DERIVATION or -c CORPUS")
        return [(ident or str(i), d) for i, (ident, d) in enumerate(entries)]
    if args.derivation.lstrip().startswith("("):
        return [("-", dv.parse_derivation(args.derivation))]
    for ident, d in entries:
        if ident == args.derivation:
            return [(ident, d)]
    raise UsageError("derivation %r not found (pass a bracketed derivation or an id from -c)" % args.derivation)


def _bounds(args):
    return search.SearchBounds(args.max_uses, args.max_adj, getattr(args, "max_yield", None))


def _score_line(out, ident, d, lp, log, show=False):
    p = math.exp(lp)
    rec = {"id": ident, "derivation": dv.render_derivation(d), "prob": _prob(p),
           "logprob": _prob(lp) if lp != -math.inf else "-inf"}
    text = "%s\t%s" % (ident, rec["logprob"] if log else rec["prob"])
    if show:
        text += "\t" + rec["derivation"]
    out.record(rec, text, ["id", "logprob" if log else "prob", "derivation"])


# -- commands -------------------------------------------------------------------

def cmd_validate(args, out):
    g = _grammar(args)
    violations = list(gr.validate_grammar(g))
    if args.corpus:
        for i, (ident, d) in enumerate(_corpus(args.corpus)):
            for v in dv.validate_derivation(g, d):
                violations.append(gr.Violation(v.severity, "derivation %s: %s" % (ident or i, v.message)))
    for v in violations:
        out.record({"severity": v.severity, "message": v.message}, str(v))
    errors = sum(v.severity == "error" for v in violations)
    if out.fmt == "text":
        out.line("%d violations" % len(violations))
    return 1 if errors else 0


def cmd_estimate(args, out):
    if args.level == 4:
        if args.trees:
            trees = dv.parse_tree_corpus(_read(args.trees))
        else:
            g = _grammar(args)
            trees = [dv.derive(g, d) for _, d in _corpus(args.corpus)]
        depth = None if args.max_depth == 0 else args.max_depth
        params = est.estimate_dop(trees, depth)
    else:
        g = _grammar(args)
        params = est.estimate(g, [d for _, d in _corpus(args.corpus)], args.level)
    text = md.render_params(params)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        out.stream.write(text)
    return 0


def _load_params(args, g=None):
    params = md.parse_params(_read(args.params))
    if getattr(args, "lift", False):
        params = md.lift(params, g)
    return params


def cmd_score(args, out):
    g = _grammar(args)
    params = _load_params(args, g)
    for ident, d in _derivations(args):
        errors = [v for v in dv.validate_derivation(g, d) if v.severity == "error"]
        if errors:
            raise est.InvalidCorpusError(0, errors)
        _score_line(out, ident, d, md.score_derivation(params, g, d), args.log)
    return 0


def cmd_sample(args, out):
    g = _grammar(args)
    params = md.parse_params(_read(args.params))
    ds = est.sample_corpus(params, g, args.n, args.seed, args.max_nodes)
    for i, d in enumerate(ds):
        out.record({"id": "s%d" % i, "derivation": dv.render_derivation(d)},
                   "s%d %s" % (i, dv.render_derivation(d)))
    return 0


def cmd_enumerate(args, out):
    g = _grammar(args)
    params = md.parse_params(_read(args.params)) if args.params else None
    n = 0
    for i, d in enumerate(search.enumerate_derivations(g, _bounds(args))):
        n += 1
        rec = {"index": i, "derivation": dv.render_derivation(d),
               "yield": " ".join(dv.derive(g, d).yield_())}
        text = "%d\t%s" % (i, rec["derivation"])
        if params is not None:
            lp = search._safe_score(params, g, d)
            rec["prob"] = _prob(math.exp(lp))
            text += "\t" + rec["prob"]
        out.record(rec, text)
    if out.fmt == "text":
        out.line("# %d derivations" % n)
    return 0


def cmd_nbest(args, out):
    g = _grammar(args)
    params = _load_params(args, g)
    for rank, (d, lp) in enumerate(search.nbest(params, g, args.sentence.split(), args.k, _bounds(args)), 1):
        _score_line(out, str(rank), d, lp, args.log, show=True)
    return 0


def cmd_sentprob(args, out):
    g = _grammar(args)
    params = _load_params(args, g)
    p = search.sentence_probability(params, g, args.sentence.split(), _bounds(args))
    value = _prob(math.log(p)) if args.log and p > 0 else ("-inf" if args.log else _prob(p))
    out.record({"sentence": args.sentence, "prob": _prob(p)}, value)
    return 0


def cmd_lift(args, out):
    g = _grammar(args)
    params = md.parse_params(_read(args.params))
    if params.level != 1:
        raise md.IllFormedError("only level-1 files lift to a parameter file; level 2 lifts "
                                "intensionally (use score --lift)")
    text = md.render_params(md.lift(params, g))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        out.stream.write(text)
    return 0


def _backoff_config(args):
    text = _read(args.config) if args.config else ""
    order = tuple(args.order.split(",")) if args.order else None
    return smoothing.BackoffConfig.parse(text, lambda_anchor=args.lambda_anchor,
                                         lambda_family=args.lambda_family,
                                         lambda_level=args.lambda_level, order=order,
                                         fallback_add=args.fallback_add)


def cmd_smooth(args, out):
    g = _grammar(args)
    params = md.parse_params(_read(args.params))
    train = [d for _, d in _corpus(args.train)]
    try:
        config = _backoff_config(args)
    except ValueError as e:
        raise UsageError(str(e))
    model = smoothing.build_smoothed(params, train, g, config)
    for ident, d in _derivations(args):
        _score_line(out, ident, d, md.score_derivation(model, g, d), args.log)
    return 0


def cmd_fragments(args, out):
    if args.trees:
        trees = dv.parse_tree_corpus(_read(args.trees))
    else:
        g = _grammar(args)
        trees = [dv.derive(g, d) for _, d in _corpus(args.corpus)]
    depth = None if args.max_depth == 0 else args.max_depth
    counts = est.extract_fragments(trees, depth)
    for frag, n in sorted(counts.items(), key=lambda kv: (-kv[1], gr.render_node(kv[0]))):
        out.record({"fragment": gr.render_node(frag), "count": n}, "%d\t%s" % (n, gr.render_node(frag)),
                   ["count", "fragment"])
    return 0


def cmd_dopscore(args, out):
    params = md.parse_params(_read(args.params))
    if params.level != 4:
        raise md.IllFormedError("dopscore needs a level-4 (slg4) parameter file")
    for i, t in enumerate(dv.parse_tree_corpus(_read(args.trees))):
        p = md.score_derived_tree_dop(params, t)
        out.record({"index": i, "tree": str(t), "prob": _prob(p)}, "%d\t%s" % (i, _prob(p)))
    return 0


def _print_chisq(out, res, percent):
    rec = {"statistic": _prob(res.statistic), "df": res.df, "p_value": _prob(res.p_value)}
    out.record(rec, "chi2 = %s, df = %d, p = %s" % (rec["statistic"], res.df,
                                                    stats.format_p(res.p_value, percent)))


def cmd_chisq(args, out):
    if args.table:
        try:
            counts = [[int(x) for x in row.split(",")] for row in args.table.split(";")]
        except ValueError:
            raise UsageError("--table wants rows like '10,20;30,40'")
        table = stats.ContingencyTable.from_counts(counts)
    else:
        import csv
        rows = list(csv.reader(_read(args.csv).splitlines()))
        table = stats.ContingencyTable([r[0] for r in rows[1:]], rows[0][1:],
                                       [[int(x) for x in r[1:]] for r in rows[1:]])
    _print_chisq(out, stats.chi_square(table, yates=args.yates), args.percent)
    return 0


def cmd_deptable(args, out):
    g = _grammar(args)
    corpus = [d for _, d in _corpus(args.corpus)]
    table = stats.dependency_table(g, corpus, stats.Selector.parse(args.row),
                                   stats.Selector.parse(args.col), args.classify)
    if out.fmt == "csv":
        out.stream.write(table.to_csv())
    elif out.fmt == "json-lines":
        for r, row in zip(table.rows, table.counts):
            for c, n in zip(table.cols, row):
                out.record({"row": r, "col": c, "count": n}, "")
    else:
        out.line(table.render())
    if args.chisq:
        _print_chisq(out, stats.chi_square(table), False)
    return 0


# -- argument parsing ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv", "json-lines"], default="text")

    p = argparse.ArgumentParser(prog="slg", description="Stochastic lexicalized TAG toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def bounds(sp):
        sp.add_argument("--max-uses", type=int, default=6, help="max elementary-tree uses")
        sp.add_argument("--max-adj", type=int, default=None, help="max adjunctions per node")

    def smoothing_opts(sp):
        sp.add_argument("--config", help="key = value backoff config file")
        sp.add_argument("--lambda-anchor", type=float)
        sp.add_argument("--lambda-family", type=float)
        sp.add_argument("--lambda-level", type=float)
        sp.add_argument("--order", help="comma separated, e.g. anchor,family,level")
        sp.add_argument("--fallback-add", type=float)

    sp = cmd("validate", cmd_validate, "check a grammar (and optionally a corpus)")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-c", "--corpus")

    sp = cmd("estimate", cmd_estimate, "relative-frequency estimation")
    sp.add_argument("-g", "--grammar")
    sp.add_argument("-c", "--corpus")
    sp.add_argument("-t", "--trees", help="derived-tree corpus (level 4)")
    sp.add_argument("--level", type=int, choices=[1, 2, 3, 4], required=True)
    sp.add_argument("--max-depth", type=int, default=est.DEFAULT_MAX_DEPTH, help="0 = unbounded")
    sp.add_argument("-o", "--output")

    sp = cmd("score", cmd_score, "log-probability of derivations")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-p", "--params", required=True)
    sp.add_argument("-d", "--derivation")
    sp.add_argument("-c", "--corpus")
    sp.add_argument("--lift", action="store_true", help="score under lift(params)")
    sp.add_argument("--log", action="store_true")

    sp = cmd("sample", cmd_sample, "sample derivations from a model")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-p", "--params", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-n", type=int, default=1)
    sp.add_argument("--max-nodes", type=int, default=200)

    sp = cmd("enumerate", cmd_enumerate, "bounded exhaustive enumeration")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-p", "--params")
    bounds(sp)
    sp.add_argument("--max-yield", type=int)

    for name, func in (("nbest", cmd_nbest), ("sentprob", cmd_sentprob)):
        sp = cmd(name, func, "n-best parses" if name == "nbest" else "sentence probability")
        sp.add_argument("-g", "--grammar", required=True)
        sp.add_argument("-p", "--params", required=True)
        sp.add_argument("-s", "--sentence", required=True)
        sp.add_argument("--lift", action="store_true")
        sp.add_argument("--log", action="store_true")
        bounds(sp)
        if name == "nbest":
            sp.add_argument("-k", type=int, default=5)

    sp = cmd("lift", cmd_lift, "lift level-1 parameters to level 2")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-p", "--params", required=True)
    sp.add_argument("-o", "--output")

    sp = cmd("smooth", cmd_smooth, "score derivations under a smoothed model")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-p", "--params", required=True)
    sp.add_argument("--train", required=True, help="corpus the backoff models are estimated on")
    sp.add_argument("-d", "--derivation")
    sp.add_argument("-c", "--corpus", help="derivations to score")
    sp.add_argument("--log", action="store_true")
    smoothing_opts(sp)

    sp = cmd("fragments", cmd_fragments, "DOP fragment counts")
    sp.add_argument("-t", "--trees")
    sp.add_argument("-g", "--grammar")
    sp.add_argument("-c", "--corpus")
    sp.add_argument("--max-depth", type=int, default=est.DEFAULT_MAX_DEPTH, help="0 = unbounded")

    sp = cmd("dopscore", cmd_dopscore, "DOP probability of derived trees")
    sp.add_argument("-p", "--params", required=True)
    sp.add_argument("-t", "--trees", required=True)

    sp = cmd("chisq", cmd_chisq, "Pearson chi-square test")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", help="rows separated by ';', cells by ','")
    src.add_argument("--csv")
    sp.add_argument("--yates", action="store_true")
    sp.add_argument("--percent", action="store_true", help="report p on a 0-100 scale")

    sp = cmd("deptable", cmd_deptable, "contingency table of two sites' fillers")
    sp.add_argument("-g", "--grammar", required=True)
    sp.add_argument("-c", "--corpus", required=True)
    sp.add_argument("--row", required=True, help="e.g. tree:alpha1@1")
    sp.add_argument("--col", required=True, help="e.g. tree:alpha1@2.2")
    sp.add_argument("--classify", choices=["tree", "family", "template"], default="tree")
    sp.add_argument("--chisq", action="store_true")
    return p


def run_command(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "estimate" and args.level != 4 and not (args.grammar and args.corpus):
        print("slg: usage error: estimate needs -g and -c for levels 1-3", file=stderr)
        return 2
    try:
        return args.func(args, Out(args.format, stdout))
    except UsageError as e:
        print("slg: usage error: %s" % e, file=stderr)
        return 2
    except tuple(cls for cls, _ in ERROR_CODES) as e:
        code = next(name for cls, name in ERROR_CODES if isinstance(e, cls))
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print("slg: error [%s]: %s" % (code, msg), file=stderr)
        return 1


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
