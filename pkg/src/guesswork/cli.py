"""Command-line interface.

Every evaluation command (``exact``, ``quantify``, ``sample``, ``normal``,
``bounds``) and ``sweep`` print records with the columns in ``COLUMNS``.
``--ratio`` switches the three log10 columns from ``G`` to ``G / n**m``.
The ``ratio`` column is always written as ``<mantissa>e<exponent>`` so that
ratios below the float range survive a round trip through ``fit``.

The exit status is 0 when no record carries an error code, 1 otherwise,
and 2 for usage errors.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from ._validation import EnumerationCapError
from .bounds import arikan_lower, entropy_ansatz, massey_lower
from .estimate import Method
from .exact import guesswork_exact, guesswork_uniform
from .histogram import guesswork_quantified, replicate_estimate
from .normal import (
    count_moments_analytic,
    count_moments_sampled,
    guesswork_leading_term,
    guesswork_normal_binned,
    guesswork_normal_closed,
    guesswork_normal_integral,
)
from .powerlaw import fit_power_law
from .source import (
    SymbolDistribution,
    english_digrams,
    entropy,
    load_digram_table,
    normalize_rows,
    parse_base,
    read_distribution,
)

COLUMNS = ["m", "method", "order", "log10_G", "ratio", "lo_log10", "hi_log10",
           "N", "S", "T", "seed", "wall_ms", "error"]
FIT_COLUMNS = ["method", "order", "A", "B", "residual", "points", "m_min", "m_max",
               "expression"]

DEFAULT_BINS = 64
DEFAULT_SAMPLES = 100_000
DEFAULT_REPLICATES = 20
DEFAULT_SEED = 1
NORMAL_PROBE_SAMPLES = 100_000
NORMAL_PROBE_M = 20

_LN10 = math.log(10.0)
_METHOD_ORDER = {m: i for i, m in enumerate(Method)}
_NORMAL_ALIASES = {"binned": Method.NORMAL_BINNED, "integral": Method.NORMAL_INTEGRAL,
                   "erf": Method.NORMAL_ERF, "leading": Method.LEADING_TERM}
_COMMAND_METHODS = {
    "exact": [Method.EXACT],
    "quantify": [Method.QUANTIFY],
    "sample": [Method.SAMPLE],
    "normal": [Method.NORMAL_BINNED, Method.NORMAL_INTEGRAL, Method.NORMAL_ERF,
               Method.LEADING_TERM],
    "bounds": [Method.MASSEY, Method.ARIKAN, Method.ENTROPY_ANSATZ],
}


class UsageError(Exception):
    pass


class ModelSet:
    """Resolves ``--dist`` / ``--digram`` into the model for each order."""

    def __init__(self, dist=None, chain=None):
        if (dist is None) == (chain is None):
            raise UsageError("give exactly one of --dist or --digram")
        self.dist = dist
        self.chain = chain
        self._normal = {}

    @property
    def n(self):
        return (self.dist or self.chain).n

    @property
    def default_order(self):
        return 1 if self.dist is not None else 2

    def model(self, order):
        if order == 0:
            return SymbolDistribution.uniform(self.n)
        if order == 1:
            return self.dist if self.dist is not None else self.chain.marginal()
        if self.chain is None:
            raise TypeError("order 2 needs a digram model (--digram)")
        return self.chain

    def normal_model(self, order, seed):
        key = (order, seed)
        if key not in self._normal:
            model = self.model(order)
            if order == 2:
                self._normal[key] = count_moments_sampled(
                    model, NORMAL_PROBE_SAMPLES, NORMAL_PROBE_M, seed)
            else:
                self._normal[key] = count_moments_analytic(model)
        return self._normal[key]


def parse_dist(arg):
    if arg.startswith("uniform:"):
        try:
            return SymbolDistribution.uniform(int(arg.split(":", 1)[1]))
        except ValueError as exc:
            raise UsageError(f"bad inline model {arg!r}: {exc}") from None
    path = Path(arg)
    if not path.is_file():
        raise UsageError(f"distribution file not found: {arg}")
    return read_distribution(path)


def parse_digram(arg):
    if arg == "english":
        table = english_digrams()
    else:
        path = Path(arg)
        if not path.is_file():
            raise UsageError(f"digram file not found: {arg}")
        table = load_digram_table(path)
    return normalize_rows(table).with_stationary()


def _models(args):
    dist = parse_dist(args.dist) if args.dist else None
    chain = parse_digram(args.digram) if args.digram else None
    return ModelSet(dist, chain)


def _word_lengths(args):
    if args.m is not None:
        if args.m_min is not None or args.m_max is not None:
            raise UsageError("use either --m or --m-min/--m-max")
        return [args.m]
    if args.m_min is None and args.m_max is None:
        raise UsageError("a word length is required (--m or --m-min/--m-max)")
    lo = args.m_min if args.m_min is not None else args.m_max
    hi = args.m_max if args.m_max is not None else args.m_min
    if not 1 <= lo <= hi:
        raise UsageError("need 1 <= m-min <= m-max")
    return list(range(lo, hi + 1))


def _parse_orders(values, default):
    if not values:
        return [default]
    orders = []
    for v in values:
        for tok in str(v).split(","):
            tok = tok.strip()
            if tok not in ("0", "1", "2"):
                raise UsageError(f"order must be 0, 1 or 2, got {tok!r}")
            if int(tok) not in orders:
                orders.append(int(tok))
    return orders


def parse_methods(values):
    methods = []
    for v in values or []:
        for tok in v.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                method = _NORMAL_ALIASES.get(tok) or Method(tok)
            except ValueError:
                raise UsageError(f"unknown method {tok!r}") from None
            if method not in methods:
                methods.append(method)
    return methods


def compute(models, method, order, m, args, seed):
    """Return a :class:`GuessworkEstimate` and the N/S/T/seed actually used."""
    used = {}
    model = models.model(order)
    if method is Method.EXACT:
        if order == 0:
            est = guesswork_uniform(model.n, m)
        else:
            est = guesswork_exact(model, m, args.enum_cap)
    elif method is Method.QUANTIFY:
        backend = args.backend
        if backend == "auto":
            backend = "convolve" if order < 2 else "dp-chain"
        used["N"] = args.bins
        est = guesswork_quantified(model, m, args.bins, backend, args.enum_cap)
    elif method is Method.SAMPLE:
        used.update(N=args.bins, S=args.samples, T=args.replicates, seed=seed)
        ss = np.random.SeedSequence([seed, m, order])
        est = replicate_estimate(model, m, args.bins, args.samples, args.replicates,
                                 seed=ss, n_jobs=args.jobs).estimate
    elif method in (Method.NORMAL_BINNED, Method.NORMAL_INTEGRAL, Method.NORMAL_ERF,
                    Method.LEADING_TERM):
        nm = models.normal_model(order, seed)
        if order == 2:
            used.update(S=NORMAL_PROBE_SAMPLES, seed=seed)
        if method is Method.NORMAL_BINNED:
            used["N"] = args.normal_bins
            est = guesswork_normal_binned(nm, m, args.normal_bins)
        elif method is Method.NORMAL_INTEGRAL:
            est = guesswork_normal_integral(nm, m)
        elif method is Method.NORMAL_ERF:
            est = guesswork_normal_closed(nm, m)
        else:
            est = guesswork_leading_term(nm, m)
    elif method is Method.MASSEY:
        est = massey_lower(entropy(model, order, m))
    elif method is Method.ARIKAN:
        if order == 2:
            raise TypeError("Arikan's bound is first-order only")
        est = arikan_lower(model, m)
    elif method is Method.ENTROPY_ANSATZ:
        est = entropy_ansatz(entropy(model, order, m))
    else:  # pragma: no cover
        raise ValueError(f"unsupported method {method}")
    return est, used


def _error_code(exc):
    if isinstance(exc, EnumerationCapError):
        return "enum-cap"
    if isinstance(exc, TypeError):
        return "model-mismatch"
    if isinstance(exc, ValueError):
        return "domain"
    return "failed"


def _fmt(x):
    return "" if x is None else repr(float(x)) if isinstance(x, float) else str(x)


def format_ratio(log10_ratio):
    if not math.isfinite(log10_ratio):
        return "0" if log10_ratio < 0 else "inf"
    exp = math.floor(log10_ratio)
    mant = 10.0 ** (log10_ratio - exp)
    if mant >= 9.9999999999995:
        mant, exp = 1.0, exp + 1
    return f"{mant:.12g}e{exp:+d}"


def parse_log10(text):
    """log10 of a numeric string, exact for values outside the float range."""
    text = text.strip().lower()
    mant, _, exp = text.partition("e")
    mant = float(mant)
    if mant <= 0:
        return -math.inf
    return math.log10(mant) + (int(exp) if exp else 0)


def make_record(m, method, order, est=None, used=None, wall_ms=0.0, error="", ratio=False):
    used = used or {}
    rec = {c: None for c in COLUMNS}
    rec.update(m=m, method=str(method), order=order, error=error,
               wall_ms=round(wall_ms, 3))
    for key in ("N", "S", "T", "seed"):
        rec[key] = used.get(key)
    if est is not None:
        shift = est.log_max if ratio else 0.0
        rec["log10_G"] = (est.log_value - shift) / _LN10
        rec["ratio"] = format_ratio((est.log_value - est.log_max) / _LN10)
        if est.interval is not None:
            lo, hi = est.interval
            rec["lo_log10"] = (lo - shift) / _LN10
            rec["hi_log10"] = (hi - shift) / _LN10
    return rec


def evaluate(models, methods, orders, ms, args):
    """Compute one record per (m, method, order), ascending m then method."""
    records = []
    tasks = sorted(((m, meth, order) for m in ms for meth in methods for order in orders),
                   key=lambda t: (t[0], _METHOD_ORDER[t[1]], t[2]))
    for m, method, order in tasks:
        start = time.perf_counter()
        try:
            est, used = compute(models, method, order, m, args, args.seed)
            err = ""
        except (ValueError, TypeError, ArithmeticError) as exc:
            est, used, err = None, {}, _error_code(exc)
        wall = (time.perf_counter() - start) * 1e3
        records.append(make_record(m, method, order, est, used, wall, err, args.ratio))
    return records


def render(records, fmt, columns=COLUMNS):
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_fmt(rec.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text, args):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_records(path):
    """Read sweep output (CSV or JSON) back into a list of dicts."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        rows = json.loads(text)
        return [{k: ("" if v is None else str(v)) for k, v in r.items()} for r in rows]
    return list(csv.DictReader(io.StringIO(text)))


def fit_records(rows, m_range, method=None, order=None):
    groups = {}
    for r in rows:
        if r.get("error"):
            continue
        if method and r["method"] != method:
            continue
        if order is not None and int(r["order"]) != order:
            continue
        if not r.get("ratio"):
            continue
        groups.setdefault((r["method"], int(r["order"])), []).append(
            (int(r["m"]), parse_log10(r["ratio"]) * _LN10))
    out = []
    for (meth, order_), pts in sorted(groups.items(),
                                      key=lambda kv: (_METHOD_ORDER[Method(kv[0][0])],
                                                      kv[0][1])):
        ms, ys = zip(*sorted(pts))
        pf = fit_power_law(ms, ys, m_range)
        out.append({"method": meth, "order": order_, "A": pf.A, "B": pf.B,
                    "residual": pf.residual, "points": pf.n_points,
                    "m_min": pf.m_range[0], "m_max": pf.m_range[1],
                    "expression": pf.expression()})
    return out


def _cmd_evaluate(args):
    models = _models(args)
    methods = parse_methods(args.method) if args.method else _COMMAND_METHODS[args.command]
    if args.command != "sweep":
        allowed = set(_COMMAND_METHODS[args.command])
        bad = [m for m in methods if m not in allowed]
        if bad:
            raise UsageError(f"method(s) {', '.join(map(str, bad))} not valid for "
                             f"'{args.command}'")
    if not methods:
        raise UsageError("at least one method is required")
    orders = _parse_orders(args.order, models.default_order)
    if args.command != "sweep" and len(orders) > 1:
        raise UsageError("give a single --order (use 'sweep' for several)")
    records = evaluate(models, methods, orders, _word_lengths(args), args)
    _emit(render(records, args.format), args)
    return 1 if any(r["error"] for r in records) else 0


def _cmd_entropy(args):
    models = _models(args)
    base = parse_base(args.base)
    orders = _parse_orders(args.order, models.default_order)
    rows = []
    for m in _word_lengths(args):
        for order in orders:
            H = entropy(models.model(order) if order < 2 else models.model(2), order, m, base)
            rows.append({"m": m, "order": order, "base": args.base, "entropy": H.value})
    _emit(render(rows, args.format, ["m", "order", "base", "entropy"]), args)
    return 0


def _cmd_stationary(args):
    if not args.digram:
        raise UsageError("stationary needs --digram")
    chain = parse_digram(args.digram)
    p, P = chain.initial, chain.transitions
    residual = float(np.abs(P.T @ p - p).max())
    labels = chain.labels or tuple(str(i) for i in range(chain.n))
    if args.format == "json":
        text = json.dumps({"symbols": list(labels), "probabilities": p.tolist(),
                           "sum": float(p.sum()), "residual": residual}, indent=1) + "\n"
    else:
        rows = [{"symbol": s, "probability": float(v)} for s, v in zip(labels, p)]
        text = render(rows, "csv", ["symbol", "probability"])
        text += f"# sum={float(p.sum())!r} residual={residual!r}\n"
    _emit(text, args)
    return 0


def _cmd_fit(args):
    rows = read_records(args.input)
    lo = args.m_min if args.m_min is not None else 1
    hi = args.m_max if args.m_max is not None else 10**9
    method = str(parse_methods([args.method])[0]) if args.method else None
    order = int(args.order[0]) if args.order else None
    try:
        fits = fit_records(rows, (lo, hi), method, order)
    except ValueError as exc:
        raise UsageError(f"cannot fit: {exc}") from None
    if not fits:
        raise UsageError("no usable rows in the input")
    _emit(render(fits, args.format, FIT_COLUMNS), args)
    return 0


def _add_common(p, models=True, lengths=True):
    if models:
        p.add_argument("--dist", help="probability file (one per line) or uniform:N")
        p.add_argument("--digram", help="digram count file, or 'english' for the bundled table")
    p.add_argument("--order", action="append",
                   help="approximation order 0, 1 or 2 (comma list in sweep)")
    if lengths:
        p.add_argument("--m", type=int, help="word length")
        p.add_argument("--m-min", type=int)
        p.add_argument("--m-max", type=int)
    p.add_argument("--out", help="write output to FILE instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_estimation(p):
    p.add_argument("--method", action="append", help="method name(s), comma separated")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS, help="subranges per symbol N")
    p.add_argument("--normal-bins", type=int, default=10,
                   help="subranges per symbol for normal-binned")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="samples per unit length S")
    p.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES, help="replicates T")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--backend", default="auto", choices=("auto", "full", "convolve", "dp-chain"))
    p.add_argument("--enum-cap", type=float, default=None,
                   help="enumeration cap (default: $GUESSWORK_ENUM_CAP or 1e8)")
    p.add_argument("--jobs", type=int, default=None, help="threads for replicates")
    p.add_argument("--ratio", action="store_true",
                   help="log10 columns hold log10(G / n**m) instead of log10(G)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="guesswork",
        description="Exact and estimated guesswork of words from a language model.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "exact": "full enumeration",
        "quantify": "histogram of all words",
        "sample": "histogram from random words with a 99%% interval",
        "normal": "normal approximations",
        "bounds": "Massey, Arikan and entropy-ansatz comparators",
        "sweep": "several methods and orders over a range of word lengths",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        _add_common(p)
        _add_estimation(p)
        p.set_defaults(func=_cmd_evaluate)
    p = sub.add_parser("entropy", help="word entropy")
    _add_common(p)
    p.add_argument("--base", default="2", help="logarithm base: 2, e or 10")
    p.set_defaults(func=_cmd_entropy)
    p = sub.add_parser("stationary", help="stationary distribution of a digram chain")
    p.add_argument("--digram", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_stationary)
    p = sub.add_parser("fit", help="fit A * B**m * m**(-1/2) to sweep output")
    p.add_argument("--input", required=True, help="CSV or JSON written by sweep")
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--method")
    p.add_argument("--order", action="append")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"guesswork: error: {exc}\n")
    except (OSError, ValueError) as exc:
        parser.exit(2, f"guesswork: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
