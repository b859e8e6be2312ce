"""Command-line front end.

Exit codes: 0 success, 2 some verdict stayed indeterminate at the working
precision, 1 error (bad input, shape violations, certified violations of a
claim that must hold).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .bounds import (
    HypothesisViolation,
    KappaParams,
    ShapeError,
    cubic_chain_check,
    effective_exponents,
    kappa_from_theta,
    kappa_upper_ineffective,
    load_config,
    verify_lemma33,
)
from .embeddings import LABEL_CONVENTION, AlgebraicNumber, PrecisionExhausted, SigmaSet, compute_embeddings
from .intervals import Verdict
from .lattice import lemma21_matrix
from .measures import InconsistencyError, disc_product_identity, mahler_measure, separation_product, verify_trivial_chain
from .moebius import ReductionBoundParams, UnimodularMatrix, check_reduction_bound, reduce_class
from .polynomial import PolynomialError, discriminant, normalize
from .witnesses import estimate_kappa, family_ad, family_aq, fit_exponent, growth_exponent, records_to_csv

SCHEMA = "conjsep-records/1"
PRECISION_ENV = "CONJSEP_PRECISION"

log = logging.getLogger("conjsep")


class CliError(Exception):
    pass


# -- parsing helpers -----------------------------------------------------------


def parse_poly(text: str):
    try:
        values = json.loads(text)
    except json.JSONDecodeError:
        raise CliError(f"malformed polynomial {text!r}; expected an ascending list such as [-2,0,0,1]") from None
    if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise CliError(f"polynomial must be a list of integers, got {text!r}")
    if len(values) < 2:
        raise CliError("a polynomial needs at least two coefficients")
    return normalize(values)


def parse_ladder(text: str, integer: bool = False) -> List[Fraction]:
    """``start:stop:xF`` (geometric), ``start:stop:+S`` (arithmetic) or a comma list."""
    text = text.strip()
    conv = (lambda s: int(Fraction(s))) if integer else (lambda s: Fraction(s))
    try:
        if ":" not in text:
            return [conv(t) for t in text.split(",") if t.strip()]
        start, stop, step = text.split(":")
        start, stop = Fraction(start), Fraction(stop)
        out = []
        if step.startswith("x"):
            factor = Fraction(step[1:])
            if factor <= 1:
                raise CliError("a geometric ladder needs a factor above 1")
            v = start
            while v <= stop:
                out.append(v)
                v *= factor
        elif step.startswith("+"):
            inc = Fraction(step[1:])
            if inc <= 0:
                raise CliError("an arithmetic ladder needs a positive step")
            v = start
            while v <= stop:
                out.append(v)
                v += inc
        else:
            raise CliError(f"ladder step {step!r} must start with 'x' or '+'")
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"malformed ladder {text!r}: {exc}") from None
    return [conv(str(v)) if integer else v for v in out]


def _default_precision():
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 128
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{PRECISION_ENV}={raw!r} is not an integer") from None


def _sigma(args, r, default_full=True):
    if args.sigma is None:
        if default_full:
            return SigmaSet.full(r)
        raise CliError("--sigma is required")
    try:
        return SigmaSet.parse(args.sigma).check(r)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _seed(args):
    poly = parse_poly(args.poly)
    return AlgebraicNumber(compute_embeddings(poly, args.precision))


def _real_label(args, emb):
    if args.real_label is not None:
        if not emb.is_real(args.real_label):
            raise CliError(f"label {args.real_label} is not a real conjugate")
        return args.real_label
    reals = emb.real_labels()
    if not reals:
        raise CliError("this construction needs a real conjugate; the polynomial has none")
    return reals[0]


# -- results -------------------------------------------------------------------


class Result:
    def __init__(self, payload, verdict: Optional[Verdict] = None, csv_text: Optional[str] = None,
                 must_hold: bool = False):
        self.payload = payload
        self.verdict = verdict
        self.csv_text = csv_text
        self.must_hold = must_hold


def _base(args, command):
    out = {"schema": SCHEMA, "command": command, "tool_version": __version__,
           "precision_bits": args.precision, "label_convention": LABEL_CONVENTION}
    if getattr(args, "poly", None):
        out["poly"] = list(parse_poly(args.poly).coeffs)
    return out


# -- commands ------------------------------------------------------------------


def cmd_measure(args):
    seed = _seed(args)
    out = _base(args, "measure")
    out["signature"] = list(seed.embset.signature)
    out["M"] = mahler_measure(seed.embset).to_json()
    if args.embeddings:
        out["embeddings"] = seed.embset.to_json()
    return Result(out)


def cmd_disc(args):
    poly = parse_poly(args.poly)
    D = discriminant(poly, "sylvester")
    D2 = discriminant(poly, "subresultant")
    if D != D2:
        raise InconsistencyError(f"resultant routes disagree: {D} vs {D2}")
    out = _base(args, "disc")
    out["D"] = D
    out["routes_agree"] = True
    if poly.degree >= 2:
        out["identity"] = disc_product_identity(compute_embeddings(poly, args.precision), D).to_json()
    return Result(out)


def cmd_sep(args):
    seed = _seed(args)
    sigma = _sigma(args, seed.degree, default_full=False)
    out = _base(args, "sep")
    out["sigma"] = list(sigma.indices)
    out["S"] = separation_product(seed.embset, sigma).to_json()
    return Result(out)


def cmd_chain13(args):
    seed = _seed(args)
    sigma = _sigma(args, seed.degree)
    rep = verify_trivial_chain(seed.embset, sigma)
    out = _base(args, "chain-13")
    out["report"] = rep.to_json()
    return Result(out, rep.verdict, must_hold=True)


def cmd_cubic(args):
    seed = _seed(args)
    sigma = _sigma(args, seed.degree, default_full=False) if args.sigma else None
    rep = cubic_chain_check(seed.embset, sigma)
    out = _base(args, "cubic-chain")
    out["report"] = rep.to_json()
    return Result(out, rep.verdict, must_hold=True)


def cmd_reduce(args):
    seed = _seed(args)
    res = reduce_class(seed, step_budget=args.steps)
    D = discriminant(seed.poly)
    out = _base(args, "reduce")
    out.update(
        matrix=res.matrix.to_json(),
        reduced_poly=list(res.number.poly.coeffs),
        reduced_label=res.number.label,
        M_start=res.M_start.to_json(),
        M=res.M.to_json(),
        D=D,
        D_reduced=discriminant(res.number.poly),
        exhausted=res.exhausted,
        trace=res.trace,
        note="a reduced representative need not be unique",
    )
    if args.config:
        cfg = load_config(args.config)
        if "A" in cfg and "a_exp" in cfg:
            out["bound"] = check_reduction_bound(res, D, ReductionBoundParams(cfg["A"], cfg["a_exp"])).to_json()
    return Result(out)


def cmd_lemma21(args):
    seed = _seed(args)
    label = _real_label(args, seed.embset)
    ladder = parse_ladder(args.q_ladder)
    reports = []
    rows = [("Q", "inequality", "verdict", "margin")]
    for Q in ladder:
        _, rep = lemma21_matrix(seed.embset, label, Q, Fraction(args.delta))
        reports.append(rep.to_json())
        rows.extend(rep.rows())
    out = _base(args, "lemma21")
    out.update(real_label=label, delta=args.delta, q_ladder=[str(q) for q in ladder], reports=reports)
    csv_text = "".join(",".join(str(c) for c in row) + "\n" for row in rows)
    return Result(out, csv_text=csv_text)


def _fit_json(records, fitter):
    try:
        return fitter(records).to_json()
    except ValueError as exc:
        return {"error": str(exc)}


def cmd_witness_ad(args):
    seed = _seed(args)
    sigma = _sigma(args, seed.degree)
    ladder = parse_ladder(args.d_ladder, integer=True)
    batch = family_ad(seed, ladder, sigma, jobs=args.jobs)
    out = _base(args, "witness-ad")
    out.update(sigma=list(sigma.indices), d_ladder=ladder, records=[r.to_json() for r in batch],
               skipped=[[str(p), msg] for p, msg in batch.skipped], fit=_fit_json(batch, fit_exponent))
    return Result(out, csv_text=records_to_csv(batch))


def cmd_witness_aq(args):
    seed = _seed(args)
    label = _real_label(args, seed.embset)
    ladder = parse_ladder(args.q_ladder)
    sigma = SigmaSet.parse(args.sigma) if args.sigma else None
    try:
        batch = family_aq(seed, label, ladder, Fraction(args.delta), sigma, jobs=args.jobs)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = _base(args, "witness-aq")
    out.update(real_label=label, delta=args.delta, eps=str(Fraction(args.delta) / 7),
               q_ladder=[str(q) for q in ladder], records=[r.to_json() for r in batch],
               skipped=[[str(p), msg] for p, msg in batch.skipped],
               fit=_fit_json(batch, fit_exponent), growth=_fit_json(batch, growth_exponent))
    if not batch:
        out["diagnostic"] = "no ladder point passed the window inequalities"
    return Result(out, csv_text=records_to_csv(batch))


def cmd_check33(args):
    seed = _seed(args)
    sigma = _sigma(args, seed.degree, default_full=False)
    if args.matrix:
        m = UnimodularMatrix.parse(args.matrix)
        source = "user"
    else:
        m = reduce_class(seed).matrix
        source = "class reduction"
    rep = verify_lemma33(seed.embset, m, sigma)
    out = _base(args, "check-33")
    out.update(matrix=m.to_json(), matrix_source=source, report=rep.to_json())
    return Result(out, rep.verdict, must_hold=True)


def cmd_kappa(args):
    out = _base(args, "kappa")
    if args.poly:
        seed_poly = parse_poly(args.poly)
        r = seed_poly.degree
        sigma = _sigma(args, r, default_full=False)
        budget = {"d_ladder": parse_ladder(args.d_ladder, integer=True), "q_ladder": parse_ladder(args.q_ladder),
                  "delta": Fraction(args.delta)}
        out["estimate"] = estimate_kappa(seed_poly, sigma, "auto", budget, args.precision)
        return Result(out)
    if args.r is None or args.sigma_size is None:
        raise CliError("kappa needs either --poly with --sigma, or --r with --sigma-size")
    cfg = load_config(args.config) if args.config else {}
    r, s = args.r, args.sigma_size
    out.update(r=r, sigma_size=s, formula=args.formula)
    if args.formula == "ineffective":
        val = kappa_upper_ineffective(r, s)
        out.update(kappa_upper=str(val), expression=f"{r - 1} - {(r - s) ** 2}/{135 * r}")
    elif args.formula == "theta":
        a_exp = cfg.get("a_exp", Fraction(args.a_exp) if args.a_exp else Fraction(21, r - 1))
        theta, kappa = kappa_from_theta(KappaParams(r, s, a_exp))
        out.update(a_exp=str(a_exp), u=str(KappaParams(r, s, a_exp).u), theta=str(theta), kappa=str(kappa))
    else:
        disc_k = args.disc_k if args.disc_k is not None else cfg.get("field_disc_abs")
        if disc_k is None:
            raise CliError("the effective formula needs --disc-k or field_disc_abs in --config")
        consts = {k: v for k, v in cfg.items() if k.startswith("c") and k[1:].isdigit()}
        params = KappaParams(r, s, cfg.get("a_exp", Fraction(1)), int(disc_k), consts)
        eff = effective_exponents(params)
        out["effective"] = {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in eff.items()}
    return Result(out)


def cmd_replay(args):
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return main(manifest["argv"], _replay=True)


COMMANDS = {
    "measure": cmd_measure,
    "disc": cmd_disc,
    "sep": cmd_sep,
    "reduce": cmd_reduce,
    "lemma21": cmd_lemma21,
    "witness-ad": cmd_witness_ad,
    "witness-aq": cmd_witness_aq,
    "check-33": cmd_check33,
    "kappa": cmd_kappa,
    "chain-13": cmd_chain13,
    "cubic-chain": cmd_cubic,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="ascending integer coefficients, e.g. [-2,0,0,1]")
    common.add_argument("--sigma", help="comma list of conjugate labels, e.g. 1,2")
    common.add_argument("--precision", type=int, default=None, help=f"bits (default 128 or ${PRECISION_ENV})")
    common.add_argument("--q-ladder", default="1e2:1e8:x10")
    common.add_argument("--d-ladder", default="2:16384:x2")
    common.add_argument("--delta", default="3/10")
    common.add_argument("--real-label", type=int, default=None)
    common.add_argument("--config", help="key=value file with constants (A, a_exp, c1..c8, field_disc_abs)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for record generation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="conjsep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("measure", parents=[common], help="certified Mahler measure").add_argument(
        "--embeddings", action="store_true", help="include the certified enclosures")
    sub.add_parser("disc", parents=[common], help="exact discriminant and product cross-check")
    sub.add_parser("sep", parents=[common], help="separation product over sigma")
    sub.add_parser("reduce", parents=[common], help="greedy Mahler-measure descent in the class").add_argument(
        "--steps", type=int, default=200)
    sub.add_parser("lemma21", parents=[common], help="adapted-basis matrices along a Q ladder")
    sub.add_parser("witness-ad", parents=[common], help="family 1/(x+d)")
    sub.add_parser("witness-aq", parents=[common], help="adapted-basis family along a Q ladder")
    sub.add_parser("check-33", parents=[common], help="improved separation bound").add_argument(
        "--matrix", help="a,b,c,d; default: the matrix found by class reduction")
    kp = sub.add_parser("kappa", parents=[common], help="exponent bounds and estimates")
    kp.add_argument("--r", type=int)
    kp.add_argument("--sigma-size", type=int)
    kp.add_argument("--formula", choices=["ineffective", "theta", "effective"], default="ineffective")
    kp.add_argument("--a-exp")
    kp.add_argument("--disc-k", type=int)
    sub.add_parser("chain-13", parents=[common], help="elementary lower-bound chain")
    sub.add_parser("cubic-chain", parents=[common], help="cubic mixed-pair chain")
    sub.add_parser("replay", help="re-run a manifest").add_argument("manifest")
    return parser


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv: Optional[List[str]] = None, _replay: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        try:
            return cmd_replay(args)
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            print(f"error: cannot replay manifest: {exc}", file=sys.stderr)
            return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.precision is None:
            args.precision = _default_precision()
        if args.precision < 32:
            raise CliError("--precision must be at least 32 bits")
        result = COMMANDS[args.command](args)
    except (CliError, PolynomialError, ShapeError, HypothesisViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InconsistencyError, PrecisionExhausted) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.fmt == "csv":
        if result.csv_text is None:
            print(f"error: {args.command} has no CSV form", file=sys.stderr)
            return 1
        text = result.csv_text
    else:
        text = json.dumps(result.payload, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    manifest_path = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if manifest_path and not _replay:
        manifest = {
            "schema": SCHEMA,
            "tool_version": __version__,
            "command": args.command,
            "argv": argv,
            "poly": args.poly,
            "sigma": args.sigma,
            "precision_bits": args.precision,
            "q_ladder": args.q_ladder,
            "d_ladder": args.d_ladder,
            "delta": args.delta,
            "eps_rule": "eps = delta/7",
            "label_convention": LABEL_CONVENTION,
            # wall-clock data lives only here, never in the records
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        _write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    if result.verdict is Verdict.INDETERMINATE:
        return 2
    if result.verdict is Verdict.FAILS and result.must_hold:
        print("error: a claim that must hold was certified false", file=sys.stderr)
        return 1
    return 0
