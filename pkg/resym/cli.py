"""
cli.py - The `resym` command line.

Results go to stdout as JSON; logs go to stderr. Exit codes: 0 success,
1 malformed input, 2 failed precondition (the JSON lists the failed clauses),
3 search budget exhausted, 4 corpus I/O error, 5 invariant violation or
corpus mismatch.
"""

import functools
import json
import logging
import sys
from typing import Optional

import click

from resym.arith import is_prime, legendre_symbol, sqrt_mod
from resym.cache import default_cache
from resym.config import load_settings
from resym.errors import InvalidInputError, InvariantViolation, PreconditionError, ResymError
from resym.exporter import save_csv, save_json_report, write_corpus
from resym.magnus import fox_mu2, magnus as magnus_expand, milnor_invariant, mu2, parse_word
from resym.nilgroup import verify_n4_presentation, verify_tau_action
from resym.redei import redei_symbol, redei_to_record
from resym.report_builder import build_corpus_report
from resym.scan import run_scan, verify_corpus
from resym.symbol4 import compositum_crosscheck, symbol4, symbol_to_record

logger = logging.getLogger(__name__)


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, sort_keys=True))


def _parse_int(text: str, name: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise InvalidInputError(f"{name} must be a decimal integer, got {text!r}")


def handle_errors(fn):
    """Map ResymError to its exit code; precondition failures also print the clause list."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PreconditionError as e:
            _emit({"error": "precondition", "failed": e.failed})
            click.echo(str(e), err=True)
            sys.exit(e.exit_code)
        except InvariantViolation as e:
            click.echo(f"invariant violation: {e}", err=True)
            click.echo(json.dumps(e.dump, default=str), err=True)
            sys.exit(e.exit_code)
        except ResymError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(e.exit_code)

    return wrapper


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool):
    """Legendre, Redei and 4-th multiple residue symbols with certificates."""
    level = "DEBUG" if verbose else load_settings().log_level
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


# ---- Symbols ----

@cli.command()
@click.argument("a")
@click.argument("p")
@handle_errors
def legendre(a: str, p: str):
    """(a/p) for an odd prime p."""
    a_, p_ = _parse_int(a, "a"), _parse_int(p, "p")
    if p_ < 3 or p_ % 2 == 0 or not is_prime(p_):
        raise PreconditionError(["p odd prime"])
    value = legendre_symbol(a_, p_)
    root = sqrt_mod(a_, p_)
    _emit({"symbol": value,
           "certificate": {"a": str(a_), "p": str(p_),
                           "euler": str(pow(a_ % p_, (p_ - 1) // 2, p_)),
                           "sqrt": None if root is None else str(root)}})


@cli.command()
@click.argument("p1")
@click.argument("p2")
@click.argument("p3")
@handle_errors
def redei(p1: str, p2: str, p3: str):
    """The triple symbol [p1, p2, p3]."""
    primes = [_parse_int(v, n) for v, n in ((p1, "p1"), (p2, "p2"), (p3, "p3"))]
    settings = load_settings()
    res = redei_symbol(*primes, budget=settings.rational_budget, cache=default_cache())
    _emit({"symbol": res.value, "certificate": redei_to_record(res).model_dump()})


@cli.command()
@click.argument("p1")
@click.argument("p2")
@click.argument("p3")
@click.argument("p4")
@click.option("--crosscheck", type=int, default=0, show_default=True,
              help="Auxiliary primes for the compositum cross-check.")
@handle_errors
def quad(p1: str, p2: str, p3: str, p4: str, crosscheck: int):
    """The 4-th multiple residue symbol [p1, p2, p3, p4]."""
    primes = [_parse_int(v, n) for v, n in ((p1, "p1"), (p2, "p2"), (p3, "p3"), (p4, "p4"))]
    settings = load_settings()
    res = symbol4(*primes, rational_budget=settings.rational_budget,
                  relative_budget=settings.relative_budget, cache=default_cache())
    if crosscheck and not compositum_crosscheck(res.certificate, crosscheck):
        raise InvariantViolation("compositum cross-check failed", dump={"primes": primes})
    _emit({"symbol": res.value, "certificate": symbol_to_record(res).model_dump()})


# ---- Corpora ----

@cli.command()
@click.option("--kind", type=click.Choice(["triple", "quad"]), required=True)
@click.option("--bound", type=int, required=True, help="All primes below this bound.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--p1", "head", type=int, default=None, help="Fix the first prime.")
@click.option("--primes", default=None, help="Comma-separated pool restricting the search.")
@click.option("--limit", type=int, default=None, help="Stop after this many admissible tuples.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write the corpus here instead of stdout.")
@click.option("--progress/--no-progress", default=False)
@handle_errors
def scan(kind: str, bound: int, jobs: int, head: Optional[int], primes: Optional[str],
         limit: Optional[int], output: Optional[str], progress: bool):
    """Emit one JSON line per admissible tuple with its symbol and certificate."""
    pool = None
    if primes:
        pool = [_parse_int(p, "primes") for p in primes.split(",") if p.strip()]
    lines = run_scan(kind, bound, jobs=jobs, p1=head, limit=limit, primes=pool, progress=progress)
    if output is None:
        count = write_corpus(lines, sys.stdout)
    else:
        with open(output, "w", encoding="utf-8") as f:
            count = write_corpus(lines, f)
    logger.info("scan wrote %d lines", count)


@cli.command("verify-corpus")
@click.argument("path")
@click.option("--aux-primes", type=int, default=None, help="Overrides RESYM_AUX_PRIMES.")
@click.option("--csv", "csv_name", default=None, help="Also save the outcomes to a timestamped CSV.")
@handle_errors
def verify_corpus_cmd(path: str, aux_primes: Optional[int], csv_name: Optional[str]):
    """Recompute every corpus line and check reciprocity and shuffle relations."""
    outcomes = verify_corpus(path, aux_primes=aux_primes)
    bad = [o for o in outcomes if not o.ok]
    for o in bad:
        click.echo(f"line {o.line_no}: {o.detail}", err=True)
    if csv_name:
        save_csv(outcomes, csv_name, source=path)
    _emit({"lines": len(outcomes), "ok": len(outcomes) - len(bad), "failed": len(bad)})
    if bad:
        sys.exit(InvariantViolation.exit_code)


@cli.command()
@click.argument("path")
@click.option("--save", "save_name", default=None, help="Also save the report as timestamped JSON.")
@handle_errors
def report(path: str, save_name: Optional[str]):
    """Counts, symbol distribution, reciprocity and shuffle summaries of a corpus."""
    _, summary = build_corpus_report(path)
    if save_name:
        save_json_report(summary, save_name, source=path)
    click.echo(json.dumps(summary, indent=2, default=str))


# ---- Magnus / group ----

@cli.group()
def magnus():
    """Mod 2 Magnus expansion and Fox calculus."""


@magnus.command("expand")
@click.argument("word")
@click.option("--deg", type=int, default=3, show_default=True)
@handle_errors
def magnus_expand_cmd(word: str, deg: int):
    """Monomials with coefficient 1 in M2(word), up to degree --deg."""
    click.echo(str(magnus_expand(parse_word(word), deg)))


@magnus.command("mu")
@click.argument("word")
@click.option("--index", "index", required=True, help="Multi-index such as 123.")
@click.option("--e-s", "e_s", type=int, default=None,
              help="Reduce modulo the indeterminacy ideal for this e_S.")
@handle_errors
def magnus_mu_cmd(word: str, index: str, e_s: Optional[int]):
    """mu2(I; word) by the Magnus expansion and by Fox derivatives."""
    if not index.isdigit() or "0" in index:
        raise InvalidInputError(f"index must be digits 1-9, got {index!r}")
    I = tuple(int(c) for c in index)
    w = parse_word(word)
    payload = {"index": index, "mu2": mu2(I, w), "fox": fox_mu2(I, w)}
    if e_s is not None:
        payload["milnor"] = milnor_invariant(I, w, e_s)
    _emit(payload)


@cli.group()
def group():
    """The unipotent group N4(F2)."""


@group.command("check-n4")
@click.option("--tau", is_flag=True, help="Also check the Galois action on the radicals.")
@handle_errors
def check_n4(tau: bool):
    """Relations and order of the matrix generators."""
    rep = verify_n4_presentation()
    click.echo(rep.summary())
    ok = rep.ok
    if tau:
        tau_rep = verify_tau_action()
        click.echo(f"tau action: {tau_rep.summary()}, homomorphism {'OK' if tau_rep.homomorphism else 'FAILED'}")
        ok = ok and tau_rep.ok
    if not ok:
        sys.exit(InvariantViolation.exit_code)


def main(argv=None):
    """Console entry; usage errors exit 1."""
    try:
        rv = cli.main(args=argv, prog_name="resym", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except click.ClickException as e:
        e.show()
        sys.exit(e.exit_code)
    sys.exit(rv if isinstance(rv, int) else 0)
