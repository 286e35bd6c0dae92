"""Paths, loaders, and case tables shared by the test modules.

The corpus lives in `corpus/` at the repository root; hand-transcribed
expected outputs live in `tests/golden/`.  Everything here is a thin wrapper
over the library's own loading entry points so the tests exercise the same
code path as the command line.
"""

import pathlib

from snipe_lite.cli import prelude_sources
from snipe_lite.pipeline import load_problem
from snipe_lite.syntax import parse_program

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"


def corpus_path(rel: str) -> str:
    return str(CORPUS / rel)


def read_corpus(rel: str) -> str:
    return (CORPUS / rel).read_text(encoding="utf-8")


def read_golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


def parse_sources(*texts: str, prelude: bool = True):
    """Parse sources in order into one shared program/environment."""
    prog = parse_program("")
    if prelude:
        for text in prelude_sources():
            prog = parse_program(text, prog)
    for text in texts:
        prog = parse_program(text, prog)
    return prog


def load_case(goal_rel: str, decls=(), model=None, validate=False):
    """Build a Problem the way the CLI does: prelude, declaration files,
    then the goal file."""
    sources = prelude_sources()
    sources += [read_corpus(r) for r in decls]
    sources.append(read_corpus(goal_rel))
    return load_problem(sources, model=model, validate=validate)


# Declaration files each corpus goal needs, in load order.
EMBED_DECLS = ("embeddings/nat_to_Z.v", "embeddings/int_to_Z.v")

DECLS = {
    "intervals/empty_inv.v": ("intervals/decls.v",),
    "intervals/equiv_empty_nil.v": ("intervals/decls.v",),
    "intervals/monoton_nil.v": ("intervals/decls.v",),
    "intervals/monoton_cons.v": ("intervals/decls.v",),
    "debruijn/shift_add_var.v": ("debruijn/decls.v",),
    "debruijn/shift_add_app.v": ("debruijn/decls.v",),
    "debruijn/shift_add_abs.v": ("debruijn/decls.v",),
    "lists/length_rev_app_cons.v": ("lists/listfun.v",),
    "lists/nth_default_some.v": ("lists/listfun.v",),
    "fol/mono_pair.v": (),
    "indu/ssssev_ev.v": ("indu/rel_decls.v",),
    "trakt/quantified_pred.v": EMBED_DECLS,
    "trakt/fun_two_args.v": EMBED_DECLS,
    "trakt/bool_eq_target.v": EMBED_DECLS,
    "trakt/nat_fun_guard.v": EMBED_DECLS,
    "trakt/ring_conversion.v": EMBED_DECLS,
    "trakt/congr_pred.v": EMBED_DECLS,
    "goals/trivial_true.v": (),
    "goals/off_by_one.v": (),
}

# Goals whose fully preprocessed form is pinned as an SMT-LIB golden file.
SMT_GOLDEN_CASES = [
    ("empty_inv", "intervals/empty_inv.v"),
    ("equiv_empty_nil", "intervals/equiv_empty_nil.v"),
    ("monoton_nil", "intervals/monoton_nil.v"),
    ("monoton_cons", "intervals/monoton_cons.v"),
    ("shift_add_var", "debruijn/shift_add_var.v"),
    ("shift_add_app", "debruijn/shift_add_app.v"),
    ("shift_add_abs", "debruijn/shift_add_abs.v"),
    ("length_rev_app_cons", "lists/length_rev_app_cons.v"),
]

# Knowledge-base translation cases and the logic each one targets.
TRAKT_CASES = [
    ("trakt/quantified_pred.v", "Prop"),
    ("trakt/fun_two_args.v", "Prop"),
    ("trakt/bool_eq_target.v", "Bool"),
    ("trakt/nat_fun_guard.v", "Prop"),
    ("trakt/ring_conversion.v", "Bool"),
    ("trakt/congr_pred.v", "Prop"),
]

# Strategy runs whose generated statements the oracle sweep must validate.
# Inversion principles for Z-indexed relations quantify over witness tuples the
# finite oracle cannot search at useful sizes, so inversion coverage comes from
# the nat-indexed relation corpus; the full strategy never inverts them anyway.
SWEEP_CASES = [
    ("intervals/empty_inv.v", ("scope",)),
    ("intervals/equiv_empty_nil.v", ("scope",)),
    ("intervals/monoton_nil.v", ("scope",)),
    ("intervals/monoton_cons.v", ("scope",)),
    ("debruijn/shift_add_var.v", ("scope",)),
    ("debruijn/shift_add_app.v", ("scope",)),
    ("debruijn/shift_add_abs.v", ("scope",)),
    ("lists/length_rev_app_cons.v", ("scope",)),
    ("lists/nth_default_some.v", ("scope", "fol")),
    ("fol/mono_pair.v", ("scope", "fol")),
    ("indu/ssssev_ev.v", ("scope", "indu")),
    ("trakt/quantified_pred.v", ("scope",)),
    ("trakt/fun_two_args.v", ("scope",)),
    ("trakt/bool_eq_target.v", ("scope",)),
    ("trakt/nat_fun_guard.v", ("scope",)),
    ("trakt/ring_conversion.v", ("scope",)),
    ("trakt/congr_pred.v", ("scope",)),
    ("goals/trivial_true.v", ("scope",)),
    ("goals/off_by_one.v", ("scope",)),
]
