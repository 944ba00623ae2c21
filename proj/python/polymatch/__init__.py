"""Stable matching with quotas on both sides and indifferent preferences.

Markets are dicts of the form::

    {"proposers": [{"id": "m1", "quota": 1}, ...],
     "receivers": [{"id": "w1", "quota": 2}, ...],
     "preferences": {"m1": ["w1", ["w2", "w3"]], ...}}

and matchings are lists of ``(proposer, receiver)`` pairs.
"""

import json

from . import _polymatch
from ._polymatch import (
    SCHEMA_VERSION,
    InfeasibleError,
    InputError,
    SizeError,
    evaluator_quota,
    interview_quota,
    is_protected,
    removal_bound,
    synth,
)

__all__ = [
    "SCHEMA_VERSION",
    "InfeasibleError",
    "InputError",
    "SizeError",
    "blocking_pairs",
    "break_ties",
    "college_admission",
    "enumerate_stable_matchings",
    "evaluator_quota",
    "extended_market",
    "gale_shapley",
    "interview_quota",
    "is_protected",
    "is_stable",
    "poly_gs",
    "rank_histogram",
    "removal_bound",
    "run_phase",
    "synth",
    "violations",
]


def _pairs(matching):
    if isinstance(matching, dict):
        matching = matching["pairs"]
    return json.dumps({"pairs": [list(p) for p in matching]})


def _match(algorithm, market, seed, schedule="fifo"):
    out = json.loads(_polymatch.match(algorithm, json.dumps(market), seed, schedule))
    out["pairs"] = [tuple(p) for p in out["pairs"]]
    return out


def poly_gs(market, seed=0, schedule="fifo"):
    """Proposer-side deferred acceptance; returns {"pairs", "seed", "proposalCount", ...}."""
    return _match("polygs", market, seed, schedule)


def gale_shapley(market, seed=0):
    return _match("gs", market, seed)


def college_admission(market, seed=0):
    return _match("college", market, seed)


def break_ties(market, seed):
    return json.loads(_polymatch.break_ties(json.dumps(market), seed))


def extended_market(market):
    return json.loads(_polymatch.extended_market(json.dumps(market)))


def blocking_pairs(market, matching):
    return json.loads(_polymatch.blocking_pairs(json.dumps(market), _pairs(matching)))


def violations(market, matching):
    return _polymatch.violations(json.dumps(market), _pairs(matching))


def is_stable(market, matching):
    return not violations(market, matching) and not blocking_pairs(market, matching)


def enumerate_stable_matchings(market):
    found = json.loads(_polymatch.enumerate_stable_matchings(json.dumps(market)))
    return [[tuple(p) for p in m] for m in found]


def rank_histogram(market, matching, side="proposers", positions=3):
    """CSV text with columns position,rank,count."""
    return _polymatch.rank_histogram(json.dumps(market), _pairs(matching), side, positions)


def run_phase(phase, students, advisors, scores=None, fields=None, seed=0):
    """Runs one pipeline phase on CSV files and returns the report as a dict."""
    paths = [None if p is None else str(p) for p in (scores, fields)]
    return json.loads(_polymatch.run_phase(phase, str(students), str(advisors), *paths, seed))
