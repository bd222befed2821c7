"""JSON interchange for priors and mechanisms.

Distribution files carry either dense probabilities

    {"n": 3, "alphabet": 2, "probs": [...]}

or a named generator

    {"generator": "twins" | "product" | "parity" | "ising_tree",
     "params": {...}}

Mechanisms use {"kind": "profile", "n": ..., "alphabet": ..., "m": [...]},
{"kind": "table", "n": ..., "alphabet": ..., "table": [[...]]} or
{"kind": "max_biased", "z": 0|1}, the last needing a budget to
materialize.  Field names are part of the CLI contract.
"""

from __future__ import annotations

import json
from typing import Optional, Tuple, Union

import numpy as np

from . import dist as dist_mod
from .dist import DEFAULT_CAP, JointDistribution
from .errors import ParseError
from .ising import IsingTreeModel, ising_tree_distribution
from .mechanism import EventProfile, OutcomeTable, PrivacyBudget, max_biased_profile


def load_distribution(
    path: str, cap: int = DEFAULT_CAP
) -> Tuple[JointDistribution, Optional[IsingTreeModel]]:
    """Read a distribution file; also returns the tree model when the
    file used the ising_tree generator, since some methods need it."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read distribution file {path}: {exc}") from exc
    return distribution_from_obj(obj, cap=cap)


def distribution_from_obj(
    obj: dict, cap: int = DEFAULT_CAP
) -> Tuple[JointDistribution, Optional[IsingTreeModel]]:
    if not isinstance(obj, dict):
        raise ParseError("distribution file must hold a JSON object")
    if "generator" in obj:
        name = obj["generator"]
        params = obj.get("params", {})
        try:
            if name == "twins":
                return dist_mod.perfectly_correlated(
                    int(params["n"]), float(params["p_one"]), cap=cap
                ), None
            if name == "product":
                return dist_mod.product(params["marginals"], cap=cap), None
            if name == "parity":
                return dist_mod.parity_constrained(
                    int(params["r"]), int(params["s"]), cap=cap
                ), None
            if name == "ising_tree":
                model = IsingTreeModel(
                    d=int(params["d"]),
                    depth=int(params["depth"]),
                    J=float(params["J"]),
                    h0=float(params.get("h0", 0.0)),
                )
                return ising_tree_distribution(model, cap=cap), model
        except KeyError as exc:
            raise ParseError(f"generator {name} missing parameter {exc}") from exc
        raise ParseError(f"unknown generator {name!r}")
    try:
        return (
            dist_mod.from_dense(
                int(obj["n"]), int(obj["alphabet"]), obj["probs"], cap=cap
            ),
            None,
        )
    except KeyError as exc:
        raise ParseError(f"distribution object missing field {exc}") from exc


def load_mechanism(
    path: str,
    n: int,
    alphabet: int,
    budget: Optional[PrivacyBudget] = None,
) -> Union[EventProfile, OutcomeTable]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read mechanism file {path}: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("mechanism file must hold an object with a 'kind'")
    kind = obj["kind"]
    if kind == "profile":
        return EventProfile(
            n=int(obj.get("n", n)),
            alphabet_size=int(obj.get("alphabet", alphabet)),
            values=np.asarray(obj["m"], dtype=np.float64),
        )
    if kind == "table":
        return OutcomeTable(
            n=int(obj.get("n", n)),
            alphabet_size=int(obj.get("alphabet", alphabet)),
            table=np.asarray(obj["table"], dtype=np.float64),
        )
    if kind == "max_biased":
        if budget is None:
            raise ParseError("max_biased mechanism needs a budget (--eps)")
        return max_biased_profile(n, budget, int(obj["z"]))
    raise ParseError(f"unknown mechanism kind {kind!r}")


def profile_to_obj(profile: EventProfile) -> dict:
    return {
        "kind": "profile",
        "n": profile.n,
        "alphabet": profile.alphabet_size,
        "m": [float(v) for v in profile.values],
    }


def save_mechanism(path: str, profile: EventProfile) -> None:
    with open(path, "w") as fh:
        json.dump(profile_to_obj(profile), fh, indent=2, sort_keys=True)
        fh.write("\n")
