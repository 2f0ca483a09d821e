"""Report payload builders and deterministic text renderers.

Payloads are plain dicts (JSON-ready) with a ``schema: 1`` version marker;
they are the one wire format shared by the HTTP service and the CLI, so
rendered bytes are identical no matter which transport produced them.
Rationals are rendered exactly (``23/2``); arbitrary-precision integers
travel as decimal strings.  CSV output uses ``\n`` line endings and ends
with a trailing newline.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .audit import (
    AcTable,
    Constants,
    DivergenceCertificate,
    Lemma1Report,
    Lemma2Report,
    WitnessReport,
)
from .cayley import Ball, GeneratingSet
from .group import GroupElement

SCHEMA = 1


def element_payload(g: Optional[GroupElement]) -> Optional[dict]:
    if g is None:
        return None
    return {"f": {"num": str(g.f.num), "exp": g.f.exp}, "c": g.c}


def _frac(x) -> str:
    return str(Fraction(x))


def constants_payload(C: GeneratingSet, K: Constants, j_star: int) -> dict:
    return {
        "schema": SCHEMA,
        "p": C.p,
        "generators": [element_payload(g) for g in C.gens],
        "c": K.c,
        "ell": K.ell,
        "eps": K.eps,
        "f_star_abs": _frac(K.f_star_abs),
        "f_star_gen": element_payload(C.gens[C.f_star_gen]),
        "f_dstar": str(K.f_dstar),
        "kappa": _frac(K.kappa),
        "kappa_at": K.kappa_at,
        "M": _frac(K.M),
        "j_star": j_star,
    }


def ball_payload(B: Ball) -> dict:
    rows = [
        [str(k[0]), k[1], k[2], B.lengths[k]]
        for k in B.sorted_keys()
    ]
    return {
        "schema": SCHEMA,
        "p": B.gset.p,
        "n": B.radius,
        "size": len(B),
        "rows": rows,
    }


def word_length_payload(
    g: GroupElement, max_r: int, length: Optional[int], p: int
) -> dict:
    return {
        "schema": SCHEMA,
        "p": p,
        "element": element_payload(g),
        "max_r": max_r,
        "status": "found" if length is not None else "not-found",
        "length": length,
    }


def ac_table_payload(table: AcTable, p: int) -> dict:
    rows = []
    for row in table.rows:
        g, h = (row.witness if row.witness is not None else (None, None))
        rows.append(
            {
                "n": row.n,
                "k": row.k,
                "N": row.N,
                "max_pair_distance": row.max_pair_distance,
                "witness_g": element_payload(g),
                "witness_h": element_payload(h),
            }
        )
    return {
        "schema": SCHEMA,
        "p": p,
        "k": table.k,
        "n_max": table.n_max,
        "truncated": table.truncated,
        "completed_radius": table.completed_radius,
        "rows": rows,
    }


def lemma1_payload(rep: Lemma1Report) -> dict:
    return {
        "schema": SCHEMA,
        "p": rep.p,
        "n": rep.n,
        "M": _frac(rep.M),
        "checked": rep.checked,
        "ok": rep.ok,
        "violations": [
            {
                "element": element_payload(v["element"]),
                "kind": v["kind"],
                "value": v["value"],
            }
            for v in rep.violations
        ],
        "max_ratio_dichotomy": rep.max_ratio_dichotomy,
        "max_ratio_joint": rep.max_ratio_joint,
        "worst_dichotomy": element_payload(rep.worst_dichotomy),
        "worst_joint": element_payload(rep.worst_joint),
    }


def lemma2_payload(rep: Lemma2Report) -> dict:
    return {
        "schema": SCHEMA,
        "p": rep.p,
        "r": rep.r,
        "ball_radius": rep.ball_radius,
        "M": _frac(rep.M),
        "pairs_checked": rep.pairs_checked,
        "ok": rep.ok,
        "violations": [
            {
                "pair": [element_payload(v["pair"][0]), element_payload(v["pair"][1])],
                "kind": v["kind"],
                "value": v["value"],
            }
            for v in rep.violations
        ],
        "max_ratio_abs": rep.max_ratio_abs,
        "max_ratio_denom": rep.max_ratio_denom,
        "worst_pair": (
            None
            if rep.worst_pair is None
            else [element_payload(rep.worst_pair[0]), element_payload(rep.worst_pair[1])]
        ),
    }


def divergence_payload(cert: DivergenceCertificate) -> dict:
    return {
        "j_star": cert.j_star,
        "k_max": cert.k_max,
        "monotone": cert.monotone,
        "all_ok": cert.all_ok,
        "rows": [
            {
                "k": r.k,
                "reduction_ok": r.reduction_ok,
                "abs_branch_ok": r.abs_branch_ok,
                "denom_branch_ok": r.denom_branch_ok,
                "lower_bound": r.lower_bound,
            }
            for r in cert.rows
        ],
    }


def witness_payload(
    rep: WitnessReport, C: GeneratingSet, cert: DivergenceCertificate
) -> dict:
    W = rep.family
    lb = None
    if rep.lower_bound is not None:
        lb = {"delta": _frac(rep.lower_bound.delta), "value": rep.lower_bound.value}
    return {
        "schema": SCHEMA,
        "p": C.p,
        "k": W.k,
        "j": W.j,
        "radius": W.radius,
        "T": element_payload(W.T),
        "S": element_payload(W.S),
        "ST": element_payload(W.ST),
        "alpha": element_payload(W.alpha),
        "beta": element_payload(W.beta),
        "alpha_word": [C.gens[i].flag() for i in W.alpha_word],
        "beta_word": [C.gens[i].flag() for i in W.beta_word],
        "identities_ok": rep.identities_ok,
        "st_abs": _frac(rep.st_abs),
        "st_denom": str(rep.st_denom),
        "d_alpha_beta": rep.d_alpha_beta,
        "partial": rep.partial,
        "completed_radius": rep.completed_radius,
        "ell_alpha": rep.ell_alpha,
        "ell_beta": rep.ell_beta,
        "L": rep.L,
        "p_prime": element_payload(rep.p_prime),
        "projection": element_payload(rep.projection),
        "projection_word": (
            None
            if rep.projection_word is None
            else [C.gens[i].flag() for i in rep.projection_word]
        ),
        "d_p_st": rep.d_p_st,
        "lower_bound": lb,
        "soundness_ok": rep.soundness_ok,
        "gap_abs": None if rep.gap_abs is None else _frac(rep.gap_abs),
        "gap_denom": None if rep.gap_denom is None else str(rep.gap_denom),
        "gap_threshold": None if rep.gap_threshold is None else str(rep.gap_threshold),
        "dichotomy_holds": rep.dichotomy_holds,
        "certification": divergence_payload(cert),
        "ok": rep.ok,
    }


# ---------------------------------------------------------------------------
# Text renderers (payload dict -> deterministic bytes-stable text)


def _flag(el: Optional[dict]) -> str:
    if el is None:
        return ""
    return f"{el['f']['num']}/{el['f']['exp']}:{el['c']}"


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_constants_csv(payload: dict) -> str:
    lines = ["key,value"]
    for key in (
        "p",
        "c",
        "ell",
        "eps",
        "f_star_abs",
        "f_dstar",
        "kappa",
        "kappa_at",
        "M",
        "j_star",
    ):
        lines.append(f"{key},{payload[key]}")
    lines.append("f_star_gen," + _flag(payload["f_star_gen"]))
    lines.append(
        "generators," + ";".join(_flag(g) for g in payload["generators"])
    )
    return "\n".join(lines) + "\n"


def render_ball_csv(payload: dict) -> str:
    lines = ["num,exp,c,length"]
    for num, exp, c, length in payload["rows"]:
        lines.append(f"{num},{exp},{c},{length}")
    return "\n".join(lines) + "\n"


def render_word_length_csv(payload: dict) -> str:
    if payload["status"] == "found":
        return f"{payload['length']}\n"
    return "not-found\n"


def render_ac_table_csv(payload: dict) -> str:
    lines = ["n,k,N,witness_g,witness_h"]
    for row in payload["rows"]:
        lines.append(
            f"{row['n']},{row['k']},{row['N']},"
            f"{_flag(row['witness_g'])},{_flag(row['witness_h'])}"
        )
    return "\n".join(lines) + "\n"


def _kv_csv(pairs: list[tuple[str, object]]) -> str:
    lines = ["key,value"]
    for k, v in pairs:
        lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"


def render_lemma1_csv(payload: dict) -> str:
    pairs = [
        ("p", payload["p"]),
        ("n", payload["n"]),
        ("M", payload["M"]),
        ("checked", payload["checked"]),
        ("ok", payload["ok"]),
        ("violations", len(payload["violations"])),
        ("max_ratio_dichotomy", repr(payload["max_ratio_dichotomy"])),
        ("max_ratio_joint", repr(payload["max_ratio_joint"])),
        ("worst_dichotomy", _flag(payload["worst_dichotomy"])),
        ("worst_joint", _flag(payload["worst_joint"])),
    ]
    pairs += [
        (f"violation_{i}", f"{_flag(v['element'])} {v['kind']} {v['value']}")
        for i, v in enumerate(payload["violations"])
    ]
    return _kv_csv(pairs)


def render_lemma2_csv(payload: dict) -> str:
    worst = payload["worst_pair"]
    pairs = [
        ("p", payload["p"]),
        ("r", payload["r"]),
        ("ball_radius", payload["ball_radius"]),
        ("M", payload["M"]),
        ("pairs_checked", payload["pairs_checked"]),
        ("ok", payload["ok"]),
        ("violations", len(payload["violations"])),
        ("max_ratio_abs", repr(payload["max_ratio_abs"])),
        ("max_ratio_denom", repr(payload["max_ratio_denom"])),
        ("worst_pair", "" if worst is None else f"{_flag(worst[0])} {_flag(worst[1])}"),
    ]
    pairs += [
        (
            f"violation_{i}",
            f"{_flag(v['pair'][0])} {_flag(v['pair'][1])} {v['kind']} {v['value']}",
        )
        for i, v in enumerate(payload["violations"])
    ]
    return _kv_csv(pairs)


def render_witness_csv(payload: dict) -> str:
    cert = payload["certification"]
    lb = payload["lower_bound"]
    pairs = [
        ("p", payload["p"]),
        ("k", payload["k"]),
        ("j", payload["j"]),
        ("radius", payload["radius"]),
        ("T", _flag(payload["T"])),
        ("S", _flag(payload["S"])),
        ("ST", _flag(payload["ST"])),
        ("alpha", _flag(payload["alpha"])),
        ("beta", _flag(payload["beta"])),
        ("alpha_word", ".".join(payload["alpha_word"])),
        ("beta_word", ".".join(payload["beta_word"])),
        ("identities_ok", payload["identities_ok"]),
        ("st_abs", payload["st_abs"]),
        ("st_denom", payload["st_denom"]),
        ("d_alpha_beta", payload["d_alpha_beta"]),
        ("partial", payload["partial"]),
        ("completed_radius", payload["completed_radius"]),
        ("ell_alpha", payload["ell_alpha"]),
        ("ell_beta", payload["ell_beta"]),
        ("L", payload["L"]),
        ("p_prime", _flag(payload["p_prime"])),
        ("projection", _flag(payload["projection"])),
        ("d_p_st", payload["d_p_st"]),
        ("lower_bound_delta", "" if lb is None else lb["delta"]),
        ("lower_bound", "" if lb is None else repr(lb["value"])),
        ("soundness_ok", payload["soundness_ok"]),
        ("gap_abs", payload["gap_abs"]),
        ("gap_denom", payload["gap_denom"]),
        ("gap_threshold", payload["gap_threshold"]),
        ("dichotomy_holds", payload["dichotomy_holds"]),
        ("j_star", cert["j_star"]),
        ("certified_k_max", cert["k_max"]),
        ("certified_monotone", cert["monotone"]),
        ("certified_all_ok", cert["all_ok"]),
        ("ok", payload["ok"]),
    ]
    return _kv_csv(pairs)
