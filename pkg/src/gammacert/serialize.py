"""Canonical JSON artifacts with content hashes.

Layout of every file: {"schema": 1, "kind": <str>, "body": {...},
"sha256": <hex of the canonical body bytes>}.  Canonical bytes use sorted
keys and tight separators; integers are decimal strings (they routinely
exceed any interoperable numeric range), rationals are "num/den", interval
enclosures are dyadic mid/rad payloads at 192 bits.  Loading verifies the
hash and rejects unknown schema versions.
"""

from __future__ import annotations

import hashlib
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .balls import BallReal, ball_payload, sqrt_int
from .builder import ConstructionState, enclose_u
from .cf import ALPHA_PRESETS, ConvergentTable
from .errors import InputError
from .exact import IVec3
from .planner import Plan, PsiSpec, Schedule
from .stepper import Verdict

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

SCHEMA = 1


def _enc(obj):
    if obj is None or isinstance(obj, (str, bool, float)):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, IVec3):
        return [str(c) for c in obj.as_tuple()]
    if isinstance(obj, BallReal):
        return ball_payload(obj)
    if isinstance(obj, (list, tuple)):
        return [_enc(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _enc(v) for k, v in obj.items()}
    raise InputError(f"cannot serialize {type(obj).__name__}")


def _dec_int(s: str) -> int:
    return int(s)


def _dec_rat(s: str) -> Fraction:
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def _dec_vec(v: List[str]) -> IVec3:
    return IVec3(int(v[0]), int(v[1]), int(v[2]))


def canonical_bytes(body: dict) -> bytes:
    return json.dumps(body, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True).encode("ascii")


def body_hash(body: dict) -> str:
    return hashlib.sha256(canonical_bytes(body)).hexdigest()


def wrap_document(kind: str, body: dict) -> dict:
    return {"schema": SCHEMA, "kind": kind, "body": body,
            "sha256": body_hash(body)}


def document_bytes(kind: str, body: dict) -> bytes:
    return canonical_bytes(wrap_document(kind, body))


def unwrap_document(doc: dict, expected_kind: Optional[str] = None) -> dict:
    for key in ("schema", "kind", "body", "sha256"):
        if key not in doc:
            raise InputError(f"document missing field {key!r}")
    if doc["schema"] != SCHEMA:
        raise InputError(f"unsupported schema {doc['schema']!r}")
    if expected_kind is not None and doc["kind"] != expected_kind:
        raise InputError(f"expected kind {expected_kind!r}, got {doc['kind']!r}")
    if body_hash(doc["body"]) != doc["sha256"]:
        raise InputError("content hash mismatch: document corrupt or edited")
    return doc["body"]


def load_document(path: str, expected_kind: Optional[str] = None) -> dict:
    try:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read document {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"document {path} is not a JSON object")
    return unwrap_document(doc, expected_kind)


def dump_document(path: str, kind: str, body: dict) -> None:
    with open(path, "wb") as fh:
        fh.write(document_bytes(kind, body))
        fh.write(b"\n")


# ---------------------------------------------------------------------------
# plan / schedule


def plan_body(plan: Plan, schedule: Schedule) -> dict:
    return {
        "alpha": plan.alpha,
        "c1": _enc(plan.c1),
        "x0": _enc(plan.x0),
        "x0_companion": _enc(plan.x0_companion),
        "multiplier": _enc(plan.multiplier),
        "x1": _enc(plan.x1),
        "delta": _enc(plan.delta),
        "delta0_sq": _enc(plan.delta0_sq),
        "theta": _enc(plan.theta),
        "psi": {"c": _enc(plan.psi.c), "e": _enc(plan.psi.e)},
        "n_steps": _enc(plan.n_steps),
        "toy": plan.toy,
        "exponents": _enc(schedule.exponents),
        "schedule_witnesses": _enc(schedule.witnesses),
        "invariant_failures": _enc(schedule.invariant_failures),
    }


def plan_from_body(body: dict) -> Tuple[Plan, Schedule]:
    alpha = body["alpha"]
    if alpha not in ALPHA_PRESETS:
        raise InputError(f"unknown alpha preset {alpha!r}")
    plan = Plan(
        alpha=alpha,
        c1=_dec_rat(body["c1"]),
        x0=_dec_vec(body["x0"]),
        x0_companion=_dec_vec(body["x0_companion"]),
        multiplier=_dec_int(body["multiplier"]),
        x1=_dec_vec(body["x1"]),
        delta=_dec_rat(body["delta"]),
        delta0_sq=_dec_rat(body["delta0_sq"]),
        theta=None if body["theta"] is None else _dec_rat(body["theta"]),
        psi=PsiSpec(c=_dec_rat(body["psi"]["c"]), e=_dec_rat(body["psi"]["e"])),
        n_steps=_dec_int(body["n_steps"]),
        toy=bool(body["toy"]),
    )
    witnesses = tuple(
        {k: v for k, v in w.items()} for w in body["schedule_witnesses"])
    schedule = Schedule(
        exponents=tuple(_dec_int(e) for e in body["exponents"]),
        witnesses=witnesses,
        invariant_failures=tuple(body["invariant_failures"]),
    )
    return plan, schedule


# ---------------------------------------------------------------------------
# construction state


def _verdicts_doc(verdicts) -> list:
    return [{"name": v.name, "passed": v.passed, "prec": _enc(v.prec)}
            for v in verdicts]


def state_body(state: ConstructionState) -> dict:
    """Full certified record of a finished construction.

    The "series" section carries, per index, the data the human-readable
    report formats: bit lengths, the certified gap bound delta_i, and the
    certified upper bound on |x_i . u| (both as dyadic enclosures), so
    report generation is pure formatting.
    """
    series = []
    for i in range(state.last_index + 1):
        entry: Dict[str, object] = {
            "i": _enc(i),
            "x_bits": _enc(max(abs(c) for c in state.xs[i].as_tuple()).bit_length()),
            "norm_sq": _enc(state.xs[i].norm_sq()),
        }
        if i >= 1:
            entry["delta_up"] = _enc(state.delta_upper(i))
        if i + 1 <= state.last_index:
            enc_u = enclose_u(state, i + 1)
            xu = (2 * sqrt_int(state.xs[i].norm_sq())
                  * BallReal.wrap(Fraction(enc_u.radius_sq_ub)).sqrt())
            entry["xu_up"] = _enc(xu)
        series.append(entry)
    return {
        "plan": plan_body(state.plan, state.schedule),
        "xs": _enc(state.xs),
        "ys": _enc(state.ys),
        "steps": [
            {"n": _enc(so.n), "a": _enc(so.a), "m": _enc(so.m),
             "ell": _enc(so.ell), "r": _enc(so.r), "s": _enc(so.s)}
            for so in state.step_outputs
        ],
        "step_verdicts": [_verdicts_doc(sc.verdicts) for sc in state.step_certs],
        "base_verdicts": _verdicts_doc(state.base_verdicts),
        "ledger": [
            {"index": _enc(le.index), "delta_ub": _enc(le.delta_ub),
             "verdicts": _verdicts_doc(le.verdicts)} for le in state.ledger
        ],
        "series": series,
    }


def state_from_body(body: dict, rebuild) -> ConstructionState:
    """Reconstruct a state by replaying the build from the embedded plan.

    rebuild(plan, schedule) -> ConstructionState performs the construction;
    the replayed integer sequences must match the stored ones exactly.
    """
    plan, schedule = plan_from_body(body["plan"])
    state = rebuild(plan, schedule)
    xs = [_dec_vec(v) for v in body["xs"]]
    ys = [_dec_vec(v) for v in body["ys"]]
    if xs != state.xs or ys != state.ys:
        raise InputError("stored sequences disagree with the replayed build")
    return state


# ---------------------------------------------------------------------------
# report bodies (plain dataclass -> dict laydowns)


def report_body(obj) -> dict:
    """Generic dataclass-to-body encoder for verifier/scan reports."""
    import dataclasses

    if not dataclasses.is_dataclass(obj):
        raise InputError(f"not a report: {type(obj).__name__}")
    out = {}
    for f in dataclasses.fields(obj):
        val = getattr(obj, f.name)
        if f.name == "wall_time_s":
            out[f.name] = float(val)
        elif dataclasses.is_dataclass(val):
            out[f.name] = report_body(val)
        elif isinstance(val, (list, tuple)) and val and dataclasses.is_dataclass(val[0]):
            out[f.name] = [report_body(v) for v in val]
        else:
            out[f.name] = _enc(val)
    return out
