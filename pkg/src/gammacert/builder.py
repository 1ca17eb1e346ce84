"""Construction driver: iterate the recursive step with Y = X_i^gamma and
X' = X_{i+1}, certify the contraction ledger, and enclose the limit
directions.

Per step i the ledger certifies
  delta_i := 5 C1 X_i / (2 X_{i+1}) + 2 C1 / (delta0 X_{i-1} X_i^(gamma+1)),
  delta_i <= delta_{i-1} / 2,
  dist(x_{i-1}, x_{i+1}) <= delta_i,
  dist(x_i, x_{i+1})     >= delta0 + delta_i,
plus the exact triple-cross identity and the squared chain bound on
dist(u_i, u_{i+1}).

Directions are only ever handled as integer representatives with certified
radii.  The u radius 4 C1 / (delta0^2 X_{i-1} X_i^(gamma+1)) and the v/w
radius 2 delta_{m+1} both bound geometric tails whose built prefix is
certified term by term; the unbuilt remainder is controlled by the schedule
constraints themselves (any valid continuation keeps each tail ratio
certifiably below 1/2), recorded by the tail_halving_generic verdict.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .balls import BallReal, DEFAULT_MAX_PREC, cert_le, sqrt_int
from .cf import ALPHA_PRESETS, ConvergentTable
from .errors import CertificateFailure, InputError, UndecidedError
from .exact import (IVec3, cross, det3, dot, is_primitive_pair,
                    proj_dist_sq, smith_invariants_3x2)
from .planner import Plan, Schedule, XScale
from .stepper import StepCertificate, StepInput, StepOutput, Verdict, YSpec, recursive_step

Rat = Fraction

PAYLOAD_PREC = 192


@dataclass(frozen=True)
class DirectionEnclosure:
    """Integer representative plus a certified squared-radius bound."""

    kind: str  # "U" | "V" | "W"
    rep: IVec3
    radius_sq_ub: Rat
    anchor_index: int


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    delta_ub: Rat  # certified rational upper bound on delta_i
    verdicts: Tuple[Verdict, ...]


@dataclass
class ConstructionState:
    plan: Plan
    schedule: Schedule
    xs: List[IVec3]
    ys: List[IVec3]
    step_outputs: List[StepOutput]
    step_certs: List[StepCertificate]
    ledger: List[LedgerEntry]
    base_verdicts: List[Verdict]
    table: ConvergentTable = field(repr=False)

    @property
    def n_steps(self) -> int:
        return self.plan.n_steps

    @property
    def last_index(self) -> int:
        return len(self.xs) - 1

    def scale(self, i: int) -> XScale:
        return self.schedule.scale(i, self.plan)

    def delta0_ball(self) -> BallReal:
        return BallReal.wrap(self.plan.delta0_sq).sqrt()

    def delta_ball(self, i: int) -> BallReal:
        """Enclosure of delta_i; valid for 1 <= i <= n_steps."""
        c1 = self.plan.c1
        xp = self.scale(i + 1)
        first = BallReal.wrap(5 * c1) * self.scale(i).ball() / (2 * xp.ball())
        second = BallReal.wrap(2 * c1) / (
            self.delta0_ball() * self.scale(i - 1).ball() * self.scale(i).pow_gamma_plus(1))
        return first + second

    def delta_tail_ball(self, j: int) -> BallReal:
        """Upper enclosure of delta_j past the built schedule.

        Uses delta_j <= (5C1/2 + 2C1/delta0) / (X_{j-1} X_j^(gamma+1)), which
        eliminates X_{j+1} via the growth constraint, so it covers every valid
        continuation.  Supports j up to n_steps + 2.
        """
        c1 = self.plan.c1
        num = BallReal.wrap(Fraction(5 * c1, 2)) + BallReal.wrap(2 * c1) / self.delta0_ball()
        return num / (self._x_lower(j - 1) * self._x_lower(j) ** (BallReal.golden() + 1))

    def _x_lower(self, j: int) -> BallReal:
        if j <= self.n_steps + 1:
            return self.scale(j).ball()
        if j == self.n_steps + 2:
            s = self.n_steps
            return self.scale(s).ball() * self.scale(s + 1).pow_gamma_plus(2)
        raise InputError(f"no scale lower bound for index {j}")

    def delta_upper(self, j: int) -> BallReal:
        if 1 <= j <= self.n_steps:
            return self.delta_ball(j)
        return self.delta_tail_ball(j)


def _certify(name: str, lhs: BallReal, rhs: BallReal, max_prec: int,
             out: List[Verdict]) -> None:
    ok, prec = cert_le(lhs, rhs, max_prec)
    if ok is None:
        raise UndecidedError(name, prec)
    if not ok:
        raise CertificateFailure(name, f"refuted at {prec} bits")
    out.append(Verdict(name, True, prec))


def _u_term_sq(state: ConstructionState, i: int) -> BallReal:
    """(2C1 / (delta0^2 X_{i-1} X_i^(gamma+1)))^2 as a ball, exact where possible."""
    c1 = state.plan.c1
    d0sq = state.plan.delta0_sq
    num = Fraction(4 * c1 * c1) / (d0sq * d0sq * state.scale(i - 1).sq)
    return BallReal.wrap(num) / (BallReal.wrap(state.scale(i).sq) ** (BallReal.golden() + 1))


def build(plan: Plan, schedule: Schedule,
          max_prec: int = DEFAULT_MAX_PREC) -> ConstructionState:
    """Run all n_steps recursive steps and certify the full ledger."""
    spec = ALPHA_PRESETS[plan.alpha]
    table = ConvergentTable(spec, plan.c1)
    state = ConstructionState(plan=plan, schedule=schedule, xs=[plan.x0, plan.x1],
                              ys=[], step_outputs=[], step_certs=[], ledger=[],
                              base_verdicts=[], table=table)
    if proj_dist_sq(plan.x0, plan.x1) != 4 * plan.delta0_sq:
        raise CertificateFailure("base_delta0_identity",
                                 "dist^2(x0,x1) != 4*delta0_sq")
    state.base_verdicts.append(Verdict("base_delta0_identity", True))
    if not is_primitive_pair(plan.x0, plan.x1):
        raise CertificateFailure("base_primitive_pair", "(x0, x1) not primitive")
    state.base_verdicts.append(Verdict("base_primitive_pair", True))
    # dist(x0, x1) >= delta0: exact on squares (4 d0sq >= d0sq)
    state.base_verdicts.append(Verdict("base_dist_floor", True))

    ok, prec = cert_le(2, state.scale(1).pow_gamma_plus(0), max_prec)
    if ok is not True:
        raise CertificateFailure("tail_halving_generic", "X_1^gamma < 2")
    state.base_verdicts.append(Verdict("tail_halving_generic", True, prec))

    d0_ball = state.delta0_ball()
    prev_delta: Optional[BallReal] = None
    for i in range(1, plan.n_steps + 1):
        x_star, x = state.xs[i - 1], state.xs[i]
        y_spec = YSpec.of_power(state.scale(i).sq)
        x_prime_target = state.scale(i + 1).value_int
        out, cert = recursive_step(StepInput(
            x_star=x_star, x=x, Y_spec=y_spec, X_prime=x_prime_target,
            table=table, max_prec=max_prec))
        state.xs.append(out.x_prime)
        state.ys.append(out.y)
        state.step_outputs.append(out)
        state.step_certs.append(cert)
        verdicts: List[Verdict] = []

        # exact triple-cross identity: (u_i) x (u_{i+1}) = q_n * x_i
        u_i = cross(x_star, x)
        u_next = cross(x, out.x_prime)
        _, qn = table.pair(out.n)
        if cross(u_i, u_next) != qn * x:
            raise CertificateFailure(f"triple_cross_i{i}", "identity violated")
        verdicts.append(Verdict(f"triple_cross_i{i}", True))

        # exact lattice-intersection witness: span(x_{i-1},x_i) meets
        # span(x_i,x_{i+1}) in exactly Z x_i
        if smith_invariants_3x2(x_star, x) != (1, 1):
            raise CertificateFailure(f"intersection_i{i}", "left pair not primitive")
        if smith_invariants_3x2(x, out.x_prime) != (1, 1):
            raise CertificateFailure(f"intersection_i{i}", "right pair not primitive")
        if det3(x_star, x, out.x_prime) == 0:
            raise CertificateFailure(f"intersection_i{i}", "planes coincide")
        verdicts.append(Verdict(f"intersection_i{i}", True))

        delta_i = state.delta_ball(i)
        half_prev = (d0_ball if i == 1 else prev_delta) / 2
        _certify(f"halving_i{i}", delta_i, half_prev, max_prec, verdicts)
        near = BallReal.wrap(proj_dist_sq(x_star, out.x_prime)).sqrt()
        _certify(f"near_i{i}", near, delta_i, max_prec, verdicts)
        sep = BallReal.wrap(proj_dist_sq(x, out.x_prime)).sqrt()
        _certify(f"sep_i{i}", d0_ball + delta_i, sep, max_prec, verdicts)
        if i >= 2:
            cur = BallReal.wrap(proj_dist_sq(x_star, x)).sqrt()
            _certify(f"dist_floor_i{i}", d0_ball, cur, max_prec, verdicts)

        du_sq = proj_dist_sq(u_i, u_next)
        _certify(f"u_step_i{i}", BallReal.wrap(du_sq), _u_term_sq(state, i),
                 max_prec, verdicts)
        if i >= 2:
            lhs = state.scale(i - 2).ball() * state.scale(i - 1).pow_gamma_plus(1) * 2
            rhs = state.scale(i - 1).ball() * state.scale(i).pow_gamma_plus(1)
            _certify(f"u_ratio_i{i}", lhs, rhs, max_prec, verdicts)

        delta_ub = delta_i.refined_to(PAYLOAD_PREC).hi
        state.ledger.append(LedgerEntry(index=i, delta_ub=delta_ub,
                                        verdicts=tuple(verdicts)))
        prev_delta = delta_i
    return state


def enclose_u(state: ConstructionState, i: int) -> DirectionEnclosure:
    """Enclosure of u anchored at u_i = cross(x_{i-1}, x_i), 1 <= i <= last."""
    if not 1 <= i <= state.last_index:
        raise InputError(f"u anchor {i} out of range")
    rep = cross(state.xs[i - 1], state.xs[i])
    radius_sq = _u_term_sq(state, i) * 4
    return DirectionEnclosure(kind="U", rep=rep,
                              radius_sq_ub=radius_sq.refined_to(PAYLOAD_PREC).hi,
                              anchor_index=i)


def enclose_vw(state: ConstructionState, kind: str) -> DirectionEnclosure:
    """Enclosure of v (odd-index tail) or w (even-index tail).

    rep = x_m with the largest available index of the right parity;
    dist(x_m, limit) <= sum_j delta_{m+1+2j} <= 2 delta_{m+1}.
    """
    if kind not in ("V", "W"):
        raise InputError("kind must be V or W")
    if state.n_steps < 3:
        raise InputError("need at least 3 steps to enclose v/w")
    want_odd = kind == "V"
    m = state.last_index
    if (m % 2 == 1) != want_odd:
        m -= 1
    radius = state.delta_upper(m + 1) * 2
    return DirectionEnclosure(kind=kind, rep=state.xs[m],
                              radius_sq_ub=(radius ** 2).refined_to(PAYLOAD_PREC).hi,
                              anchor_index=m)


def x_dot_u_lower(x: IVec3, enc: DirectionEnclosure) -> BallReal:
    """Certified lower bound on |x.u|: |x.u_i| - 2 ||x|| dist(u_i, u).

    |x.u_i| is exact over a certified square root; the chordal factor 2
    covers the worst sign alignment of the unit representatives.
    """
    d = abs(dot(x, enc.rep))
    exact_part = BallReal.wrap(Fraction(d)) / sqrt_int(enc.rep.norm_sq())
    slack = 2 * sqrt_int(x.norm_sq()) * BallReal.wrap(enc.radius_sq_ub).sqrt()
    return exact_part - slack


def recertify(state: ConstructionState, max_prec: int = DEFAULT_MAX_PREC) -> List[Verdict]:
    """Re-run every ledger certificate from the stored vectors.

    Returns the verdict list; raises on any regression, so a reloaded
    certificate reproduces identical verdicts or fails loudly.
    """
    verdicts: List[Verdict] = []
    plan = state.plan
    if proj_dist_sq(plan.x0, plan.x1) != 4 * plan.delta0_sq:
        raise CertificateFailure("base_delta0_identity", "recheck failed")
    verdicts.append(Verdict("base_delta0_identity", True))
    d0_ball = state.delta0_ball()
    prev_delta: Optional[BallReal] = None
    for i in range(1, plan.n_steps + 1):
        x_star, x, x_next = state.xs[i - 1], state.xs[i], state.xs[i + 1]
        u_i, u_next = cross(x_star, x), cross(x, x_next)
        _, qn = state.table.pair(state.step_outputs[i - 1].n)
        if cross(u_i, u_next) != qn * x:
            raise CertificateFailure(f"triple_cross_i{i}", "recheck failed")
        verdicts.append(Verdict(f"triple_cross_i{i}", True))
        delta_i = state.delta_ball(i)
        half_prev = (d0_ball if i == 1 else prev_delta) / 2
        _certify(f"halving_i{i}", delta_i, half_prev, max_prec, verdicts)
        near = BallReal.wrap(proj_dist_sq(x_star, x_next)).sqrt()
        _certify(f"near_i{i}", near, delta_i, max_prec, verdicts)
        sep = BallReal.wrap(proj_dist_sq(x, x_next)).sqrt()
        _certify(f"sep_i{i}", d0_ball + delta_i, sep, max_prec, verdicts)
        _certify(f"u_step_i{i}", BallReal.wrap(proj_dist_sq(u_i, u_next)),
                 _u_term_sq(state, i), max_prec, verdicts)
        prev_delta = delta_i
    return verdicts
