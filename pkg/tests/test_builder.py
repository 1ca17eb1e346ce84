"""Sequence construction: certificates, ledgers, direction enclosures."""

from fractions import Fraction as F

import pytest

from gammacert import DirectionEnclosure, InputError, make_plan, recertify, schedule_X
from gammacert.builder import build, enclose_u, enclose_vw, x_dot_u_lower
from gammacert.exact import IVec3, dot, proj_dist_sq
from gammacert.planner import PsiSpec


def log2f(fr):
    """floor(log2) up to +-1, safe for astronomically small rationals."""
    fr = F(fr)
    return fr.numerator.bit_length() - fr.denominator.bit_length()


def test_coordinate_growth(toy_state):
    bits = [max(abs(c).bit_length() for c in (v.x, v.y, v.z)) for v in toy_state.xs]
    assert bits == [1, 4, 17, 57, 215, 828, 3205]
    assert toy_state.n_steps == 5 and toy_state.last_index == 6


def test_x_norm_windows_exact(toy_state):
    c1 = toy_state.plan.c1
    for i in range(2, toy_state.n_steps + 2):
        n_sq = toy_state.xs[i].norm_sq()
        x_sq = toy_state.scale(i).sq
        assert x_sq <= n_sq <= 25 * c1 * c1 * x_sq


def test_ledger_delta_bounds(toy_state):
    assert [e.index for e in toy_state.ledger] == [1, 2, 3, 4, 5]
    mags = [log2f(e.delta_ub) for e in toy_state.ledger]
    assert mags == [-4, -35, -153, -607, -2370]
    for prev, cur in zip(toy_state.ledger, toy_state.ledger[1:]):
        assert cur.delta_ub < prev.delta_ub / 2


def test_certificate_census(toy_state):
    assert [v.name for v in toy_state.base_verdicts] == [
        "base_delta0_identity", "base_primitive_pair", "base_dist_floor",
        "tail_halving_generic"]
    assert [len(c.verdicts) for c in toy_state.step_certs] == [9] * 5
    assert [len(e.verdicts) for e in toy_state.ledger] == [6, 8, 8, 8, 8]
    total = (len(toy_state.base_verdicts)
             + sum(len(c.verdicts) for c in toy_state.step_certs)
             + sum(len(e.verdicts) for e in toy_state.ledger))
    assert total == 87
    for group in ([toy_state.base_verdicts]
                  + [c.verdicts for c in toy_state.step_certs]
                  + [e.verdicts for e in toy_state.ledger]):
        assert all(v.passed for v in group)


def test_recertify(toy_state):
    verdicts = recertify(toy_state)
    assert len(verdicts) == 26
    assert all(v.passed for v in verdicts)
    names = {v.name for v in verdicts}
    assert "base_delta0_identity" in names
    for stem in ("triple_cross", "halving", "near", "sep", "u_step"):
        assert {f"{stem}_i{i}" for i in range(1, 6)} <= names


def test_delta0_ball(toy_state):
    b = toy_state.delta0_ball().refined_to(96)
    # sqrt(17/744) = 0.15116...
    assert F(1511, 10 ** 4) < b.lo and b.hi < F(1512, 10 ** 4)


def test_enclose_u_orthogonal_and_shrinking(toy_state):
    radii = []
    for i in range(1, toy_state.last_index + 1):
        enc = enclose_u(toy_state, i)
        assert dot(enc.rep, toy_state.xs[i - 1]) == 0
        assert dot(enc.rep, toy_state.xs[i]) == 0
        assert enc.radius_sq_ub > 0
        radii.append(enc.radius_sq_ub)
    assert all(b < a for a, b in zip(radii, radii[1:]))
    with pytest.raises(InputError):
        enclose_u(toy_state, 0)
    with pytest.raises(InputError):
        enclose_u(toy_state, toy_state.last_index + 1)


def test_enclose_vw(toy_state):
    V = enclose_vw(toy_state, "V")
    W = enclose_vw(toy_state, "W")
    assert (V.anchor_index, W.anchor_index) == (5, 6)
    assert V.rep == toy_state.xs[5] and W.rep == toy_state.xs[6]
    assert log2f(V.radius_sq_ub) == -18404
    assert log2f(W.radius_sq_ub) == -71375
    with pytest.raises(InputError):
        enclose_vw(toy_state, "X")


def test_vw_separation(toy_state):
    d2 = proj_dist_sq(enclose_vw(toy_state, "V").rep, enclose_vw(toy_state, "W").rep)
    assert F(913994, 10 ** 7) < d2 < F(913995, 10 ** 7)


def test_x_dot_u_lower_exact():
    enc = DirectionEnclosure(kind="U", rep=IVec3(1, 0, 0),
                             radius_sq_ub=F(0), anchor_index=1)
    b = x_dot_u_lower(IVec3(3, 4, 0), enc)
    assert b.is_exact and b.lo == 3


def test_x_dot_u_anchor_consistency(toy_state):
    # every anchor's certified lower bound must sit below every certified upper
    from gammacert.balls import BallReal, sqrt_int

    x = toy_state.xs[3]
    lowers, uppers = [], []
    for i in range(1, toy_state.last_index + 1):
        enc = enclose_u(toy_state, i)
        lowers.append(x_dot_u_lower(x, enc).refined_to(192).lo)
        d = abs(dot(x, enc.rep))
        up = (BallReal.wrap(F(d)) / sqrt_int(enc.rep.norm_sq())
              + 2 * sqrt_int(x.norm_sq()) * BallReal.wrap(enc.radius_sq_ub).sqrt())
        uppers.append(up.refined_to(192).hi)
    assert max(lowers) <= min(uppers)
    assert max(lowers) > 0


def test_delta_upper_tail(toy_state):
    d6 = toy_state.delta_upper(6).refined_to(64)
    d7 = toy_state.delta_upper(7).refined_to(64)
    assert 0 < d6.hi < F(1, 1 << 9000)
    assert 0 < d7.hi < F(1, 1 << 35000)
    with pytest.raises(InputError):
        toy_state.delta_upper(8)


def test_short_run_cannot_enclose_vw():
    plan = make_plan("sqrt2m1", IVec3(0, 0, 1), F(4, 5), PsiSpec(F(1), 1), 1,
                     theta=F(3, 10), toy=True)
    st = build(plan, schedule_X(plan))
    assert st.n_steps == 1
    with pytest.raises(InputError):
        enclose_vw(st, "V")
