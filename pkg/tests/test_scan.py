"""Slab scan: frozen counts, brute-force exhaustiveness, guard behavior."""

from fractions import Fraction as F

import numpy as np
import pytest

from gammacert import BallReal, InputError, UndecidedError, slab_scan_iv, sqrt_int
from gammacert.builder import enclose_u
from gammacert.planner import PsiSpec
from gammacert.scan import (
    FLOAT_SLOP,
    M_BITS,
    _canonical,
    _ceil_frac,
    _direction_fixed_point,
    _scan_lines,
)

TOY_AUDIT_FAILURES = (
    "q_below_qn", "mid_norm_margin", "mid_norm_const", "plane_const",
    "scale_floor", "contraction_seed", "axis_const_i1",
)


def test_full_scan_frozen_counts(toy_scan):
    r = toy_scan
    assert r.range_lo_sq == F(2 ** 28, 186)
    assert r.range_hi_sq == F(2 ** 30, 186)  # capped at (2 C')^2 < B^2
    assert (r.lines, r.candidates) == (9067865, 19841341)
    assert (r.fast_passed, r.slow_checked) == (19841253, 88)
    assert r.fast_passed + r.slow_checked == r.candidates
    assert r.violations == () and r.undecided == () and r.positivity_failures == ()
    assert r.all_pass and not r.below_threshold
    assert r.window_index == 2 and r.threads == 1
    assert r.used_clauses == ()
    assert r.skipped_clauses == TOY_AUDIT_FAILURES


def test_override_window_counts(toy_state):
    r = slab_scan_iv(toy_state, 2403, _range_override=(25, 225))
    assert (r.lines, r.candidates, r.fast_passed, r.slow_checked) == (355, 925, 919, 6)
    assert r.all_pass


def _threshold_ints(state, psi, lo_sq, hi_sq, k_near):
    """Recompute (m, kappa, t_int) with the scan's own guard algebra."""
    gamma = BallReal.golden()
    lo_ball = BallReal.wrap(F(lo_sq)).sqrt()
    thr_up = (1 / (psi.at(lo_ball) * lo_ball.pow(gamma))).refined_to(128).hi
    enc = enclose_u(state, state.last_index)
    m, kappa, err_max = _direction_fixed_point(enc)
    b_up = BallReal.wrap(F(hi_sq)).sqrt().refined_to(96).hi
    e_m = BallReal.wrap(3).sqrt().refined_to(96).hi * b_up * err_max
    e_u = 2 * b_up * BallReal.wrap(F(enc.radius_sq_ub)).sqrt().refined_to(96).hi
    guard = ((F(2 * k_near - 1, 2) - FLOAT_SLOP) * F(abs(m[kappa]), 2 ** M_BITS)
             - e_m - e_u)
    assert guard >= thr_up
    return m, kappa, _ceil_frac((thr_up + e_m + e_u) * 2 ** M_BITS)


def test_line_enumeration_is_exhaustive(toy_state):
    # every integer point of the shell that fails the integer threshold must
    # be surfaced by the line walk; compare against a full numpy sweep
    lo_sq, hi_sq = 25, 225
    m, kappa, t_int = _threshold_ints(toy_state, toy_state.plan.psi,
                                      lo_sq, hi_sq, k_near=2)
    _, _, _, failing = _scan_lines(0, 16, 15, m, kappa, 2, t_int, lo_sq, hi_sq)

    axis = np.arange(-15, 16, dtype=np.int64)
    X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    nsq = (pts * pts).sum(axis=1)
    pts = pts[(nsq >= lo_sq) & (nsq <= hi_sq)]
    shell = {_canonical(*map(int, p)) for p in pts}
    assert len(shell) == 6831
    brute = {p for p in shell
             if abs(p[0] * m[0] + p[1] * m[1] + p[2] * m[2]) < t_int}
    assert set(failing) == brute
    assert len(brute) == 6


def test_slow_path_is_the_x1_ray(toy_state):
    # the six threshold failures in [5, 15] are exactly the x1 multiples
    lo_sq, hi_sq = 25, 225
    m, kappa, t_int = _threshold_ints(toy_state, toy_state.plan.psi,
                                      lo_sq, hi_sq, k_near=2)
    _, _, _, failing = _scan_lines(0, 16, 15, m, kappa, 2, t_int, lo_sq, hi_sq)
    x1 = toy_state.plan.x1.as_tuple()
    expect = set()
    r = 1
    while 186 * r * r <= hi_sq:
        if 186 * r * r >= lo_sq:
            expect.add(_canonical(*(r * c for c in x1)))
        r += 1
    assert expect <= set(failing)


def test_threads_agree(toy_state):
    a = slab_scan_iv(toy_state, 2403, _range_override=(25, 225), threads=1)
    b = slab_scan_iv(toy_state, 2403, _range_override=(25, 225), threads=2)
    for field in ("range_lo_sq", "range_hi_sq", "lines", "candidates",
                  "fast_passed", "slow_checked", "violations", "undecided",
                  "positivity_failures", "used_clauses", "skipped_clauses"):
        assert getattr(a, field) == getattr(b, field)
    assert b.threads == 2


def test_below_threshold(toy_state):
    r = slab_scan_iv(toy_state, 1000)
    assert r.below_threshold and r.lines == 0 and r.candidates == 0
    assert r.range_hi_sq == F(10 ** 6) < r.range_lo_sq
    assert r.skipped_clauses == TOY_AUDIT_FAILURES
    assert r.all_pass


def test_guard_margin_failure(toy_state):
    # a tiny psi inflates the threshold past what the guard can certify
    with pytest.raises(UndecidedError, match="slab_guard_margin"):
        slab_scan_iv(toy_state, 2403, psi=PsiSpec(F(1, 10 ** 12), 1),
                     _range_override=(25, 225))


def test_input_validation(toy_state):
    with pytest.raises(InputError):
        slab_scan_iv(toy_state, 2403, k_near=0)
    with pytest.raises(InputError):
        slab_scan_iv(toy_state, 2403, threads=0)
    with pytest.raises(InputError):
        slab_scan_iv(toy_state, -5)
    with pytest.raises(InputError, match="int64"):
        slab_scan_iv(toy_state, 2403, _range_override=(10 ** 6, 10 ** 14))
    with pytest.raises(InputError):
        slab_scan_iv(toy_state, 2403, _range_override=(225, 25))
    with pytest.raises(InputError):
        _canonical(0, 0, 0)


def test_canonical_sign():
    assert _canonical(0, -2, 5) == (0, 2, -5)
    assert _canonical(3, -1, 0) == (3, -1, 0)
