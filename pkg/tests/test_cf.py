"""Convergent table rows, locate_n, badly-approximable and gap certificates."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammacert import (
    ALPHA_PRESETS,
    BadApproxReport,
    CertificateFailure,
    ConvergentTable,
    InputError,
    certify_bad_approx,
    convergent_gap_check,
    locate_n,
    sqrt_int,
)
from gammacert.cf import AlphaSpec, QF


def table(name="sqrt2m1", c1=None):
    return ConvergentTable(ALPHA_PRESETS[name], c1=c1)


def test_qf_arithmetic():
    a = ALPHA_PRESETS["sqrt2m1"].qf()  # sqrt(2) - 1
    sq = a * a
    assert sq.p == 3 and sq.q == -2 and sq.d == 2  # (sqrt2-1)^2 = 3 - 2 sqrt2
    assert a.sign() == 1 and (-a).sign() == -1 and (a - a).sign() == 0
    assert (a * 5).floor() == 2
    assert (a * F(1, 3)).floor() == 0
    b = a.to_ball().refined_to(96)
    assert F(414213, 10 ** 6) < b.lo and b.hi < F(414214, 10 ** 6)


def test_pell_convergents():
    t = table()
    expect = [(0, 1), (1, 2), (2, 5), (5, 12), (12, 29), (29, 70), (70, 169)]
    for n, pq in enumerate(expect, start=1):
        assert t.pair(n) == pq


def test_sqrt5m2_convergents():
    t = table("sqrt5m2")
    assert t.c1 == 5
    expect = [(0, 1), (1, 4), (4, 17), (17, 72), (72, 305)]
    for n, pq in enumerate(expect, start=1):
        assert t.pair(n) == pq


def test_row_invariants_to_60():
    t = table()
    t.extend_to(60)
    one = QF(F(1), F(0), 2)
    for n in range(1, 60):
        pn, qn = t.pair(n)
        pm, qm = t.pair(n + 1)
        assert 0 <= pn <= qn and qn < qm <= 4 * qn
        assert qn * pm - pn * qm == (-1) ** (n + 1)
        eps = t.eps(n)
        assert eps.sign() == (-1) ** (n + 1)
        aeps = eps * ((-1) ** (n + 1))
        # classic two-sided error bracket 1/(q_{n+1}+q_n) < |eps| < 1/q_{n+1}
        assert (aeps * (qm + qn) - one).sign() > 0
        assert (aeps * qm - one).sign() < 0


def test_alpha_domain_checks():
    with pytest.raises(InputError):
        ConvergentTable(AlphaSpec("big", 0, 1, 1, 2, 4))  # sqrt 2 > 1/2
    with pytest.raises(InputError):
        ConvergentTable(AlphaSpec("neg", -3, 1, 1, 2, 4))  # sqrt 2 - 3 < 0


def test_locate_n_exact():
    t = table()
    assert locate_n(1, t) == 2
    assert locate_n(2, t) == 3  # T == q_2 lands in the next block
    assert locate_n(F(7, 2), t) == 3
    assert locate_n(5, t) == 4
    assert locate_n(12, t) == 5
    assert locate_n(10 ** 6, t) == 17
    pn, qn = t.pair(17)
    assert t.q[16] <= 10 ** 6 < qn


def test_locate_n_enclosed_and_errors():
    t = table()
    assert locate_n(sqrt_int(2), t) == 2
    assert locate_n(sqrt_int(30), t) == 4  # 5 <= 5.477 < 12
    with pytest.raises(InputError):
        locate_n(F(1, 2), t)


def test_bad_approx_certificate():
    t = table()
    t.extend_to(60)
    q60 = t.q[60]
    rep = certify_bad_approx(t, q60)
    assert isinstance(rep, BadApproxReport)
    assert rep.q_max == q60 and rep.blocks == 60 and rep.direct_checked == 400
    # q_n |q_n a - p_n| decreases toward 1/(2 sqrt 2); C1 = 4 leaves margin
    assert F(1, 4) < rep.min_product_lo <= rep.min_product_hi < F(1, 2)


def test_bad_approx_brute_force_small_q():
    t = table()
    alpha = t.alpha
    for q in range(1, 1001):
        v = alpha * q
        f = v.floor()
        for p in (f, f + 1):
            err = v - p
            if err.sign() < 0:
                err = -err
            assert (err * (4 * q) - 1).sign() >= 0


def test_bad_approx_rejects_small_c1():
    t = table(c1=F(2))
    with pytest.raises(CertificateFailure):
        certify_bad_approx(t, 100)


def test_gap_certificate_to_12():
    t = table()
    for n in range(2, 13):
        rep = convergent_gap_check(t, n)
        _, qn = t.pair(n)
        assert rep.q_count == qn - 1
        assert rep.min_scaled >= 1
        assert rep.exhaustive_pairs == ((qn - 1) * (2 * qn + 1) if qn <= 300 else 0)


def test_gap_brute_force_n5():
    t = table()
    pn, qn = t.pair(5)
    for q in range(1, qn):
        for p in range(-qn - 1, qn + 2):
            assert 8 * q * abs(q * pn - p * qn) >= qn


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=40))
def test_cross_identity_property(n):
    t = table()
    pn, qn = t.pair(n)
    pm, qm = t.pair(n + 1)
    assert qn * pm - pn * qm == (-1) ** (n + 1)
