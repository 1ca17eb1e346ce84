"""Continued fractions of quadratic irrationals, with exact certificates.

The target numbers have the form (a + b sqrt(d))/c and sit in (0, 1/2).
Everything observable is certified by exact sign computations in Q(sqrt d):
convergent recurrences, the unimodular cross identity, the approximation
quality of each convergent, bounded denominator growth, the badly
approximable lower bound |q*alpha - p| >= 1/(C1 |q|), and the cross gap
|q p_n - p q_n| >= q_n/(2 C1 |q|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .balls import BallReal, DEFAULT_MAX_PREC, cert_le, _iv_from_fraction
from .errors import CertificateFailure, InputError, UndecidedError


@dataclass(frozen=True)
class QF:
    """Element p + q*sqrt(d) of the real quadratic field Q(sqrt d)."""

    p: Fraction
    q: Fraction
    d: int

    def __add__(self, other):
        if isinstance(other, QF):
            assert other.d == self.d
            return QF(self.p + other.p, self.q + other.q, self.d)
        return QF(self.p + Fraction(other), self.q, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QF(-self.p, -self.q, self.d)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QF) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + Fraction(other)

    def __mul__(self, other):
        if isinstance(other, QF):
            assert other.d == self.d
            return QF(
                self.p * other.p + self.q * other.q * self.d,
                self.p * other.q + self.q * other.p,
                self.d,
            )
        k = Fraction(other)
        return QF(self.p * k, self.q * k, self.d)

    __rmul__ = __mul__

    def sign(self) -> int:
        """Exact sign of p + q*sqrt(d)."""
        p, q = self.p, self.q
        if q == 0:
            return 0 if p == 0 else (1 if p > 0 else -1)
        if p == 0:
            return 1 if q > 0 else -1
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # opposite signs: compare p^2 against q^2 d
        lhs, rhs = p * p, q * q * self.d
        if p > 0:  # q < 0
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return 1 if rhs > lhs else (-1 if rhs < lhs else 0)

    def floor(self) -> int:
        """Exact floor, via a dyadic first guess then certified adjustment."""
        s = math.isqrt(self.d << 64)
        lo = Fraction(s, 1 << 32)
        hi = Fraction(s + 1, 1 << 32)
        approx = self.p + self.q * (lo if self.q >= 0 else hi)
        f = math.floor(approx)
        while (self - (f + 1)).sign() >= 0:
            f += 1
        while (self - f).sign() < 0:
            f -= 1
        return f

    def to_ball(self) -> BallReal:
        p, q, d = self.p, self.q, self.d
        return BallReal(
            lambda ctx: _iv_from_fraction(ctx, p)
            + _iv_from_fraction(ctx, q) * ctx.sqrt(_iv_from_fraction(ctx, Fraction(d)))
        )


@dataclass(frozen=True)
class AlphaSpec:
    """A named quadratic irrational (a + b sqrt d)/c with its growth constant."""

    name: str
    a: int
    b: int
    c: int
    d: int
    c1_min: int  # smallest integer C1 known to work for this number

    def qf(self) -> QF:
        return QF(Fraction(self.a, self.c), Fraction(self.b, self.c), self.d)


ALPHA_PRESETS: Dict[str, AlphaSpec] = {
    "sqrt2m1": AlphaSpec("sqrt2m1", -1, 1, 1, 2, 4),
    "sqrt5m2": AlphaSpec("sqrt5m2", -2, 1, 1, 5, 5),
}


class _SurdQuotients:
    """Streaming partial quotients of (a + b sqrt d)/c via the surd recurrence.

    State (P, Q, D) stays bounded for a quadratic irrational, so each next
    quotient costs O(1) small-integer work.
    """

    def __init__(self, spec: AlphaSpec):
        a, b, c, d = spec.a, spec.b, spec.c, spec.d
        if b <= 0:
            raise InputError("surd must have positive irrational part")
        P, D, Q = a, b * b * d, c
        if (D - P * P) % Q != 0:
            P, D, Q = a * c, b * b * d * c * c, c * c
        self.P, self.Q, self.D = P, Q, D

    def next(self) -> int:
        x = QF(Fraction(self.P, self.Q), Fraction(1, self.Q), self.D)
        ak = x.floor()
        self.P = ak * self.Q - self.P
        self.Q = (self.D - self.P * self.P) // self.Q
        return ak


class ConvergentTable:
    """Convergents p_n/q_n of alpha, n >= 1, with per-row certificates.

    Index 1 is the pair (0, 1). Each appended row is checked exactly:
    0 <= p_n <= q_n, the cross identity q_n p_{n+1} - p_n q_{n+1} = (-1)^{n+1},
    |q_n alpha - p_n| < 1/q_{n+1} with the expected alternating sign, and
    q_n < q_{n+1} <= C1 q_n.
    """

    def __init__(self, spec: AlphaSpec, c1: Optional[Fraction] = None):
        self.spec = spec
        self.c1 = Fraction(c1 if c1 is not None else spec.c1_min)
        self.alpha = spec.qf()
        if self.alpha.sign() <= 0 or (self.alpha - Fraction(1, 2)).sign() >= 0:
            raise InputError("alpha must lie in (0, 1/2)")
        self._stream = _SurdQuotients(spec)
        a0 = self._stream.next()
        if a0 != 0:
            raise InputError("alpha must have zero integer part")
        self.p: List[int] = [0, 0]  # 1-based; p[1] = 0
        self.q: List[int] = [0, 1]  # q[1] = 1
        self._h_prev, self._k_prev = 1, 0  # h_{-1}, k_{-1}
        self._verified_upto = 1

    def __len__(self) -> int:
        return len(self.p) - 1

    def extend_to(self, n: int) -> None:
        while len(self) < n:
            self._append_row()

    def extend_to_cover(self, bound: int) -> None:
        """Grow until the last denominator strictly exceeds `bound`."""
        while self.q[-1] <= bound:
            self._append_row()

    def _append_row(self) -> None:
        ak = self._stream.next()
        h = ak * self.p[-1] + self._h_prev
        kk = ak * self.q[-1] + self._k_prev
        self._h_prev, self._k_prev = self.p[-1], self.q[-1]
        self.p.append(h)
        self.q.append(kk)
        self._verify_new_row()

    def _verify_new_row(self) -> None:
        n = len(self) - 1  # row n+1 was appended; certify facts at n
        pn1, qn1 = self.p[n + 1], self.q[n + 1]
        if not (0 <= pn1 <= qn1):
            raise CertificateFailure("cf_range", f"row {n + 1}")
        pn, qn = self.p[n], self.q[n]
        if qn * pn1 - pn * qn1 != (-1) ** (n + 1):
            raise CertificateFailure("cf_cross_identity", f"row {n}")
        if not (qn < qn1 and qn1 * self.c1.denominator <= self.c1.numerator * qn):
            raise CertificateFailure("cf_growth", f"row {n}: q={qn}->{qn1}")
        err = self.alpha * qn - pn
        if err.sign() != (-1) ** (n + 1):
            raise CertificateFailure("cf_sign_alternation", f"row {n}")
        if ((err * ((-1) ** (n + 1))) * qn1 - 1).sign() >= 0:
            raise CertificateFailure("cf_quality", f"row {n}")
        self._verified_upto = n

    def pair(self, n: int) -> Tuple[int, int]:
        self.extend_to(n)
        return self.p[n], self.q[n]

    def eps(self, n: int) -> QF:
        """q_n alpha - p_n, sign (-1)^(n+1)."""
        self.extend_to(n)
        return self.alpha * self.q[n] - self.p[n]


def locate_n(T: Union[int, Fraction, BallReal], table: ConvergentTable,
             max_prec: int = DEFAULT_MAX_PREC) -> int:
    """The unique n >= 2 with q_{n-1} <= T < q_n. T must be >= 1.

    Exact for rational T (a hit T == q_k yields n = k + 1). For enclosed T
    the comparisons are certified; an inseparable comparison raises.
    """
    tb = BallReal.wrap(T)
    ok, prec = cert_le(1, tb, max_prec)
    if ok is None:
        raise UndecidedError("locate_n lower bound", prec)
    if not ok:
        raise InputError("locate_n needs T >= 1")

    def le(k: int) -> bool:  # q_k <= T
        v, pr = cert_le(table.q[k], tb, max_prec)
        if v is None:
            raise UndecidedError(f"locate_n vs q_{k}", pr)
        return v

    if len(table) < 2:
        table.extend_to(2)
    while le(len(table)):
        if len(table) >= 10 ** 7:
            raise InputError("convergent table exhausted")
        table.extend_to(len(table) + 1)
    lo, hi = 1, len(table)  # q_lo <= T < q_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if le(mid):
            lo = mid
        else:
            hi = mid
    return lo + 1


@dataclass
class BadApproxReport:
    q_max: int
    blocks: int
    direct_checked: int
    min_product_lo: Fraction  # enclosure of min over blocks of q_n |q_n a - p_n|
    min_product_hi: Fraction
    c1: Fraction


def certify_bad_approx(table: ConvergentTable, q_max: int,
                       direct_limit: int = 400) -> BadApproxReport:
    """Certify |q*alpha - p| >= 1/(C1 q) for all 1 <= q <= q_max and p in Z.

    Block argument: for q in [q_n, q_{n+1}) every (p, q) decomposes integrally over
    the rows n, n+1 (cross identity = +-1); the two row errors carry opposite
    signs (certified alternation), so |q alpha - p| >= |q_n alpha - p_n|.
    Hence the block check C1 q_n |q_n alpha - p_n| >= 1 covers the block.
    Small q are additionally checked literally.
    """
    table.extend_to_cover(q_max)
    c1 = table.c1
    blocks = 0
    best: Optional[QF] = None
    n = 1
    while table.q[n] <= q_max:
        eps = table.eps(n) * ((-1) ** (n + 1))  # = |q_n alpha - p_n| > 0
        prod = eps * (c1 * table.q[n])
        if (prod - 1).sign() < 0:
            raise CertificateFailure("bad_approx_block", f"n={n}")
        scaled = eps * table.q[n]
        if best is None or (scaled - best).sign() < 0:
            best = scaled
        blocks += 1
        n += 1
    direct = 0
    alpha = table.alpha
    for q in range(1, min(q_max, direct_limit) + 1):
        v = alpha * q
        f = v.floor()
        # nearest integer to q*alpha among {f, f+1}
        for p in (f, f + 1):
            err = v - p
            if err.sign() < 0:
                err = -err
            if ((err * (c1 * q)) - 1).sign() < 0:
                raise CertificateFailure("bad_approx_direct", f"q={q}, p={p}")
        direct += 1
    b = best.to_ball().refined_to(128)
    return BadApproxReport(q_max, blocks, direct, b.lo, b.hi, c1)


@dataclass
class GapReport:
    n: int
    q_count: int
    min_scaled: Fraction  # min over q of 2 C1 q min_p |q p_n - p q_n| / q_n
    exhaustive_pairs: int


def convergent_gap_check(table: ConvergentTable, n: int,
                         exhaustive_limit: int = 300) -> GapReport:
    """Certify |q p_n - p q_n| >= q_n/(2 C1 |q|) for 1 <= |q| < q_n, all p.

    For fixed q the inner minimum over p is the distance from q p_n to the
    nearest multiple of q_n, computed by one modular reduction; the
    minimizing p lies within |p| <= q_n and its neighbors only increase the
    value (checked). Negative q follows by symmetry (p -> -p). For small
    tables a literal double loop over the stated window re-verifies.
    """
    pn, qn = table.pair(n)
    c1 = table.c1
    min_scaled = None
    for q in range(1, qn):
        m = (q * pn) % qn
        best = min(m, qn - m)
        if best == 0:
            raise CertificateFailure("gap_degenerate", f"n={n}, q={q}")
        # monotonicity witness at the minimizing p and its neighbors
        p_star = (q * pn - best) // qn if m <= qn - m else (q * pn + best) // qn
        assert abs(q * pn - p_star * qn) == best and abs(p_star) <= qn
        assert abs(q * pn - (p_star - 1) * qn) >= best
        assert abs(q * pn - (p_star + 1) * qn) >= best
        if 2 * c1.numerator * q * best < c1.denominator * qn:
            raise CertificateFailure("gap_bound", f"n={n}, q={q}")
        scaled = Fraction(2 * q * best, qn) * c1
        if min_scaled is None or scaled < min_scaled:
            min_scaled = scaled
    pairs = 0
    if qn <= exhaustive_limit:
        for q in range(1, qn):
            for p in range(-qn, qn + 1):
                lhs = abs(q * pn - p * qn)
                assert 2 * c1.numerator * q * lhs >= c1.denominator * qn
                pairs += 1
    return GapReport(n, qn - 1, min_scaled if min_scaled is not None else Fraction(0), pairs)
