"""Exact truncated power series and the free-probability transform pipeline.

All coefficients are ``fractions.Fraction``.  A series of order N carries
coefficients c_0..c_N; every operation records the order to which its result
is valid and never reads beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

DEFAULT_ORDER = 16


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalSeries:
    """A truncated power series sum(c_n z^n, n=0..order) with exact coefficients."""

    coeffs: tuple[Fraction, ...]
    order: int

    @staticmethod
    def from_coeffs(coeffs: Iterable, order: int | None = None) -> "RationalSeries":
        cs = tuple(_frac(c) for c in coeffs)
        if order is None:
            order = len(cs) - 1
        if len(cs) < order + 1:
            cs = cs + (Fraction(0),) * (order + 1 - len(cs))
        return RationalSeries(cs[: order + 1], order)

    def __getitem__(self, n: int) -> Fraction:
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond valid order {self.order}")
        return self.coeffs[n]

    def truncate(self, order: int) -> "RationalSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return RationalSeries(self.coeffs[: order + 1], order)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.order, other.order)
        return RationalSeries(
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)), n
        )

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        n = min(self.order, other.order)
        return RationalSeries(
            tuple(self.coeffs[i] - other.coeffs[i] for i in range(n + 1)), n
        )

    def __mul__(self, other) -> "RationalSeries":
        if isinstance(other, RationalSeries):
            n = min(self.order, other.order)
            out = [Fraction(0)] * (n + 1)
            for i in range(n + 1):
                ci = self.coeffs[i]
                if ci == 0:
                    continue
                for j in range(n + 1 - i):
                    out[i + j] += ci * other.coeffs[j]
            return RationalSeries(tuple(out), n)
        c = _frac(other)
        return RationalSeries(tuple(c * x for x in self.coeffs), self.order)

    __rmul__ = __mul__

    def shift_down(self) -> "RationalSeries":
        """Divide by z; requires c_0 = 0."""
        if self.coeffs[0] != 0:
            raise ValueError("constant term must vanish")
        return RationalSeries(self.coeffs[1:], self.order - 1)

    def shift_up(self) -> "RationalSeries":
        """Multiply by z."""
        return RationalSeries((Fraction(0),) + self.coeffs, self.order + 1)

    def inverse(self) -> "RationalSeries":
        """Multiplicative inverse; requires c_0 != 0."""
        if self.coeffs[0] == 0:
            raise ValueError("constant term must be nonzero")
        n = self.order
        out = [Fraction(0)] * (n + 1)
        out[0] = 1 / self.coeffs[0]
        for i in range(1, n + 1):
            s = sum(self.coeffs[j] * out[i - j] for j in range(1, i + 1))
            out[i] = -s / self.coeffs[0]
        return RationalSeries(tuple(out), n)

    def compose(self, inner: "RationalSeries") -> "RationalSeries":
        """self(inner(z)); requires inner(0) = 0."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        result = RationalSeries.from_coeffs([self.coeffs[0]], n)
        power = RationalSeries.from_coeffs([1], n)
        inner_t = inner.truncate(n)
        for i in range(1, n + 1):
            power = power * inner_t
            if self.coeffs[i] != 0:
                result = result + self.coeffs[i] * power
        return result

    def log(self) -> "RationalSeries":
        """Series logarithm; requires c_0 = 1."""
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1")
        n = self.order
        # log f = integral of f'/f
        deriv = RationalSeries(
            tuple((i + 1) * self.coeffs[i + 1] for i in range(n)), n - 1
        )
        quot = deriv * self.inverse().truncate(n - 1)
        out = [Fraction(0)] * (n + 1)
        for i in range(n):
            out[i + 1] = quot.coeffs[i] / (i + 1)
        return RationalSeries(tuple(out), n)

    def exp(self) -> "RationalSeries":
        """Series exponential; requires c_0 = 0."""
        if self.coeffs[0] != 0:
            raise ValueError("exp needs zero constant term")
        n = self.order
        out = [Fraction(0)] * (n + 1)
        out[0] = Fraction(1)
        # f' = g' f  =>  n f_n = sum_{j=1..n} j g_j f_{n-j}
        for i in range(1, n + 1):
            s = sum(j * self.coeffs[j] * out[i - j] for j in range(1, i + 1))
            out[i] = s / i
        return RationalSeries(tuple(out), n)

    def pow(self, r) -> "RationalSeries":
        """Raise to a rational power via exp(r log); requires c_0 = 1, or c_0 > 0."""
        c0 = self.coeffs[0]
        if c0 <= 0:
            raise ValueError("pow needs positive constant term")
        rf = _frac(r)
        normalized = self * (1 / c0)
        scale = _frac_power(c0, rf)
        return scale * (rf * normalized.log()).exp()


def _frac_power(base: Fraction, r: Fraction) -> Fraction:
    """base**r as an exact Fraction; requires the result to be rational."""
    if r.denominator == 1:
        return base ** r.numerator
    num = _nth_root(base.numerator, r.denominator)
    den = _nth_root(base.denominator, r.denominator)
    return Fraction(num, den) ** r.numerator


def _nth_root(n: int, k: int) -> int:
    r = round(n ** (1 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    raise ValueError(f"{n} has no exact integer {k}-th root")


@dataclass(frozen=True)
class MomentSequence:
    """Moments m_1..m_N of a (possibly formal) probability measure."""

    moments: tuple[Fraction, ...]

    @staticmethod
    def from_values(values: Iterable) -> "MomentSequence":
        return MomentSequence(tuple(_frac(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.moments)

    def __getitem__(self, k: int) -> Fraction:
        """k-th moment, 1-indexed."""
        if not 1 <= k <= self.order:
            raise IndexError(k)
        return self.moments[k - 1]

    def stieltjes(self) -> RationalSeries:
        """f(z) = 1 + m_1 z + m_2 z^2 + ..."""
        return RationalSeries.from_coeffs((Fraction(1),) + self.moments)


@dataclass(frozen=True)
class CumulantSequence:
    """Free or classical cumulants kappa_1..kappa_N."""

    kind: str  # "free" | "classical"
    cumulants: tuple[Fraction, ...]

    @staticmethod
    def from_values(kind: str, values: Iterable) -> "CumulantSequence":
        if kind not in ("free", "classical"):
            raise ValueError(kind)
        return CumulantSequence(kind, tuple(_frac(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.cumulants)

    def __getitem__(self, k: int) -> Fraction:
        if not 1 <= k <= self.order:
            raise IndexError(k)
        return self.cumulants[k - 1]


def revert(g: RationalSeries) -> RationalSeries:
    """Compositional inverse via Lagrange inversion; requires c_0 = 0, c_1 != 0."""
    if g.coeffs[0] != 0:
        raise ValueError("series must vanish at 0")
    if g.order < 1 or g.coeffs[1] == 0:
        raise ValueError("linear coefficient must be nonzero")
    n = g.order
    # h = z/g(z), a unit series; [z^k] g^{-1} = (1/k) [w^{k-1}] h(w)^k
    h = g.shift_down().inverse()  # order n-1
    out = [Fraction(0)] * (n + 1)
    power = RationalSeries.from_coeffs([1], n - 1)
    for k in range(1, n + 1):
        power = power * h
        out[k] = power.coeffs[k - 1] / k
    return RationalSeries(tuple(out), n)


def revert_newton(g: RationalSeries) -> RationalSeries:
    """Compositional inverse by Newton iteration on series; agrees with revert()."""
    if g.coeffs[0] != 0:
        raise ValueError("series must vanish at 0")
    if g.order < 1 or g.coeffs[1] == 0:
        raise ValueError("linear coefficient must be nonzero")
    n = g.order
    x = RationalSeries.from_coeffs([0, 1 / g.coeffs[1]], n)
    prec = 1
    gd = RationalSeries(
        tuple((i + 1) * g.coeffs[i + 1] for i in range(n)), n - 1
    )
    while prec < n:
        prec = min(2 * prec, n)
        err = g.compose(x) - RationalSeries.from_coeffs([0, 1], n)
        inv = gd.compose(x.truncate(n - 1)).inverse()
        # padding inv to order n is harmless: err vanishes to order >= 2
        corr = err * RationalSeries.from_coeffs(inv.coeffs, n)
        x = x - corr
    return x


def s_transform(m: MomentSequence) -> RationalSeries:
    """S(z) = (1 + 1/z) chi(z) from the moments, valid to order N-1."""
    if m[1] == 0:
        raise ValueError("S transform needs m_1 != 0")
    psi = m.stieltjes() - RationalSeries.from_coeffs([1], m.order)
    chi = revert(psi)
    one_plus_z = RationalSeries.from_coeffs([1, 1], m.order - 1)
    return chi.shift_down() * one_plus_z


def moments_from_s(S: RationalSeries, order: int) -> MomentSequence:
    """Inverse of s_transform: the moment sequence m_1..m_order with the given S."""
    if S.coeffs[0] == 0:
        raise ValueError("S(0) must be nonzero")
    if S.order < order - 1:
        raise ValueError(f"need S to order {order - 1}, got {S.order}")
    one_plus_z = RationalSeries.from_coeffs([1, 1], order - 1)
    chi = (S.truncate(order - 1) * one_plus_z.inverse()).shift_up()
    psi = revert(chi)
    return MomentSequence(psi.coeffs[1:])


def free_cumulants(m: MomentSequence) -> CumulantSequence:
    """Free cumulants via the triangular moment-cumulant recursion.

    m_n = sum_{j=1..n} kappa_j * sum_{i_1+...+i_j = n-j} m_{i_1} ... m_{i_j}
    (first-block decomposition over noncrossing partitions, m_0 = 1).
    """
    n = m.order
    mom = [Fraction(1)] + list(m.moments)
    kappa: list[Fraction] = []
    for order in range(1, n + 1):
        # conv[j][r] = sum over i_1+..+i_j = r of products of moments
        total = Fraction(0)
        for j in range(1, order):
            total += kappa[j - 1] * _moment_convolution(mom, j, order - j)
        kappa.append(mom[order] - total)
    return CumulantSequence("free", tuple(kappa))


def _moment_convolution(mom: Sequence[Fraction], j: int, r: int) -> Fraction:
    """sum over i_1+...+i_j = r (i >= 0) of mom[i_1] * ... * mom[i_j]."""
    cur = [Fraction(1) if i == 0 else Fraction(0) for i in range(r + 1)]
    for _ in range(j):
        nxt = [Fraction(0)] * (r + 1)
        for a in range(r + 1):
            if cur[a] == 0:
                continue
            for b in range(r + 1 - a):
                nxt[a + b] += cur[a] * mom[b]
        cur = nxt
    return cur[r]


def moments_from_free_cumulants(kappa: CumulantSequence) -> MomentSequence:
    """Exact inverse of free_cumulants, same recursion run forward."""
    if kappa.kind != "free":
        raise ValueError("expected free cumulants")
    n = kappa.order
    mom = [Fraction(1)]
    for order in range(1, n + 1):
        total = Fraction(0)
        for j in range(1, order + 1):
            total += kappa[j] * _moment_convolution(mom + [Fraction(0)], j, order - j)
        mom.append(total)
    return MomentSequence(tuple(mom[1:]))


def classical_cumulants(m: MomentSequence) -> CumulantSequence:
    """Classical cumulants: c_n = n! [z^n] log(1 + sum m_n z^n / n!)."""
    n = m.order
    egf = RationalSeries.from_coeffs(
        [Fraction(1)] + [m[k] / factorial(k) for k in range(1, n + 1)], n
    )
    lg = egf.log()
    return CumulantSequence(
        "classical", tuple(lg.coeffs[k] * factorial(k) for k in range(1, n + 1))
    )


def moments_from_classical_cumulants(c: CumulantSequence) -> MomentSequence:
    """Inverse of classical_cumulants via the series exponential."""
    if c.kind != "classical":
        raise ValueError("expected classical cumulants")
    n = c.order
    lg = RationalSeries.from_coeffs(
        [Fraction(0)] + [c[k] / factorial(k) for k in range(1, n + 1)], n
    )
    egf = lg.exp()
    return MomentSequence(tuple(egf.coeffs[k] * factorial(k) for k in range(1, n + 1)))


def free_add(mu: MomentSequence, nu: MomentSequence) -> MomentSequence:
    """Free additive convolution: free cumulants add."""
    if mu.order != nu.order:
        raise ValueError("orders differ")
    ka = free_cumulants(mu)
    kb = free_cumulants(nu)
    summed = CumulantSequence(
        "free", tuple(a + b for a, b in zip(ka.cumulants, kb.cumulants))
    )
    return moments_from_free_cumulants(summed)


def free_mult(mu: MomentSequence, nu: MomentSequence) -> MomentSequence:
    """Free multiplicative convolution: S transforms multiply."""
    if mu.order != nu.order:
        raise ValueError("orders differ")
    if mu[1] == 0 or nu[1] == 0:
        raise ValueError("free_mult needs nonvanishing first moments")
    S = s_transform(mu) * s_transform(nu)
    return moments_from_s(S, mu.order)


def boxtimes_power(m: MomentSequence, s) -> MomentSequence:
    """Fractional free multiplicative power: S^s via exp(s log S)."""
    sf = _frac(s)
    if sf == 1:
        return m
    if sf == 0:
        return MomentSequence.from_values([1] * m.order)
    if m[1] <= 0:
        raise ValueError("boxtimes_power needs m_1 > 0")
    S = s_transform(m)
    if S.coeffs[0] <= 0:
        raise ValueError("boxtimes_power needs S(0) > 0")
    return moments_from_s(S.pow(sf), m.order)


def boxplus_power(m: MomentSequence, t) -> MomentSequence:
    """Fractional free additive power: free cumulants scale by t."""
    tf = _frac(t)
    kappa = free_cumulants(m)
    return moments_from_free_cumulants(
        CumulantSequence("free", tuple(tf * k for k in kappa.cumulants))
    )


def eta_and_sigma(m: MomentSequence) -> tuple[RationalSeries, RationalSeries]:
    """The eta transform 1 - 1/f and the Sigma transform S(z/(1-z))."""
    f = m.stieltjes()
    eta = RationalSeries.from_coeffs([1], f.order) - f.inverse()
    S = s_transform(m)
    geom = RationalSeries.from_coeffs(
        [0] + [1] * S.order, S.order
    )  # z/(1-z)
    sigma = S.compose(geom)
    return eta, sigma


def catalan_moments(order: int = DEFAULT_ORDER) -> MomentSequence:
    """Moments of the standard free Poisson law: Catalan numbers."""
    from .partitions import fuss_catalan

    return MomentSequence.from_values([fuss_catalan(1, k) for k in range(1, order + 1)])


def free_poisson_moments(t, order: int = DEFAULT_ORDER) -> MomentSequence:
    """Moments of the free Poisson law of parameter t (all free cumulants t)."""
    tf = _frac(t)
    return moments_from_free_cumulants(
        CumulantSequence("free", (tf,) * order)
    )


def bernoulli_moments(t, order: int = DEFAULT_ORDER) -> MomentSequence:
    """Moments of (1-t) delta_0 + t delta_1: all equal to t."""
    return MomentSequence.from_values([t] * order)


def serialize_series(s: RationalSeries) -> dict:
    return {
        "coefficients": [f"{c.numerator}/{c.denominator}" for c in s.coeffs],
        "order": s.order,
    }
