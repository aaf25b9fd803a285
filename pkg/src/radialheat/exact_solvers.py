"""Exact rational solvers ("SPDM"/"STDM") with a deferred zero pivot.

These run the same banded eliminations as the numerical solvers but over
exact rational scalars, so the residual of every solve is exactly zero and
no dominance assumption is needed: when a pivot (a quotient of consecutive
leading principal minors) evaluates to exactly zero, a formal parameter eps
is substituted and the sweep continues over rational functions of eps.
After back substitution every component is finalized by taking the limit
eps -> 0 (common eps factors are cancelled first; individual intermediates
may be singular at eps = 0 while the solution is regular).  A pole at
eps = 0 that survives cancellation means the matrix itself is singular.

Accepted scalars are ints, fractions.Fraction and compatible exact rational
types such as gmpy2.mpq; floats are rejected.  DeferredScalar keeps its
numerator/denominator polynomials coprime and the denominator monic after
every operation, which bounds degree growth through the recurrences.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .assembly import LinearSystem, PentaMatrix, TriMatrix

#: Exact scalar type used for coefficients produced by this module.
ExactScalar = Fraction


class SingularMatrixError(ArithmeticError):
    """The system has no unique solution (pole survives at eps = 0)."""


class ExactInputError(TypeError):
    """Exact solvers were handed floating-point data."""


# ---------------------------------------------------------------------------
# polynomials in eps, coefficients in an exact field (Fraction, mpq, ...)
# ---------------------------------------------------------------------------

_ZERO_POLY = (0,)


def _ptrim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return _ptrim(out)


def _pneg(p):
    return tuple(-c for c in p)

def _pis_zero(p):
    return len(p) == 1 and p[0] == 0


def _pmul(p, q):
    if _pis_zero(p) or _pis_zero(q):
        return _ZERO_POLY
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _ptrim(out)


def _pdivmod(p, q):
    """Polynomial division over the coefficient field."""
    if _pis_zero(q):
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    dq = len(q) - 1
    lead = q[-1]
    if len(rem) - 1 < dq:
        return _ZERO_POLY, _ptrim(rem)
    quot = [0] * (len(rem) - dq)
    for k in range(len(rem) - 1, dq - 1, -1):
        coeff = rem[k]
        if coeff == 0:
            continue
        factor = coeff / lead
        quot[k - dq] = factor
        for j in range(dq + 1):
            rem[k - dq + j] = rem[k - dq + j] - factor * q[j]
    return _ptrim(quot), _ptrim(rem)


def _pgcd(p, q):
    """Monic polynomial gcd (Euclid over the coefficient field)."""
    a, b = p, q
    while not _pis_zero(b):
        _, r = _pdivmod(a, b)
        a, b = b, r
    if _pis_zero(a):
        return _ZERO_POLY
    lead = a[-1]
    return tuple(c / lead for c in a)


class DeferredScalar:
    """Rational function of the formal parameter eps.

    Canonical form: numerator and denominator share no polynomial factor and
    the denominator is monic.  finalize() returns the limit at eps = 0.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,), _canonical=False):
        if _canonical:
            self.num = num
            self.den = den
            return
        num = _ptrim(num)
        den = _ptrim(den)
        if _pis_zero(den):
            raise ZeroDivisionError("DeferredScalar with zero denominator")
        if _pis_zero(num):
            self.num = _ZERO_POLY
            self.den = (1,)
            return
        g = _pgcd(num, den)
        if len(g) > 1:
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        lead = den[-1]
        if lead != 1:
            num = tuple(c / lead for c in num)
            den = tuple(c / lead for c in den)
        self.num = num
        self.den = den

    # -- construction helpers ------------------------------------------------

    @classmethod
    def epsilon(cls) -> "DeferredScalar":
        """The formal parameter itself (the deferred 'symbolic zero')."""
        return cls((0, 1), (1,), _canonical=True)

    @classmethod
    def _coerce(cls, value):
        if isinstance(value, DeferredScalar):
            return value
        if isinstance(value, float):
            raise ExactInputError("cannot mix floats into an exact solve")
        if isinstance(value, (int, np.integer)):
            value = Fraction(int(value))
        return cls((value,), (1,), _canonical=True)

    # -- queries ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return _pis_zero(self.num)

    def finalize(self):
        """Limit at eps = 0.  Raises SingularMatrixError on a pole."""
        den0 = self.den[0]
        if den0 == 0:
            raise SingularMatrixError(
                "pole at eps = 0: the matrix is singular")
        return self.num[0] / den0

    # -- field arithmetic --------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        return DeferredScalar(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
            _pmul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return DeferredScalar(_pneg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        return DeferredScalar(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero:
            raise ZeroDivisionError("division by exact zero")
        return DeferredScalar(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, DeferredScalar):
            return self.num == other.num and self.den == other.den
        if self.den == (1,) and len(self.num) == 1:
            return self.num[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"DeferredScalar(num={self.num!r}, den={self.den!r})"


def _is_zero(value) -> bool:
    if isinstance(value, DeferredScalar):
        return value.is_zero
    return value == 0


def _finalize(value):
    if isinstance(value, DeferredScalar):
        return value.finalize()
    return value


def _exact_list(arr, what: str) -> list:
    values = list(arr.tolist() if isinstance(arr, np.ndarray) else arr)
    out = []
    for v in values:
        if isinstance(v, (float, np.floating)):
            raise ExactInputError(
                f"{what} contains float {v!r}; exact solvers need rational "
                f"input (int, Fraction or compatible)")
        if isinstance(v, (int, np.integer)):
            v = Fraction(int(v))
        out.append(v)
    return out


def _pivot(value):
    """Return the pivot to divide by, deferring exact zeros to eps."""
    if _is_zero(value):
        return DeferredScalar.epsilon()
    return value


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def exact_solve_pd(system: LinearSystem) -> list:
    """Exact pentadiagonal LU solve ("SPDM").

    Same unit-lower LU sweep as the numerical pentadiagonal solver, run over
    exact scalars; zero pivots are deferred to eps.  Returns a list of exact
    scalars whose residual is exactly zero.
    """
    m = system.matrix
    if not isinstance(m, PentaMatrix):
        raise TypeError("exact_solve_pd expects a pentadiagonal system")
    n = m.n
    if n < 3:
        raise ValueError("pentadiagonal solver needs N >= 3")
    e = _exact_list(m.d2m, "d2m")
    c = _exact_list(m.d1m, "d1m")
    d = _exact_list(m.d0, "d0")
    a = _exact_list(m.d1p, "d1p")
    b = _exact_list(m.d2p, "d2p")
    f = _exact_list(system.rhs, "rhs")

    u = [0] * n
    v = [0] * n
    w = [0] * n
    l1 = [0] * n
    l2 = [0] * n

    u[0] = _pivot(d[0])
    v[0] = a[0]
    w[0] = b[0]
    l1[1] = c[1] / u[0]
    u[1] = _pivot(d[1] - l1[1] * v[0])
    v[1] = a[1] - l1[1] * w[0]
    if n >= 4:
        w[1] = b[1]
    for i in range(2, n):
        l2[i] = e[i] / u[i - 2]
        l1[i] = (c[i] - l2[i] * v[i - 2]) / u[i - 1]
        u[i] = _pivot(d[i] - l2[i] * w[i - 2] - l1[i] * v[i - 1])
        if i <= n - 2:
            v[i] = a[i] - l1[i] * w[i - 1]
        if i <= n - 3:
            w[i] = b[i]

    y = [0] * n
    y[0] = f[0]
    y[1] = f[1] - l1[1] * y[0]
    for i in range(2, n):
        y[i] = f[i] - l1[i] * y[i - 1] - l2[i] * y[i - 2]

    x = [0] * n
    x[n - 1] = y[n - 1] / u[n - 1]
    x[n - 2] = (y[n - 2] - v[n - 2] * x[n - 1]) / u[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (y[i] - v[i] * x[i + 1] - w[i] * x[i + 2]) / u[i]
    return [_finalize(xi) for xi in x]


def exact_solve_td(system: LinearSystem) -> list:
    """Exact Thomas solve ("STDM"); dominance is not required.

    The forward-sweep denominators are the quotients of consecutive leading
    principal minors; whenever one of them is exactly zero the formal eps is
    used instead and the recurrences continue over rational functions of
    eps.  Components are finalized (eps -> 0) after back substitution, so
    eps never appears in the output.

    A singular matrix with an inconsistent right-hand side leaves a pole at
    eps = 0 and raises SingularMatrixError; a singular but consistent system
    has a finite limit and yields one member of its solution set.
    """
    m = system.matrix
    if not isinstance(m, TriMatrix):
        raise TypeError("exact_solve_td expects a tridiagonal system")
    n = m.n
    if n < 2:
        raise ValueError("tridiagonal solver needs N >= 2")
    c = _exact_list(m.sub, "sub")
    d = _exact_list(m.diag, "diag")
    a = _exact_list(m.sup, "sup")
    f = _exact_list(system.rhs, "rhs")

    sp = [0] * n
    z = [0] * n

    den = _pivot(d[0])
    sp[0] = a[0] / den
    z[0] = f[0] / den
    for i in range(1, n - 1):
        den = _pivot(d[i] - c[i] * sp[i - 1])
        sp[i] = a[i] / den
        z[i] = (f[i] - c[i] * z[i - 1]) / den
    den = _pivot(d[n - 1] - c[n - 1] * sp[n - 2])
    z[n - 1] = (f[n - 1] - c[n - 1] * z[n - 2]) / den

    x = [0] * n
    x[n - 1] = z[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = z[i] - sp[i] * x[i + 1]
    return [_finalize(xi) for xi in x]
