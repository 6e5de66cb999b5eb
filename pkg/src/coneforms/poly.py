"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``nvars`` variables is a map from exponent tuples to
``Fraction`` coefficients; zero coefficients are never stored.  The term
order is graded lexicographic for the variable order v0 < v1 < ... <
v_{nvars-1}: terms are compared first by total degree, then by the
exponent of the *largest* variable, and so on down.  Rendering always
walks terms from the leading one, so equal polynomials render to equal
strings.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Expt = tuple[int, ...]


def _term_key(e: Expt) -> tuple:
    return (sum(e), tuple(reversed(e)))


class MultiPoly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Expt, Fraction] | None = None):
        self.nvars = nvars
        cleaned: dict[Expt, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    cleaned[e] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = cleaned
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "MultiPoly":
        c = Fraction(c)
        if c == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int, exp: int = 1) -> "MultiPoly":
        e = [0] * nvars
        e[i] = exp
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, nvars: int, e: Expt, c=1) -> "MultiPoly":
        return cls(nvars, {tuple(e): Fraction(c)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def homogeneous_degree(self) -> int | None:
        """Common total degree of all terms, or None if mixed/zero."""
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            return None
        return degs.pop()

    def leading(self) -> tuple[Expt, Fraction]:
        e = max(self.terms, key=_term_key)
        return e, self.terms[e]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        p = MultiPoly(self.nvars)
        p.terms = out
        return p

    def __neg__(self) -> "MultiPoly":
        p = MultiPoly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[Expt, Fraction] = {}
        if len(self.terms) > len(other.terms):
            a, b = other, self
        else:
            a, b = self, other
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                s = out.get(e)
                if s is None:
                    out[e] = c
                else:
                    s = s + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        p = MultiPoly(self.nvars)
        p.terms = out
        return p

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        c = Fraction(c)
        if c == 0:
            return MultiPoly(self.nvars)
        p = MultiPoly(self.nvars)
        p.terms = {e: k * c for e, k in self.terms.items()}
        return p

    def __pow__(self, m: int) -> "MultiPoly":
        if m < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(self.nvars, 1)
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base if m > 1 else base
            m >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    # -- calculus and substitution ------------------------------------------

    def deriv(self, i: int) -> "MultiPoly":
        out: dict[Expt, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                out[e2] = out.get(e2, Fraction(0)) + c * k
        p = MultiPoly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c}
        return p

    def euler(self) -> "MultiPoly":
        """Sum_i v_i * d/dv_i: multiplies each term by its total degree."""
        p = MultiPoly(self.nvars)
        p.terms = {e: c * sum(e) for e, c in self.terms.items() if sum(e)}
        return p

    def subs_poly(self, i: int, value: "MultiPoly") -> "MultiPoly":
        """Substitute a polynomial for variable i."""
        out = MultiPoly(self.nvars)
        powers: dict[int, MultiPoly] = {0: MultiPoly.const(self.nvars, 1)}

        def vpow(k: int) -> MultiPoly:
            if k not in powers:
                powers[k] = vpow(k - 1) * value
            return powers[k]

        for e, c in self.terms.items():
            rest = e[:i] + (0,) + e[i + 1 :]
            out = out + MultiPoly.monomial(self.nvars, rest, c) * vpow(e[i])
        return out

    def divide_exact(self, g: "MultiPoly") -> "MultiPoly | None":
        """Return q with self == q*g, or None when no exact quotient exists."""
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return MultiPoly(self.nvars)
        ge, gc = g.leading()
        rem = self
        quo: dict[Expt, Fraction] = {}
        while not rem.is_zero():
            re, rc = rem.leading()
            qe = tuple(a - b for a, b in zip(re, ge))
            if any(k < 0 for k in qe):
                return None
            qc = rc / gc
            quo[qe] = qc
            rem = rem - MultiPoly.monomial(self.nvars, qe, qc) * g
            if not rem.is_zero() and _term_key(rem.leading()[0]) >= _term_key(re):
                return None
        p = MultiPoly(self.nvars)
        p.terms = quo
        return p

    # -- rendering -----------------------------------------------------------

    def render(self, names: Iterable[str]) -> str:
        if not self.terms:
            return "0"
        names = list(names)
        parts: list[str] = []
        for e in sorted(self.terms, key=_term_key, reverse=True):
            c = self.terms[e]
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(names[i])
                elif k > 1:
                    factors.append(f"{names[i]}^{k}")
            body = "*".join(factors)
            mag = abs(c)
            if not body:
                coeff = str(mag)
            elif mag == 1:
                coeff = ""
            else:
                coeff = f"{mag}*"
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {coeff}{body}" if body else f"{sign} {coeff}")
        first = parts[0]
        first = first[2:] if first.startswith("+ ") else "-" + first[2:]
        return " ".join([first] + parts[1:])

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.terms!r})"
