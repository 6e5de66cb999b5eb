"""Homogeneous rational functions on the ambient chart t > 0.

A ``RationalFunction`` is a ``MultiPoly`` numerator over a denominator kept
in factored form: a map from registered factor ids to positive exponents.
Only the coordinate ``t`` and registered scale polynomials may appear in
denominators (chart discipline), which keeps gcd reduction a matter of
exact trial division by a handful of irreducible factors and makes the
normal form canonical: numerator not divisible by any denominator factor,
all rational content carried by the numerator coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ChartViolation, Inhomogeneous
from .poly import MultiPoly

T_FACTOR = "t"


class FactorTable:
    """Registry of the polynomials allowed in denominators.

    Each entry knows its reduction under the cone substitution
    rho -> -S/(2t) (as ``factor == const * reduced / t^tpow``) and under the
    slice substitution t=1, rho=-S/2.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.polys: dict[str, MultiPoly] = {T_FACTOR: MultiPoly.var(nvars, 0)}
        # factor id -> (reduced id, power of t, rational const)
        self.cone_map: dict[str, tuple[str, int, Fraction]] = {
            T_FACTOR: (T_FACTOR, 0, Fraction(1))
        }
        # factor id -> (slice id or None, rational const)
        self.slice_map: dict[str, tuple[str | None, Fraction]] = {
            T_FACTOR: (None, Fraction(1))
        }
        # slice factor id -> (ambient id, power of t, const) for x -> x/t
        self.lift_map: dict[str, tuple[str, int, Fraction]] = {}

    def register(self, fid: str, poly: MultiPoly,
                 cone: tuple[str, int, Fraction],
                 slice_: tuple[str | None, Fraction]) -> None:
        if fid in self.polys:
            if self.polys[fid] != poly:
                raise ValueError(f"factor id {fid!r} already registered differently")
            return
        self.polys[fid] = poly
        self.cone_map[fid] = cone
        self.slice_map[fid] = slice_

    def poly(self, fid: str) -> MultiPoly:
        return self.polys[fid]


class RationalFunction:
    __slots__ = ("table", "num", "den")

    def __init__(self, table: FactorTable, num: MultiPoly,
                 den: dict[str, int] | None = None, reduce: bool = True):
        self.table = table
        self.num = num
        self.den = {f: e for f, e in (den or {}).items() if e}
        if any(e < 0 for e in self.den.values()):
            raise ValueError("negative denominator exponent")
        if num.is_zero():
            self.den = {}
        elif reduce and self.den:
            self._reduce()

    def _reduce(self) -> None:
        num = self.num
        for fid in sorted(self.den):
            e = self.den[fid]
            fpoly = self.table.poly(fid)
            while e > 0:
                q = num.divide_exact(fpoly)
                if q is None:
                    break
                num = q
                e -= 1
            if e:
                self.den[fid] = e
            else:
                del self.den[fid]
        self.num = num

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_poly(cls, table: FactorTable, p: MultiPoly) -> "RationalFunction":
        return cls(table, p, None, reduce=False)

    @classmethod
    def const(cls, table: FactorTable, c) -> "RationalFunction":
        return cls(table, MultiPoly.const(table.nvars, c), None, reduce=False)

    def zero_like(self) -> "RationalFunction":
        return RationalFunction(self.table, MultiPoly.zero(self.table.nvars))

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_poly(self) -> MultiPoly:
        p = MultiPoly.const(self.table.nvars, 1)
        for fid, e in sorted(self.den.items()):
            p = p * (self.table.poly(fid) ** e)
        return p

    def homogeneous_degree(self) -> int:
        """Degree under the ambient dilations; raises on mixed input."""
        if self.is_zero():
            raise Inhomogeneous("zero has no homogeneity degree")
        dn = self.num.homogeneous_degree()
        if dn is None:
            raise Inhomogeneous("numerator mixes degrees")
        dd = 0
        for fid, e in self.den.items():
            df = self.table.poly(fid).homogeneous_degree()
            if df is None:
                raise Inhomogeneous(f"denominator factor {fid!r} mixes degrees")
            dd += df * e
        return dn - dd

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        try:
            self.homogeneous_degree()
            return True
        except Inhomogeneous:
            return False

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction.from_poly(self.table, other)
        return RationalFunction.const(self.table, other)

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = max(den.get(f, 0), e)
        a = self.num
        for f, e in den.items():
            k = e - self.den.get(f, 0)
            if k:
                a = a * (self.table.poly(f) ** k)
        b = other.num
        for f, e in den.items():
            k = e - other.den.get(f, 0)
            if k:
                b = b * (self.table.poly(f) ** k)
        return RationalFunction(self.table, a + b, den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(self.table, -self.num, self.den, reduce=False)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.table, self.num.scale(other), self.den,
                                    reduce=False)
        other = self._coerce(other)
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = den.get(f, 0) + e
        return RationalFunction(self.table, self.num * other.num, den)

    __rmul__ = __mul__

    def divide_by_factor(self, fid: str, power: int = 1) -> "RationalFunction":
        den = dict(self.den)
        den[fid] = den.get(fid, 0) + power
        return RationalFunction(self.table, self.num, den)

    def __truediv__(self, other) -> "RationalFunction":
        """Division; the divisor must reduce to a constant times registered
        factors (chart discipline keeps anything else out of denominators)."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        num = other.num
        extra: dict[str, int] = {}
        for fid in sorted(self.table.polys):
            fpoly = self.table.poly(fid)
            if fpoly.is_constant():
                continue
            while True:
                q = num.divide_exact(fpoly)
                if q is None:
                    break
                num = q
                extra[fid] = extra.get(fid, 0) + 1
        if not num.is_constant():
            raise ChartViolation(
                "divisor is not a unit times registered denominator factors")
        c = num.constant_value()
        out = self * (Fraction(1) / c)
        for f, e in other.den.items():
            out = out * RationalFunction.from_poly(self.table,
                                                   self.table.poly(f) ** e)
        for f, e in extra.items():
            out = out.divide_by_factor(f, e)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            other = self._coerce(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, tuple(sorted(self.den.items()))))

    def cross_equal(self, other: "RationalFunction") -> bool:
        """Equality by cross multiplication; independent of normal forms."""
        return (self.num * other.den_poly()) == (other.num * self.den_poly())

    # -- calculus --------------------------------------------------------------

    def deriv(self, i: int) -> "RationalFunction":
        if not self.den:
            return RationalFunction(self.table, self.num.deriv(i), None,
                                    reduce=False)
        fids = sorted(self.den)
        polys = [self.table.poly(f) for f in fids]
        prod_all = MultiPoly.const(self.table.nvars, 1)
        for p in polys:
            prod_all = prod_all * p
        num = self.num.deriv(i) * prod_all
        for j, f in enumerate(fids):
            others = MultiPoly.const(self.table.nvars, 1)
            for l, p in enumerate(polys):
                if l != j:
                    others = others * p
            num = num - self.num.scale(self.den[f]) * polys[j].deriv(i) * others
        den = {f: e + 1 for f, e in self.den.items()}
        return RationalFunction(self.table, num, den)

    def euler_applied(self) -> "RationalFunction":
        """Apply the ambient Euler operator sum_A v_A d/dv_A."""
        out = self.zero_like()
        for i in range(self.table.nvars):
            out = out + RationalFunction.from_poly(
                self.table, MultiPoly.var(self.table.nvars, i)) * self.deriv(i)
        return out

    def render(self, names: list[str], factor_names: dict[str, str] | None = None
               ) -> str:
        ns = self.num.render(names)
        if not self.den:
            return ns
        fn = factor_names or {}
        parts = []
        for fid, e in sorted(self.den.items()):
            label = fn.get(fid, fid)
            parts.append(label if e == 1 else f"{label}^{e}")
        return f"({ns}) / ({'*'.join(parts)})"

    def __repr__(self):
        return f"RationalFunction(num={self.num!r}, den={self.den!r})"
