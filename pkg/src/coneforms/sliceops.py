"""Differential forms and operators on the n-dimensional slice.

A ``SliceForm`` lives in the flat trivialisation: a k-form in the slice
coordinates x^1..x^n with rational-function coefficients; its conformal
weight is bookkeeping metadata only.  A ``SliceOperator`` is a matrix of
scalar linear differential operators in canonical normal form (all
coefficients standing left of the derivatives, multi-indices sorted), so
operator equality is structural equality and renderings are byte-stable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .ambient import AmbientContext, merge_sign, remove_at
from .errors import ProportionalityFailure
from .poly import MultiPoly
from .ratfunc import RationalFunction

Key = tuple[int, ...]
MIdx = tuple[int, ...]  # length-n derivative multi-index over x^1..x^n


def slice_keys(n: int, k: int) -> list[Key]:
    if k < 0 or k > n:
        return []
    return list(itertools.combinations(range(1, n + 1), k))


class SliceForm:
    __slots__ = ("ctx", "degree", "coeffs", "weight")

    def __init__(self, ctx: AmbientContext, degree: int,
                 coeffs: dict[Key, RationalFunction],
                 weight: int | None = None):
        self.ctx = ctx
        self.degree = degree
        self.weight = weight
        self.coeffs = {}
        for key, c in coeffs.items():
            if c.is_zero():
                continue
            if len(key) != degree or any(a < 1 or a > ctx.n for a in key) or \
                    any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"bad slice key {key} for degree {degree}")
            self.coeffs[key] = c

    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, key: Key) -> RationalFunction:
        return self.coeffs.get(tuple(key), self.ctx.rf_zero())

    def __add__(self, other: "SliceForm") -> "SliceForm":
        if self.is_zero():
            return other
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            s = out.get(key)
            v = c if s is None else s + c
            if v.is_zero():
                out.pop(key, None)
            else:
                out[key] = v
        return SliceForm(self.ctx, self.degree, out, self.weight)

    def __neg__(self) -> "SliceForm":
        return SliceForm(self.ctx, self.degree,
                         {k: -c for k, c in self.coeffs.items()}, self.weight)

    def __sub__(self, other: "SliceForm") -> "SliceForm":
        return self + (-other)

    def scale(self, c) -> "SliceForm":
        return SliceForm(self.ctx, self.degree,
                         {k: v * c for k, v in self.coeffs.items()},
                         self.weight)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SliceForm) and self.coeffs == other.coeffs
                and (self.degree == other.degree or self.is_zero()))

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.coeffs.items()))))

    def proportionality(self, other: "SliceForm") -> Fraction | None:
        """c with self == c*other, when the forms share support; None when
        not proportional.  Zero/zero counts as proportional with c = 0."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        if self.is_zero():
            return Fraction(0)
        if set(self.coeffs) != set(other.coeffs):
            return None
        ratio: Fraction | None = None
        for key, c in self.coeffs.items():
            o = other.coeffs[key]
            prod = c.num * o.den_poly()
            base = o.num * c.den_poly()
            q = prod.divide_exact(base)
            if q is None or not q.is_constant():
                return None
            r = q.constant_value()
            if ratio is None:
                ratio = r
            elif ratio != r:
                return None
        return ratio

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.ctx.names
        parts = []
        for key in sorted(self.coeffs):
            basis = "^".join(f"d{names[a]}" for a in key) if key else "1"
            parts.append(f"({self.coeffs[key].render(names)}) {basis}")
        return "  +  ".join(parts)

    def __repr__(self):
        return f"SliceForm(k={self.degree}, {self.render()})"


def slice_d(u: SliceForm) -> SliceForm:
    ctx = u.ctx
    out: dict[Key, RationalFunction] = {}
    for key, c in u.coeffs.items():
        for a in range(1, ctx.n + 1):
            if a in key:
                continue
            dc = c.deriv(a)
            if dc.is_zero():
                continue
            merged, sign = merge_sign((a,), key)
            v = dc if sign > 0 else -dc
            s = out.get(merged)
            v = v if s is None else s + v
            if v.is_zero():
                out.pop(merged, None)
            else:
                out[merged] = v
    w = None if u.weight is None else u.weight
    return SliceForm(ctx, u.degree + 1, out, w)


def slice_codiff(u: SliceForm) -> SliceForm:
    """delta = -i(nabla) for the flat slice metric diag(eps)."""
    ctx = u.ctx
    out: dict[Key, RationalFunction] = {}
    for key, c in u.coeffs.items():
        for j, a in enumerate(key):
            s = ctx.eps[a - 1]
            v = c.deriv(a)
            if v.is_zero():
                continue
            total = -s if j % 2 == 0 else s
            v = v if total > 0 else -v
            rk = remove_at(key, j)
            acc = out.get(rk)
            v = v if acc is None else acc + v
            if v.is_zero():
                out.pop(rk, None)
            else:
                out[rk] = v
    return SliceForm(ctx, u.degree - 1, out, u.weight)


def slice_wedge(g: SliceForm, u: SliceForm) -> SliceForm:
    out: dict[Key, RationalFunction] = {}
    for kg, cg in g.coeffs.items():
        for kf, cf in u.coeffs.items():
            m = merge_sign(kg, kf)
            if m is None:
                continue
            merged, sign = m
            v = cg * cf
            v = v if sign > 0 else -v
            s = out.get(merged)
            v = v if s is None else s + v
            if v.is_zero():
                out.pop(merged, None)
            else:
                out[merged] = v
    return SliceForm(u.ctx, g.degree + u.degree, out, u.weight)


def _perm_sign(seq: tuple[int, ...]) -> int:
    sign = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign


def hodge_star(u: SliceForm) -> SliceForm:
    """Euclidean Hodge star (requires Riemannian slice signature);
    star(dx^K) = sign(K, K^c) dx^(K^c), so star star = (-1)^{k(n-k)}."""
    ctx = u.ctx
    if ctx.q != 0:
        raise ValueError("Hodge star implemented for Riemannian slices only")
    n = ctx.n
    out: dict[Key, RationalFunction] = {}
    for key, c in u.coeffs.items():
        comp = tuple(a for a in range(1, n + 1) if a not in key)
        sign = _perm_sign(key + comp)
        out[comp] = c if sign > 0 else -c
    return SliceForm(ctx, n - u.degree, out, u.weight)


def slice_monomial(ctx: AmbientContext, k: int, key: Key,
                   beta: MIdx) -> SliceForm:
    e = [0] * ctx.nvars
    for a in range(1, ctx.n + 1):
        e[a] = beta[a - 1]
    c = RationalFunction.from_poly(ctx.table,
                                   MultiPoly.monomial(ctx.nvars, tuple(e)))
    return SliceForm(ctx, k, {tuple(key): c})


# -- slice differential operators -------------------------------------------------


def _midx_factorial(a: MIdx) -> int:
    out = 1
    for k in a:
        out *= math.factorial(k)
    return out


def _midx_le(a: MIdx, b: MIdx) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _midx_sub(b: MIdx, a: MIdx) -> MIdx:
    return tuple(x - y for x, y in zip(b, a))


def _midx_add(a: MIdx, b: MIdx) -> MIdx:
    return tuple(x + y for x, y in zip(a, b))


def _falling(b: MIdx, a: MIdx) -> int:
    """beta!/(beta-alpha)!"""
    out = 1
    for x, y in zip(b, a):
        out *= math.factorial(x) // math.factorial(x - y)
    return out


def _binom_midx(a: MIdx, g: MIdx) -> int:
    out = 1
    for x, y in zip(a, g):
        out *= math.comb(x, y)
    return out


def midx_iter(n: int, max_deg: int):
    """Multi-indices over n variables in graded order, degrees 0..max_deg."""
    for d in range(max_deg + 1):
        for c in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in c:
                e[i] += 1
            yield tuple(e)


def midx_exact(n: int, deg: int):
    for c in itertools.combinations_with_replacement(range(n), deg):
        e = [0] * n
        for i in c:
            e[i] += 1
        yield tuple(e)


class SliceOperator:
    """Matrix of scalar differential operators between slice form bundles."""

    __slots__ = ("ctx", "k_in", "k_out", "w_in", "w_out", "entries")

    def __init__(self, ctx: AmbientContext, k_in: int, k_out: int,
                 entries: dict[tuple[Key, Key], dict[MIdx, RationalFunction]],
                 w_in: int | None = None, w_out: int | None = None):
        self.ctx = ctx
        self.k_in = k_in
        self.k_out = k_out
        self.w_in = w_in
        self.w_out = w_out
        self.entries = {}
        for (kj, ki), ops in entries.items():
            cleaned = {a: c for a, c in ops.items() if not c.is_zero()}
            if cleaned:
                self.entries[(tuple(kj), tuple(ki))] = cleaned

    @classmethod
    def zero(cls, ctx: AmbientContext, k_in: int, k_out: int,
             w_in: int | None = None, w_out: int | None = None
             ) -> "SliceOperator":
        return cls(ctx, k_in, k_out, {}, w_in, w_out)

    @classmethod
    def identity(cls, ctx: AmbientContext, k: int) -> "SliceOperator":
        zero_a = (0,) * ctx.n
        one = ctx.rf(1)
        return cls(ctx, k, k, {
            (key, key): {zero_a: one} for key in slice_keys(ctx.n, k)})

    def is_zero(self) -> bool:
        return not self.entries

    def order(self) -> int:
        if not self.entries:
            return -1
        return max(sum(a) for ops in self.entries.values() for a in ops)

    def apply(self, u: SliceForm) -> SliceForm:
        ctx = self.ctx
        out: dict[Key, RationalFunction] = {}
        for (kj, ki), ops in self.entries.items():
            cu = u.coeffs.get(ki)
            if cu is None:
                continue
            for alpha, c in ops.items():
                v = cu
                for a, m in enumerate(alpha):
                    for _ in range(m):
                        v = v.deriv(a + 1)
                    if v.is_zero():
                        break
                if v.is_zero():
                    continue
                v = c * v
                s = out.get(kj)
                v = v if s is None else s + v
                if v.is_zero():
                    out.pop(kj, None)
                else:
                    out[kj] = v
        return SliceForm(ctx, self.k_out, out, self.w_out)

    def __add__(self, other: "SliceOperator") -> "SliceOperator":
        out = {k: dict(v) for k, v in self.entries.items()}
        for key, ops in other.entries.items():
            tgt = out.setdefault(key, {})
            for a, c in ops.items():
                s = tgt.get(a)
                v = c if s is None else s + c
                if v.is_zero():
                    tgt.pop(a, None)
                else:
                    tgt[a] = v
        return SliceOperator(self.ctx, self.k_in, self.k_out, out,
                             self.w_in, self.w_out)

    def __neg__(self) -> "SliceOperator":
        return self.scale(-1)

    def __sub__(self, other: "SliceOperator") -> "SliceOperator":
        return self + other.scale(-1)

    def scale(self, c) -> "SliceOperator":
        out = {}
        for key, ops in self.entries.items():
            out[key] = {a: v * c for a, v in ops.items()}
        return SliceOperator(self.ctx, self.k_in, self.k_out, out,
                             self.w_in, self.w_out)

    def compose(self, inner: "SliceOperator") -> "SliceOperator":
        """self o inner, expanded to normal form via the Leibniz rule."""
        ctx = self.ctx
        n = ctx.n
        out: dict[tuple[Key, Key], dict[MIdx, RationalFunction]] = {}
        for (kj, km), ops_outer in self.entries.items():
            for (km2, ki), ops_inner in inner.entries.items():
                if km != km2:
                    continue
                for alpha, c_out in ops_outer.items():
                    for beta, c_in in ops_inner.items():
                        for gamma in itertools.product(
                                *(range(a + 1) for a in alpha)):
                            gamma = tuple(gamma)
                            dc = c_in
                            for a, m in enumerate(gamma):
                                for _ in range(m):
                                    dc = dc.deriv(a + 1)
                                if dc.is_zero():
                                    break
                            if dc.is_zero():
                                continue
                            coef = c_out * dc * _binom_midx(alpha, gamma)
                            midx = _midx_add(_midx_sub(alpha, gamma), beta)
                            tgt = out.setdefault((kj, ki), {})
                            s = tgt.get(midx)
                            v = coef if s is None else s + coef
                            if v.is_zero():
                                tgt.pop(midx, None)
                            else:
                                tgt[midx] = v
        return SliceOperator(ctx, inner.k_in, self.k_out, out,
                             inner.w_in, self.w_out)

    def formal_adjoint(self) -> "SliceOperator":
        """Adjoint for the pairing sum_K eps_K u_K v_K integrated over the
        slice: coefficient c d^alpha goes to (-1)^|alpha| d^alpha (c .),
        re-expanded into normal form."""
        ctx = self.ctx
        out: dict[tuple[Key, Key], dict[MIdx, RationalFunction]] = {}
        for (kj, ki), ops in self.entries.items():
            eps_fac = 1
            for a in kj:
                eps_fac *= ctx.eps[a - 1]
            for a in ki:
                eps_fac *= ctx.eps[a - 1]
            for alpha, c in ops.items():
                sign = -1 if sum(alpha) % 2 else 1
                base = c * (sign * eps_fac)
                # (-1)^|a| d^alpha (c u) = sum_g binom(a,g) d^g c * d^(a-g) u
                for gamma in itertools.product(*(range(a + 1) for a in alpha)):
                    gamma = tuple(gamma)
                    dc = base
                    for a, m in enumerate(gamma):
                        for _ in range(m):
                            dc = dc.deriv(a + 1)
                        if dc.is_zero():
                            break
                    if dc.is_zero():
                        continue
                    coef = dc * _binom_midx(alpha, gamma)
                    midx = _midx_sub(alpha, gamma)
                    tgt = out.setdefault((ki, kj), {})
                    s = tgt.get(midx)
                    v = coef if s is None else s + coef
                    if v.is_zero():
                        tgt.pop(midx, None)
                    else:
                        tgt[midx] = v
        return SliceOperator(ctx, self.k_out, self.k_in, out,
                             self.w_out, self.w_in)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SliceOperator)
                and self.entries == other.entries
                and (self.is_zero() or (self.k_in, self.k_out) ==
                     (other.k_in, other.k_out)))

    def __hash__(self):
        return hash((self.k_in, self.k_out,
                     tuple(sorted((k, tuple(sorted(v.items())))
                                  for k, v in self.entries.items()))))

    def proportionality(self, other: "SliceOperator") -> Fraction | None:
        """c with self == c*other; None when not proportional."""
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        if self.is_zero():
            return Fraction(0)
        ratio: Fraction | None = None
        keys = set(self.entries) | set(other.entries)
        for key in keys:
            a = self.entries.get(key, {})
            b = other.entries.get(key, {})
            if set(a) != set(b):
                return None
            for midx in a:
                prod = a[midx].num * b[midx].den_poly()
                base = b[midx].num * a[midx].den_poly()
                q = prod.divide_exact(base)
                if q is None or not q.is_constant():
                    return None
                r = q.constant_value()
                if ratio is None:
                    ratio = r
                elif ratio != r:
                    return None
        return ratio

    def constant_coefficients(self) -> bool:
        return all(c.den == {} and c.num.is_constant()
                   for ops in self.entries.values() for c in ops.values())

    def render(self) -> str:
        if not self.entries:
            return "0"
        names = self.ctx.names
        lines = []
        for (kj, ki) in sorted(self.entries):
            ops = self.entries[(kj, ki)]
            terms = []
            for alpha in sorted(ops, key=lambda a: (sum(a), a)):
                c = ops[alpha]
                dpart = "".join(
                    f" d{names[i + 1]}" + (f"^{m}" if m > 1 else "")
                    for i, m in enumerate(alpha) if m)
                terms.append(f"({c.render(names)}){dpart}")
            jlab = ",".join(str(a) for a in kj) or "-"
            ilab = ",".join(str(a) for a in ki) or "-"
            lines.append(f"[{jlab} <- {ilab}] " + " + ".join(terms))
        return "\n".join(lines)

    def __repr__(self):
        return (f"SliceOperator(k_in={self.k_in}, k_out={self.k_out}, "
                f"order={self.order()})")


def operator_from_map(ctx: AmbientContext, fn: Callable[[SliceForm], SliceForm],
                      k_in: int, k_out: int, order_bound: int,
                      w_in: int | None = None, w_out: int | None = None,
                      certify: bool = True,
                      syntactic_bound: int | None = None) -> SliceOperator:
    """Exact interpolation of a linear differential operator of order
    <= order_bound from its action on the monomial-coefficient basis.

    The certification pass re-applies the map on every monomial of degree
    order_bound+1 .. syntactic_bound: since the map is syntactically a
    differential operator of order <= syntactic_bound, agreement there
    proves the extraction (an order-m part cannot hide from degree-m
    monomials).  syntactic_bound defaults to order_bound + 1.
    """
    n = ctx.n
    entries: dict[tuple[Key, Key], dict[MIdx, RationalFunction]] = {}
    for ki in slice_keys(n, k_in):
        coeffs: dict[tuple[Key, MIdx], RationalFunction] = {}
        for beta in midx_iter(n, order_bound):
            v = fn(slice_monomial(ctx, k_in, ki, beta))
            resid: dict[Key, RationalFunction] = dict(v.coeffs)
            for (kj, alpha), c in coeffs.items():
                if alpha != beta and _midx_le(alpha, beta):
                    fall = _falling(beta, alpha)
                    mono = MultiPoly.monomial(
                        ctx.nvars,
                        _slice_expt(ctx, _midx_sub(beta, alpha)), fall)
                    delta = c * RationalFunction.from_poly(ctx.table, mono)
                    s = resid.get(kj, ctx.rf_zero()) - delta
                    if s.is_zero():
                        resid.pop(kj, None)
                    else:
                        resid[kj] = s
            fact = _midx_factorial(beta)
            for kj, r in resid.items():
                if not r.is_zero():
                    coeffs[(kj, beta)] = r * Fraction(1, fact)
        for (kj, alpha), c in coeffs.items():
            entries.setdefault((kj, ki), {})[alpha] = c
    op = SliceOperator(ctx, k_in, k_out, entries, w_in, w_out)
    if certify:
        top = max(order_bound + 1, syntactic_bound or 0)
        for deg in range(order_bound + 1, top + 1):
            for ki in slice_keys(n, k_in):
                for beta in midx_exact(n, deg):
                    u = slice_monomial(ctx, k_in, ki, beta)
                    if not (fn(u) - op.apply(u)).is_zero():
                        raise ProportionalityFailure(
                            "descent certification failed: action at degree "
                            f"{deg} deviates from the extracted operator "
                            "(order bound too small?)")
    return op


def _slice_expt(ctx: AmbientContext, midx: MIdx) -> tuple[int, ...]:
    e = [0] * ctx.nvars
    for a in range(1, ctx.n + 1):
        e[a] = midx[a - 1]
    return tuple(e)
