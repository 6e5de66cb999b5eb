"""Reduction modulo the cone ideal and related exact division.

The quadric Q = 2*t*rho + S (S the signed square sum of the slice
coordinates) is solved for rho on the chart t > 0, so membership in the
principal ideal (Q) and canonical representatives modulo (Q) are both
computed by the substitution rho -> -S/(2t); no Groebner machinery is
needed or wanted.
"""

from __future__ import annotations

from fractions import Fraction

from .ambient import AmbientContext, AmbientForm
from .errors import ChartViolation, NotDivisible
from .poly import MultiPoly
from .ratfunc import RationalFunction, T_FACTOR


def subs_rho_poly(ctx: AmbientContext, p: MultiPoly) -> tuple[MultiPoly, int]:
    """Substitute rho -> -S/(2t); returns (numerator, j) with value num/t^j."""
    if p.is_zero():
        return p, 0
    rho = ctx.RHO
    j = p.degree_in(rho)
    if j == 0:
        return p, 0
    nv = ctx.nvars
    out = MultiPoly.zero(nv)
    minus_S = -ctx.S_poly
    spow: dict[int, MultiPoly] = {0: MultiPoly.const(nv, 1)}

    def s_k(k: int) -> MultiPoly:
        if k not in spow:
            spow[k] = s_k(k - 1) * minus_S
        return spow[k]

    for e, c in p.terms.items():
        k = e[rho]
        base = list(e)
        base[rho] = 0
        base[ctx.T] += j - k
        mono = MultiPoly.monomial(nv, tuple(base), c * Fraction(1, 2 ** k))
        out = out + mono * s_k(k)
    return out, j


def reduce_mod_cone(ctx: AmbientContext, f: RationalFunction) -> RationalFunction:
    """Canonical representative of f modulo (Q) on the chart t > 0.

    The output involves no rho; f lies in (Q) iff the output is zero.
    """
    num, jn = subs_rho_poly(ctx, f.num)
    den: dict[str, int] = {}
    tshift = -jn
    const = Fraction(1)
    for fid, e in f.den.items():
        rid, jf, cf = ctx.table.cone_map[fid]
        rpoly = ctx.table.poly(rid)
        if rpoly.is_zero():
            raise ChartViolation(f"factor {fid!r} vanishes on the cone chart")
        tshift += jf * e
        const /= cf ** e
        den[rid] = den.get(rid, 0) + e
    num = num.scale(const)
    if tshift > 0:
        e0 = [0] * ctx.nvars
        e0[ctx.T] = tshift
        num = num * MultiPoly.monomial(ctx.nvars, tuple(e0))
    elif tshift < 0:
        den[T_FACTOR] = den.get(T_FACTOR, 0) - tshift
    return RationalFunction(ctx.table, num, den)


def reduce_form_mod_cone(ctx: AmbientContext, F: AmbientForm) -> AmbientForm:
    """Componentwise cone reduction; keys are untouched (no pullback)."""
    return F.map_coeffs(lambda c: reduce_mod_cone(ctx, c))


def is_zero_mod_cone(ctx: AmbientContext, F: AmbientForm) -> bool:
    return reduce_form_mod_cone(ctx, F).is_zero()


def divide_exact_by_Q(ctx: AmbientContext, f: MultiPoly) -> MultiPoly:
    """The exact quotient f / Q; raises NotDivisible when f is not in (Q)."""
    q = f.divide_exact(ctx.Q_poly)
    if q is None:
        raise NotDivisible("polynomial is not a multiple of the cone quadric")
    return q


def subs_slice_poly(ctx: AmbientContext, p: MultiPoly) -> MultiPoly:
    """Substitute t = 1 and rho = -S/2 (the slice parametrisation)."""
    nv = ctx.nvars
    rho, t = ctx.RHO, ctx.T
    out = MultiPoly.zero(nv)
    minus_half_S = ctx.S_poly.scale(Fraction(-1, 2))
    spow: dict[int, MultiPoly] = {0: MultiPoly.const(nv, 1)}

    def s_k(k: int) -> MultiPoly:
        if k not in spow:
            spow[k] = s_k(k - 1) * minus_half_S
        return spow[k]

    for e, c in p.terms.items():
        base = list(e)
        k = base[rho]
        base[rho] = 0
        base[t] = 0
        out = out + MultiPoly.monomial(nv, tuple(base), c) * s_k(k)
    return out


def subs_slice(ctx: AmbientContext, f: RationalFunction) -> RationalFunction:
    num = subs_slice_poly(ctx, f.num)
    den: dict[str, int] = {}
    const = Fraction(1)
    for fid, e in f.den.items():
        sid, cf = ctx.table.slice_map[fid]
        const /= cf ** e
        if sid is not None:
            den[sid] = den.get(sid, 0) + e
    return RationalFunction(ctx.table, num.scale(const), den)
