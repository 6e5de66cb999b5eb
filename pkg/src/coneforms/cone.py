"""Scales, lifts and restrictions between the ambient chart and the slice.

The slice is the graph {t = 1, rho = -S/2} inside the null quadric.  The
canonical lift of a slice k-form u of conformal weight w is
t^w * (pullback of u under (t,x,rho) -> x/t): it is annihilated by i(X)
exactly and has dilation weight w - k.  Restriction is the pullback along
the slice embedding, which kills multiples of Q and of e(X) on the nose.

Registered scales are sigma = t + c*rho for rational c (c = 0 gives the
flat scale t); the representative metric of such a scale on the slice is
conformally flat with the factor s(x) = 1 - (c/2) S(x), and its constant
curvature is established by exact computation, never assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .ambient import (AmbientContext, AmbientForm, eps_dir, ext_d, codiff,
                      iota_form, iota_x, merge_sign, mul_q, wedge)
from .conealg import reduce_form_mod_cone, reduce_mod_cone, subs_slice
from .errors import DegenerateScale, NotProportional
from .poly import MultiPoly
from .ratfunc import RationalFunction, T_FACTOR
from .sliceops import SliceForm, slice_keys
from .trials import child_rng, random_form

# Sign convention tying the extracted (k-1)-form part to the scale-
# dependent slot of the two-step filtration; fixed once by requiring the
# descended differential to act in components as (w*mu - d alpha, d mu).
ALPHA_SIGN = 1


@dataclass(frozen=True)
class Scale:
    """Homogeneity-1 scale sigma = t + c*rho on the ambient chart."""

    id: str
    c: Fraction

    @property
    def is_flat(self) -> bool:
        return self.c == 0

    def factor_id(self) -> str:
        return T_FACTOR if self.is_flat else f"s:{self.id}"

    def slice_factor_id(self) -> str | None:
        return None if self.is_flat else f"s:{self.id}:x"


def register_scale(ctx: AmbientContext, sid: str, c) -> Scale:
    c = Fraction(c)
    scale = Scale(sid, c)
    if sid in ctx.scales:
        if ctx.scales[sid].c != c:
            raise ValueError(f"scale {sid!r} already registered with other c")
        return ctx.scales[sid]
    if not scale.is_flat:
        nv = ctx.nvars
        sigma = MultiPoly.var(nv, ctx.T) + MultiPoly.var(nv, ctx.RHO).scale(c)
        # cone reduction: t + c*rho == (t^2 - (c/2) S)/t
        e2 = [0] * nv
        e2[ctx.T] = 2
        reduced = MultiPoly.monomial(nv, tuple(e2)) + \
            ctx.S_poly.scale(-c / 2)
        on_slice = MultiPoly.const(nv, 1) + ctx.S_poly.scale(-c / 2)
        fid, rid, xid = f"s:{sid}", f"s:{sid}:q", f"s:{sid}:x"
        ctx.table.register(fid, sigma, (rid, 1, Fraction(1)),
                           (xid, Fraction(1)))
        ctx.table.register(rid, reduced, (rid, 0, Fraction(1)),
                           (xid, Fraction(1)))
        ctx.table.register(xid, on_slice, (xid, 0, Fraction(1)),
                           (xid, Fraction(1)))
        ctx.table.lift_map[xid] = (rid, 2, Fraction(1))
    ctx.scales[sid] = scale
    return scale


def default_scales(ctx: AmbientContext) -> tuple[Scale, Scale]:
    """The flat scale and the unit-curvature representative."""
    flat = register_scale(ctx, "flat", 0)
    sphere = register_scale(ctx, "sphere", Fraction(-1, 2))
    return flat, sphere


def scale_rf(ctx: AmbientContext, scale: Scale) -> RationalFunction:
    nv = ctx.nvars
    p = MultiPoly.var(nv, ctx.T)
    if not scale.is_flat:
        p = p + MultiPoly.var(nv, ctx.RHO).scale(scale.c)
    return RationalFunction.from_poly(ctx.table, p)


def scale_slice_rf(ctx: AmbientContext, scale: Scale) -> RationalFunction:
    return subs_slice(ctx, scale_rf(ctx, scale))


def bullet(F: AmbientForm, G: AmbientForm) -> RationalFunction:
    """Full metric contraction of two equal-degree ambient forms."""
    if F.degree != G.degree:
        raise ValueError("bullet pairing needs equal degrees")
    return iota_form(F, G).component(())


def make_Y(ctx: AmbientContext, scale: Scale) -> AmbientForm:
    """The null 1-form Y with X.Y = 1 attached to a scale:
    Y = I - (1/2)(I.I) X with I = (1/n) sigma^{-1} e(D) sigma."""
    sigma = scale_rf(ctx, scale)
    dsig = ext_d(ctx.scalar(sigma))
    if reduce_form_mod_cone(ctx, dsig).is_zero():
        raise DegenerateScale(f"scale {scale.id!r} has vanishing differential")
    I = eps_dir(ctx.scalar(sigma)).map_coeffs(
        lambda c: c * Fraction(1, ctx.n) / sigma)
    ii = bullet(I, I)
    Y = I - ctx.X_one_form.scale(ii * Fraction(1, 2))
    xy = reduce_mod_cone(ctx, bullet(ctx.X_one_form, Y) - ctx.rf(1))
    yy = reduce_mod_cone(ctx, bullet(Y, Y))
    if not xy.is_zero() or not yy.is_zero():
        raise DegenerateScale(
            f"scale {scale.id!r}: Y fails X.Y = 1 or Y.Y = 0 on the cone")
    return Y


# -- lift and restriction ----------------------------------------------------------


def _homogenize_slice_rf(ctx: AmbientContext, c: RationalFunction,
                         w: int) -> RationalFunction:
    """t^w * c(x/t) for a slice-level rational function c."""
    num = c.num
    if num.is_zero():
        return ctx.rf_zero()
    D = num.total_degree()
    nv = ctx.nvars
    terms = {}
    for e, coef in num.terms.items():
        e2 = list(e)
        e2[ctx.T] += D - sum(e)
        terms[tuple(e2)] = coef
    hnum = MultiPoly(nv, terms)
    tshift = w - D
    den: dict[str, int] = {}
    for fid, k in c.den.items():
        aid, tpow, const = ctx.table.lift_map[fid]
        den[aid] = den.get(aid, 0) + k
        tshift += tpow * k
        hnum = hnum.scale(Fraction(1) / const ** k)
    if tshift > 0:
        e0 = [0] * nv
        e0[ctx.T] = tshift
        hnum = hnum * MultiPoly.monomial(nv, tuple(e0))
    elif tshift < 0:
        den[T_FACTOR] = den.get(T_FACTOR, 0) - tshift
    return RationalFunction(ctx.table, hnum, den)


def lift(u: SliceForm, w: int) -> AmbientForm:
    """Canonical ambient lift of u in E^k[w]; satisfies i(X) lift = 0 and
    has dilation weight w - k."""
    ctx = u.ctx
    k = u.degree
    t_inv = ctx.rf(1).divide_by_factor(T_FACTOR)
    omegas = {}
    for a in range(1, ctx.n + 1):
        omegas[a] = AmbientForm(ctx, 1, {
            (ctx.T,): -ctx.rf_var(a) * t_inv * t_inv,
            (a,): t_inv,
        })
    total = ctx.zero_form(k)
    for key, c in u.coeffs.items():
        form = ctx.scalar(_homogenize_slice_rf(ctx, c, w))
        for a in key:
            form = wedge(form, omegas[a])
        total = total + form
    return total


def restrict(F: AmbientForm) -> SliceForm:
    """Pullback along the slice embedding x -> (1, x, -S(x)/2): dt -> 0 and
    d rho -> -sum_a eps_a x^a dx^a; kills (Q) and e(X)-multiples exactly."""
    ctx = F.ctx
    out: dict[tuple[int, ...], RationalFunction] = {}

    def acc(key, v):
        s = out.get(key)
        v = v if s is None else s + v
        if v.is_zero():
            out.pop(key, None)
        else:
            out[key] = v

    for key, c in F.coeffs.items():
        if ctx.T in key:
            continue
        cs = subs_slice(ctx, c)
        if cs.is_zero():
            continue
        if key and key[-1] == ctx.RHO:
            rest = key[:-1]
            par = -1 if len(rest) % 2 else 1  # move the last slot to front
            for a in range(1, ctx.n + 1):
                if a in rest:
                    continue
                m = merge_sign((a,), rest)
                assert m is not None
                merged, sign = m
                coef = cs * ctx.rf_var(a) * (-ctx.eps[a - 1] * sign * par)
                acc(merged, coef)
        else:
            acc(key, cs)
    return SliceForm(ctx, F.degree, out)


# -- quotient classes ---------------------------------------------------------------


@dataclass
class GClass:
    """Ambient k-form taken modulo e(X)-multiples and modulo (Q)."""

    rep: AmbientForm

    @property
    def degree(self) -> int:
        return self.rep.degree

    def canonical(self) -> AmbientForm:
        return cone_pullback(self.rep)

    def is_zero(self) -> bool:
        return self.canonical().is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, GClass) and \
            (self.canonical() - other.canonical()).is_zero()


def cone_pullback(F: AmbientForm) -> AmbientForm:
    """Pullback to the cone chart (t, x), rho = -S/(2t): the canonical form
    for the quotient modulo e(X)-multiples and (Q).

    Uses d rho -> (S/(2 t^2)) dt - sum_a (eps_a x^a / t) dx^a."""
    ctx = F.ctx
    t_inv = ctx.rf(1).divide_by_factor(T_FACTOR)
    drho = {(ctx.T,): reduce_mod_cone(
        ctx, RationalFunction.from_poly(ctx.table, ctx.S_poly)
        * t_inv * t_inv * Fraction(1, 2))}
    for a in range(1, ctx.n + 1):
        drho[(a,)] = -ctx.rf_var(a) * t_inv * ctx.eps[a - 1]
    drho_form = AmbientForm(ctx, 1, drho)
    out = ctx.zero_form(F.degree)
    for key, c in F.coeffs.items():
        cr = reduce_mod_cone(ctx, c)
        if cr.is_zero():
            continue
        if key and key[-1] == ctx.RHO:
            base = AmbientForm(ctx, len(key) - 1, {key[:-1]: cr})
            out = out + wedge(base, drho_form)
        else:
            out = out + AmbientForm(ctx, len(key), {key: cr})
    return out


def tilde_d(g: GClass) -> GClass:
    return GClass(ext_d(g.rep))


def is_fside(ctx: AmbientContext, F: AmbientForm) -> bool:
    """Whether i(X) F vanishes modulo (Q)."""
    return reduce_form_mod_cone(ctx, iota_x(F)).is_zero()


def fside_canonical(ctx: AmbientContext, F: AmbientForm) -> AmbientForm:
    return reduce_form_mod_cone(ctx, F)


def flat_Y(ctx: AmbientContext) -> AmbientForm:
    t_inv = ctx.rf(1).divide_by_factor(T_FACTOR)
    return AmbientForm(ctx, 1, {(ctx.T,): t_inv})


def fside_normalize(ctx: AmbientContext, F: AmbientForm) -> AmbientForm:
    """Representative of the same class with i(X) F = 0 exactly.

    The codifferential descends only on exact representatives: a mod-Q
    representative leaks a -2 i(X) term through [delta, Q].  Requires
    i(X)F to lie in (Q) componentwise.  The correction uses the flat Y,
    the one satisfying X.Y = 1 exactly off the cone.
    """
    from .conealg import divide_exact_by_Q
    ix = iota_x(F)
    if ix.is_zero():
        return F
    R = ix.map_coeffs(lambda c: RationalFunction(
        ctx.table, divide_exact_by_Q(ctx, c.num), dict(c.den), reduce=False))
    return F - mul_q(wedge(flat_Y(ctx), R))


def tilde_delta(ctx: AmbientContext, F: AmbientForm) -> AmbientForm:
    """The descended codifferential on forms with i(X) F = 0 mod (Q);
    the representative is first normalised to exact annihilation."""
    if not is_fside(ctx, F):
        raise ValueError("input is not annihilated by i(X) modulo (Q)")
    return codiff(fside_normalize(ctx, F))


def decompose_G(U: AmbientForm, Y: AmbientForm, w: int
                ) -> tuple[SliceForm, SliceForm]:
    """Split a representative of a class in the two-step filtration at a
    scale into (alpha, mu): alpha the (k-1)-form slot read off through
    i(X), mu the k-form slot after removing the e(Y)-carried part."""
    alpha_raw = restrict(iota_x(U))
    mu = restrict(U - wedge(Y, lift(alpha_raw, w)))
    return alpha_raw.scale(ALPHA_SIGN), mu


def splitting_constant(ctx: AmbientContext, k: int, ell: int, seed: int = 7,
                       trials: int = 4) -> Fraction:
    """The constant c with (restrict i(D) e(X) lift) u = c u on E^k[w],
    w = k + ell - n/2; must equal 2(n/2 + ell - k)(ell + 1)."""
    from .ambient import iota_dir, eps_x
    n = ctx.n
    if n % 2:
        raise ValueError("integer weights need even n")
    w = k + ell - n // 2
    rng = child_rng(seed, f"splitconst/{k}/{ell}")
    c_seen: Fraction | None = None
    for _ in range(trials):
        u = _random_slice_form(ctx, rng, k, max_deg=3)
        v = restrict(iota_dir(eps_x(lift(u, w))))
        c = v.proportionality(u)
        if c is None:
            raise NotProportional(
                f"i(D) e(X) on lifts of E^{k}[{w}] is not a multiple of the "
                "identity")
        if c_seen is None:
            c_seen = c
        elif c_seen != c:
            raise NotProportional(
                f"inconsistent proportionality constants {c_seen} vs {c}")
    assert c_seen is not None
    return c_seen


def expected_splitting_constant(n: int, k: int, ell: int) -> Fraction:
    return Fraction(2 * (n // 2 + ell - k) * (ell + 1))


def _random_slice_form(ctx: AmbientContext, rng, k: int,
                       max_deg: int = 3) -> SliceForm:
    from .trials import random_poly
    coeffs = {}
    for key in slice_keys(ctx.n, k):
        p = random_poly(ctx, rng, max_deg, vars_=list(range(1, ctx.n + 1)),
                        terms=3)
        coeffs[key] = RationalFunction.from_poly(ctx.table, p)
    return SliceForm(ctx, k, coeffs)


# -- scale curvature --------------------------------------------------------------


def validate_constant_curvature(ctx: AmbientContext, scale: Scale
                                ) -> tuple[Fraction, Fraction]:
    """Exact check that the scale's representative metric s^{-2} g_flat has
    Schouten tensor lambda * (metric); returns (lambda, J = n*lambda).

    The conformal transformation from the flat metric gives the Schouten of
    s^{-2} g_flat as (s*s_ab - |ds|^2_eps/2 * g_ab) / s^2 with g the flat
    slice metric; constancy of lambda is what is being certified.
    """
    s = scale_slice_rf(ctx, scale)
    n = ctx.n
    grad = [s.deriv(a) for a in range(1, n + 1)]
    ds2 = ctx.rf_zero()
    for a in range(1, n + 1):
        ds2 = ds2 + grad[a - 1] * grad[a - 1] * ctx.eps[a - 1]
    lam: Fraction | None = None
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            sab = grad[b - 1].deriv(a)
            val = s * sab
            if a == b:
                val = val - ds2 * Fraction(ctx.eps[a - 1], 2)
            if a != b:
                if not val.is_zero():
                    raise NotProportional(
                        f"scale {scale.id!r}: off-diagonal Schouten entry")
                continue
            # expect val == lam * eps_a
            val = val * ctx.eps[a - 1]
            if not (val.den == {} and val.num.is_constant()):
                raise NotProportional(
                    f"scale {scale.id!r}: Schouten is not a constant "
                    "multiple of the metric")
            v = val.num.constant_value()
            if lam is None:
                lam = v
            elif lam != v:
                raise NotProportional(
                    f"scale {scale.id!r}: Schouten eigenvalues differ")
    assert lam is not None
    return lam, Fraction(n) * lam


def load_scale_registry(path, ctx: AmbientContext) -> list[Scale]:
    """Scale registry file: one `id = c` entry per line (comments with #),
    each declaring the scale t + c*rho.  Every entry is validated on load:
    the differential must not vanish on the chart and the null Y form must
    satisfy its exact invariants (make_Y checks both)."""
    from pathlib import Path
    out = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'id = c'")
        sid, cval = (part.strip() for part in line.split("=", 1))
        try:
            c = Fraction(cval)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{path}:{lineno}: bad rational {cval!r}")
        scale = register_scale(ctx, sid, c)
        make_Y(ctx, scale)
        out.append(scale)
    return out
