"""Construction of the conformally invariant operator families.

Everything is built from one ambient composition: with Lap the ambient
form Laplacian,

    K(ell) = i(X) Lap^(ell+1) e(X)        (ell >= 0)
    K(-1)  = i(X) e(X)

applied to canonical lifts and read back through the slice pullback.  The
i(X)-leading composition is used because its output is annihilated by
i(X) exactly (not merely modulo the quadric), which is what the descended
codifferential requires of its arguments; its agreement with the
alternative orderings Lap^l i(D) e(X) and i(X) e(D) Lap^l along the cone
is one of the verified identities.

Derived families, all descending to slice operators between weighted form
bundles (w = k + ell - n/2):

    L(ell,k)   = restrict . K(ell) . lift             order 2*ell
    G(k)       = restrict . i(Y) . K(n/2-k) . lift    order n-2k+1
    Q(k,scale) = -2(ell+1) restrict . i(Y) . K(ell-1) . e(Y) . lift
    M(k,scale) = -4 ell(ell+1) restrict . i(Y) . K(ell-2) . e(Y) . lift
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .ambient import (AmbientContext, AmbientForm, OpAtom, OpExpr, bochner,
                      codiff, eps_dir, eps_x, ext_d, form_lap, iota_dir,
                      iota_form, iota_x, mul_q, wedge)
from .cone import (GClass, Scale, default_scales, lift, make_Y, register_scale,
                   restrict, scale_rf, scale_slice_rf, tilde_delta)
from .conealg import reduce_form_mod_cone, subs_slice
from .errors import NotTangential, ProportionalityFailure
from .poly import MultiPoly
from .ratfunc import RationalFunction
from .report import CONVENTION_VERSION
from .sliceops import (SliceForm, SliceOperator, operator_from_map,
                       slice_codiff, slice_d, slice_keys, slice_wedge)

_CONTEXTS: dict[tuple[int, int, int], AmbientContext] = {}


def get_context(n: int, p: int | None = None, q: int | None = None
                ) -> AmbientContext:
    if p is None and q is None:
        p, q = n, 0
    key = (n, p, q)
    if key not in _CONTEXTS:
        ctx = AmbientContext(n, p, q)
        default_scales(ctx)
        _CONTEXTS[key] = ctx
    return _CONTEXTS[key]


@dataclass(frozen=True)
class OperatorSpec:
    n: int
    k: int
    ell: int
    p: int | None = None
    q: int | None = None
    scale_id: str = "flat"
    convention: str = CONVENTION_VERSION

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")

    @property
    def signature(self) -> tuple[int, int]:
        if self.p is None:
            return (self.n, 0)
        return (self.p, self.q if self.q is not None else self.n - self.p)

    @property
    def w(self) -> int:
        if self.n % 2:
            raise ValueError("integer weight bookkeeping needs even n")
        return self.k + self.ell - self.n // 2

    def cache_key(self, family: str) -> str:
        p, q = self.signature
        return (f"{family}_n{self.n}_s{p}-{q}_k{self.k}_l{self.ell}"
                f"_{self.scale_id}_{self.convention}")


# -- ambient K compositions --------------------------------------------------------


def build_K(ell: int) -> OpExpr:
    """The self-adjoint ambient composition; zero outside ell >= -1."""
    if ell >= 0:
        atoms = (OpAtom("IotaX"),) + tuple(
            OpAtom("FormLap") for _ in range(ell + 1)) + (OpAtom("EpsX"),)
        return OpExpr(atoms)
    if ell == -1:
        return OpExpr((OpAtom("IotaX"), OpAtom("EpsX")))
    return OpExpr((), Fraction(0))


def apply_K(ell: int, F: AmbientForm) -> AmbientForm:
    return build_K(ell).apply(F)


def k_alternate_forms(ell: int) -> list[tuple[str, OpExpr]]:
    """The three provably-equal orderings (equal along the cone on forms of
    dilation weight ell - n/2)."""
    if ell < 0:
        return []
    lap_l = tuple(OpAtom("FormLap") for _ in range(ell))
    return [
        ("i(X) Lap^(l+1) e(X)", build_K(ell)),
        ("Lap^l i(D) e(X)",
         OpExpr(lap_l + (OpAtom("IotaDir"), OpAtom("EpsX")))),
        ("i(X) e(D) Lap^l",
         OpExpr((OpAtom("IotaX"), OpAtom("EpsDir")) + lap_l)),
    ]


# -- slice-level primitive operators ------------------------------------------------


def d_operator(ctx: AmbientContext, k: int) -> SliceOperator:
    n = ctx.n
    entries = {}
    for ki in slice_keys(n, k):
        for a in range(1, n + 1):
            if a in ki:
                continue
            from .ambient import merge_sign
            merged, sign = merge_sign((a,), ki)
            alpha = tuple(1 if i == a - 1 else 0 for i in range(n))
            entries.setdefault((merged, ki), {})[alpha] = ctx.rf(sign)
    return SliceOperator(ctx, k, k + 1, entries)


def codiff_operator(ctx: AmbientContext, k: int) -> SliceOperator:
    n = ctx.n
    entries = {}
    for ki in slice_keys(n, k):
        for j, a in enumerate(ki):
            sgn = -ctx.eps[a - 1] if j % 2 == 0 else ctx.eps[a - 1]
            alpha = tuple(1 if i == a - 1 else 0 for i in range(n))
            rk = ki[:j] + ki[j + 1:]
            entries.setdefault((rk, ki), {})[alpha] = ctx.rf(sgn)
    return SliceOperator(ctx, k, k - 1, entries)


def form_laplacian_operator(ctx: AmbientContext, k: int,
                            m: int = 1) -> SliceOperator:
    one = SliceOperator.zero(ctx, k, k)
    if k > 0:
        one = one + d_operator(ctx, k - 1).compose(codiff_operator(ctx, k))
    if k < ctx.n:
        one = one + codiff_operator(ctx, k + 1).compose(d_operator(ctx, k))
    out = SliceOperator.identity(ctx, k)
    for _ in range(m):
        out = one.compose(out)
    return out


def star_operator(ctx: AmbientContext, k: int) -> SliceOperator:
    from .sliceops import _perm_sign
    if ctx.q != 0:
        raise ValueError("Hodge star needs a Riemannian slice")
    n = ctx.n
    zero_a = (0,) * n
    entries = {}
    for ki in slice_keys(n, k):
        comp = tuple(a for a in range(1, n + 1) if a not in ki)
        entries[(comp, ki)] = {zero_a: ctx.rf(_perm_sign(ki + comp))}
    return SliceOperator(ctx, k, n - k, entries)


# -- descent ------------------------------------------------------------------------


def descend(ctx: AmbientContext, chain: Callable[[AmbientForm], AmbientForm],
            k_in: int, w_in: int, k_out: int, order_bound: int,
            w_out: int | None = None, certify: bool = True,
            syntactic_bound: int | None = None) -> SliceOperator:
    """Slice operator of the composition restrict . chain . lift."""

    def fn(u: SliceForm) -> SliceForm:
        return restrict(chain(lift(u, w_in)))

    return operator_from_map(ctx, fn, k_in, k_out, order_bound,
                             w_in=w_in, w_out=w_out, certify=certify,
                             syntactic_bound=syntactic_bound)


def build_L(spec: OperatorSpec, certify: bool = True) -> SliceOperator:
    """The order-2*ell operator on E^k[w], w = k + ell - n/2."""
    n, k, ell = spec.n, spec.k, spec.ell
    ctx = get_context(n, *spec.signature)
    if ell < -1 or (0 <= ell and k > n):
        return SliceOperator.zero(ctx, k, k, spec.w, -spec.w + 2 * k - n)
    kop = build_K(ell)
    if kop.scalar == 0 or ell == -1:
        return SliceOperator.zero(ctx, k, k, spec.w, -spec.w + 2 * k - n)
    return descend(ctx, kop.apply, k, spec.w, k, max(2 * ell, 0),
                   w_out=-spec.w + 2 * k - n, certify=certify,
                   syntactic_bound=2 * ell + 2)


def build_G(spec: OperatorSpec, certify: bool = True) -> SliceOperator:
    """Gauge companion on true k-forms (ell = n/2 - k >= -1), read off
    through i(Y) at the spec's scale."""
    n, k = spec.n, spec.k
    if n % 2 or k > n // 2 + 1:
        raise ValueError("gauge companion needs even n and k <= n/2 + 1")
    ctx = get_context(n, *spec.signature)
    ell = n // 2 - k
    scale = ctx.scales[spec.scale_id]
    Y = make_Y(ctx, scale)
    if ell == -1:
        return SliceOperator.zero(ctx, k, k - 1)

    def chain(U: AmbientForm) -> AmbientForm:
        return iota_form(Y, apply_K(ell, U))

    return descend(ctx, chain, k, 0, k - 1, max(2 * ell + 1, 0),
                   certify=certify, syntactic_bound=2 * ell + 2)


def q_chain(ctx: AmbientContext, k: int, ell: int, Y: AmbientForm,
            const: Fraction) -> Callable[[AmbientForm], AmbientForm]:
    def chain(U: AmbientForm) -> AmbientForm:
        return iota_form(Y, apply_K(ell - 1, wedge(Y, U))).scale(const)
    return chain


def build_Q(spec: OperatorSpec, certify: bool = True) -> SliceOperator:
    """The Q-operator E^k -> E_k at a scale (ell = n/2 - k)."""
    n, k = spec.n, spec.k
    if n % 2 or k > n // 2:
        raise ValueError("Q-operator needs even n and k <= n/2")
    ctx = get_context(n, *spec.signature)
    ell = n // 2 - k
    Y = make_Y(ctx, ctx.scales[spec.scale_id])
    chain = q_chain(ctx, k, ell, Y, Fraction(-2 * (ell + 1)))
    return descend(ctx, chain, k, 0, k, max(2 * ell, 0),
                   certify=certify, syntactic_bound=max(2 * ell, 0))


def build_M(spec: OperatorSpec, certify: bool = True) -> SliceOperator:
    """The middle factor of the long factorisation: acts on (k+1)-forms,
    ell = n/2 - k."""
    n, k = spec.n, spec.k
    if n % 2 or k > n // 2 - 1:
        raise ValueError("middle factor needs even n and k <= n/2 - 1")
    ctx = get_context(n, *spec.signature)
    ell = n // 2 - k
    Y = make_Y(ctx, ctx.scales[spec.scale_id])
    chain = q_chain(ctx, k + 1, ell - 1, Y, Fraction(-4 * ell * (ell + 1)))
    return descend(ctx, chain, k + 1, 0, k + 1,
                   max(2 * (ell - 1), 0), certify=certify,
                   syntactic_bound=max(2 * (ell - 1), 0))


def apply_Q_direct(ctx: AmbientContext, scale: Scale, k: int,
                   u: SliceForm) -> SliceForm:
    """Q-operator applied to one true k-form, componentwise exact (works
    at any scale, including ones giving non-constant coefficients)."""
    n = ctx.n
    ell = n // 2 - k
    Y = make_Y(ctx, scale)
    U = lift(u, 0)
    return restrict(iota_form(Y, apply_K(ell - 1, wedge(Y, U)))).scale(
        Fraction(-2 * (ell + 1)))


def apply_M_direct(ctx: AmbientContext, scale: Scale, k: int,
                   v: SliceForm) -> SliceForm:
    """Middle factor applied to one (k+1)-form (possibly with rational
    coefficients), ell = n/2 - k."""
    n = ctx.n
    ell = n // 2 - k
    Y = make_Y(ctx, scale)
    V = lift(v, 0)
    return restrict(iota_form(Y, apply_K(ell - 2, wedge(Y, V)))).scale(
        Fraction(-4 * ell * (ell + 1)))


def apply_L_direct(ctx: AmbientContext, k: int, ell: int,
                   u: SliceForm, w: int | None = None) -> SliceForm:
    if w is None:
        w = k + ell - ctx.n // 2
    return restrict(apply_K(ell, lift(u, w)))


# -- order-n construction -----------------------------------------------------------


class SlottedForm:
    """Ambient form with extra (unsymmetrised) covariant slots, stored as a
    map from slot index tuples to forms."""

    def __init__(self, ctx: AmbientContext,
                 parts: dict[tuple[int, ...], AmbientForm]):
        self.ctx = ctx
        self.parts = {s: F for s, F in parts.items() if not F.is_zero()}

    @classmethod
    def plain(cls, F: AmbientForm) -> "SlottedForm":
        return cls(F.ctx, {(): F})

    def map_forms(self, fn) -> "SlottedForm":
        return SlottedForm(self.ctx, {s: fn(F) for s, F in self.parts.items()})

    def add(self, other: "SlottedForm") -> "SlottedForm":
        out = dict(self.parts)
        for s, F in other.parts.items():
            out[s] = out[s] + F if s in out else F
        return SlottedForm(self.ctx, out)

    def tractor_d_lower(self) -> "SlottedForm":
        """Append one covariant slot: D_A = d_A (n + 2 E - 2) + x_A LapB."""
        ctx = self.ctx
        n = ctx.n
        out: dict[tuple[int, ...], AmbientForm] = {}

        def acc(slots, F):
            if F.is_zero():
                return
            out[slots] = out[slots] + F if slots in out else F

        for slots, F in self.parts.items():
            from .ambient import euler_op
            base = euler_op(F).scale(2) + F.scale(n - 2)
            lap = bochner(F)
            for A in range(ctx.nvars):
                dF = base.map_coeffs(lambda c, A=A: c.deriv(A))
                term = dF + lap.scale(ctx.X_form.get(A, ctx.rf_zero()))
                acc(slots + (A,), term)
        return SlottedForm(ctx, out)

    def tractor_d_upper(self) -> "SlottedForm":
        """Apply D^B and contract it with the most recent slot."""
        ctx = self.ctx
        n = ctx.n
        out: dict[tuple[int, ...], AmbientForm] = {}

        def acc(slots, F):
            if F.is_zero():
                return
            out[slots] = out[slots] + F if slots in out else F

        from .ambient import euler_op
        for slots, F in self.parts.items():
            if not slots:
                raise ValueError("no slot to contract")
            A = slots[-1]
            rest = slots[:-1]
            B, s = ctx.metric_raise_index(A)
            base = euler_op(F).scale(2) + F.scale(n - 2)
            dF = base.map_coeffs(lambda c: c.deriv(B)).scale(s)
            acc(rest, dF)
            acc(rest, bochner(F).scale(ctx.X_vec[A]))
        return SlottedForm(ctx, out)

    def box_slotted(self) -> "SlottedForm":
        return self.map_forms(bochner)


def box_string(F: AmbientForm, depth: int) -> AmbientForm:
    """D^{A_1}..D^{A_d} LapB D_{A_d}..D_{A_1} applied to F."""
    sf = SlottedForm.plain(F)
    for _ in range(depth):
        sf = sf.tractor_d_lower()
    sf = sf.box_slotted()
    for _ in range(depth):
        sf = sf.tractor_d_upper()
    parts = sf.parts
    if not parts:
        return F.ctx.zero_form(F.degree)
    if set(parts) != {()}:
        raise AssertionError("slot bookkeeping failed")
    return parts[()]


def order_n_chain(ctx: AmbientContext, k: int
                  ) -> Callable[[AmbientForm], AmbientForm]:
    """delta i(X) e(D) Box_(l-1) i(D) e(X) d on lifts of E^k[k], l = n/2;
    the inner Box_(l-1) is the metric-trace Laplacian dressed with l-2
    contracted derivative pairs."""
    n = ctx.n
    ell = n // 2
    depth = ell - 2

    def chain(U: AmbientForm) -> AmbientForm:
        F = ext_d(U)
        F = eps_x(F)
        F = iota_dir(F)
        F = box_string(F, depth)
        F = eps_dir(F)
        F = iota_x(F)
        from .cone import fside_normalize
        return codiff(fside_normalize(ctx, F))

    return chain


def build_order_n(spec: OperatorSpec, certify: bool = True) -> SliceOperator:
    """The order-n operator on E^k[k] for 0 < k < n (even n)."""
    n, k = spec.n, spec.k
    if n % 2 or not 0 < k < n:
        raise ValueError("order-n operator needs even n and 0 < k < n")
    ctx = get_context(n, *spec.signature)
    return descend(ctx, order_n_chain(ctx, k), k, k, k, n,
                   w_out=k - n, certify=certify, syntactic_bound=2 * n)


# -- Q-curvature values ------------------------------------------------------------


def q_curvature_value(ctx: AmbientContext, scale: Scale) -> RationalFunction:
    """Q applied to the constant function, trivialised at the given scale
    (multiplied by s^n so constant output means constant curvature Q)."""
    one = SliceForm(ctx, 0, {(): ctx.rf(1)})
    raw = apply_Q_direct(ctx, scale, 0, one).component(())
    s = scale_slice_rf(ctx, scale)
    out = raw
    for _ in range(ctx.n):
        out = out * s
    return out


def fh_log_laplacian(ctx: AmbientContext, scale: Scale) -> RationalFunction:
    """n LapB^(n/2) log(sigma): one symbolic log-derivative then exact
    arithmetic; reduced along the cone and restricted to the slice."""
    n = ctx.n
    sigma = scale_rf(ctx, scale)
    dlog = ext_d(ctx.scalar(sigma)).map_coeffs(lambda c: c / sigma)
    # LapB log sigma = -h^{AB} d_A d_B log sigma = codiff(d log sigma)
    out = codiff(dlog)
    for _ in range(n // 2 - 1):
        out = bochner(out)
    red = reduce_form_mod_cone(ctx, out)
    return subs_slice(ctx, red.component(())) * n


# -- star conjugates ----------------------------------------------------------------


def build_star_conjugate(spec: OperatorSpec, certify: bool = True
                         ) -> SliceOperator:
    """The degree-(n-k) companion star . L(ell, n-k) . star (Riemannian
    slices only); the codetour factorisation consequences d o Lstar = 0
    and Lstar o delta = 0 are verified by the star suite."""
    n, k, ell = spec.n, spec.k, spec.ell
    ctx = get_context(n, *spec.signature)
    j = n - k
    L = build_L(OperatorSpec(n, j, ell, *spec.signature), certify=certify)
    return star_operator(ctx, j).compose(L).compose(star_operator(ctx, k))


# -- scale-modified invariant operators ----------------------------------------------


def s_modified_chain(ctx: AmbientContext, S: OpExpr, Y: AmbientForm
                     ) -> Callable[[AmbientForm], AmbientForm]:
    """delta i(X) e(D) S i(D) e(X) e(Y) on lifts; the input of the final
    codifferential is an i(X)-image, so it is exactly annihilated by i(X)
    and the descended codifferential applies directly."""

    def chain(U: AmbientForm) -> AmbientForm:
        F = wedge(Y, U)
        F = eps_x(F)
        F = iota_dir(F)
        F = S.apply(F)
        F = eps_dir(F)
        F = iota_x(F)
        return codiff(F)

    return chain


def s_modified_variation_chain(ctx: AmbientContext, S: OpExpr
                               ) -> Callable[[AmbientForm], AmbientForm]:
    """delta i(X) e(D) S i(D) e(X) on lifts of (k+1)-forms (the exact-form
    route for the conformal variation)."""

    def chain(V: AmbientForm) -> AmbientForm:
        F = eps_x(V)
        F = iota_dir(F)
        F = S.apply(F)
        F = eps_dir(F)
        F = iota_x(F)
        return codiff(F)

    return chain


def check_s_tangential(ctx: AmbientContext, S: OpExpr, k: int, seed: int,
                       trials: int = 4) -> None:
    """Precondition of the modified-operator construction: S must act
    tangentially at the weight it receives inside the composition."""
    from .identities import check_tangential
    w_domain = -k - 1  # weight of i(D) e(X) e(Y) lift(u, 0)
    ok, F, res = check_tangential(ctx, S, k + 1, w_domain - 2, seed, trials)
    if not ok:
        raise NotTangential(
            f"S is not tangential at weight {w_domain} on degree {k + 1}")


def apply_S_modified(ctx: AmbientContext, S: OpExpr, scale: Scale, k: int,
                     u: SliceForm) -> SliceForm:
    Y = make_Y(ctx, scale)
    return restrict(s_modified_chain(ctx, S, Y)(lift(u, 0)))


def apply_S_variation(ctx: AmbientContext, S: OpExpr,
                      v: SliceForm) -> SliceForm:
    """The invariant variation term applied to a (k+1)-form v."""
    return restrict(s_modified_variation_chain(ctx, S)(lift(v, 0)))
