"""Exterior calculus on the flat metric cone chart.

The ambient space is R^{p+1,q+1} in null coordinates (t, x^1..x^n, rho)
with metric pairing h(dt,drho) = 1, h(dx^a,dx^b) = eps_a delta_ab, so the
defining quadric is Q = 2*t*rho + sum_a eps_a (x^a)^2 and the dilation
field is X = t dt + x dx + rho drho (as a 1-form, X = dQ/2).

``AmbientForm`` carries a k-form with rational-function coefficients keyed
by strictly increasing index tuples; ``OpExpr`` composes the primitive
operator atoms.  Conventions: exterior multiplication is
(e(w)phi)_{A0..Ak} = (k+1) w_{[A0} phi_{A1..Ak]}, interior multiplication
contracts the first slot, the codifferential is -i(nabla), and the form
Laplacian is delta d + d delta.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import DegreeOutOfRange, Inhomogeneous, WeightUndeclared
from .poly import MultiPoly
from .ratfunc import FactorTable, RationalFunction

Key = tuple[int, ...]


def covariant_rank_action(degree: int) -> int:
    """Splitting the dilation Lie derivative as L_X = nabla_X + p, the
    operator p multiplies a covariant k-form by k."""
    return degree


class AmbientContext:
    """Dimensions, signature, metric pairing and the denominator registry."""

    def __init__(self, n: int, p: int | None = None, q: int | None = None):
        if n < 3:
            raise ValueError("slice dimension must be at least 3")
        if p is None and q is None:
            p, q = n, 0
        if p is None or q is None or p + q != n or p < 0 or q < 0:
            raise ValueError(f"invalid signature ({p},{q}) for n={n}")
        self.n = n
        self.p = p
        self.q = q
        self.nvars = n + 2
        self.T = 0
        self.RHO = n + 1
        self.eps = [1] * p + [-1] * q
        self.names = ["t"] + [f"x{a}" for a in range(1, n + 1)] + ["r"]
        self.table = FactorTable(self.nvars)
        self.scales: dict[str, object] = {}
        self._bochner_ok: set[int] = set()

        nv = self.nvars
        terms = {}
        for a in range(1, n + 1):
            e = [0] * nv
            e[a] = 2
            terms[tuple(e)] = Fraction(self.eps[a - 1])
        self.S_poly = MultiPoly(nv, terms)
        tr = [0] * nv
        tr[self.T] = 1
        tr[self.RHO] = 1
        self.Q_poly = MultiPoly(nv, {tuple(tr): Fraction(2)}) + self.S_poly
        self.Q_rf = RationalFunction.from_poly(self.table, self.Q_poly)

        # X as a vector (X^A = coordinate A) and as a 1-form (X_A = h_AB x^B).
        self.X_vec = {A: self.rf_var(A) for A in range(nv)}
        self.X_form = {
            self.T: self.rf_var(self.RHO),
            self.RHO: self.rf_var(self.T),
        }
        for a in range(1, n + 1):
            self.X_form[a] = self.rf_var(a) * self.eps[a - 1]
        self.X_one_form = AmbientForm(self, 1,
                                      {(A,): c for A, c in self.X_form.items()})

    # -- coefficient helpers --------------------------------------------------

    def rf(self, c) -> RationalFunction:
        return RationalFunction.const(self.table, c)

    def rf_var(self, i: int) -> RationalFunction:
        return RationalFunction.from_poly(self.table,
                                          MultiPoly.var(self.nvars, i))

    def rf_zero(self) -> RationalFunction:
        return RationalFunction.from_poly(self.table,
                                          MultiPoly.zero(self.nvars))

    def metric_raise_index(self, A: int) -> tuple[int, int]:
        """Index B and sign with h^{AB} = sign at the unique partner."""
        if A == self.T:
            return self.RHO, 1
        if A == self.RHO:
            return self.T, 1
        return A, self.eps[A - 1]

    def metric_pairs(self) -> list[tuple[int, int, int]]:
        """Nonzero (A, B, h^{AB}) with A <= B."""
        out = [(self.T, self.RHO, 1)]
        for a in range(1, self.n + 1):
            out.append((a, a, self.eps[a - 1]))
        return out

    # -- forms ------------------------------------------------------------------

    def zero_form(self, k: int) -> "AmbientForm":
        return AmbientForm(self, k, {})

    def form(self, k: int, coeffs: dict[Key, RationalFunction]) -> "AmbientForm":
        return AmbientForm(self, k, coeffs)

    def scalar(self, rf: RationalFunction) -> "AmbientForm":
        return AmbientForm(self, 0, {(): rf})

    def one_form(self, comps: dict[int, RationalFunction]) -> "AmbientForm":
        return AmbientForm(self, 1, {(A,): c for A, c in comps.items()})


def merge_sign(I: Key, J: Key) -> tuple[Key, int] | None:
    """Sorted union of disjoint increasing tuples with the shuffle sign;
    None when an index repeats."""
    if any(a in J for a in I):
        return None
    merged = tuple(sorted(I + J))
    perm = list(I) + list(J)
    sign = 1
    # parity of the permutation taking perm to sorted order
    seen: list[int] = []
    for v in perm:
        cnt = sum(1 for s in seen if s > v)
        if cnt % 2:
            sign = -sign
        seen.append(v)
    return merged, sign


def remove_at(I: Key, j: int) -> Key:
    return I[:j] + I[j + 1 :]


class AmbientForm:
    __slots__ = ("ctx", "degree", "coeffs")

    def __init__(self, ctx: AmbientContext, degree: int,
                 coeffs: dict[Key, RationalFunction]):
        self.ctx = ctx
        self.degree = degree
        self.coeffs = {}
        for key, c in coeffs.items():
            if c.is_zero():
                continue
            if len(key) != degree or any(
                    key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"bad form key {key} for degree {degree}")
            if key and (key[0] < 0 or key[-1] >= ctx.nvars):
                raise ValueError(f"form key {key} out of range")
            self.coeffs[key] = c

    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, key: Key) -> RationalFunction:
        return self.coeffs.get(tuple(key), self.ctx.rf_zero())

    def __add__(self, other: "AmbientForm") -> "AmbientForm":
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("adding forms of different degrees")
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
        return AmbientForm(self.ctx, self.degree, out)

    def __neg__(self) -> "AmbientForm":
        return AmbientForm(self.ctx, self.degree,
                           {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "AmbientForm") -> "AmbientForm":
        return self + (-other)

    def scale(self, c) -> "AmbientForm":
        if isinstance(c, RationalFunction) and c.is_zero():
            return self.ctx.zero_form(self.degree)
        return AmbientForm(self.ctx, self.degree,
                           {k: v * c for k, v in self.coeffs.items()})

    def map_coeffs(self, fn: Callable[[RationalFunction], RationalFunction]
                   ) -> "AmbientForm":
        return AmbientForm(self.ctx, self.degree,
                           {k: fn(c) for k, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, AmbientForm) and self.coeffs == other.coeffs
                and (self.degree == other.degree or self.is_zero()))

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.coeffs.items()))))

    def weight(self) -> int:
        """Common homogeneity degree of the coefficients (the nabla_X weight)."""
        if self.is_zero():
            raise WeightUndeclared("zero form carries no weight")
        degs = set()
        for c in self.coeffs.values():
            degs.add(c.homogeneous_degree())
        if len(degs) != 1:
            raise Inhomogeneous("form coefficients mix homogeneity degrees")
        return degs.pop()

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.ctx.names
        parts = []
        for key in sorted(self.coeffs):
            basis = "^".join(f"d{names[A]}" for A in key) if key else "1"
            parts.append(f"({self.coeffs[key].render(names)}) {basis}")
        return "  +  ".join(parts)

    def __repr__(self):
        return f"AmbientForm(k={self.degree}, {self.render()})"


# -- primitive operations -------------------------------------------------------


def ext_d(F: AmbientForm) -> AmbientForm:
    ctx = F.ctx
    out: dict[Key, RationalFunction] = {}
    for key, c in F.coeffs.items():
        for A in range(ctx.nvars):
            if A in key:
                continue
            dc = c.deriv(A)
            if dc.is_zero():
                continue
            m = merge_sign((A,), key)
            assert m is not None
            merged, sign = m
            v = dc if sign > 0 else -dc
            s = out.get(merged)
            v = v if s is None else s + v
            if v.is_zero():
                out.pop(merged, None)
            else:
                out[merged] = v
    return AmbientForm(ctx, F.degree + 1, out)


def wedge(G: AmbientForm, F: AmbientForm) -> AmbientForm:
    """Exterior product G ^ F."""
    ctx = F.ctx
    out: dict[Key, RationalFunction] = {}
    for kg, cg in G.coeffs.items():
        for kf, cf in F.coeffs.items():
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
    return AmbientForm(ctx, G.degree + F.degree, out)


def iota_vector(vec: dict[int, RationalFunction], F: AmbientForm) -> AmbientForm:
    """First-slot contraction with a vector field."""
    ctx = F.ctx
    out: dict[Key, RationalFunction] = {}
    for key, c in F.coeffs.items():
        for j, A in enumerate(key):
            vA = vec.get(A)
            if vA is None or vA.is_zero():
                continue
            v = vA * c
            if j % 2:
                v = -v
            rk = remove_at(key, j)
            s = out.get(rk)
            v = v if s is None else s + v
            if v.is_zero():
                out.pop(rk, None)
            else:
                out[rk] = v
    return AmbientForm(ctx, F.degree - 1, out)


def raise_one_form(omega: AmbientForm) -> dict[int, RationalFunction]:
    ctx = omega.ctx
    vec: dict[int, RationalFunction] = {}
    for (A,), c in omega.coeffs.items():
        B, s = ctx.metric_raise_index(A)
        vec[B] = c if s > 0 else -c
    return vec


def iota_form(G: AmbientForm, F: AmbientForm) -> AmbientForm:
    """Interior multiplication by a g-form: contract the first g slots with
    all indices of G raised by the metric."""
    ctx = F.ctx
    g = G.degree
    if g == 0:
        return F.scale(G.component(()))
    if g == 1:
        return iota_vector(raise_one_form(G), F)
    # raise all indices of G
    raised: dict[Key, RationalFunction] = {}
    for key, c in G.coeffs.items():
        mapped = []
        sgn = 1
        for A in key:
            B, s = ctx.metric_raise_index(A)
            mapped.append(B)
            sgn *= s
        mt = tuple(sorted(mapped))
        perm_sign = _sort_sign(tuple(mapped))
        v = c * (sgn * perm_sign)
        s0 = raised.get(mt)
        v = v if s0 is None else s0 + v
        if not v.is_zero():
            raised[mt] = v
        elif mt in raised:
            del raised[mt]
    out: dict[Key, RationalFunction] = {}
    for key, c in F.coeffs.items():
        for sub in itertools.combinations(range(len(key)), g):
            I = tuple(key[i] for i in sub)
            gc = raised.get(I)
            if gc is None:
                continue
            sign = 1
            for rank, pos in enumerate(sub):
                if (pos - rank) % 2:
                    sign = -sign
            rest = tuple(key[i] for i in range(len(key)) if i not in sub)
            v = gc * c
            if sign < 0:
                v = -v
            s = out.get(rest)
            v = v if s is None else s + v
            if v.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = v
    return AmbientForm(ctx, F.degree - g, out)


def _sort_sign(seq: Key) -> int:
    sign = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign


def codiff(F: AmbientForm) -> AmbientForm:
    """delta = -i(nabla): (delta F)_K = -h^{AB} d_B F_{A K}."""
    ctx = F.ctx
    out: dict[Key, RationalFunction] = {}
    for key, c in F.coeffs.items():
        for j, A in enumerate(key):
            B, s = ctx.metric_raise_index(A)
            v = c.deriv(B)
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
    return AmbientForm(ctx, F.degree - 1, out)


def bochner(F: AmbientForm) -> AmbientForm:
    """Metric-trace Laplacian -h^{AB} d_A d_B, componentwise."""
    ctx = F.ctx

    def lap(c: RationalFunction) -> RationalFunction:
        out = c.zero_like()
        for A, B, s in ctx.metric_pairs():
            term = c.deriv(A).deriv(B)
            if A != B:
                term = term * 2
            out = out + term * (-s)
        return out

    return F.map_coeffs(lap)


def _form_lap_slow(F: AmbientForm) -> AmbientForm:
    return codiff(ext_d(F)) + ext_d(codiff(F))


def form_lap(F: AmbientForm) -> AmbientForm:
    """Form Laplacian delta d + d delta.

    On this flat chart it coincides with the metric-trace Laplacian; the
    coincidence is proven per (context, degree) by a complete monomial
    certificate (a constant-coefficient operator of order <= 2 vanishes
    iff it kills every monomial of degree <= 2), after which the cheap
    componentwise route is used.
    """
    ctx = F.ctx
    if F.degree not in ctx._bochner_ok:
        certify_bochner(ctx, F.degree)
    return bochner(F)


def certify_bochner(ctx: AmbientContext, k: int) -> None:
    if k in ctx._bochner_ok:
        return
    if k < 0 or k > ctx.nvars:
        ctx._bochner_ok.add(k)
        return
    nv = ctx.nvars
    monos = [()] + [(i,) for i in range(nv)] + \
        list(itertools.combinations_with_replacement(range(nv), 2))
    for key in itertools.combinations(range(nv), k):
        for mono in monos:
            e = [0] * nv
            for i in mono:
                e[i] += 1
            c = RationalFunction.from_poly(
                ctx.table, MultiPoly.monomial(nv, tuple(e)))
            F = AmbientForm(ctx, k, {key: c})
            if not (_form_lap_slow(F) - bochner(F)).is_zero():
                raise AssertionError(
                    "form Laplacian disagrees with the metric-trace Laplacian")
    ctx._bochner_ok.add(k)


def euler_op(F: AmbientForm) -> AmbientForm:
    """nabla_X, acting componentwise as the coordinate Euler operator."""
    return F.map_coeffs(lambda c: c.euler_applied())


def eps_x(F: AmbientForm) -> AmbientForm:
    return wedge(F.ctx.X_one_form, F)


def iota_x(F: AmbientForm) -> AmbientForm:
    return iota_vector(F.ctx.X_vec, F)


def lie_x(F: AmbientForm) -> AmbientForm:
    return iota_x(ext_d(F)) + ext_d(iota_x(F))


def lie_x_star(F: AmbientForm) -> AmbientForm:
    return codiff(eps_x(F)) + eps_x(codiff(F))


def mul_q(F: AmbientForm) -> AmbientForm:
    return F.scale(F.ctx.Q_rf)


def _dir_weight_factor(F: AmbientForm) -> AmbientForm:
    ctx = F.ctx
    n = ctx.n
    return euler_op(F).scale(2) + F.scale(n - 2)


def eps_dir(F: AmbientForm) -> AmbientForm:
    """e(D) = d (n + 2 nabla_X - 2) + e(X) (form Laplacian)."""
    return ext_d(_dir_weight_factor(F)) + eps_x(form_lap(F))


def iota_dir(F: AmbientForm) -> AmbientForm:
    """i(D) = -delta (n + 2 nabla_X - 2) + i(X) (form Laplacian)."""
    return -codiff(_dir_weight_factor(F)) + iota_x(form_lap(F))


# -- operator atoms and expressions ----------------------------------------------


@dataclass(frozen=True)
class OpAtom:
    tag: str
    payload: object = None

    def shifts(self) -> tuple[int, int, int]:
        """(degree shift, weight shift, order bound)."""
        t = self.tag
        if t == "ExtD":
            return (1, -1, 1)
        if t == "Codiff":
            return (-1, -1, 1)
        if t == "EpsX":
            return (1, 1, 0)
        if t == "IotaX":
            return (-1, 1, 0)
        if t == "MulQ":
            return (0, 2, 0)
        if t in ("FormLap", "BochnerLap"):
            return (0, -2, 2)
        if t in ("LieX", "LieXStar"):
            return (0, 0, 1)
        if t == "Euler":
            return (0, 0, 1)
        if t == "EpsDir":
            return (1, -1, 2)
        if t == "IotaDir":
            return (-1, -1, 2)
        if t == "ScalarMul":
            rf = self.payload
            w = 0
            if isinstance(rf, RationalFunction) and not rf.is_zero():
                w = rf.homogeneous_degree()
            return (0, w, 0)
        if t == "EpsForm":
            g = self.payload
            return (g.degree, g.weight(), 0)
        if t == "IotaForm":
            g = self.payload
            return (-g.degree, g.weight(), 0)
        raise ValueError(f"unknown atom {t!r}")

    def apply(self, F: AmbientForm) -> AmbientForm:
        t = self.tag
        if t == "ExtD":
            return ext_d(F)
        if t == "Codiff":
            return codiff(F)
        if t == "EpsX":
            return eps_x(F)
        if t == "IotaX":
            return iota_x(F)
        if t == "MulQ":
            return mul_q(F)
        if t == "FormLap":
            return form_lap(F)
        if t == "BochnerLap":
            return bochner(F)
        if t == "LieX":
            return lie_x(F)
        if t == "LieXStar":
            return lie_x_star(F)
        if t == "Euler":
            return euler_op(F)
        if t == "EpsDir":
            return eps_dir(F)
        if t == "IotaDir":
            return iota_dir(F)
        if t == "ScalarMul":
            return F.scale(self.payload)
        if t == "EpsForm":
            return wedge(self.payload, F)
        if t == "IotaForm":
            return iota_form(self.payload, F)
        raise ValueError(f"unknown atom {t!r}")

    def label(self) -> str:
        base = {
            "ExtD": "d", "Codiff": "delta", "EpsX": "e(X)", "IotaX": "i(X)",
            "MulQ": "Q*", "FormLap": "Lap", "BochnerLap": "LapB",
            "LieX": "L_X", "LieXStar": "L_X*", "Euler": "E",
            "EpsDir": "e(D)", "IotaDir": "i(D)", "ScalarMul": "c*",
            "EpsForm": "e(.)", "IotaForm": "i(.)",
        }
        return base[self.tag]


@dataclass(frozen=True)
class OpExpr:
    """Composition of atoms; the rightmost atom applies first."""

    atoms: tuple[OpAtom, ...] = ()
    scalar: Fraction = Fraction(1)

    @classmethod
    def ident(cls) -> "OpExpr":
        return cls(())

    @classmethod
    def of(cls, *tags: str) -> "OpExpr":
        return cls(tuple(OpAtom(t) for t in tags))

    def then(self, outer: "OpExpr") -> "OpExpr":
        return OpExpr(outer.atoms + self.atoms, outer.scalar * self.scalar)

    def __mul__(self, c) -> "OpExpr":
        return OpExpr(self.atoms, self.scalar * Fraction(c))

    __rmul__ = __mul__

    def power_prefix(self, atom_tag: str, m: int) -> "OpExpr":
        return OpExpr(tuple(OpAtom(atom_tag) for _ in range(m)) + self.atoms,
                      self.scalar)

    def degree_shift(self) -> int:
        return sum(a.shifts()[0] for a in self.atoms)

    def weight_shift(self) -> int:
        return sum(a.shifts()[1] for a in self.atoms)

    def order_bound(self) -> int:
        return sum(a.shifts()[2] for a in self.atoms)

    def apply(self, F: AmbientForm) -> AmbientForm:
        out = F
        for atom in reversed(self.atoms):
            if not out.is_zero() and not 0 <= out.degree <= F.ctx.nvars:
                raise DegreeOutOfRange(
                    f"degree {out.degree} outside the ambient range")
            out = atom.apply(out)
        if self.scalar != 1:
            out = out.scale(self.scalar)
        return out

    def checked_apply(self, F: AmbientForm) -> AmbientForm:
        """Apply and assert the declared degree/weight bookkeeping."""
        win = F.weight() if not F.is_zero() else None
        out = self.apply(F)
        if win is not None and not out.is_zero():
            assert out.degree == F.degree + self.degree_shift()
            assert out.weight() == win + self.weight_shift()
        return out

    def label(self) -> str:
        body = " ".join(a.label() for a in self.atoms) or "1"
        if self.scalar != 1:
            return f"{self.scalar} * {body}"
        return body
