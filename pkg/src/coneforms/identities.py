"""Identity suites for the ambient operator algebra.

The eight operators d, delta, e(X), i(X), Lap, L_X, L_X*, Q close under
(anti)commutators; every bracket is verified exactly on seeded trial
forms.  Tangentiality (P Q = Q P'), the square-zero and anticommutator
laws of the Dirac-type pair e(D), i(D), and the ladder identities moving
e(D)/i(D) past Laplacian powers are checked the same way.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .ambient import (AmbientContext, AmbientForm, OpExpr, bochner, codiff,
                      eps_dir, eps_x, ext_d, form_lap, iota_dir, iota_x,
                      lie_x, lie_x_star, mul_q)
from .conealg import is_zero_mod_cone, reduce_form_mod_cone
from .report import CheckRecord, verdict
from .trials import child_rng, random_form, random_weighted_form

Op = Callable[[AmbientForm], AmbientForm]


def _zero(F: AmbientForm) -> AmbientForm:
    return F.ctx.zero_form(F.degree)


def _kx(F: AmbientForm) -> AmbientForm:
    return lie_x(F) - lie_x_star(F)


_G1: dict[str, Op] = {
    "d": ext_d,
    "delta": codiff,
    "e(X)": eps_x,
    "i(X)": iota_x,
}

_G0: dict[str, Op] = {
    "Lap": form_lap,
    "L_X": lie_x,
    "L_X*": lie_x_star,
    "Q": mul_q,
}

# {a, b} -> rhs, all sixteen ordered pairs of odd generators
ANTICOMMUTATOR_TABLE: dict[tuple[str, str], tuple[str, Op]] = {}
for _a in _G1:
    for _b in _G1:
        ANTICOMMUTATOR_TABLE[(_a, _b)] = ("0", _zero)
for _pair, _rhs in [
    (("d", "delta"), ("Lap", form_lap)),
    (("d", "i(X)"), ("L_X", lie_x)),
    (("delta", "e(X)"), ("L_X*", lie_x_star)),
    (("e(X)", "i(X)"), ("Q", mul_q)),
]:
    ANTICOMMUTATOR_TABLE[_pair] = _rhs
    ANTICOMMUTATOR_TABLE[(_pair[1], _pair[0])] = _rhs


def _scaled(op: Op, c: int) -> tuple[str, Op]:
    return (f"{c}*", lambda F: op(F).scale(c))


# [row, col] -> rhs over rows in the even part and all eight columns
COMMUTATOR_TABLE: dict[tuple[str, str], tuple[str, Op]] = {
    ("Lap", "d"): ("0", _zero),
    ("Lap", "delta"): ("0", _zero),
    ("Lap", "e(X)"): ("-2 d", lambda F: ext_d(F).scale(-2)),
    ("Lap", "i(X)"): ("2 delta", lambda F: codiff(F).scale(2)),
    ("Lap", "Lap"): ("0", _zero),
    ("Lap", "L_X"): ("2 Lap", lambda F: form_lap(F).scale(2)),
    ("Lap", "L_X*"): ("-2 Lap", lambda F: form_lap(F).scale(-2)),
    ("Lap", "Q"): ("-2 K_X", lambda F: _kx(F).scale(-2)),
    ("L_X", "d"): ("0", _zero),
    ("L_X", "delta"): ("-2 delta", lambda F: codiff(F).scale(-2)),
    ("L_X", "e(X)"): ("2 e(X)", lambda F: eps_x(F).scale(2)),
    ("L_X", "i(X)"): ("0", _zero),
    ("L_X", "Lap"): ("-2 Lap", lambda F: form_lap(F).scale(-2)),
    ("L_X", "L_X"): ("0", _zero),
    ("L_X", "L_X*"): ("0", _zero),
    ("L_X", "Q"): ("2 Q", lambda F: mul_q(F).scale(2)),
    ("L_X*", "d"): ("2 d", lambda F: ext_d(F).scale(2)),
    ("L_X*", "delta"): ("0", _zero),
    ("L_X*", "e(X)"): ("0", _zero),
    ("L_X*", "i(X)"): ("-2 i(X)", lambda F: iota_x(F).scale(-2)),
    ("L_X*", "Lap"): ("2 Lap", lambda F: form_lap(F).scale(2)),
    ("L_X*", "L_X"): ("0", _zero),
    ("L_X*", "L_X*"): ("0", _zero),
    ("L_X*", "Q"): ("-2 Q", lambda F: mul_q(F).scale(-2)),
    ("Q", "d"): ("-2 e(X)", lambda F: eps_x(F).scale(-2)),
    ("Q", "delta"): ("2 i(X)", lambda F: iota_x(F).scale(2)),
    ("Q", "e(X)"): ("0", _zero),
    ("Q", "i(X)"): ("0", _zero),
    ("Q", "Lap"): ("2 K_X", lambda F: _kx(F).scale(2)),
    ("Q", "L_X"): ("-2 Q", lambda F: mul_q(F).scale(-2)),
    ("Q", "L_X*"): ("2 Q", lambda F: mul_q(F).scale(2)),
    ("Q", "Q"): ("0", _zero),
}

_ALL_OPS = {**_G1, **_G0}


def check_superalgebra(n: int, p: int, q: int, seed: int,
                       trials: int = 8) -> list[CheckRecord]:
    """Verify every bracket of the operator algebra exactly on seeded
    random forms of every degree 0..n+2."""
    ctx = AmbientContext(n, p, q)
    params = {"n": n, "p": p, "q": q, "seed": seed}
    records: list[CheckRecord] = []

    def run(kind: str, a: str, b: str, rhs_name: str, rhs: Op,
            combine) -> CheckRecord:
        rng = child_rng(seed, f"superalg/{kind}/{a}/{b}/{n}/{p}/{q}")
        opa, opb = _ALL_OPS[a], _ALL_OPS[b]
        count = 0
        for k in range(0, n + 3):
            for _ in range(trials):
                F = random_form(ctx, rng, k, max_deg=3, sparse=3)
                lhs = combine(opa, opb, F)
                res = lhs - rhs(F)
                count += 1
                if not res.is_zero():
                    wit = (f"degree {k}: F = {F.render()}; "
                           f"residual = {res.render()}")
                    return verdict(
                        f"superalgebra/{kind}/{a},{b}",
                        _bracket_anchor(kind, a, b, rhs_name),
                        params, False, wit, trials=count)
        return verdict(f"superalgebra/{kind}/{a},{b}",
                       _bracket_anchor(kind, a, b, rhs_name),
                       params, True, trials=count)

    def anti(opa: Op, opb: Op, F: AmbientForm) -> AmbientForm:
        return opa(opb(F)) + opb(opa(F))

    def comm(opa: Op, opb: Op, F: AmbientForm) -> AmbientForm:
        return opa(opb(F)) - opb(opa(F))

    for (a, b), (rhs_name, rhs) in ANTICOMMUTATOR_TABLE.items():
        records.append(run("anti", a, b, rhs_name, rhs, anti))
    for (a, b), (rhs_name, rhs) in COMMUTATOR_TABLE.items():
        records.append(run("comm", a, b, rhs_name, rhs, comm))
    return records


def _bracket_anchor(kind: str, a: str, b: str, rhs: str) -> str:
    br = "{%s, %s}" % (a, b) if kind == "anti" else f"[{a}, {b}]"
    return f"{br} = {rhs}"


def check_tangential(ctx: AmbientContext, op: OpExpr, k: int, w: int,
                     seed: int, trials: int = 8
                     ) -> tuple[bool, AmbientForm | None, AmbientForm | None]:
    """True iff op(Q*F) lies in (Q) for every trial cofactor F of degree k
    and weight w (so op acts on forms of weight w+2).

    Returns (ok, offending F, nonzero residue) with the reduced residue of
    the first failure.
    """
    rng = child_rng(seed, f"tangential/{op.label()}/{k}/{w}")
    deg = max(3, op.order_bound() + 1)
    for _ in range(trials):
        F = random_weighted_form(ctx, rng, k, w, min_num_deg=deg, sparse=3)
        out = op.apply(mul_q(F))
        red = reduce_form_mod_cone(ctx, out)
        if not red.is_zero():
            return False, F, red
    return True, None, None


def lap_power_commutator_scalar(n: int, m: int, w: int) -> Fraction:
    """Scalar c with [Lap^m, Q] = c * Lap^(m-1) on weight-w forms."""
    return Fraction(-2 * m * (2 * w - 2 * m + n + 4))


def check_lap_power_commutator(ctx: AmbientContext, m: int, w: int, seed: int,
                               trials: int = 8) -> CheckRecord:
    """[Lap^m, Q] acts on weight-w forms exactly as the scalar
    -2m(2w-2m+n+4) times Lap^(m-1); tangential precisely at
    w = m-2-n/2."""
    n = ctx.n
    c = lap_power_commutator_scalar(n, m, w)
    lapm = OpExpr.ident().power_prefix("FormLap", m)
    lapm1 = OpExpr.ident().power_prefix("FormLap", m - 1)
    rng = child_rng(seed, f"lapcomm/{m}/{w}")
    params = {"n": n, "m": m, "w": w, "seed": seed}
    count = 0
    for k in range(0, min(n + 3, 4)):
        for _ in range(trials):
            F = random_weighted_form(ctx, rng, k, w,
                                     min_num_deg=2 * m + 1, sparse=2)
            lhs = lapm.apply(mul_q(F)) - mul_q(lapm.apply(F))
            rhs = lapm1.apply(F).scale(c)
            count += 1
            if not (lhs - rhs).is_zero():
                return verdict(
                    f"tangential/lap-power-commutator/m={m},w={w}",
                    "[Lap^m, Q] = -2m(2w-2m+n+4) Lap^(m-1) at weight w",
                    params, False,
                    f"degree {k}: residual {(lhs - rhs).render()}",
                    constants={"c": c}, trials=count)
    return verdict(f"tangential/lap-power-commutator/m={m},w={w}",
                   "[Lap^m, Q] = -2m(2w-2m+n+4) Lap^(m-1) at weight w",
                   params, True, constants={"c": c}, trials=count)


def check_dd0(ctx: AmbientContext, k: int, w: int, seed: int,
              trials: int = 8) -> list[CheckRecord]:
    """i(D)i(D) = 0, e(D)e(D) = 0 and {i(D), e(D)} = Q Lap^2, exactly."""
    rng = child_rng(seed, f"dd0/{k}/{w}")
    params = {"n": ctx.n, "p": ctx.p, "q": ctx.q, "k": k, "w": w, "seed": seed}
    lap2 = OpExpr.of("FormLap", "FormLap")
    cases = [
        ("i(D) i(D) = 0",
         lambda F: iota_dir(iota_dir(F))),
        ("e(D) e(D) = 0",
         lambda F: eps_dir(eps_dir(F))),
        ("i(D) e(D) + e(D) i(D) = Q Lap^2",
         lambda F: iota_dir(eps_dir(F)) + eps_dir(iota_dir(F))
         - mul_q(lap2.apply(F))),
    ]
    records = []
    for anchor, resid in cases:
        ok, wit = True, ""
        for i in range(trials):
            F = random_weighted_form(ctx, rng, k, w, min_num_deg=5, sparse=2)
            r = resid(F)
            if not r.is_zero():
                ok, wit = False, f"trial {i}: residual {r.render()}"
                break
        records.append(verdict(
            f"dirac-pair/{anchor.split(' = ')[0].replace(' ', '')}/k={k},w={w}",
            anchor, params, ok, wit, trials=trials))
    return records


def check_domino(ctx: AmbientContext, ell: int, k: int, seed: int,
                 trials: int = 8) -> list[CheckRecord]:
    """The four ladder identities carrying e(D)/i(D) across Lap powers at
    the weights ell-n/2+1 (for V) and ell-n/2 (for U)."""
    n = ctx.n
    rng = child_rng(seed, f"domino/{ell}/{k}")
    params = {"n": n, "ell": ell, "k": k, "seed": seed}
    lap_l = OpExpr.ident().power_prefix("FormLap", ell)
    lap_l1 = OpExpr.ident().power_prefix("FormLap", ell + 1)
    wV = ell - n // 2 + 1
    wU = ell - n // 2
    deg = 2 * ell + 3
    cases = [
        ("Lap^l e(D) V = e(X) Lap^(l+1) V", wV,
         lambda F: lap_l.apply(eps_dir(F)) - eps_x(lap_l1.apply(F))),
        ("Lap^l i(D) V = i(X) Lap^(l+1) V", wV,
         lambda F: lap_l.apply(iota_dir(F)) - iota_x(lap_l1.apply(F))),
        ("e(D) Lap^l U = Lap^(l+1) e(X) U", wU,
         lambda F: eps_dir(lap_l.apply(F)) - lap_l1.apply(eps_x(F))),
        ("i(D) Lap^l U = Lap^(l+1) i(X) U", wU,
         lambda F: iota_dir(lap_l.apply(F)) - lap_l1.apply(iota_x(F))),
    ]
    records = []
    for idx, (anchor, w, resid) in enumerate(cases):
        ok, wit = True, ""
        for i in range(trials):
            F = random_weighted_form(ctx, rng, k, w, min_num_deg=deg, sparse=2)
            r = resid(F)
            if not r.is_zero():
                ok, wit = False, f"trial {i}: residual {r.render()}"
                break
        records.append(verdict(
            f"ladder/{idx}/ell={ell},k={k}", anchor, params, ok, wit,
            trials=trials))
    return records


def bochner_equals_form_lap(F: AmbientForm) -> bool:
    """Componentwise -h^{AB} d_A d_B F agrees with (delta d + d delta) F."""
    from .ambient import _form_lap_slow
    return (_form_lap_slow(F) - bochner(F)).is_zero()


def check_bochner(ctx: AmbientContext, seed: int, trials: int = 8
                  ) -> list[CheckRecord]:
    rng = child_rng(seed, "bochner")
    params = {"n": ctx.n, "p": ctx.p, "q": ctx.q, "seed": seed}
    records = []
    for k in range(0, ctx.nvars + 1):
        ok, wit = True, ""
        for _ in range(trials):
            F = random_form(ctx, rng, k, max_deg=3, sparse=3)
            if not bochner_equals_form_lap(F):
                ok, wit = False, f"degree {k}: F = {F.render()}"
                break
        records.append(verdict(
            f"laplacian-routes/k={k}",
            "delta d + d delta = -h^{AB} d_A d_B componentwise (flat chart)",
            params, ok, wit, trials=trials))
    return records


def check_dirac_weight_bookkeeping(ctx: AmbientContext, seed: int,
                                   trials: int = 4) -> list[CheckRecord]:
    """e(D) carries (k, w) to (k+1, w-1); i(D) to (k-1, w-1)."""
    rng = child_rng(seed, "dirshift")
    records = []
    params = {"n": ctx.n, "p": ctx.p, "q": ctx.q, "seed": seed}
    for k in (1, 2):
        for w in (-1, 0, 2):
            ok, wit = True, ""
            for _ in range(trials):
                F = random_weighted_form(ctx, rng, k, w, min_num_deg=3,
                                         sparse=2)
                up = eps_dir(F)
                dn = iota_dir(F)
                if not up.is_zero() and (up.degree, up.weight()) != (k + 1, w - 1):
                    ok, wit = False, "e(D) shift mismatch"
                    break
                if not dn.is_zero() and (dn.degree, dn.weight()) != (k - 1, w - 1):
                    ok, wit = False, "i(D) shift mismatch"
                    break
            records.append(verdict(
                f"dirac-pair/shifts/k={k},w={w}",
                "e(D): (k,w)->(k+1,w-1); i(D): (k,w)->(k-1,w-1)",
                params, ok, wit, trials=trials))
    return records
