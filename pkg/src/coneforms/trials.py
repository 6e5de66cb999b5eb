"""Seeded generators for trial polynomials and forms.

All randomness flows through ``random.Random`` seeded from a 64-bit run
seed mixed with a stable crc32 of a textual label, so identical
configurations reproduce identical trial sets on any platform.
"""

from __future__ import annotations

import itertools
import random
import zlib
from fractions import Fraction

from .ambient import AmbientContext, AmbientForm
from .poly import MultiPoly
from .ratfunc import RationalFunction, T_FACTOR


def child_rng(seed: int, label: str) -> random.Random:
    return random.Random((seed & 0xFFFFFFFFFFFFFFFF) ^ zlib.crc32(label.encode()))


def random_poly(ctx: AmbientContext, rng: random.Random, max_deg: int,
                vars_: list[int] | None = None, terms: int = 4) -> MultiPoly:
    """Random polynomial of total degree <= max_deg with small nonzero
    integer coefficients; at least one term of degree exactly max_deg."""
    nv = ctx.nvars
    if vars_ is None:
        vars_ = list(range(nv))
    out = MultiPoly.zero(nv)
    for i in range(terms):
        deg = max_deg if i == 0 else rng.randrange(0, max_deg + 1)
        e = [0] * nv
        for _ in range(deg):
            e[vars_[rng.randrange(len(vars_))]] += 1
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        out = out + MultiPoly.monomial(nv, tuple(e), c)
    return out


def random_homog_poly(ctx: AmbientContext, rng: random.Random, deg: int,
                      vars_: list[int] | None = None,
                      terms: int = 4) -> MultiPoly:
    nv = ctx.nvars
    if vars_ is None:
        vars_ = list(range(nv))
    out = MultiPoly.zero(nv)
    for _ in range(terms):
        e = [0] * nv
        for _ in range(deg):
            e[vars_[rng.randrange(len(vars_))]] += 1
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        out = out + MultiPoly.monomial(nv, tuple(e), c)
    if out.is_zero():
        e = [0] * nv
        e[vars_[0]] = deg
        out = MultiPoly.monomial(nv, tuple(e), 1)
    return out


def random_form(ctx: AmbientContext, rng: random.Random, k: int,
                max_deg: int = 3, sparse: int = 0) -> AmbientForm:
    """Random k-form with polynomial coefficients of degree <= max_deg."""
    keys = list(itertools.combinations(range(ctx.nvars), k))
    if sparse:
        rng.shuffle(keys)
        keys = sorted(keys[:sparse])
    coeffs = {}
    for key in keys:
        coeffs[key] = RationalFunction.from_poly(
            ctx.table, random_poly(ctx, rng, max_deg, terms=3))
    return AmbientForm(ctx, k, coeffs)


def random_weighted_form(ctx: AmbientContext, rng: random.Random, k: int,
                         weight: int, min_num_deg: int = 3,
                         sparse: int = 0) -> AmbientForm:
    """Random k-form whose coefficients are homogeneous of the given degree
    (t-power denominators supply negative homogeneity)."""
    tpow = max(0, min_num_deg - weight, -weight)
    num_deg = weight + tpow
    keys = list(itertools.combinations(range(ctx.nvars), k))
    if sparse:
        rng.shuffle(keys)
        keys = sorted(keys[:sparse])
    coeffs = {}
    for key in keys:
        num = random_homog_poly(ctx, rng, num_deg, terms=3)
        den = {T_FACTOR: tpow} if tpow else None
        coeffs[key] = RationalFunction(ctx.table, num, den)
    return AmbientForm(ctx, k, coeffs)


def monomial_form(ctx: AmbientContext, k: int, key: tuple[int, ...],
                  expt: tuple[int, ...]) -> AmbientForm:
    c = RationalFunction.from_poly(ctx.table,
                                   MultiPoly.monomial(ctx.nvars, expt))
    return AmbientForm(ctx, k, {key: c})
