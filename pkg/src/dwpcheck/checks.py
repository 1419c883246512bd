"""Check-suite orchestration: each function evaluates one family of
closed-form identities against the brute-force oracle over a sample set and
returns ResidualSummary records."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import solitons, special
from .dwp import RIEMANN_CLASSES, RICCI_CLASSES, coordinate_lifts
from .reporting import skipped, summarize

__all__ = [
    "CHECK_NAMES",
    "check_lemma1",
    "check_lemma2",
    "check_lemma5",
    "check_hessian",
    "check_scalar",
    "check_laplacian",
    "check_solitons",
    "check_concircular",
    "check_conharmonic",
    "run_all",
]

CHECK_NAMES = (
    "lemma1",
    "lemma2",
    "lemma5",
    "hessian",
    "scalar",
    "laplacian",
    "solitons",
    "concircular",
    "conharmonic",
)

# factor membership of the (A, B, C) inputs for each curvature class
_CLASS_PATTERN = {
    "XYZ": (1, 1, 1),
    "XYU": (1, 1, 2),
    "UVX": (2, 2, 1),
    "XUY": (1, 2, 1),
    "UXV": (2, 1, 2),
    "UVW": (2, 2, 2),
}


def _normalized(closed, oracle):
    scale = 1.0 + max(float(np.abs(closed).max()), float(np.abs(oracle).max()))
    return float(np.abs(closed - oracle).max()) / scale


def _class_inputs(dwp, pattern):
    lifts1, lifts2 = coordinate_lifts(dwp)

    def pool(f):
        return list(enumerate(lifts1)) if f == 1 else [
            (dwp.m1 + i, v) for i, v in enumerate(lifts2)
        ]

    for ia, a in pool(pattern[0]):
        for ib, b in pool(pattern[1]):
            for ic, c in pool(pattern[2]):
                yield (ia, ib, ic), (a, b, c)


def check_lemma1(dwp, points, tolerance):
    """Closed-form curvature components of all six lifted index patterns
    against the product curvature oracle, plus full-tensor reconstruction."""
    points = np.atleast_2d(points)
    out = []
    for klass in RIEMANN_CLASSES:
        values = []
        for p in points:
            d = dwp.point_data(p)
            r4 = dwp.product.riemann_oracle(p).entries
            worst = 0.0
            for (ia, ib, ic), vecs in _class_inputs(dwp, _CLASS_PATTERN[klass]):
                closed = dwp.riemann_closed(klass, vecs, p)
                oracle = d.ginv @ r4[ia, ib, ic, :]
                worst = max(worst, _normalized(closed, oracle))
            values.append(worst)
        out.append(summarize(f"lemma1.{klass}", values, points, tolerance))
    values = []
    for p in points:
        closed = dwp.riemann_closed_tensor(p)
        oracle = dwp.product.riemann_oracle(p).entries
        values.append(_normalized(closed, oracle))
    out.append(summarize("lemma1.reconstruction", values, points, tolerance))
    return out


def check_lemma2(dwp, points, tolerance):
    """Blockwise Ricci splitting against the product Ricci oracle."""
    points = np.atleast_2d(points)
    m1 = dwp.m1
    slices = {"XX": (slice(None, m1), slice(None, m1)),
              "XU": (slice(None, m1), slice(m1, None)),
              "UU": (slice(m1, None), slice(m1, None))}
    out = []
    for klass in RICCI_CLASSES:
        values = []
        for p in points:
            ric = dwp.product.ricci_oracle(p).entries
            closed = dwp.ricci_closed(klass, p)
            values.append(_normalized(closed, ric[slices[klass]]))
        out.append(summarize(f"lemma2.{klass}", values, points, tolerance))
    return out


def check_lemma5(dwp, points, tolerance):
    """Blockwise Ricci-operator splitting against the raised Ricci oracle."""
    points = np.atleast_2d(points)
    m1 = dwp.m1
    out = []
    for klass in ("XX", "UU"):
        values = []
        for p in points:
            d = dwp.point_data(p)
            q = d.ginv @ dwp.product.ricci_oracle(p).entries
            block = q[:m1, :m1] if klass == "XX" else q[m1:, m1:]
            values.append(
                _normalized(dwp.ricci_operator_closed(klass, p), block)
            )
        out.append(summarize(f"lemma5.{klass}", values, points, tolerance))
    return out


def check_hessian(dwp, points, tolerance, psis=None):
    """Blockwise Hessian splitting for a set of potentials (the log-warpings
    by default, plus any supplied ones)."""
    points = np.atleast_2d(points)
    fields = [("k", dwp.k_lifted), ("l", dwp.l_lifted)]
    for name, psi in psis or []:
        fields.append((name, psi))
    m1 = dwp.m1
    slices = {"XX": (slice(None, m1), slice(None, m1)),
              "XU": (slice(None, m1), slice(m1, None)),
              "UU": (slice(m1, None), slice(m1, None))}
    out = []
    for name, psi in fields:
        psi_l = psi if psi.coords == dwp.coords else psi.lift(dwp.coords)
        for klass in RICCI_CLASSES:
            values = []
            for p in points:
                h = dwp.product.hessian_field(psi_l, p).entries
                closed = dwp.hessian_split_closed(psi_l, klass, p)
                values.append(_normalized(closed, h[slices[klass]]))
            out.append(
                summarize(f"hessian.{name}.{klass}", values, points, tolerance)
            )
    return out


def check_scalar(dwp, points, tolerance):
    points = np.atleast_2d(points)
    values = []
    for p in points:
        closed = dwp.scalar_closed(p)
        oracle = dwp.product.scalar_oracle(p)
        values.append(abs(closed - oracle) / (1.0 + max(abs(closed), abs(oracle))))
    return [summarize("scalar.splitting", values, points, tolerance)]


def check_laplacian(dwp, points, tolerance):
    points = np.atleast_2d(points)
    out = []
    for which in ("k", "l"):
        values = []
        for p in points:
            closed, oracle = dwp.laplacian_split(which, p)
            values.append(
                abs(closed - oracle) / (1.0 + max(abs(closed), abs(oracle)))
            )
        out.append(summarize(f"laplacian.{which}", values, points, tolerance))
    return out


_FACTOR_STRUCTURES = {
    "yamabe": solitons.yamabe_factor_structures,
    "ricci": solitons.ricci_factor_structures,
    "riemann": solitons.riemann_factor_structures,
    "quasi_einstein": solitons.quasi_einstein_factor_structures,
}


def check_solitons(dwp, specs, points, tolerance, anchor):
    """Defining-equation residuals for each soliton spec, plus induced
    factor structures for the kinds that have them."""
    points = np.atleast_2d(points)
    out = []
    for i, spec in enumerate(specs):
        prefix = f"soliton[{i}].{spec.kind}"
        try:
            out.append(
                solitons.residual(
                    spec, dwp.product, points, tolerance, check_id=prefix
                )
            )
            if spec.kind == "riemann" and dwp.m >= 3:
                out.append(
                    solitons.residual(
                        spec, dwp.product, points, tolerance,
                        form="contracted", check_id=f"{prefix}.contracted",
                    )
                )
                consistency = solitons.contraction_consistency(
                    spec, dwp.product, points, tolerance
                )
                out.append(
                    replace(consistency, check_id=f"{prefix}.contraction")
                )
            builder = _FACTOR_STRUCTURES.get(spec.kind)
            if builder is not None:
                for s in builder(dwp, spec, points, anchor, tolerance):
                    out.append(
                        replace(s, check_id=f"soliton[{i}].{s.check_id}")
                    )
        except solitons.SolitonError as exc:
            out.append(skipped(prefix, f"skipped: {exc}", tolerance))
    return out


def check_concircular(dwp, points, tolerance, anchor):
    """Closed-form concircular components against the oracle on all six
    lifted patterns, then the flatness consequences (gated)."""
    points = np.atleast_2d(points)
    out = []
    for klass in RIEMANN_CLASSES:
        values = []
        for p in points:
            d = dwp.point_data(p)
            c4 = special.concircular_oracle(dwp.product, p).entries
            worst = 0.0
            for (ia, ib, ic), vecs in _class_inputs(dwp, _CLASS_PATTERN[klass]):
                closed = special.concircular_closed(dwp, klass, vecs, p)
                oracle = d.ginv @ c4[ia, ib, ic, :]
                worst = max(worst, _normalized(closed, oracle))
            values.append(worst)
        out.append(summarize(f"concircular.{klass}", values, points, tolerance))
    out.extend(
        special.concircular_flat_consequences(dwp, points, anchor, tolerance)
    )
    return out


def check_conharmonic(dwp, points, tolerance, anchor):
    """Closed-form conharmonic components (same-factor patterns only)
    against the oracle, then the flatness consequences (gated)."""
    points = np.atleast_2d(points)
    if dwp.m < 3:
        return [
            skipped(
                "conharmonic",
                "skipped: conharmonic tensor requires dim >= 3",
                tolerance,
            )
        ]
    out = []
    for klass, pattern in (("XYZ", (1, 1, 1)), ("UVW", (2, 2, 2))):
        values = []
        for p in points:
            d = dwp.point_data(p)
            h4 = special.conharmonic_oracle(dwp.product, p).entries
            worst = 0.0
            for (ia, ib, ic), vecs in _class_inputs(dwp, pattern):
                closed = special.conharmonic_closed(dwp, klass, vecs, p)
                oracle = d.ginv @ h4[ia, ib, ic, :]
                worst = max(worst, _normalized(closed, oracle))
            values.append(worst)
        out.append(
            summarize(f"conharmonic.{klass}", values, points, tolerance)
        )
    out.extend(
        special.conharmonic_flat_consequences(dwp, points, anchor, tolerance)
    )
    return out


def run_all(dwp, specs, points, tolerance, anchor, checks=("all",), psis=None):
    """Run the selected named checks and return summaries sorted by id."""
    enabled = set(CHECK_NAMES) if "all" in checks else set(checks)
    unknown = enabled - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    out = []
    if "lemma1" in enabled:
        out.extend(check_lemma1(dwp, points, tolerance))
    if "lemma2" in enabled:
        out.extend(check_lemma2(dwp, points, tolerance))
    if "lemma5" in enabled:
        out.extend(check_lemma5(dwp, points, tolerance))
    if "hessian" in enabled:
        out.extend(check_hessian(dwp, points, tolerance, psis=psis))
    if "scalar" in enabled:
        out.extend(check_scalar(dwp, points, tolerance))
    if "laplacian" in enabled:
        out.extend(check_laplacian(dwp, points, tolerance))
    if "solitons" in enabled:
        out.extend(check_solitons(dwp, specs, points, tolerance, anchor))
    if "concircular" in enabled:
        out.extend(check_concircular(dwp, points, tolerance, anchor))
    if "conharmonic" in enabled:
        out.extend(check_conharmonic(dwp, points, tolerance, anchor))
    return sorted(out, key=lambda s: s.check_id)
