"""Doubly warped products and their closed-form curvature formulas.

A doubly warped product carries the block metric  g = f2^2 g1 (+) f1^2 g2,
with the warping function f1 living on the first factor and f2 on the
second.  Writing k = ln f1 and l = ln f2, every curvature object of the
product splits into factor-level pieces plus warping-derivative terms; this
module evaluates those closed forms so they can be compared against the
brute-force product oracle in `geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expression, constant
from .geometry import ChartManifold, GeometryError

__all__ = [
    "DoublyWarpedProduct",
    "LiftedVector",
    "WarpingError",
    "DimensionError",
    "coordinate_lifts",
]

RIEMANN_CLASSES = ("XYZ", "XYU", "UVX", "XUY", "UXV", "UVW")
RICCI_CLASSES = ("XX", "XU", "UU")


class WarpingError(GeometryError):
    pass


class DimensionError(GeometryError):
    pass


@dataclass(frozen=True)
class LiftedVector:
    """Lift of a factor vector field: zero on the other factor's block."""

    which_factor: int  # 1 or 2
    components: tuple  # Expression per factor coordinate

    def values(self, p_factor):
        return np.array([c.evaluate(p_factor) for c in self.components])


def coordinate_lifts(dwp):
    """Lifted coordinate basis fields, as (factor-1 list, factor-2 list)."""

    def basis(factor, coords):
        out = []
        for a in range(len(coords)):
            comps = tuple(
                constant(1.0 if b == a else 0.0, coords)
                for b in range(len(coords))
            )
            out.append(LiftedVector(factor, comps))
        return out

    return basis(1, dwp.factor1.coords), basis(2, dwp.factor2.coords)


class DoublyWarpedProduct:
    def __init__(self, factor1, factor2, f1, f2):
        if set(factor1.coords) & set(factor2.coords):
            raise ValueError("factor coordinate names must be disjoint")
        if f1.coords != factor1.coords or f2.coords != factor2.coords:
            raise ValueError("warping functions must live on their own factor")
        self.factor1 = factor1
        self.factor2 = factor2
        self.f1 = f1
        self.f2 = f2
        self.k = f1.apply("log")  # on factor-1 chart
        self.l = f2.apply("log")  # on factor-2 chart
        self.coords = factor1.coords + factor2.coords
        self.k_lifted = self.k.lift(self.coords)
        self.l_lifted = self.l.lift(self.coords)
        self.product = ChartManifold(self.coords, self._product_metric())
        self._data_cache = {}

    @property
    def m1(self):
        return self.factor1.dim

    @property
    def m2(self):
        return self.factor2.dim

    @property
    def m(self):
        return self.m1 + self.m2

    def _product_metric(self):
        m1, m2, coords = self.m1, self.m2, self.coords
        f1sq = (self.f1.lift(coords)) ** 2
        f2sq = (self.f2.lift(coords)) ** 2
        zero = constant(0.0, coords)
        rows = []
        for i in range(self.m):
            row = []
            for j in range(self.m):
                if i < m1 and j < m1:
                    row.append(f2sq * self.factor1.metric[i][j].lift(coords))
                elif i >= m1 and j >= m1:
                    row.append(
                        f1sq * self.factor2.metric[i - m1][j - m1].lift(coords)
                    )
                else:
                    row.append(zero)
            rows.append(row)
        return rows

    def split(self, p):
        p = np.asarray(p, dtype=float)
        return p[: self.m1], p[self.m1:]

    def join(self, p1, p2):
        return np.concatenate([np.asarray(p1, float), np.asarray(p2, float)])

    def embed(self, vec, which_factor):
        """Zero-extend factor components to the product chart."""
        out = np.zeros(self.m)
        if which_factor == 1:
            out[: self.m1] = vec
        else:
            out[self.m1:] = vec
        return out

    def validate_warpings(self, points):
        """Reject any sampled point where a warping function is nonpositive."""
        for p in np.atleast_2d(points):
            p1, p2 = self.split(p)
            if self.f1.evaluate(p1) <= 0.0:
                raise WarpingError(f"f1 nonpositive at {p1.tolist()}")
            if self.f2.evaluate(p2) <= 0.0:
                raise WarpingError(f"f2 nonpositive at {p2.tolist()}")

    def is_warped_product(self, points, tol=1e-12):
        c1, c2 = self._constancy(points, tol)
        return c1 or c2

    def is_direct(self, points, tol=1e-12):
        c1, c2 = self._constancy(points, tol)
        return c1 and c2

    def _constancy(self, points, tol):
        pts = np.atleast_2d(points)
        v1 = [self.f1.evaluate(self.split(p)[0]) for p in pts]
        v2 = [self.f2.evaluate(self.split(p)[1]) for p in pts]
        return (
            max(v1) - min(v1) <= tol * (1 + max(map(abs, v1))),
            max(v2) - min(v2) <= tol * (1 + max(map(abs, v2))),
        )

    # -- per-point ingredient bundle ----------------------------------------

    def point_data(self, p):
        key = tuple(float(x) for x in np.asarray(p, float))
        hit = self._data_cache.get(key)
        if hit is not None:
            return hit
        d = _PointData(self, np.asarray(key))
        if len(self._data_cache) > 2048:
            self._data_cache.clear()
        self._data_cache[key] = d
        return d

    # -- closed forms ---------------------------------------------------------

    def covariant_closed(self, a, b, p):
        """Right-hand side of the covariant-derivative splitting for
        grad_a b, dispatched on factor membership of the lifts."""
        d = self.point_data(p)
        fa, fb = a.which_factor, b.which_factor
        if fa == 1 and fb == 1:
            nab1 = self._factor_covariant(self.factor1, a, b, d.p1)
            return self.embed(nab1, 1) - self._pair(d, a, b) * d.grad_l
        if fa == 2 and fb == 2:
            nab2 = self._factor_covariant(self.factor2, a, b, d.p2)
            return self.embed(nab2, 2) - self._pair(d, a, b) * d.grad_k
        x, v = (a, b) if fa == 1 else (b, a)
        xv = self.embed(x.values(d.p1), 1)
        vv = self.embed(v.values(d.p2), 2)
        # V(l) X + X(k) V
        return float(vv @ d.dl2_ext) * xv + float(xv @ d.dk1_ext) * vv

    def covariant_oracle(self, a, b, p):
        """grad_a b from the product Christoffel symbols (field derivative)."""
        d = self.point_data(p)
        gamma = self.product.christoffel(p).entries
        av = self._lift_values(a, d)
        bv = self._lift_values(b, d)
        db = self._lift_jacobian(b, d)  # db[i, c] = d_i B^c on the product
        return np.einsum("i,ic->c", av, db) + np.einsum(
            "cij,i,j->c", gamma, av, bv
        )

    def hessian_split_closed(self, psi, klass, p):
        """Blocks of the product Hessian of psi via the splitting formulas."""
        d = self.point_data(p)
        jet = psi.lift(self.coords).jet(d.p) if psi.coords != self.coords else psi.jet(d.p)
        m1 = self.m1
        grad_psi = np.linalg.solve(d.g, jet.gradient)
        if klass == "XX":
            h1 = self._factor_hessian_from_jet(self.factor1, jet, d.p1, block=1)
            inner = float(d.grad_l @ d.g @ grad_psi)
            return h1 + d.g[:m1, :m1] * inner
        if klass == "UU":
            h2 = self._factor_hessian_from_jet(self.factor2, jet, d.p2, block=2)
            inner = float(d.grad_k @ d.g @ grad_psi)
            return h2 + d.g[m1:, m1:] * inner
        if klass == "XU":
            # XU(psi) - X(k)U(psi) - X(psi)U(l) on coordinate lifts
            return (
                jet.hessian[:m1, m1:]
                - np.outer(d.dk1, jet.gradient[m1:])
                - np.outer(jet.gradient[:m1], d.dl2)
            )
        raise ValueError(f"unknown Hessian class {klass!r}")

    def riemann_closed(self, klass, vectors, p):
        """Closed-form R_{AB}C for one of the six lifted index patterns;
        returns product-chart components of the output vector."""
        d = self.point_data(p)
        if klass == "XYZ":
            x, y, z = vectors
            r1 = self._factor_riemann_vec(self.factor1, x, y, z, d.p1)
            return (
                self.embed(r1, 1)
                + self._pair(d, x, z) * (d.Hl @ self._lift_values(y, d))
                - self._pair(d, y, z) * (d.Hl @ self._lift_values(x, d))
            )
        if klass == "XYU":
            x, y, u = vectors
            xk, yk = self._dirderiv1(d, x, d.dk1), self._dirderiv1(d, y, d.dk1)
            ul = self._dirderiv2(d, u, d.dl2)
            return ul * (
                yk * self._lift_values(x, d) - xk * self._lift_values(y, d)
            )
        if klass == "UVX":
            u, v, x = vectors
            xk = self._dirderiv1(d, x, d.dk1)
            ul = self._dirderiv2(d, u, d.dl2)
            vl = self._dirderiv2(d, v, d.dl2)
            return xk * (
                vl * self._lift_values(u, d) - ul * self._lift_values(v, d)
            )
        if klass == "XUY":
            x, u, y = vectors
            xv, yv = x.values(d.p1), y.values(d.p1)
            uvec = self._lift_values(u, d)
            h1k = float(xv @ d.h1_k @ yv)
            xk = float(xv @ d.dk1)
            yk = float(yv @ d.dk1)
            ul = self._dirderiv2(d, u, d.dl2)
            return (
                (h1k + xk * yk) * uvec
                + yk * ul * self._lift_values(x, d)
                + self._pair(d, x, y) * (d.Hl @ uvec + ul * d.grad_l)
            )
        if klass == "UXV":
            u, x, v = vectors
            uvv, vvv = u.values(d.p2), v.values(d.p2)
            xvec = self._lift_values(x, d)
            h2l = float(uvv @ d.h2_l @ vvv)
            ul = float(uvv @ d.dl2)
            vl = float(vvv @ d.dl2)
            xk = self._dirderiv1(d, x, d.dk1)
            return (
                (h2l + ul * vl) * xvec
                + vl * xk * self._lift_values(u, d)
                + self._pair(d, u, v) * (d.Hk @ xvec + xk * d.grad_k)
            )
        if klass == "UVW":
            u, v, w = vectors
            r2 = self._factor_riemann_vec(self.factor2, u, v, w, d.p2)
            return (
                self.embed(r2, 2)
                + self._pair(d, u, w) * (d.Hk @ self._lift_values(v, d))
                - self._pair(d, v, w) * (d.Hk @ self._lift_values(u, d))
            )
        raise ValueError(f"unknown Riemann class {klass!r}")

    def riemann_closed_tensor(self, p):
        """Full covariant (0,4) curvature reassembled from the six closed-form
        classes via the algebraic curvature symmetries."""
        d = self.point_data(p)
        m1, m = self.m1, self.m
        lifts1, lifts2 = coordinate_lifts(self)

        def lift(i):
            return lifts1[i] if i < m1 else lifts2[i - m1]

        def fac(i):
            return 1 if i < m1 else 2

        def vec(i, j, k):
            fi, fj, fk = fac(i), fac(j), fac(k)
            if (fi, fj) == (2, 1):
                return -vec(j, i, k)
            key = {
                (1, 1, 1): "XYZ",
                (1, 1, 2): "XYU",
                (2, 2, 1): "UVX",
                (1, 2, 1): "XUY",
                (2, 2, 2): "UVW",
            }.get((fi, fj, fk))
            if key is None:  # (1,2,2): swap to (2,1,2)
                return -self.riemann_closed(
                    "UXV", (lift(j), lift(i), lift(k)), p
                )
            return self.riemann_closed(key, (lift(i), lift(j), lift(k)), p)

        out = np.empty((m, m, m, m))
        for i in range(m):
            for j in range(m):
                if i == j:
                    out[i, j] = 0.0
                    continue
                for k in range(m):
                    out[i, j, k] = d.g @ vec(i, j, k)
        return out

    def ricci_closed(self, klass, p):
        """Ricci blocks from the closed splitting formulas."""
        d = self.point_data(p)
        m1 = self.m1
        if klass == "XX":
            return (
                d.ric1
                - (self.m2 / d.f1) * d.h1_f1
                - d.g[:m1, :m1] * d.lap_l
            )
        if klass == "XU":
            return (self.m - 2) * np.outer(d.dk1, d.dl2)
        if klass == "UU":
            return (
                d.ric2
                - (self.m1 / d.f2) * d.h2_f2
                - d.g[m1:, m1:] * d.lap_k
            )
        raise ValueError(f"unknown Ricci class {klass!r}")

    def ricci_operator_closed(self, klass, p):
        """Ricci-operator blocks (1,1) from the closed splitting formulas."""
        d = self.point_data(p)
        if klass == "XX":
            q1 = d.g1inv @ d.ric1
            h1 = d.g1inv @ d.h1_f1
            eye = np.eye(self.m1)
            return (1.0 / d.f2**2) * (
                q1 - (self.m2 / d.f1) * h1 - d.f2**2 * d.lap_l * eye
            )
        if klass == "UU":
            q2 = d.g2inv @ d.ric2
            h2 = d.g2inv @ d.h2_f2
            eye = np.eye(self.m2)
            return (1.0 / d.f1**2) * (
                q2 - (self.m1 / d.f2) * h2 - d.f1**2 * d.lap_k * eye
            )
        raise ValueError(f"unknown Ricci-operator class {klass!r}")

    def scalar_closed(self, p):
        """Scalar curvature of the product from the splitting formula."""
        d = self.point_data(p)
        return (
            d.tau1 / d.f2**2
            + d.tau2 / d.f1**2
            - (self.m2 / (d.f1 * d.f2**2)) * d.lap1_f1
            - (self.m1 / (d.f1**2 * d.f2)) * d.lap2_f2
            - self.m1 * d.lap_l
            - self.m2 * d.lap_k
        )

    def laplacian_split(self, which, p):
        """(closed, oracle) pair for the Laplacian of k or l on the product.

        The gradients inside the closed form are product-metric gradients,
        which is the reading under which the splitting is an identity."""
        d = self.point_data(p)
        if which == "k":
            gk1 = d.grad_k[: self.m1]
            closed = d.lap1_k / d.f2**2 + self.m2 * d.f2**2 * float(
                gk1 @ d.g1 @ gk1
            )
            return closed, d.lap_k
        if which == "l":
            gl2 = d.grad_l[self.m1:]
            closed = d.lap2_l / d.f1**2 + self.m1 * d.f1**2 * float(
                gl2 @ d.g2 @ gl2
            )
            return closed, d.lap_l
        raise ValueError("which must be 'k' or 'l'")

    # -- helpers ---------------------------------------------------------------

    def _pair(self, d, a, b):
        """Product metric pairing g(A, B) of two lifts."""
        av = self._lift_values(a, d)
        bv = self._lift_values(b, d)
        return float(av @ d.g @ bv)

    def _lift_values(self, a, d):
        if a.which_factor == 1:
            return self.embed(a.values(d.p1), 1)
        return self.embed(a.values(d.p2), 2)

    def _dirderiv1(self, d, x, covector):
        return float(x.values(d.p1) @ covector)

    def _dirderiv2(self, d, u, covector):
        return float(u.values(d.p2) @ covector)

    def _factor_covariant(self, factor, a, b, pf):
        gamma = factor.christoffel(pf).entries
        av = a.values(pf)
        bv = b.values(pf)
        db = np.array([c.jet(pf).gradient for c in b.components]).T
        # db[i, c] = d_i B^c
        return np.einsum("i,ic->c", av, db) + np.einsum(
            "cij,i,j->c", gamma, av, bv
        )

    def _lift_jacobian(self, b, d):
        """d_i B^c over the product chart (zero along the other factor)."""
        m = self.m
        out = np.zeros((m, m))
        if b.which_factor == 1:
            for c, comp in enumerate(b.components):
                out[: self.m1, c] = comp.jet(d.p1).gradient
        else:
            for c, comp in enumerate(b.components):
                out[self.m1:, self.m1 + c] = comp.jet(d.p2).gradient
        return out

    def _factor_riemann_vec(self, factor, a, b, c, pf):
        r4 = factor.riemann_oracle(pf).entries
        ginv = np.linalg.inv(factor.metric_at(pf)[0].entries)
        av, bv, cv = a.values(pf), b.values(pf), c.values(pf)
        return np.einsum(
            "ijkw,wz,i,j,k->z", r4, ginv, av, bv, cv
        )

    def _factor_hessian_from_jet(self, factor, jet, pf, block):
        """Factor Hessian of the restriction, from a product-chart jet."""
        m1 = self.m1
        if block == 1:
            grad = jet.gradient[:m1]
            hess = jet.hessian[:m1, :m1]
        else:
            grad = jet.gradient[m1:]
            hess = jet.hessian[m1:, m1:]
        gamma = factor.christoffel(pf).entries
        return hess - np.einsum("kij,k->ij", gamma, grad)

    def factor_hessian(self, which, psi, p):
        """h_i^psi of the leafwise restriction of psi, at the factor point
        carried by the product point p."""
        d = self.point_data(p)
        psi_l = psi.lift(self.coords) if psi.coords != self.coords else psi
        jet = psi_l.jet(d.p)
        if which == 1:
            return self._factor_hessian_from_jet(self.factor1, jet, d.p1, 1)
        return self._factor_hessian_from_jet(self.factor2, jet, d.p2, 2)


class _PointData:
    """All factor- and product-level ingredients at one product point."""

    def __init__(self, dwp, p):
        self.p = p
        self.p1, self.p2 = dwp.split(p)
        m1 = dwp.m1
        self.f1 = dwp.f1.evaluate(self.p1)
        self.f2 = dwp.f2.evaluate(self.p2)
        if self.f1 <= 0 or self.f2 <= 0:
            raise WarpingError(f"nonpositive warping at {p.tolist()}")
        self.g = dwp.product.metric_at(p)[0].entries
        self.ginv = np.linalg.inv(self.g)
        self.g1 = dwp.factor1.metric_at(self.p1)[0].entries
        self.g1inv = np.linalg.inv(self.g1)
        self.g2 = dwp.factor2.metric_at(self.p2)[0].entries
        self.g2inv = np.linalg.inv(self.g2)

        jet_k = dwp.k.jet(self.p1)
        jet_l = dwp.l.jet(self.p2)
        self.dk1 = jet_k.gradient  # d_a k on factor-1 chart
        self.dl2 = jet_l.gradient
        self.dk1_ext = dwp.embed(self.dk1, 1)
        self.dl2_ext = dwp.embed(self.dl2, 2)

        # product gradients (vectors) of k and l
        self.grad_k = self.ginv @ self.dk1_ext
        self.grad_l = self.ginv @ self.dl2_ext

        # product Hessians of k and l: (0,2) and (1,1) forms, Laplacians
        self.hk = dwp.product.hessian_field(dwp.k_lifted, p).entries
        self.hl = dwp.product.hessian_field(dwp.l_lifted, p).entries
        self.Hk = self.ginv @ self.hk
        self.Hl = self.ginv @ self.hl
        self.lap_k = float(np.einsum("ij,ij->", self.ginv, self.hk))
        self.lap_l = float(np.einsum("ij,ij->", self.ginv, self.hl))

        # factor-level Hessians and Laplacians
        self.h1_f1 = dwp.factor1.hessian_field(dwp.f1, self.p1).entries
        self.h2_f2 = dwp.factor2.hessian_field(dwp.f2, self.p2).entries
        self.h1_k = dwp.factor1.hessian_field(dwp.k, self.p1).entries
        self.h2_l = dwp.factor2.hessian_field(dwp.l, self.p2).entries
        self.lap1_f1 = float(np.einsum("ij,ij->", self.g1inv, self.h1_f1))
        self.lap2_f2 = float(np.einsum("ij,ij->", self.g2inv, self.h2_f2))
        self.lap1_k = float(np.einsum("ij,ij->", self.g1inv, self.h1_k))
        self.lap2_l = float(np.einsum("ij,ij->", self.g2inv, self.h2_l))

        # factor curvature
        self.ric1 = dwp.factor1.ricci_oracle(self.p1).entries
        self.ric2 = dwp.factor2.ricci_oracle(self.p2).entries
        self.tau1 = dwp.factor1.scalar_oracle(self.p1)
        self.tau2 = dwp.factor2.scalar_oracle(self.p2)
