"""Characteristic exponent, its radial majorant, and the time-space scale.

For a symmetric measure the exponent is real and nonnegative:

    phi(xi) = integral of (1 - cos<xi, y>) nu(dy).

Every supported angular structure reduces phi to one radial cosine
transform  I(u) = integral of (1 - cos(u s)) q(s) ds:

    d=1 (atom pair):       phi(xi) = |mu| I(|xi|)
    d=2, uniform angular:  phi(xi) = |mu| (2/pi) int_0^{pi/2} I(|xi| cos a) da
    d=2, atom pairs:       phi(xi) = sum_i w_i I(|<xi, theta_i>|)

(the uniform case is the Bessel transform 1 - J0 written as an angular
average of the cosine transform).  I is tabulated once on a log grid and
interpolated as a cubic in log-log coordinates, which is exact on power
laws; below the grid a fitted power-law continuation applies, above it the
table must be rebuilt wider.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline, PchipInterpolator

from .measures import (
    AtomAngle,
    HighIntensity,
    LevyMeasure,
    radial_quadratic_mass,
    tail_mass,
)
from .quadrature import cos_transform, integrate_panels

DEFAULT_R_MIN = 1e-4
DEFAULT_R_MAX = 1e6
DEFAULT_POINTS = 600
CUTOFF_LOG = 34.0  # exp(-34) < 2e-15: tail of the inversion integrand


class FrequencyRangeError(ValueError):
    """Requested value outside the tabulated frequency grid."""


class DegenerateMeasureError(ValueError):
    """The exponent vanishes along some direction at |xi| = 1."""


@dataclass(frozen=True)
class RadialTable:
    """Log-log tabulated positive function with power-law continuation at
    the low end."""

    u: np.ndarray
    vals: np.ndarray
    _spline: CubicSpline = field(repr=False)
    low_slope: float

    @classmethod
    def build(cls, u: np.ndarray, vals: np.ndarray) -> "RadialTable":
        lu, lv = np.log(u), np.log(vals)
        slope = (lv[1] - lv[0]) / (lu[1] - lu[0])
        return cls(u=u, vals=vals, _spline=CubicSpline(lu, lv), low_slope=slope)

    def eval(self, u) -> np.ndarray:
        u_arr = np.asarray(u, dtype=float)
        out = np.zeros_like(u_arr)
        pos = u_arr > 0
        if np.any(u_arr[pos] > self.u[-1] * (1 + 1e-12)):
            raise FrequencyRangeError("extend frequency grid")
        low = pos & (u_arr < self.u[0])
        mid = pos & ~low
        if np.any(mid):
            out[mid] = np.exp(self._spline(np.log(u_arr[mid])))
        if np.any(low):
            out[low] = self.vals[0] * (u_arr[low] / self.u[0]) ** self.low_slope
        return out


_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)


class _RadialQuadrature:
    """Shared machinery for the cosine transform on a whole frequency grid.

    A dense log grid in s carries cumulative integrals of q, s^2 q and
    s^4 q (per-segment Gauss rules, so interpolation between nodes is the
    only approximation).  Each frequency then needs a series term from the
    moments, one vectorized Gauss panel over the few-oscillation range, and
    a single weighted-cosine call for the rapidly oscillating tail.
    """

    def __init__(self, nu: LevyMeasure, s_tiny: float = 1e-12):
        self.q = nu.radial.density
        self.rel_tol = nu.rel_tol
        s_hi = nu.support_radius
        if not np.isfinite(s_hi):
            # walk the tail out until a decade stops contributing mass
            s_hi = 1.0
            ref = integrate_panels(self.q, 0.5, 1.0, 1e-6) + 1e-300
            for _ in range(12):
                piece = integrate_panels(self.q, s_hi, 10 * s_hi, 1e-6)
                if piece < 1e-14 * ref:
                    break
                ref += piece
                s_hi *= 10.0
        self.s_hi = float(s_hi)
        self.s_lo = max(nu.radial.s_min, s_tiny)
        n = max(32, int(math.ceil(120 * math.log10(self.s_hi / self.s_lo))))
        self.s = np.geomspace(self.s_lo, self.s_hi, n)
        self.qs = np.asarray(self.q(self.s), dtype=float)

        # per-segment Gauss-8 integrals of q, s^2 q, s^4 q, in log coordinates
        v = np.log(self.s)
        mid = 0.5 * (v[1:] + v[:-1])
        half = 0.5 * np.diff(v)
        nodes = np.exp(mid[:, None] + half[:, None] * _GL8_NODES[None, :])
        w = half[:, None] * _GL8_WEIGHTS[None, :] * nodes  # ds = s dv
        qn = np.asarray(self.q(nodes), dtype=float)
        seg0 = np.sum(w * qn, axis=1)
        seg2 = np.sum(w * qn * nodes**2, axis=1)
        seg4 = np.sum(w * qn * nodes**4, axis=1)

        # mass of s^2 q below the dense grid (zero for table-bounded
        # profiles, closed form for the log-corrected family)
        from .measures import radial_quadratic_mass

        head2 = radial_quadratic_mass(nu.radial, self.s_lo, self.s_hi, nu.rel_tol)
        qs0 = float(self.q(self.s_lo))
        p = (
            math.log(max(float(self.q(self.s[1])), 1e-300) / max(qs0, 1e-300))
            / (v[1] - v[0])
            if qs0 > 0
            else 0.0
        )
        head4 = qs0 * self.s_lo**5 / (5.0 + p) if qs0 > 0 and p > -5 else 0.0

        self.m2 = head2 + np.concatenate([[0.0], np.cumsum(seg2)])
        self.m4 = head4 + np.concatenate([[0.0], np.cumsum(seg4)])
        self.tail = np.concatenate([np.cumsum(seg0[::-1])[::-1], [0.0]])
        self._lv = v

    def _interp(self, table: np.ndarray, s: float) -> float:
        return float(np.interp(math.log(s), self._lv, table))

    def transform(self, u: float) -> float:
        """integral of (1 - cos(u s)) q(s) ds over the support."""
        if u <= 0:
            return 0.0
        s_hi = self.s_hi
        sc = min(1e-4 / u, s_hi)
        total = 0.5 * u * u * self._interp(self.m2, sc)
        total -= u**4 / 24.0 * self._interp(self.m4, sc)
        if sc >= s_hi:
            return total

        s_direct = min(30.0 / u, s_hi)
        # Gauss panels in log coordinates, each a bounded slice of both the
        # log range and the oscillation phase; 2 sin^2 keeps tiny phases exact
        lo = max(sc, self.s_lo * (1.0 - 1e-15))
        while lo < s_direct * (1.0 - 1e-15):
            hi = min(lo * math.e**2.5, lo + 8.0 / u, s_direct)
            mid = 0.5 * (math.log(hi) + math.log(lo))
            half = 0.5 * (math.log(hi) - math.log(lo))
            nodes = np.exp(mid + half * _GL64_NODES)
            w = half * _GL64_WEIGHTS * nodes
            qn = np.asarray(self.q(nodes), dtype=float)
            total += float(np.sum(w * qn * 2.0 * np.sin(0.5 * u * nodes) ** 2))
            lo = hi

        if s_direct < s_hi:
            # rapidly oscillating tail: plain mass minus a weighted-cosine
            # rule, one call per decade so the power-law variation stays
            # bounded within each; beyond s_cut the alternating-sign
            # remainder is at most ~2 q(s_cut)/u and is dropped
            total += self._interp(self.tail, s_direct)
            scale = max(abs(total), 1e-300)
            s_cut = s_hi
            idx = np.searchsorted(self.s, s_direct)
            for j in range(idx, len(self.s)):
                if 2.0 * self.qs[j] / u <= 1e-13 * scale:
                    s_cut = self.s[j]
                    break
            lo = s_direct
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                while lo < s_cut * (1.0 - 1e-15):
                    hi = min(10.0 * lo, s_cut)
                    c, _ = integrate.quad(
                        self.q,
                        lo,
                        hi,
                        weight="cos",
                        wvar=u,
                        epsabs=1e-300,
                        epsrel=max(self.rel_tol, 1e-11),
                        limit=400,
                    )
                    total -= c
                    lo = hi
        return total


def _radial_cos_values(nu: LevyMeasure, u_grid: np.ndarray) -> np.ndarray:
    engine = _RadialQuadrature(nu)
    return np.array([engine.transform(u) for u in u_grid])


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


def _angular_average(table: RadialTable, u_grid: np.ndarray) -> np.ndarray:
    """(2/pi) int_0^{pi/2} I(u cos a) da on the grid (d=2 uniform case)."""
    a = 0.25 * math.pi * (_GL_NODES + 1.0)
    w = 0.25 * math.pi * _GL_WEIGHTS
    cosa = np.cos(a)
    vals = np.empty_like(u_grid)
    for j, u in enumerate(u_grid):
        vals[j] = (2.0 / math.pi) * float(np.dot(w, table.eval(u * cosa)))
    return vals


def _segment_integrals(nu: LevyMeasure, s_nodes: np.ndarray):
    """Per-segment integrals of q and s^2 q between consecutive nodes, plus
    the head piece of s^2 q below the first node and the tail mass beyond
    the last."""
    q = nu.radial.density
    tol = nu.rel_tol
    lo_arr = s_nodes[:-1]
    hi_arr = s_nodes[1:]
    seg_q = np.empty(len(lo_arr))
    seg_q2 = np.empty(len(lo_arr))
    for j, (lo, hi) in enumerate(zip(lo_arr, hi_arr)):
        a, b = max(lo, nu.radial.s_min), min(hi, nu.support_radius)
        if b <= a:
            seg_q[j] = seg_q2[j] = 0.0
            continue
        seg_q[j] = integrate_panels(q, a, b, tol)
        seg_q2[j] = integrate_panels(lambda s: s * s * q(s), a, b, tol)
    head_q2 = radial_quadratic_mass(nu.radial, s_nodes[0], nu.support_radius, tol)
    tail_q = (
        tail_mass(nu, s_nodes[-1]) / nu.angular.total
        if s_nodes[-1] < nu.support_radius
        else 0.0
    )
    return seg_q, seg_q2, head_q2, tail_q


@dataclass(frozen=True)
class SymbolTable:
    """Tabulated exponent along probe directions plus derived quantities.

    Immutable after construction; all evaluators are pure and vectorized.
    """

    measure: LevyMeasure
    r: np.ndarray
    phi_probe: np.ndarray  # (n_probe, n_r)
    probe_dirs: np.ndarray | None  # None when the exponent is radial
    psi_grid: np.ndarray
    h_big: np.ndarray  # H on the grid
    l0_fit: float
    t_p: float
    radial: RadialTable = field(repr=False)
    _phi_radial: RadialTable | None = field(repr=False, default=None)
    _psi_interp: PchipInterpolator = field(repr=False, default=None)
    _phi_floor: np.ndarray = field(repr=False, default=None)

    # -- evaluation ----------------------------------------------------------

    @property
    def is_radial(self) -> bool:
        return self._phi_radial is not None

    def phi_ray(self, u) -> np.ndarray:
        """Exponent as a function of |xi| (radial cases only)."""
        if self._phi_radial is None:
            raise ValueError("exponent is not radial; use phi_at")
        return self._phi_radial.eval(u)

    def phi_at(self, xi) -> float | np.ndarray:
        """Exponent at frequency points, shape (..., d)."""
        xi_arr = np.asarray(xi, dtype=float)
        if self.measure.d == 1 and xi_arr.ndim == 0:
            xi_arr = xi_arr[None]
        if xi_arr.shape[-1] != self.measure.d:
            raise ValueError("frequency points must have length d")
        if self._phi_radial is not None:
            out = self._phi_radial.eval(np.linalg.norm(xi_arr, axis=-1))
        else:
            atoms: AtomAngle = self.measure.angular
            dots = np.abs(xi_arr @ atoms.directions.T)  # (..., k)
            out = np.einsum("...k,k->...", self.radial.eval(dots), atoms.weights)
        return float(out) if out.ndim == 0 else out

    def psi_at(self, r) -> float | np.ndarray:
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < self.r[0] * (1 - 1e-12)):
            raise FrequencyRangeError("below frequency grid")
        if np.any(r_arr > self.r[-1] * (1 + 1e-12)):
            raise FrequencyRangeError("extend frequency grid")
        out = np.exp(self._psi_interp(np.log(np.clip(r_arr, self.r[0], self.r[-1]))))
        return float(out) if out.ndim == 0 else out

    def cutoff_radius(self, t: float, log_threshold: float = CUTOFF_LOG) -> float:
        """Smallest grid radius beyond which t*phi stays above the threshold."""
        idx = np.nonzero(t * self._phi_floor > log_threshold)[0]
        if len(idx) == 0:
            raise FrequencyRangeError("increase frequency range")
        return float(self.r[idx[0]])


def build_symbol_table(
    nu: LevyMeasure,
    r_min: float = DEFAULT_R_MIN,
    r_max: float = DEFAULT_R_MAX,
    points: int = DEFAULT_POINTS,
    t_p: float | None = None,
    probe_angles: int = 96,
) -> SymbolTable:
    """Tabulate the exponent on a log frequency grid and derive the
    majorant, the comparison integral H, and the low-frequency fit."""
    r = np.geomspace(r_min, r_max, points)

    base = RadialTable.build(r, _radial_cos_values(nu, r))

    atoms = nu.atoms
    phi_radial = None
    if nu.d == 1:
        phi_radial = RadialTable.build(r, nu.angular.total * base.vals)
        phi_probe = phi_radial.vals[None, :]
        probe_dirs = None
    elif atoms is None:  # d=2 uniform
        phi_radial = RadialTable.build(
            r, nu.angular.total * _angular_average(base, r)
        )
        phi_probe = phi_radial.vals[None, :]
        probe_dirs = None
    else:
        angles = np.linspace(0.0, math.pi, probe_angles, endpoint=False)
        extra = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        probe_dirs = np.vstack([atoms.directions, extra])
        dots = np.abs(probe_dirs @ atoms.directions.T)  # (n_probe, k)
        phi_probe = np.empty((len(probe_dirs), len(r)))
        for i in range(len(probe_dirs)):
            contrib = np.zeros(len(r))
            for k, w in enumerate(atoms.weights):
                contrib += w * base.eval(r * dots[i, k])
            phi_probe[i] = contrib

    unit_vals = phi_probe[:, np.searchsorted(r, 1.0)]
    if np.any(unit_vals <= 0):
        raise DegenerateMeasureError("exponent vanishes at |xi| = 1")

    psi_grid = np.maximum.accumulate(np.max(phi_probe, axis=0))

    # H on the same grid via segment sums over s = 1/r
    s_nodes = 1.0 / r[::-1]
    seg_q, seg_q2, head_q2, tail_q = _segment_integrals(nu, s_nodes)
    a_cum = head_q2 + np.concatenate([[0.0], np.cumsum(seg_q2)])  # at s_nodes
    b_cum = tail_q + np.concatenate([[0.0], np.cumsum(seg_q[::-1])])[::-1]
    h_big = nu.angular.total * (r**2 * a_cum[::-1] + b_cum[::-1])

    l0_fit = float(np.min(psi_grid / h_big))

    if t_p is None:
        t_p = 1.0 if isinstance(nu.radial, HighIntensity) else math.inf

    phi_min = np.min(phi_probe, axis=0)
    phi_floor = np.minimum.accumulate(phi_min[::-1])[::-1]

    return SymbolTable(
        measure=nu,
        r=r,
        phi_probe=phi_probe,
        probe_dirs=probe_dirs,
        psi_grid=psi_grid,
        h_big=h_big,
        l0_fit=l0_fit,
        t_p=t_p,
        radial=base,
        _phi_radial=phi_radial,
        _psi_interp=PchipInterpolator(np.log(r), np.log(psi_grid)),
        _phi_floor=phi_floor,
    )


# ---------------------------------------------------------------------------
# direct operations
# ---------------------------------------------------------------------------


def phi(nu: LevyMeasure, xi) -> float:
    """Exponent at a single frequency by direct quadrature."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi_arr.shape != (nu.d,):
        raise ValueError("xi must have length d")
    q = nu.radial.density
    s_max = nu.support_radius
    atoms = nu.atoms
    if atoms is not None:
        total = 0.0
        for theta, w in zip(atoms.directions, atoms.weights):
            total += w * cos_transform(q, abs(float(theta @ xi_arr)), s_max, nu.rel_tol)
        return total
    # d=2 uniform: angular average of the cosine transform
    u = float(np.linalg.norm(xi_arr))
    a = 0.25 * math.pi * (_GL_NODES + 1.0)
    w = 0.25 * math.pi * _GL_WEIGHTS
    vals = np.array(
        [cos_transform(q, u * math.cos(ang), s_max, nu.rel_tol) for ang in a]
    )
    return nu.angular.total * (2.0 / math.pi) * float(np.dot(w, vals))


def psi(table: SymbolTable, r: float) -> float:
    """Running supremum of the exponent over the ball of radius r."""
    if r <= 0:
        raise ValueError("r must be positive")
    return float(table.psi_at(r))


@dataclass(frozen=True)
class ScaleFunction:
    """Generalized inverse of the majorant and the space scale h."""

    table: SymbolTable

    def psi_inverse(self, s) -> float | np.ndarray:
        out = self._inverse_many(np.atleast_1d(np.asarray(s, dtype=float)))
        return float(out[0]) if np.isscalar(s) or np.ndim(s) == 0 else out

    def _inverse_many(self, s: np.ndarray) -> np.ndarray:
        tab = self.table
        grid = tab.psi_grid
        if np.any(s < grid[0] * (1 - 1e-9)) or np.any(s > grid[-1] * (1 + 1e-9)):
            raise FrequencyRangeError("extend frequency grid")
        s = np.clip(s, grid[0], grid[-1])
        # rightmost bracket: plateaus resolve to their right endpoint
        j = np.clip(np.searchsorted(grid, s, side="right") - 1, 0, len(grid) - 2)
        exact = grid[j] == s
        lo = np.log(tab.r[j])
        hi = np.log(tab.r[j + 1])
        interp = tab._psi_interp
        ls = np.log(s)
        for _ in range(52):  # bisection on the monotone interpolant
            mid = 0.5 * (lo + hi)
            below = interp(mid) <= ls
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = np.exp(0.5 * (lo + hi))
        return np.where(exact, tab.r[j], out)

    def h(self, t) -> float | np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr <= 0):
            raise ValueError("t must be positive")
        out = 1.0 / self._inverse_many(1.0 / t_arr)
        return float(out[0]) if np.ndim(t) == 0 else out


def psi_inverse(scale: ScaleFunction, s: float) -> float:
    return scale.psi_inverse(s)


def h(scale: ScaleFunction, t: float) -> float:
    return scale.h(t)


# ---------------------------------------------------------------------------
# condition (A1): frequency-integrability diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class A1Report:
    m0_est: float
    passed: bool
    t: np.ndarray
    scaled: np.ndarray  # integral * h(t)^(d+1) per grid time
    note: str = ""


def _a1_radial_integral(table: SymbolTable, phi_vals_fn, t: float, d: int) -> float:
    r_lo = table.r[0]
    r_hi = table.cutoff_radius(t)
    grid = np.geomspace(r_lo, max(r_hi, r_lo * 10), 4000)
    integrand = np.exp(-t * phi_vals_fn(grid)) * grid**d
    val = float(np.trapezoid(integrand, grid))
    # below the grid the integrand is at most r^d
    val += r_lo ** (d + 1) / (d + 1)
    return val


def check_A1(scale: ScaleFunction, t_grid) -> A1Report:
    """Estimate M0 = sup_t h(t)^(d+1) * integral of e^{-t phi(xi)} |xi| dxi.

    Passes when the scaled integral is finite and varies by less than a
    factor of 10 across the probed times.
    """
    table = scale.table
    d = table.measure.d
    t_arr = np.sort(np.asarray(t_grid, dtype=float))
    if np.any(t_arr <= 0) or np.any(t_arr >= table.t_p):
        raise ValueError("t grid must lie inside (0, t_p)")

    vals = np.empty_like(t_arr)
    for i, t in enumerate(t_arr):
        try:
            if table.is_radial:
                radial = _a1_radial_integral(table, table.phi_ray, t, d)
                angular = 2.0 if d == 1 else 2.0 * math.pi
                vals[i] = angular * radial
            else:
                # anisotropic case: average radial integrals over probe rays
                acc = 0.0
                for e in table.probe_dirs:
                    acc += _a1_radial_integral(
                        table, lambda g, e=e: table.phi_at(np.outer(g, e)), t, d
                    )
                vals[i] = 2.0 * math.pi * acc / len(table.probe_dirs)
        except FrequencyRangeError:
            return A1Report(
                m0_est=math.inf,
                passed=False,
                t=t_arr,
                scaled=np.full_like(t_arr, math.nan),
                note="integral did not converge within the frequency grid",
            )

    h_vals = scale.h(t_arr)
    scaled = vals * h_vals ** (d + 1)
    m0_est = float(np.max(scaled))
    finite = bool(np.all(np.isfinite(scaled)))
    stable = finite and float(np.max(scaled) / np.min(scaled)) < 10.0
    return A1Report(m0_est=m0_est, passed=finite and stable, t=t_arr, scaled=scaled)
