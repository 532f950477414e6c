"""Slice-parameterized subsets of H: membership, rasterization, verdicts.

A DomainSpec is a membership oracle over slice coordinates plus raster
metadata.  Membership callables take (x, y, jx, jy, jz) where every argument
broadcasts as a numpy array, so grid and probe evaluations stay vectorized
even when the probed imaginary unit varies per point.

Verdicts about connectivity are resolution-qualified: they are decided on
occupancy grids of cell-center samples, with cut curves rasterized as
8-connected dilated barriers so a one-cell-wide cut cannot leak diagonally.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import PreconditionError
from .holomorphic import resample_polyline
from .quaternions import Quaternion, SliceCoord, UnitImaginary

_LABEL_STRUCTURE = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


# ---------------------------------------------------------------------------
# sphere sampling
# ---------------------------------------------------------------------------

def fibonacci_points(n: int) -> np.ndarray:
    """Fibonacci lattice of n points on the unit 2-sphere."""
    i = np.arange(n, dtype=float)
    z = (2.0 * (i + 0.5) / n) - 1.0
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), z, r * np.sin(phi)])


class SphereSample:
    """Fibonacci lattice of imaginary units with exact antipodes appended.

    units[m + base_count] is exactly -units[m], so antipodal pairs are always
    available.  Distinguished directions (such as the reference unit of the
    counterexample construction, whose (I, -I) pair must be present) can be
    seeded through ``extra``; they are appended to the base lattice together
    with their antipodes.
    """

    MIN_ANGLE_COEFF = 0.02  # pairwise min angle >= coeff / sqrt(N)

    def __init__(self, n: int = 64, include_antipodes: bool = True, extra=()):
        if n < 2:
            raise ValueError("need at least two sphere samples")
        base = fibonacci_points(n)
        for u in extra:
            base = np.vstack([base, [u.vx, u.vy, u.vz]])
        vecs = np.vstack([base, -base]) if include_antipodes else base
        self.n_requested = n
        self.base_count = base.shape[0]
        self.include_antipodes = include_antipodes
        self.vectors = vecs
        self.units = [UnitImaginary(*v) for v in vecs]
        dots = np.clip(vecs @ vecs.T, -1.0, 1.0)
        np.fill_diagonal(dots, -1.0)
        self.min_angle = float(np.min(np.arccos(np.max(dots, axis=1))))
        floor = self.MIN_ANGLE_COEFF / math.sqrt(len(self.units))
        if self.min_angle < floor:
            raise PreconditionError(
                f"sphere sample degenerate: min angle {self.min_angle:.3e} < {floor:.3e}")

    def __len__(self):
        return len(self.units)

    def antipodal_pairs(self):
        """Index pairs (m, m') with units[m'] == -units[m], each sphere once."""
        if self.include_antipodes:
            return [(m, m + self.base_count) for m in range(self.base_count)]
        out = []
        for m, u in enumerate(self.units):
            for k in range(m + 1, len(self.units)):
                if self.units[k].approx(-u, 1e-12):
                    out.append((m, k))
        return out


# ---------------------------------------------------------------------------
# domain specification and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """Membership oracle for an open subset of H, with raster metadata.

    membership(x, y, jx, jy, jz) -> bool array, defined for y >= 0;
    membership at y == 0 must be unit-independent and agree with real_trace.
    cuts(J) optionally returns polylines (in the slice plane coordinates of
    J, possibly spanning both half planes) that rasterize as barriers.
    bbox is (x_min, x_max, y_max); grids cover [x_min, x_max] x [0, y_max].
    """

    membership: callable
    real_trace: callable
    bbox: tuple
    h: float = 0.01
    cuts: callable = None
    cut_clearance: float = 0.0
    name: str = ""

    def contains(self, x: float, y: float, J: UnitImaginary | None) -> bool:
        """Scalar membership, excluding points within cut_clearance of a cut."""
        if y < 0.0:
            if J is None:
                raise ValueError("negative height requires a unit")
            return self.contains(x, -y, -J)
        jx, jy, jz = (J.vx, J.vy, J.vz) if J is not None else (1.0, 0.0, 0.0)
        if y == 0.0:
            ok = bool(np.asarray(self.real_trace(np.asarray(x))).reshape(-1)[0])
        else:
            ok = bool(np.asarray(self.membership(x, y, jx, jy, jz)).reshape(-1)[0])
        if not ok or self.cuts is None or J is None:
            return ok
        tol = max(self.cut_clearance, 0.0)
        for poly in self.cuts(J):
            p = np.asarray(poly, dtype=float)
            if _distance_to_polyline(x, y, p) <= tol:
                return False
        return True

    def contains_point(self, coord: SliceCoord) -> bool:
        return self.contains(coord.x, coord.y, coord.unit)


def _distance_to_polyline(x: float, y: float, pts: np.ndarray) -> float:
    a = pts[:-1]
    d = pts[1:] - a
    L2 = np.einsum("ij,ij->i", d, d)
    L2[L2 == 0.0] = 1.0
    t = np.clip(((x - a[:, 0]) * d[:, 0] + (y - a[:, 1]) * d[:, 1]) / L2, 0.0, 1.0)
    cx = a[:, 0] + t * d[:, 0]
    cy = a[:, 1] + t * d[:, 1]
    return float(np.sqrt(np.min((cx - x) ** 2 + (cy - y) ** 2)))


def intersect_specs(a: DomainSpec, b: DomainSpec) -> DomainSpec:
    """Pointwise intersection; cut curves of both operands are kept."""

    def membership(x, y, jx, jy, jz):
        return np.asarray(a.membership(x, y, jx, jy, jz)) & \
            np.asarray(b.membership(x, y, jx, jy, jz))

    def real_trace(x):
        return np.asarray(a.real_trace(x)) & np.asarray(b.real_trace(x))

    def cuts(J):
        out = []
        for spec in (a, b):
            if spec.cuts is not None:
                out.extend(spec.cuts(J))
        return out

    bbox = (max(a.bbox[0], b.bbox[0]), min(a.bbox[1], b.bbox[1]),
            min(a.bbox[2], b.bbox[2]))
    has_cuts = a.cuts is not None or b.cuts is not None
    return DomainSpec(membership, real_trace, bbox, min(a.h, b.h),
                      cuts if has_cuts else None,
                      max(a.cut_clearance, b.cut_clearance),
                      name=f"({a.name} & {b.name})")


@dataclass
class PlanarRegionGrid:
    """Occupancy bitmap over cell centers of one slice; 4-connectivity."""

    xs: np.ndarray
    ys: np.ndarray
    occupied: np.ndarray
    labels: np.ndarray | None = None
    n_components: int | None = None

    @property
    def h(self) -> float:
        return float(self.xs[1] - self.xs[0]) if self.xs.size > 1 else 0.0

    def label(self):
        if self.labels is None:
            self.labels, self.n_components = ndimage.label(
                self.occupied, structure=_LABEL_STRUCTURE)
        return self.n_components, self.labels

    def component_at(self, x: float, y: float) -> int:
        self.label()
        ix = int(np.argmin(np.abs(self.xs - x)))
        iy = int(np.argmin(np.abs(self.ys - y)))
        return int(self.labels[iy, ix])

    def occupancy_digest(self) -> str:
        return hashlib.sha1(np.packbits(self.occupied).tobytes()).hexdigest()


def _block_cut_cells(occupied, xs, ys, polylines, h):
    """Mark cells crossed by cut curves, dilated to their 8-neighborhood."""
    ny, nx = occupied.shape
    for poly in polylines:
        pts = resample_polyline(poly, h / 2.0)
        ix = np.searchsorted(xs, pts[:, 0])
        iy = np.searchsorted(ys, pts[:, 1])
        ix = np.clip(ix, 1, nx - 1)
        iy = np.clip(iy, 1, ny - 1)
        ix = np.where(np.abs(xs[ix] - pts[:, 0]) <= np.abs(xs[ix - 1] - pts[:, 0]), ix, ix - 1)
        iy = np.where(np.abs(ys[iy] - pts[:, 1]) <= np.abs(ys[iy - 1] - pts[:, 1]), iy, iy - 1)
        near = (np.abs(xs[ix] - pts[:, 0]) <= 0.75 * h) & (np.abs(ys[iy] - pts[:, 1]) <= 0.75 * h)
        ix, iy = ix[near], iy[near]
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                yy = np.clip(iy + dy, 0, ny - 1)
                xx = np.clip(ix + dx, 0, nx - 1)
                occupied[yy, xx] = False


def rasterize(spec: DomainSpec, J: UnitImaginary, *, full_slice: bool = False,
              h: float | None = None) -> PlanarRegionGrid:
    """Occupancy grid of the slice through J (upper half, or the full slice
    including the real trace row and the reflected antipodal half)."""
    h = float(h if h is not None else spec.h)
    if h <= 0.0:
        raise PreconditionError("grid step must be positive")
    x_min, x_max, y_max = spec.bbox
    xs = np.arange(x_min + h / 2.0, x_max, h)
    ys_up = np.arange(h / 2.0, y_max, h)
    if not full_slice:
        ys = ys_up
        X, Y = np.meshgrid(xs, ys)
        occ = np.asarray(spec.membership(X, Y, J.vx, J.vy, J.vz), dtype=bool)
    else:
        ys = np.concatenate([-ys_up[::-1], [0.0], ys_up])
        X, Yu = np.meshgrid(xs, ys_up)
        upper = np.asarray(spec.membership(X, Yu, J.vx, J.vy, J.vz), dtype=bool)
        Jn = -J
        lower = np.asarray(spec.membership(X, Yu, Jn.vx, Jn.vy, Jn.vz), dtype=bool)
        axis = np.asarray(spec.real_trace(xs), dtype=bool)
        occ = np.vstack([lower[::-1, :], axis[None, :], upper])
    if spec.cuts is not None:
        polylines = list(spec.cuts(J))
        if full_slice:
            polylines.extend(np.column_stack([p[:, 0], -p[:, 1]])
                             for p in spec.cuts(-J))
        _block_cut_cells(occ, xs, ys, polylines, h)
    return PlanarRegionGrid(xs=xs, ys=ys, occupied=occ)


def connected_components(grid: PlanarRegionGrid):
    """Flood-fill labeling; returns (count, labels)."""
    n, labels = grid.label()
    return n, labels


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    value: str  # "yes" | "no" | "indeterminate"
    witness: dict | None = None
    resolution: dict = field(default_factory=dict)

    def summary(self) -> str:
        if self.value != "yes" or not self.resolution:
            return self.value
        parts = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in self.resolution.items())
        return f"yes@{parts}"

    @property
    def is_yes(self) -> bool:
        return self.value == "yes"


def is_slice_domain(spec: DomainSpec, sample: SphereSample,
                    h: float | None = None) -> Verdict:
    """Checks the real trace is nonempty and every sampled slice is a
    connected planar grid; connected slices that never reach the trace row
    leave 4-dimensional connectivity undecided."""
    h = float(h if h is not None else spec.h)
    x_min, x_max, _ = spec.bbox
    xs = np.arange(x_min + h / 2.0, x_max, h)
    trace = np.asarray(spec.real_trace(xs), dtype=bool)
    res = {"N": sample.n_requested, "h": h}
    if not trace.any():
        return Verdict("no", {"reason": "empty real trace"}, res)
    indeterminate = False
    for m, J in enumerate(sample.units):
        grid = rasterize(spec, J, full_slice=True, h=h)
        if not grid.occupied.any():
            return Verdict("no", {"reason": "empty slice", "unit": J.to_list()}, res)
        n, labels = grid.label()
        if n > 1:
            return Verdict("no", {"reason": "disconnected slice",
                                  "unit": J.to_list(), "components": int(n)}, res)
        axis_row = np.where(grid.ys == 0.0)[0]
        if axis_row.size and not grid.occupied[axis_row[0]].any():
            indeterminate = True
    if indeterminate:
        return Verdict("indeterminate",
                       {"reason": "connected slices do not reach the real axis"}, res)
    return Verdict("yes", None, res)


def is_symmetric(spec: DomainSpec, sample: SphereSample,
                 xy: np.ndarray | None = None) -> Verdict:
    """Membership must not depend on the unit; checked on a coarse grid and,
    when the spec carries cut curves, on points of the cuts themselves."""
    x_min, x_max, y_max = spec.bbox
    if xy is None:
        gx = np.linspace(x_min + 1e-3, x_max - 1e-3, 24)
        gy = np.linspace(1e-3, y_max - 1e-3, 12)
        X, Y = np.meshgrid(gx, gy)
        xy = np.column_stack([X.ravel(), Y.ravel()])
    res = {"N": sample.n_requested}
    xs, ys = xy[:, 0], xy[:, 1]
    ref = None
    ref_unit = None
    for J in sample.units:
        mem = np.asarray(spec.membership(xs, ys, J.vx, J.vy, J.vz), dtype=bool)
        if ref is None:
            ref, ref_unit = mem, J
            continue
        diff = np.nonzero(mem != ref)[0]
        if diff.size:
            k = int(diff[0])
            return Verdict("no", {"x": float(xs[k]), "y": float(ys[k]),
                                  "units": [ref_unit.to_list(), J.to_list()]}, res)
    if spec.cuts is not None:
        probe_units = sample.units[:: max(1, len(sample.units) // 16)]
        for J in probe_units:
            for poly in spec.cuts(J):
                pts = np.asarray(poly, float)
                sub = pts[:: max(1, len(pts) // 16)]
                for px, py in sub:
                    if py <= 0:
                        continue
                    on_J = spec.contains(px, py, J)
                    for K in probe_units:
                        if K.approx(J):
                            continue
                        if spec.contains(px, py, K) != on_J:
                            return Verdict("no", {"x": float(px), "y": float(py),
                                                  "units": [J.to_list(), K.to_list()]}, res)
    return Verdict("yes", None, res)


def symmetric_completion(spec: DomainSpec, sample: SphereSample) -> DomainSpec:
    """Sampled symmetric completion: a point joins when any sampled unit's
    slice contains it.  Monotone in the sample size; exact where slices vary
    monotonically with the distance to a reference unit."""
    units = sample.units

    def membership(x, y, jx, jy, jz):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for K in units:
            out |= np.asarray(spec.membership(x, y, K.vx, K.vy, K.vz), dtype=bool)
            if out.all():
                break
        return out

    return DomainSpec(membership, spec.real_trace, spec.bbox, spec.h,
                      cuts=None, name=f"completion({spec.name})")


def completion_of_slice(spec: DomainSpec, K0: UnitImaginary) -> DomainSpec:
    """Exact symmetric completion of the single full slice through K0."""
    Kn = -K0

    def membership(x, y, jx, jy, jz):
        up = np.asarray(spec.membership(x, y, K0.vx, K0.vy, K0.vz), dtype=bool)
        dn = np.asarray(spec.membership(x, y, Kn.vx, Kn.vy, Kn.vz), dtype=bool)
        return up | dn

    return DomainSpec(membership, spec.real_trace, spec.bbox, spec.h,
                      cuts=None, name=f"slice-completion({spec.name})")


def omega_jk_plus(spec: DomainSpec, J: UnitImaginary, K: UnitImaginary,
                  h: float | None = None) -> PlanarRegionGrid:
    """Grid of the upper half-plane set where both the J- and K-slices of the
    domain contain the point; cut curves of both slices block cells."""
    h = float(h if h is not None else spec.h)
    x_min, x_max, y_max = spec.bbox
    xs = np.arange(x_min + h / 2.0, x_max, h)
    ys = np.arange(h / 2.0, y_max, h)
    X, Y = np.meshgrid(xs, ys)
    occ = np.asarray(spec.membership(X, Y, J.vx, J.vy, J.vz), dtype=bool)
    if not K.approx(J):
        occ &= np.asarray(spec.membership(X, Y, K.vx, K.vy, K.vz), dtype=bool)
    if spec.cuts is not None:
        polylines = list(spec.cuts(J))
        if not K.approx(J):
            polylines.extend(spec.cuts(K))
        _block_cut_cells(occ, xs, ys, polylines, h)
    return PlanarRegionGrid(xs=xs, ys=ys, occupied=occ)


def is_simple(spec: DomainSpec, sample: SphereSample,
              h: float | None = None) -> Verdict:
    """Connectivity of every sampled pair set; antipodal pairs are scanned
    first so witnesses of the counterexample kind surface as (J, -J).
    A yes is only "simple at resolution (N, h)"."""
    h = float(h if h is not None else spec.h)
    res = {"N": sample.n_requested, "h": h}
    units = sample.units
    digest_cache: dict[str, int] = {}
    grid_cache: dict[int, PlanarRegionGrid] = {}

    def components_for(mi, mk, cache: bool) -> int:
        J, K = units[mi], units[mk]
        if cache:
            ga = grid_cache.get(mi) or rasterize(spec, J, h=h)
            grid_cache[mi] = ga
            gb = grid_cache.get(mk) or rasterize(spec, K, h=h)
            grid_cache[mk] = gb
            occ = ga.occupied & gb.occupied
            grid = PlanarRegionGrid(xs=ga.xs, ys=ga.ys, occupied=occ)
            if spec.cuts is not None:
                occ = occ.copy()
                grid = PlanarRegionGrid(xs=ga.xs, ys=ga.ys, occupied=occ)
                _block_cut_cells(occ, ga.xs, ga.ys,
                                 list(spec.cuts(J)) + list(spec.cuts(K)), h)
        else:
            grid = omega_jk_plus(spec, J, K, h=h)
        if not grid.occupied.any():
            return 0
        digest = grid.occupancy_digest()
        if digest in digest_cache:
            return digest_cache[digest]
        n, _ = grid.label()
        digest_cache[digest] = int(n)
        return int(n)

    def scan(pairs, cache):
        for mi, mk in pairs:
            n = components_for(mi, mk, cache)
            if n > 1:
                return Verdict("no", {
                    "pair": [units[mi].to_list(), units[mk].to_list()],
                    "antipodal": bool(units[mk].approx(-units[mi], 1e-6)),
                    "components": n,
                }, res)
        return None

    hit = scan(sample.antipodal_pairs(), cache=False)
    if hit:
        return hit
    hit = scan([(m, m) for m in range(len(units))], cache=False)
    if hit:
        return hit
    anti = set()
    for a, b in sample.antipodal_pairs():
        anti.add((a, b))
    rest = [(a, b) for a in range(len(units)) for b in range(a + 1, len(units))
            if (a, b) not in anti]
    hit = scan(rest, cache=True)
    if hit:
        return hit
    return Verdict("yes", None, res)


def is_slice_convex(spec: DomainSpec, sample: SphereSample,
                    h: float | None = None, seed: int = 0,
                    pairs_cap: int = 100_000) -> Verdict:
    """Segment test on the rasterized full slices.

    Pairs are drawn among interior cells (occupied cells whose neighborhood
    is occupied) so boundary rasterization jitter cannot produce false
    witnesses; genuine non-convexity at feature scale >= 4h is detected.
    """
    h = float(h if h is not None else spec.h)
    rng = np.random.default_rng(seed)
    res = {"N": sample.n_requested, "h": h}
    for J in sample.units:
        grid = rasterize(spec, J, full_slice=True, h=h)
        occ = grid.occupied
        core = occ & ndimage.binary_erosion(occ, structure=np.ones((3, 3), bool))
        iy, ix = np.nonzero(core)
        if iy.size < 2:
            continue
        m = int(min(10 * iy.size, pairs_cap))
        a = rng.integers(0, iy.size, size=m)
        b = rng.integers(0, iy.size, size=m)
        ax, ay = grid.xs[ix[a]], grid.ys[iy[a]]
        bx, by = grid.xs[ix[b]], grid.ys[iy[b]]
        for lo in range(0, m, 2000):
            sl = slice(lo, min(lo + 2000, m))
            cax, cay, cbx, cby = ax[sl], ay[sl], bx[sl], by[sl]
            steps = int(np.ceil(np.max(np.hypot(cbx - cax, cby - cay)) / (h / 2.0))) + 1
            t = np.linspace(0.0, 1.0, max(steps, 2))
            px = cax[:, None] + t[None, :] * (cbx - cax)[:, None]
            py = cay[:, None] + t[None, :] * (cby - cay)[:, None]
            jx = np.clip(np.round((px - grid.xs[0]) / h).astype(int), 0, grid.xs.size - 1)
            jy = np.clip(np.round((py - grid.ys[0]) / h).astype(int), 0, grid.ys.size - 1)
            ok = occ[jy, jx].all(axis=1)
            bad = np.nonzero(~ok)[0]
            if bad.size:
                k = int(bad[0])
                return Verdict("no", {"unit": J.to_list(),
                                      "segment": [[float(cax[k]), float(cay[k])],
                                                  [float(cbx[k]), float(cby[k])]]}, res)
    return Verdict("yes", None, res)


# ---------------------------------------------------------------------------
# spec constructors
# ---------------------------------------------------------------------------

def ball_spec(center: Quaternion | float, radius: float,
              bbox: tuple | None = None, h: float = 0.01) -> DomainSpec:
    """Euclidean ball B(center, radius)."""
    if isinstance(center, (int, float)):
        center = Quaternion(float(center))
    cw = center.w
    cim = np.array([center.x, center.y, center.z])
    cn2 = float(cim @ cim)
    r2 = radius * radius

    def membership(x, y, jx, jy, jz):
        dot = jx * cim[0] + jy * cim[1] + jz * cim[2]
        return (np.asarray(x) - cw) ** 2 + np.asarray(y) ** 2 + cn2 \
            - 2.0 * np.asarray(y) * dot < r2

    def real_trace(x):
        return (np.asarray(x) - cw) ** 2 + cn2 < r2

    if bbox is None:
        margin = max(0.15, 5 * h)
        reach = radius + math.sqrt(cn2)
        bbox = (cw - reach - margin, cw + reach + margin, reach + margin)
    return DomainSpec(membership, real_trace, bbox, h, name="ball")


def halfspace_spec(normal: tuple, offset: float,
                   bbox: tuple = (-3.0, 3.0, 3.0), h: float = 0.01) -> DomainSpec:
    """Slicewise half plane {a x + b y < c} (unit-independent)."""
    a, b = float(normal[0]), float(normal[1])

    def membership(x, y, jx, jy, jz):
        return a * np.asarray(x) + b * np.asarray(y) < offset

    def real_trace(x):
        return a * np.asarray(x) < offset

    return DomainSpec(membership, real_trace, bbox, h, name="halfspace")


def starlike_spec(pull: float = 0.5, h: float = 0.01) -> DomainSpec:
    """Starlike-about-0 slicewise domain {hypot(x, y) < 1 + pull * x}.

    Every slice is starlike with respect to the real point 0, so the domain
    is simple; used as the well-behaved partner of the counterexample.
    """
    if not 0.0 <= pull < 1.0:
        raise ValueError("pull must lie in [0, 1)")

    def membership(x, y, jx, jy, jz):
        return np.hypot(np.asarray(x), np.asarray(y)) < 1.0 + pull * np.asarray(x)

    def real_trace(x):
        return np.abs(np.asarray(x)) < 1.0 + pull * np.asarray(x)

    reach = 1.0 / (1.0 - pull)
    bbox = (-1.0 / (1.0 + pull) - 0.2, reach + 0.2, reach + 0.2)
    return DomainSpec(membership, real_trace, bbox, h, name="starlike")


def union_spec(specs, name="union") -> DomainSpec:
    """Pointwise union of cut-free specs."""
    from .errors import UnsupportedError
    if any(s.cuts is not None for s in specs):
        raise UnsupportedError("union of cut-bearing domains is not supported")

    def membership(x, y, jx, jy, jz):
        out = None
        for s in specs:
            m = np.asarray(s.membership(x, y, jx, jy, jz), dtype=bool)
            out = m if out is None else (out | m)
        return out

    def real_trace(x):
        out = None
        for s in specs:
            m = np.asarray(s.real_trace(x), dtype=bool)
            out = m if out is None else (out | m)
        return out

    bbox = (min(s.bbox[0] for s in specs), max(s.bbox[1] for s in specs),
            max(s.bbox[2] for s in specs))
    return DomainSpec(membership, real_trace, bbox,
                      min(s.h for s in specs), name=name)
