"""Assembly and export of the three-sheet lens cluster geometry.

The computed profile curve, revolved about the vertical axis, gives the
upper cap; its reflection through the horizontal plane gives the lower cap;
a flat annulus from the junction circle outward stands in for the unbounded
planar sheet.  All three sheets share the junction circle vertices exactly,
the lower cap vertex set is the exact z-negation of the upper one, and each
sheet is wound with consistent outward orientation.

The map (u, v) -> (u cos(phi), u sin(phi), v) sends the profile plane into
3-d with the rotation axis along z.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .arclength import LensProfile, curvature_arrays, shrinker_residual
from .errors import DegenerateProfile

SHEET_UPPER = 0
SHEET_LOWER = 1
SHEET_ANNULUS = 2
SHEET_NAMES = ("upper_cap", "lower_cap", "planar_annulus")

DEFAULT_N_THETA = 64
DEFAULT_N_S = 256
DEFAULT_N_R = 24
DEFAULT_OUTER_FACTOR = 3.0


@dataclass
class ClusterMesh:
    """Triangle mesh of the lens cluster with per-triangle sheet labels."""

    vertices: np.ndarray      # (n, 3)
    triangles: np.ndarray     # (m, 3) indices
    sheet_id: np.ndarray      # (m,) in {0: upper, 1: lower, 2: annulus}
    junction: np.ndarray      # vertex indices of the shared junction circle
    junction_radius: float
    metadata: dict

    def sheet_triangles(self, sheet: int) -> np.ndarray:
        return self.triangles[self.sheet_id == sheet]


def resample_profile(profile: LensProfile, n_s: int) -> tuple[np.ndarray, np.ndarray]:
    """Arclength-uniform (u, v) samples from the axis to the crossing."""
    if profile.s_bar <= 0.0 or len(profile.s) < 8:
        raise DegenerateProfile("profile too short to resample")
    su = CubicSpline(profile.s, profile.u)
    sv = CubicSpline(profile.s, profile.v)
    s = np.linspace(0.0, profile.s_bar, n_s)
    u = su(s)
    v = sv(s)
    u[0] = profile.u[0]
    v[0] = profile.v[0]
    u[-1] = profile.u[-1]
    v[-1] = 0.0  # junction circle lies exactly in the plane
    if np.any(u[1:] <= 0.0) or np.any(v[:-1] <= 0.0):
        raise DegenerateProfile("resampled profile leaves the open quadrant")
    return u, v


def build_cluster(profile: LensProfile, n_theta: int = DEFAULT_N_THETA,
                  annulus_outer: float | None = None,
                  n_s: int = DEFAULT_N_S, n_r: int = DEFAULT_N_R) -> ClusterMesh:
    """Revolve the profile into the watertight three-sheet cluster mesh.

    The profile's axis point maps to a single pole vertex (no seam), the
    junction circle vertices are created once and shared by all three
    sheets, and the unbounded planar sheet is truncated at annulus_outer
    (default 3x the junction radius, recorded in the metadata).
    """
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    if profile.u[0] != 0.0:
        raise DegenerateProfile("profile must start on the rotation axis")
    xi = profile.xi
    outer = DEFAULT_OUTER_FACTOR * xi if annulus_outer is None else annulus_outer
    if outer <= xi:
        raise ValueError("annulus_outer must exceed the junction radius")

    u, v = resample_profile(profile, n_s)
    phi = 2.0 * math.pi * np.arange(n_theta) / n_theta
    cos_p, sin_p = np.cos(phi), np.sin(phi)

    verts = [np.array([[0.0, 0.0, v[0]]])]
    # rings 1 .. n_s-1 of the upper cap; the last is the junction circle
    for i in range(1, n_s):
        verts.append(np.column_stack([u[i] * cos_p, u[i] * sin_p,
                                      np.full(n_theta, v[i])]))
    upper_count = 1 + (n_s - 1) * n_theta
    upper = np.concatenate(verts)
    junction_start = upper_count - n_theta

    # lower cap: exact reflection of the upper cap, junction ring excluded
    lower = upper[:junction_start] * np.array([1.0, 1.0, -1.0])
    lower_offset = upper_count

    # annulus rings strictly outside the junction circle, z = 0
    radii = np.linspace(xi, outer, n_r + 1)[1:]
    annulus = np.concatenate([
        np.column_stack([rad * cos_p, rad * sin_p, np.zeros(n_theta)])
        for rad in radii])
    annulus_offset = lower_offset + len(lower)
    vertices = np.concatenate([upper, lower, annulus])

    def ring(index: int, base: int, offset: int) -> np.ndarray:
        # vertex ids of ring `index` (1-based rings after the pole)
        return offset + base + (index - 1) * n_theta + np.arange(n_theta)

    tris = []
    sheets = []

    def add(tri, sheet):
        tris.append(tri)
        sheets.append(sheet)

    nxt = (np.arange(n_theta) + 1) % n_theta

    # upper cap: pole fan, oriented with outward normal pointing away from z=0
    r1 = ring(1, 1, 0)
    for j in range(n_theta):
        add((0, r1[j], r1[nxt[j]]), SHEET_UPPER)
    for i in range(1, n_s - 1):
        ra = ring(i, 1, 0)
        rb = ring(i + 1, 1, 0)
        for j in range(n_theta):
            add((ra[j], rb[j], rb[nxt[j]]), SHEET_UPPER)
            add((ra[j], rb[nxt[j]], ra[nxt[j]]), SHEET_UPPER)

    def lower_id(vid: int) -> int:
        # junction ring is shared; every other vertex has a mirrored copy
        return vid if vid >= junction_start else lower_offset + vid

    # lower cap: mirrored triangles, winding flipped to keep outward normals
    for tri, sheet in zip(list(tris), list(sheets)):
        if sheet == SHEET_UPPER:
            i0, i1, i2 = tri
            add((lower_id(i0), lower_id(i2), lower_id(i1)), SHEET_LOWER)

    # planar annulus, outward normal +z
    prev = np.arange(junction_start, junction_start + n_theta)
    for i in range(n_r):
        cur = annulus_offset + i * n_theta + np.arange(n_theta)
        for j in range(n_theta):
            add((prev[j], cur[j], cur[nxt[j]]), SHEET_ANNULUS)
            add((prev[j], cur[nxt[j]], prev[nxt[j]]), SHEET_ANNULUS)
        prev = cur

    mesh = ClusterMesh(
        vertices=vertices,
        triangles=np.asarray(tris, dtype=np.int64),
        sheet_id=np.asarray(sheets, dtype=np.int64),
        junction=np.arange(junction_start, junction_start + n_theta),
        junction_radius=xi,
        metadata={"a": profile.a, "xi": xi, "s_bar": profile.s_bar,
                  "n_theta": n_theta, "n_s": n_s, "n_r": n_r,
                  "annulus_outer": float(outer)},
    )
    _validate(mesh)
    return mesh


def _validate(mesh: ClusterMesh) -> None:
    checks = mesh_checks(mesh)
    failed = [name for name, ok, _ in checks if not ok]
    if failed:
        raise DegenerateProfile(f"mesh validity checks failed: {failed}")


def mesh_checks(mesh: ClusterMesh) -> list[tuple[str, bool, str]]:
    """Reflection symmetry, junction coherence, orientation and quality."""
    out = []
    upper_ids = np.unique(mesh.sheet_triangles(SHEET_UPPER))
    lower_ids = np.unique(mesh.sheet_triangles(SHEET_LOWER))
    upper_set = mesh.vertices[upper_ids]
    lower_set = mesh.vertices[lower_ids]
    reflected = np.array(sorted(map(tuple, upper_set * [1.0, 1.0, -1.0])))
    target = np.array(sorted(map(tuple, lower_set)))
    sym = upper_set.shape == lower_set.shape and np.array_equal(reflected, target)
    out.append(("reflection_symmetry", bool(sym),
                "lower cap vertex set equals z-negated upper cap"))

    sheets_at = {int(j): set() for j in mesh.junction}
    for tri, sheet in zip(mesh.triangles, mesh.sheet_id):
        for vid in tri:
            if int(vid) in sheets_at:
                sheets_at[int(vid)].add(int(sheet))
    coherent = all(s == {SHEET_UPPER, SHEET_LOWER, SHEET_ANNULUS}
                   for s in sheets_at.values())
    out.append(("junction_coherence", bool(coherent),
                "every junction vertex is used by exactly the three sheets"))

    v = mesh.vertices
    t = mesh.triangles
    n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    areas = 0.5 * np.linalg.norm(n, axis=1)
    bbox = np.max(np.ptp(v, axis=0))
    out.append(("no_degenerate_triangles",
                bool(np.min(areas) > 1e-12 * bbox * bbox),
                f"min area {np.min(areas):.3e}"))

    nz = n[:, 2]
    up_ok = np.all(nz[mesh.sheet_id == SHEET_UPPER] > 0.0)
    low_ok = np.all(nz[mesh.sheet_id == SHEET_LOWER] < 0.0)
    ann_ok = np.all(nz[mesh.sheet_id == SHEET_ANNULUS] > 0.0)
    out.append(("orientation_consistent",
                bool(up_ok and low_ok and ann_ok),
                "outward normal z-sign uniform per sheet"))
    return out


def shrinker_residual_on_curve(profile: LensProfile) -> float:
    """Max pointwise residual of the shrinker identity along the profile.

    Combines the dynamical form (second derivatives substituted from the
    arclength system) with the integral-form curvature identity; the former
    degenerates to a scaled unit-speed check for any unit tangent field, so
    the latter is what catches geometry that does not actually solve the
    equation.  The residual lives on the smooth curve; discrete-mesh
    curvature is deliberately out of scope.
    """
    dyn = float(np.max(np.abs(shrinker_residual(profile))))
    k_alg, k_var, k_int = curvature_arrays(profile)
    integral = float(np.max(np.abs(k_alg - k_int)))
    variation = float(np.max(np.abs(k_alg - k_var)))
    return max(dyn, integral, variation)


def write_obj(mesh: ClusterMesh, path) -> None:
    """Wavefront OBJ with one group per sheet; 1-based face indices."""
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for sheet in (SHEET_UPPER, SHEET_LOWER, SHEET_ANNULUS):
            fh.write(f"g {SHEET_NAMES[sheet]}\n")
            for i, j, k in mesh.sheet_triangles(sheet) + 1:
                fh.write(f"f {i} {j} {k}\n")


def write_metadata(mesh: ClusterMesh, path, config: dict | None = None) -> None:
    """JSON sidecar {a_star, xi, s_bar, n_theta, annulus_outer, ...}."""
    meta = {
        "a_star": mesh.metadata["a"],
        "xi": mesh.metadata["xi"],
        "s_bar": mesh.metadata["s_bar"],
        "n_theta": mesh.metadata["n_theta"],
        "annulus_outer": mesh.metadata["annulus_outer"],
        "n_s": mesh.metadata["n_s"],
        "n_r": mesh.metadata["n_r"],
        "n_vertices": int(len(mesh.vertices)),
        "n_triangles": int(len(mesh.triangles)),
    }
    if config is not None:
        meta["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
