"""Equilibrium measure of the gas via the obstacle problem.

The confining potential V determines a unique compactly supported probability
measure (density ``ΔV/(2π)`` on its support) through a complementarity system
for the background potential h:

    h >= c - V,    -Δh >= 0,    (-Δh) (h - (c - V)) = 0,

solved on a truncated box with monopole boundary data ``h = -log|x|``.  The
constant c is then tuned so that the coincidence set carries unit mass.

Sign conventions used throughout the package: the interaction kernel is
``-log|x|``, so the background potential of a probability measure behaves like
``-log|x|`` at infinity and satisfies ``-Δh = 2π density``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.ndimage as ndi
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import quad

from .errors import ConfigurationError, DomainError, IterationLimitError
from .model import ConfinementPotential

TWO_PI = 2.0 * np.pi

# Contact threshold for membership in the coincidence set.
CONTACT_TOL = 1e-8


@dataclass(frozen=True)
class Grid2D:
    """Uniform M x M grid on the square [-L, L]^2."""

    half_width: float
    resolution: int

    def __post_init__(self):
        if not (self.half_width > 0):
            raise ConfigurationError(f"half_width must be positive, got {self.half_width}")
        if self.resolution < 33:
            raise ConfigurationError(f"resolution must be >= 33, got {self.resolution}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.resolution - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.resolution)

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape (M, M, 2), row index = x, col index = y."""
        x = self.axis
        X, Y = np.meshgrid(x, x, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def interior(self) -> np.ndarray:
        """Boolean mask of non-frame nodes."""
        M = self.resolution
        inner = np.zeros((M, M), dtype=bool)
        inner[1:-1, 1:-1] = True
        return inner


def interp_bilinear(grid: Grid2D, F: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of a grid field at points inside the box.

    Points outside the box are clamped to the boundary; callers that need a
    far-field behaviour handle the outside branch themselves.
    """
    pts = np.asarray(pts, dtype=float)
    L, M, h = grid.half_width, grid.resolution, grid.h
    s = (pts + L) / h
    s = np.clip(s, 0.0, M - 1 - 1e-12)
    i0 = np.floor(s).astype(int)
    f = s - i0
    i1 = np.minimum(i0 + 1, M - 1)
    fx, fy = f[..., 0], f[..., 1]
    F = np.asarray(F, dtype=float)
    v00 = F[i0[..., 0], i0[..., 1]]
    v10 = F[i1[..., 0], i0[..., 1]]
    v01 = F[i0[..., 0], i1[..., 1]]
    v11 = F[i1[..., 0], i1[..., 1]]
    return (v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy)
            + v01 * (1 - fx) * fy + v11 * fx * fy)


@dataclass
class SupportComponent:
    """One connected component of the droplet with its boundary nodes."""

    label: int
    node_count: int
    boundary_nodes: np.ndarray  # (k, 2) integer grid indices


@dataclass
class EquilibriumMeasure:
    """Equilibrium density, droplet, and the associated potential fields."""

    grid: Grid2D
    density: np.ndarray
    support_mask: np.ndarray
    c_V: float
    h0: np.ndarray
    zeta: np.ndarray
    components: list = field(default_factory=list)
    potential: Optional[ConfinementPotential] = None

    @property
    def mass(self) -> float:
        return float(self.density.sum() * self.grid.h ** 2)


# ---------------------------------------------------------------------------
# Obstacle solver
# ---------------------------------------------------------------------------


class _ObstacleWorkspace:
    """Precomputed grid data reused across obstacle solves for one (V, grid).

    Holds the interior 5-point Laplacian (frame eliminated into the boundary
    vector) and the sampled potential, plus the active set of the previous
    solve for warm starts during the bisection on c.
    """

    def __init__(self, V: ConfinementPotential, grid: Grid2D):
        self.V = V
        self.grid = grid
        M = grid.resolution
        self.M = M
        nodes = grid.nodes()
        self.Vg = V.value(nodes)
        self.lapVg = V.laplacian(nodes)
        r = np.sqrt((nodes ** 2).sum(axis=-1))
        # Monopole data; clip the radius so an origin node stays finite.
        self.monopole = -np.log(np.maximum(r, grid.h / 2))

        inner = M - 2
        self.inner = inner
        idx = np.arange(inner * inner).reshape(inner, inner)
        h2 = grid.h ** 2
        main = 4.0 * np.ones(inner * inner)
        # Assemble -h^2 * Δ as a positive-definite stencil (4 on the diagonal).
        offs = []
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            src_i = slice(max(0, -di), inner - max(0, di))
            src_j = slice(max(0, -dj), inner - max(0, dj))
            dst_i = slice(max(0, di), inner - max(0, -di))
            dst_j = slice(max(0, dj), inner - max(0, -dj))
            offs.append((idx[dst_i, dst_j].ravel(), idx[src_i, src_j].ravel()))
        rows = np.concatenate([o[0] for o in offs])
        cols = np.concatenate([o[1] for o in offs])
        A = sp.coo_matrix(
            (np.concatenate([main, -np.ones(rows.size)]),
             (np.concatenate([idx.ravel(), rows]), np.concatenate([idx.ravel(), cols]))),
            shape=(inner * inner, inner * inner),
        ).tocsr()
        self.A = A
        self.h2 = h2

        # Frame contribution to the interior equations (Dirichlet data).
        bvec = np.zeros((inner, inner))
        bd = self.monopole
        bvec[0, :] += bd[0, 1:-1]
        bvec[-1, :] += bd[-1, 1:-1]
        bvec[:, 0] += bd[1:-1, 0]
        bvec[:, -1] += bd[1:-1, -1]
        self.frame_rhs = bvec.ravel()

        self.warm_active: Optional[np.ndarray] = None

    def obstacle(self, c: float) -> np.ndarray:
        return c - self.Vg

    def solve(self, c: float, max_policy_iters: int = 120):
        """Active-set policy iteration for the complementarity system.

        Alternates between solving the linear system on the inactive set and
        exchanging nodes that violate either inequality.  Terminates when the
        active set is stable, which makes both complementarity branches exact
        to linear-solver precision.
        """
        M, inner = self.M, self.inner
        obst = self.obstacle(c)[1:-1, 1:-1].ravel()
        if self.warm_active is not None:
            active = self.warm_active.copy()
        else:
            active = obst > self.monopole[1:-1, 1:-1].ravel()
        n = inner * inner
        h = np.empty(n)
        last_residual = np.inf
        for it in range(max_policy_iters):
            inactive = ~active
            h[active] = obst[active]
            if inactive.any():
                known = np.where(active, obst, 0.0)
                rhs = (self.frame_rhs - self.A @ known)[inactive]
                sub = self.A[inactive][:, inactive]
                h[inactive] = spla.spsolve(sub.tocsc(), rhs)
            # -h^2 Δh on every interior node.
            lap = self.A @ h - self.frame_rhs
            viol_low = inactive & (h < obst - CONTACT_TOL)          # penetrates the obstacle
            viol_neg = active & (lap < -CONTACT_TOL * self.h2)      # multiplier went negative
            last_residual = max(
                float(np.max(obst - h, initial=0.0)),
                float(np.max(-lap[active] / self.h2, initial=0.0)),
            )
            if not viol_low.any() and not viol_neg.any():
                self.warm_active = active
                H = self.monopole.copy()
                H[1:-1, 1:-1] = h.reshape(inner, inner)
                mask = np.zeros((M, M), dtype=bool)
                mask[1:-1, 1:-1] = (h - obst <= CONTACT_TOL).reshape(inner, inner)
                return H, mask
            active = (active | viol_low) & ~viol_neg
        raise IterationLimitError(
            f"obstacle solve did not settle after {max_policy_iters} active-set iterations",
            residual=last_residual,
        )


def solve_obstacle_fixed_c(V: ConfinementPotential, c: float, grid: Grid2D,
                           workspace: Optional[_ObstacleWorkspace] = None):
    """Solve the obstacle problem at a fixed candidate constant c.

    Returns (h, mask) where h carries the monopole boundary data on the frame
    and mask marks the coincidence set {h - (c - V) <= tol}.
    """
    ws = workspace if workspace is not None else _ObstacleWorkspace(V, grid)
    return ws.solve(c)


def _components_from_mask(mask: np.ndarray) -> list[SupportComponent]:
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])  # 4-connectivity
    labels, n = ndi.label(mask, structure=structure)
    comps = []
    # Boundary node: mask node with at least one unmasked 4-neighbour.
    pad = np.pad(mask, 1, constant_values=False)
    nb_all = (pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:])
    boundary = mask & ~nb_all
    for lab in range(1, n + 1):
        sel = labels == lab
        bn = np.argwhere(sel & boundary)
        comps.append(SupportComponent(label=lab, node_count=int(sel.sum()), boundary_nodes=bn))
    return comps


def _mask_edge(mask: np.ndarray) -> np.ndarray:
    """Mask nodes with at least one unmasked 4-neighbour."""
    pad = np.pad(mask, 1, constant_values=False)
    nb_all = pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
    return mask & ~nb_all


def _mask_weights(mask: np.ndarray) -> np.ndarray:
    """Quadrature weights for the staircase droplet: half weight on its rim.

    The discrete contact set overshoots the free boundary by about half a
    cell; trapezoidal weighting of the rim cancels that O(h) perimeter bias.
    """
    w = mask.astype(float)
    w[_mask_edge(mask)] = 0.5
    return w


def _bisect_constant(ws: _ObstacleWorkspace, c_lo: float, c_hi: float, mass_tol: float):
    """Bisect on c until the coincidence-set mass is within mass_tol of 1."""
    h2 = ws.grid.h ** 2
    dens_factor = ws.lapVg / TWO_PI

    def mass_of(c: float):
        H, mask = ws.solve(c)
        return float((dens_factor * _mask_weights(mask)).sum() * h2), H, mask

    m_lo, _, _ = mass_of(c_lo)
    m_hi, _, _ = mass_of(c_hi)
    if not (m_lo < 1.0 < m_hi):
        raise ConfigurationError(
            f"mass bracket failed (grid too small or V violates growth): "
            f"mass({c_lo:.3g})={m_lo:.3g}, mass({c_hi:.3g})={m_hi:.3g}"
        )
    for _ in range(80):
        c = 0.5 * (c_lo + c_hi)
        m, H, mask = mass_of(c)
        if abs(m - 1.0) <= mass_tol:
            return c, H, mask
        if m < 1.0:
            c_lo = c
        else:
            c_hi = c
    raise ConfigurationError("bisection on c did not reach the mass tolerance")


def solve_equilibrium(V: ConfinementPotential, grid: Grid2D,
                      mass_tol: float = 1e-3) -> EquilibriumMeasure:
    """Compute the equilibrium measure by bisecting on the constant c.

    The coincidence-set mass ``h^2 Σ_mask ΔV/(2π)`` is monotone in c; bisection
    stops once it is within mass_tol of 1.  The returned fields satisfy the
    variational characterisation: zeta = h0 + V - c_V vanishes on the droplet
    and is positive off it.  For fine grids the constant is first located on a
    coarse grid so that only a handful of fine solves are needed.
    """
    M = grid.resolution
    L = grid.half_width

    # V must dominate the monopole data near the frame, else nothing confines.
    if L >= 2.0:
        corner = np.array([L, L]) / np.sqrt(2.0)
        ratio = float(V.value(corner) / np.log(L))
        if ratio <= 1.0:
            raise ConfigurationError(
                f"potential grows too slowly on the boundary ring (V/log|x| = {ratio:.3g} <= 1)"
            )

    ws = _ObstacleWorkspace(V, grid)
    c_lo = float(ws.Vg.min()) - 1.0
    c_hi = float((ws.monopole + ws.Vg).max())

    if M > 193:
        coarse = Grid2D(half_width=L, resolution=129)
        ws_c = _ObstacleWorkspace(V, coarse)
        c0, _, mask_c = _bisect_constant(ws_c, c_lo, c_hi, mass_tol / 2)
        # Seed the fine active set with the upsampled coarse droplet.
        fine_nodes = grid.nodes()[1:-1, 1:-1].reshape(-1, 2)
        seed = interp_bilinear(coarse, mask_c.astype(float), fine_nodes) > 0.5
        ws.warm_active = seed
        half = max(0.05, 0.02 * abs(c0))
        try:
            c, H, mask = _bisect_constant(ws, c0 - half, c0 + half, mass_tol)
        except ConfigurationError:
            c, H, mask = _bisect_constant(ws, c_lo, c_hi, mass_tol)
    else:
        c, H, mask = _bisect_constant(ws, c_lo, c_hi, mass_tol)
    dens_factor = ws.lapVg / TWO_PI

    # Droplet must stay strictly inside the box.
    ring = np.zeros((M, M), dtype=bool)
    ring[1:-1, 1:-1] = True
    ring[2:-2, 2:-2] = False
    if np.any(mask & ring):
        raise ConfigurationError("droplet touches the outer boundary ring; grid too small")

    if np.any(dens_factor[mask] <= 0):
        raise ConfigurationError("Laplacian of V is not positive on the droplet (nondegeneracy fails)")

    density = np.where(mask, dens_factor, 0.0)
    zeta = H + ws.Vg - c
    zeta[mask] = 0.0
    comps = _components_from_mask(mask)
    return EquilibriumMeasure(grid=grid, density=density, support_mask=mask, c_V=float(c),
                              h0=H, zeta=zeta, components=comps, potential=V)


def complementarity_residual(eq: EquilibriumMeasure) -> np.ndarray:
    """Nodewise min(-Δh, h - (c - V)) on interior nodes; ~0 at a solution."""
    if eq.potential is None:
        raise DomainError("equilibrium measure carries no potential")
    grid = eq.grid
    h2 = grid.h ** 2
    H = eq.h0
    lap = np.zeros_like(H)
    lap[1:-1, 1:-1] = (H[2:, 1:-1] + H[:-2, 1:-1] + H[1:-1, 2:] + H[1:-1, :-2]
                       - 4.0 * H[1:-1, 1:-1]) / h2
    obst = eq.c_V - eq.potential.value(grid.nodes())
    res = np.minimum(-lap, H - obst)
    return res[1:-1, 1:-1]


# ---------------------------------------------------------------------------
# Radial oracle
# ---------------------------------------------------------------------------


@dataclass
class RadialEquilibrium:
    """Closed-form-by-quadrature equilibrium data for a radial potential."""

    R: float
    c_V: float
    density: Callable  # density(r) on r <= R
    h0: Callable       # background potential profile on r >= 0
    profile: Callable  # the radial potential v(r)

    def continuous_energy(self) -> float:
        """Radial quadrature of (1/2)∫h0 dμ + ∫v dμ."""
        dm = lambda s: TWO_PI * s * self.density(s)
        val_h0, _ = quad(lambda s: self.h0(s) * dm(s), 0.0, self.R, limit=200)
        val_v, _ = quad(lambda s: self.profile(s) * dm(s), 0.0, self.R, limit=200)
        return 0.5 * val_h0 + val_v


def radial_equilibrium_oracle(v: Callable, r_max: float = 50.0,
                              fd_step: float = 1e-6) -> RadialEquilibrium:
    """Independent equilibrium oracle for a radial profile v(r).

    Uses the cumulative-mass identity m(r) = r v'(r): the support radius
    solves R v'(R) = 1, the density is Δv/(2π), the constant is v(R) - log R,
    and the interior background potential follows from Newton's theorem.
    """
    def vp(r):
        return (v(r + fd_step) - v(r - fd_step)) / (2 * fd_step)

    def vpp(r):
        return (v(r + fd_step) - 2 * v(r) + v(r - fd_step)) / fd_step ** 2

    def mass(r):
        return r * vp(r)

    lo, hi = 1e-3, None
    r = 2e-3
    while r <= r_max:
        if mass(r) > 1.0:
            hi = r
            break
        lo = r
        r *= 1.5
    if hi is None:
        raise DomainError(f"no support radius below r_max={r_max}; v grows too slowly")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mass(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    R = 0.5 * (lo + hi)

    def density(r):
        r = np.asarray(r, dtype=float)
        small = r < 1e-6
        rs = np.where(small, 1e-6, r)
        lap = vpp(rs) + vp(rs) / rs
        lap = np.where(small, 2.0 * vpp(np.full_like(rs, 1e-6)), lap)
        return np.where(r <= R, lap / TWO_PI, 0.0)

    def dm(s):
        return s * vpp(s) + vp(s)  # d/ds (s v'(s))

    def h0_scalar(r):
        if r >= R:
            return -np.log(r)
        if r < 1e-12:
            tail, _ = quad(lambda s: np.log(s) * dm(s), 1e-12, R, limit=200)
            return -tail
        tail, _ = quad(lambda s: np.log(s) * dm(s), r, R, limit=200)
        return -(mass(r) * np.log(r) + tail)

    h0 = np.vectorize(h0_scalar)
    c_V = float(v(R) - np.log(R))
    return RadialEquilibrium(R=float(R), c_V=c_V, density=density, h0=h0, profile=v)


def default_box(V: ConfinementPotential, n_angles: int = 32) -> float:
    """Half-width 1.5 R_est + 1, with R_est from the radialised mass equation."""
    theta = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    ring = np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def vbar(r):
        return float(np.mean(V.value(r * ring)))

    re = radial_equilibrium_oracle(vbar)
    return 1.5 * re.R + 1.0


# ---------------------------------------------------------------------------
# Field evaluation off the grid
# ---------------------------------------------------------------------------


def background_potential(eq: EquilibriumMeasure, p):
    """h0 at arbitrary points: grid interpolation inside, monopole outside."""
    pts = np.asarray(p, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    L = eq.grid.half_width
    inside = np.all(np.abs(pts) <= L, axis=-1)
    out = np.empty(pts.shape[:-1])
    if np.any(inside):
        out[inside] = interp_bilinear(eq.grid, eq.h0, pts[inside])
    if np.any(~inside):
        r = np.sqrt((pts[~inside] ** 2).sum(axis=-1))
        out[~inside] = -np.log(r)
    return float(out[0]) if scalar else out


def effective_potential(eq: EquilibriumMeasure, p):
    """zeta = h0 + V - c_V, zero on the droplet by construction."""
    pts = np.asarray(p, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    L = eq.grid.half_width
    inside = np.all(np.abs(pts) <= L, axis=-1)
    out = np.empty(pts.shape[:-1])
    if np.any(inside):
        out[inside] = np.maximum(interp_bilinear(eq.grid, eq.zeta, pts[inside]), 0.0)
    if np.any(~inside):
        if eq.potential is None:
            raise DomainError("effective potential outside the box needs the potential")
        q = pts[~inside]
        r = np.sqrt((q ** 2).sum(axis=-1))
        out[~inside] = -np.log(r) + eq.potential.value(q) - eq.c_V
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Harmonic extension and component fluxes
# ---------------------------------------------------------------------------


def harmonic_extension(eq: EquilibriumMeasure, xi: np.ndarray) -> np.ndarray:
    """Extend a grid field harmonically off the droplet.

    Keeps xi on the droplet, solves the discrete Laplace equation outside with
    Dirichlet data on the droplet boundary, and imposes a zero normal
    derivative on the outer box as a stand-in for boundedness at infinity.
    """
    mask = eq.support_mask
    if not mask.any():
        raise DomainError("empty droplet; nothing to extend from")
    xi = np.asarray(xi, dtype=float)
    M = eq.grid.resolution
    unknown = ~mask
    n = int(unknown.sum())
    index = -np.ones((M, M), dtype=int)
    index[unknown] = np.arange(n)

    rows, cols, vals = [], [], []
    rhs = np.zeros(n)
    ui, uj = np.nonzero(unknown)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ni, nj = ui + di, uj + dj
        has = (ni >= 0) & (ni < M) & (nj >= 0) & (nj < M)
        r = index[ui[has], uj[has]]
        nbr_unknown = unknown[ni[has], nj[has]]
        # diagonal counts only existing neighbours: mirrors the box edge (Neumann)
        rows.append(r)
        cols.append(r)
        vals.append(np.ones(r.size))
        nb = index[ni[has], nj[has]]
        rows.append(r[nbr_unknown])
        cols.append(nb[nbr_unknown])
        vals.append(-np.ones(int(nbr_unknown.sum())))
        fixed = ~nbr_unknown
        np.add.at(rhs, r[fixed], xi[ni[has][fixed], nj[has][fixed]])
    A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n)).tocsc()
    sol = spla.spsolve(A, rhs)
    ext = xi.copy()
    ext[unknown] = sol
    return ext


def multicut_flux_check(eq: EquilibriumMeasure, xi_ext: np.ndarray) -> list[float]:
    """Outward flux of the extension gradient through each component boundary.

    Sums one-sided normal differences over the boundary faces of every droplet
    component.  Solvability of the per-component transport problem requires
    each flux to vanish.
    """
    mask = eq.support_mask
    M = eq.grid.resolution
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    labels, n = ndi.label(mask, structure=structure)
    fluxes = []
    xi_ext = np.asarray(xi_ext, dtype=float)
    bi, bj = np.nonzero(mask)
    for lab in range(1, n + 1):
        total = 0.0
        sel = labels[bi, bj] == lab
        ci, cj = bi[sel], bj[sel]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = ci + di, cj + dj
            ok = (ni >= 0) & (ni < M) & (nj >= 0) & (nj < M)
            outside = np.zeros(ci.size, dtype=bool)
            outside[ok] = ~mask[ni[ok], nj[ok]]
            total += float(np.sum(xi_ext[ni[outside], nj[outside]] - xi_ext[ci[outside], cj[outside]]))
        fluxes.append(total)
    return fluxes


# ---------------------------------------------------------------------------
# Serialization (EQM1)
# ---------------------------------------------------------------------------

_MAGIC = b"EQM1"


def save_equilibrium(eq: EquilibriumMeasure, path) -> None:
    """Binary dump: magic, M (u64), L (f64), c_V (f64), then the four fields."""
    M = eq.grid.resolution
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<Qdd", M, eq.grid.half_width, eq.c_V))
        f.write(eq.density.astype("<f8").tobytes())
        f.write(eq.h0.astype("<f8").tobytes())
        f.write(eq.zeta.astype("<f8").tobytes())
        f.write(eq.support_mask.astype(np.uint8).tobytes())


def load_equilibrium(path, potential: Optional[ConfinementPotential] = None) -> EquilibriumMeasure:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ConfigurationError(f"bad magic {magic!r} in equilibrium file")
        M, L, c_V = struct.unpack("<Qdd", f.read(24))
        M = int(M)
        count = M * M
        density = np.frombuffer(f.read(8 * count), dtype="<f8").reshape(M, M).copy()
        h0 = np.frombuffer(f.read(8 * count), dtype="<f8").reshape(M, M).copy()
        zeta = np.frombuffer(f.read(8 * count), dtype="<f8").reshape(M, M).copy()
        mask = np.frombuffer(f.read(count), dtype=np.uint8).reshape(M, M).astype(bool)
    grid = Grid2D(half_width=L, resolution=M)
    comps = _components_from_mask(mask)
    return EquilibriumMeasure(grid=grid, density=density, support_mask=mask, c_V=c_V,
                              h0=h0, zeta=zeta, components=comps, potential=potential)
