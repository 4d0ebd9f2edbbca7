"""Characteristic polynomial of the surplus recursion and its unit-disk roots.

The survival analysis needs the roots of s^kappa = G_X(s) inside the closed
unit disk, excluding the ever-present root s = 1 and counted with
multiplicity; there are exactly kappa-1 of them under the net profit
condition. Roots strictly outside the disk are kept as well: they are the
poles that drive the stable large-u tail of the survival table.

Primary finder: Aberth-Ehrlich simultaneous iteration on the polynomial
deflated by (s - 1), then multiplicity-aware Newton polishing. The companion
matrix eigenvalue route (numpy.roots) is exposed separately as an independent
cross-check path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .distributions import ClaimDistribution, FinitePmf, Geometric
from .errors import (
    AmbiguousCluster,
    ConvergenceFailure,
    ReductionError,
    RootCountMismatch,
    RuinwalkError,
)

_ONE_RESIDUAL_REL = 1e-10
_DEFLATION_REL = 1e-12


@dataclass(frozen=True)
class CharPolynomial:
    """Q(s) with Q = 0 iff s^kappa = G_X(s); coefficients lowest degree first."""

    coeffs: np.ndarray
    kappa: int
    reduction_shift: int = 0
    trunc_tail: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", c)
        scale = np.abs(c).sum()
        if abs(npoly.polyval(1.0, c)) > _ONE_RESIDUAL_REL * scale:
            raise RuinwalkError(
                "characteristic polynomial does not vanish at s=1; "
                "the claim law is inconsistent"
            )
        if c.size - 1 < self.kappa - self.reduction_shift - 1:
            raise RuinwalkError("characteristic polynomial degree is too small")

    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1)

    def eval(self, s) -> complex | np.ndarray:
        return npoly.polyval(s, self.coeffs)

    def eval_derivative(self, s, order: int = 1):
        return npoly.polyval(s, npoly.polyder(self.coeffs, order))


@dataclass(frozen=True)
class DiskRoot:
    value: complex
    multiplicity: int
    on_boundary: bool


@dataclass(frozen=True)
class RootSet:
    """Unit-disk roots (s != 1) with multiplicities, plus outside poles."""

    roots: tuple[DiskRoot, ...]
    outside: tuple[complex, ...] = ()

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots], dtype=complex)

    @property
    def all_simple(self) -> bool:
        return all(r.multiplicity == 1 for r in self.roots)

    def values_with_multiplicity(self) -> np.ndarray:
        """Roots repeated by multiplicity, e.g. for symmetric functions."""
        out: list[complex] = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return np.array(out, dtype=complex)

    def min_modulus(self) -> float:
        if not self.roots:
            return np.inf
        return min(abs(r.value) for r in self.roots)

    def to_records(self) -> list[dict]:
        return [
            {
                "re": float(r.value.real),
                "im": float(r.value.imag),
                "multiplicity": r.multiplicity,
                "on_boundary": r.on_boundary,
            }
            for r in self.roots
        ]


def reduce_support(dist: ClaimDistribution, kappa: int):
    """Shift away a deterministic claim floor: (X, kappa) -> (X - m, kappa - m).

    The surplus path is unchanged (u + kappa*n - sum X_i is invariant under
    the joint shift), so every survival quantity carries over. Leaves zero
    mass at the origin positive, which downstream solvers require.
    """
    m = dist.min_support()
    if m == 0:
        return dist, kappa, 0
    if m >= kappa:
        # P(X >= kappa) = 1 forces EX >= kappa, so the caller's net profit
        # precondition is already broken
        raise ReductionError(
            f"minimal claim {m} reaches premium rate {kappa}; model cannot survive"
        )
    assert isinstance(dist, FinitePmf), "only finite pmfs can have a positive support floor"
    shifted = FinitePmf(dist.probabilities[m:], trunc_eps=dist.trunc_eps)
    return shifted, kappa - m, m


def build_characteristic(dist: ClaimDistribution, kappa: int) -> CharPolynomial:
    """Polynomial Q with Q(s) = 0 iff s^kappa = G_X(s), exact where possible.

    Finite pmf: Q(s) = s^kappa - sum_i x_i s^i.
    Geometric:  Q(s) = s^kappa (1 - (1-p) s) - p, multiplying through by the
    pgf denominator; degree kappa+1, no truncation error. The extra factor
    introduces no spurious root inside the closed disk (its would-be zero
    1/(1-p) > 1 is not a root of Q).
    """
    if dist.pmf(0) <= 0.0:
        raise ValueError("build_characteristic requires positive mass at zero; reduce support first")
    if isinstance(dist, Geometric):
        coeffs = np.zeros(kappa + 2)
        coeffs[0] = -dist.p
        coeffs[kappa] = 1.0
        coeffs[kappa + 1] = -dist.q
        return CharPolynomial(coeffs, kappa)
    if isinstance(dist, FinitePmf):
        pmf = np.asarray(dist.probabilities, dtype=float)
        tail = 0.0
    else:
        pmf, tail = dist.truncate(dist.trunc_eps)
        # absorb the discarded mass so that Q(1)=0 holds exactly
        pmf = pmf / pmf.sum()
    n = max(kappa, pmf.size - 1)
    coeffs = np.zeros(n + 1)
    coeffs[: pmf.size] = -pmf
    coeffs[kappa] += 1.0
    return CharPolynomial(coeffs, kappa, trunc_tail=tail)


def deflate_at_one(coeffs: np.ndarray) -> np.ndarray:
    """Synthetic division of Q by (s - 1); the remainder must be negligible."""
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    b = np.zeros(n)
    b[n - 1] = c[n]
    for j in range(n - 1, 0, -1):
        b[j - 1] = c[j] + b[j]
    remainder = c[0] + b[0]
    scale = np.abs(c).sum()
    if abs(remainder) > _DEFLATION_REL * scale:
        raise RuinwalkError(
            f"deflation of the root s=1 left remainder {remainder:.3e} (scale {scale:.3e})"
        )
    return b


def aberth_roots(coeffs, *, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration.

    Multiple roots stall at the usual O(eps^(1/l)) cluster accuracy; the
    caller is expected to cluster and polish. Coefficients lowest first.
    """
    c = np.asarray(coeffs, dtype=complex)
    # trim numerically-zero leading coefficients
    nz = np.flatnonzero(np.abs(c) > 0.0)
    if nz.size == 0:
        raise ConvergenceFailure("zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    n = c.size - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    monic = c / c[-1]
    if n == 1:
        return np.array([-monic[0]], dtype=complex)

    radius = 1.0 + float(np.max(np.abs(monic[:-1])))  # Cauchy bound
    k = np.arange(n)
    z = 0.8 * radius * np.exp(2j * np.pi * (k + 0.35) / n + 0.45j)
    dc = npoly.polyder(c)

    for _ in range(max_iter):
        p = npoly.polyval(z, c)
        dp = npoly.polyval(z, dc)
        # keep Newton's ratio finite at critical points
        dp = np.where(np.abs(dp) < 1e-300, 1e-300, dp)
        newton = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = (1.0 / diff).sum(axis=1)
        w = newton / (1.0 - newton * repulsion)
        z = z - w
        if not np.all(np.isfinite(z)):
            raise ConvergenceFailure("Aberth iteration diverged to non-finite values")
        if np.max(np.abs(w)) <= tol * (1.0 + np.max(np.abs(z))):
            break
    return z


def companion_roots(coeffs) -> np.ndarray:
    """Eigenvalue route via the companion matrix; independent cross-check."""
    c = np.asarray(coeffs, dtype=float)
    return np.roots(c[::-1])


def _partition(points: np.ndarray, tol: float) -> list[list[int]]:
    """Greedy transitive clustering of points closer than tol."""
    n = points.size
    labels = [-1] * n
    clusters: list[list[int]] = []
    for i in range(n):
        if labels[i] >= 0:
            continue
        group = [i]
        labels[i] = len(clusters)
        frontier = [i]
        while frontier:
            j = frontier.pop()
            for k in range(n):
                if labels[k] < 0 and abs(points[j] - points[k]) <= tol:
                    labels[k] = labels[i]
                    group.append(k)
                    frontier.append(k)
        clusters.append(sorted(group))
    return clusters


def cluster_multiplicities(raw, *, tol_cluster: float = 1e-6) -> list[tuple[complex, int]]:
    """Merge near-identical root approximations into (centroid, multiplicity).

    Raises AmbiguousCluster when the partition changes between tol/10 and
    tol*10: that means the data cannot distinguish a multiple root from a
    tight cluster of simple ones at this tolerance.
    """
    pts = np.asarray(raw, dtype=complex)
    if pts.size == 0:
        return []
    base = _partition(pts, tol_cluster)
    tight = _partition(pts, tol_cluster / 10.0)
    loose = _partition(pts, tol_cluster * 10.0)
    if tight != loose:
        raise AmbiguousCluster(
            f"clustering is sensitive near tol_cluster={tol_cluster:g}",
            tight=[[pts[i] for i in g] for g in tight],
            loose=[[pts[i] for i in g] for g in loose],
        )
    out = []
    for group in base:
        centroid = complex(pts[group].mean())
        if abs(centroid.imag) <= tol_cluster / 2.0:
            centroid = complex(centroid.real, 0.0)
        out.append((centroid, len(group)))
    return out


def _newton_polish(coeffs: np.ndarray, z0: complex, *, max_iter: int = 80) -> complex:
    z = complex(z0)
    c = np.asarray(coeffs, dtype=complex)
    dc = npoly.polyder(c)
    for _ in range(max_iter):
        dp = npoly.polyval(z, dc)
        if dp == 0:
            break
        step = npoly.polyval(z, c) / dp
        z = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    return z


def find_unit_disk_roots(
    char: CharPolynomial,
    *,
    tol_root: float = 1e-10,
    tol_cluster: float = 1e-6,
    tol_boundary: float = 1e-8,
) -> RootSet:
    """Locate the kappa-1 roots of Q in |s| <= 1, s != 1, with multiplicities.

    Boundary roots (|s| ~ 1, e.g. roots of unity when the support lattice is
    coarser than the integers) are accepted. Everything strictly outside the
    disk is returned separately for tail-expansion use.
    """
    expected = char.kappa - 1
    deflated = deflate_at_one(char.coeffs)
    if deflated.size - 1 <= 0:
        if expected != 0:
            raise RootCountMismatch(0, expected)
        return RootSet(roots=())

    raw = aberth_roots(deflated)
    inside_mask = (np.abs(raw) <= 1.0 + tol_boundary) & (np.abs(raw - 1.0) > tol_root)
    inside_raw = raw[inside_mask]
    outside_raw = raw[np.abs(raw) > 1.0 + tol_boundary]

    clusters = cluster_multiplicities(inside_raw, tol_cluster=tol_cluster)

    # polish each cluster: a multiplicity-l root of Q is a simple root of
    # Q^(l-1), where Newton converges quadratically again
    polished: list[tuple[complex, int]] = []
    for value, mult in clusters:
        target = npoly.polyder(char.coeffs, mult - 1) if mult > 1 else char.coeffs
        z = _newton_polish(target, value)
        if abs(z.imag) <= tol_cluster / 2.0:
            z = complex(z.real, 0.0)
        polished.append((z, mult))

    # enforce conjugate closure by averaging matched pairs
    final: list[tuple[complex, int]] = []
    used = [False] * len(polished)
    for i, (zi, mi) in enumerate(polished):
        if used[i]:
            continue
        if zi.imag == 0.0:
            used[i] = True
            final.append((zi, mi))
            continue
        partner = None
        best = np.inf
        for j in range(i + 1, len(polished)):
            zj, mj = polished[j]
            if used[j] or mj != mi or zj.imag == 0.0:
                continue
            d = abs(np.conj(zi) - zj)
            if d < best:
                best, partner = d, j
        if partner is None or best > tol_cluster * 10:
            raise RootCountMismatch(
                sum(m for _, m in polished),
                expected,
                roots=[z for z, _ in polished],
            )
        zj, _ = polished[partner]
        used[i] = used[partner] = True
        avg = (zi + np.conj(zj)) / 2.0
        final.append((avg, mi))
        final.append((np.conj(avg), mi))

    total = sum(m for _, m in final)
    if total != expected:
        raise RootCountMismatch(total, expected, roots=[z for z, _ in final])

    scale0 = float(np.abs(char.coeffs).sum())
    for value, mult in final:
        for j in range(mult):
            dcoeffs = npoly.polyder(char.coeffs, j) if j else char.coeffs
            scale = float(np.abs(dcoeffs).sum())
            if abs(npoly.polyval(value, dcoeffs)) > tol_root * max(scale, scale0):
                raise ConvergenceFailure(
                    f"root {value} of multiplicity {mult} fails the order-{j} residual test"
                )

    roots = tuple(
        DiskRoot(value, mult, bool(abs(abs(value) - 1.0) <= tol_boundary))
        for value, mult in final
    )
    outside = tuple(_newton_polish(char.coeffs, z) for z in outside_raw)
    return RootSet(roots=roots, outside=outside)
