"""Boundary probabilities of the walk supremum.

Let M be the all-time supremum of the centred claim walk, clipped at zero.
Its first kappa local probabilities solve a square linear system: one row per
unit-disk root of the characteristic equation (derivative rows standing in for
repeated roots), closed by a first-moment row. A product/symmetric-function
closed form and a determinant identity are provided as independent checks,
and the pmf extends beyond index kappa-1 by a convolution recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .charpoly import RootSet
from .distributions import ClaimDistribution
from .errors import ImagLeak, MultipleRootsUnsupported, NegativePi, SingularSystem


@dataclass(frozen=True)
class BoundarySystem:
    """A @ mass = rhs; row_kinds tags each row (root, derivative order) or 'moment'."""

    matrix: np.ndarray
    rhs: np.ndarray
    row_kinds: tuple
    kappa: int


@dataclass(frozen=True)
class SupremumPmf:
    """P(M = i) for i = 0..kappa-1 plus solve diagnostics."""

    mass: np.ndarray
    residual: float
    imag_leak: float
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "mass", np.asarray(self.mass, dtype=float))


def row_polynomial_coeffs(dist: ClaimDistribution, kappa: int, i: int) -> np.ndarray:
    """Coefficients of sum_{j=0}^{kappa-1-i} F_X(j) s^(i+j), lowest degree first."""
    coeffs = np.zeros(kappa, dtype=float)
    for j in range(kappa - i):
        coeffs[i + j] = dist.cdf(j)
    return coeffs


def moment_row(dist: ClaimDistribution, kappa: int) -> np.ndarray:
    row = np.zeros(kappa, dtype=float)
    for i in range(kappa):
        row[i] = sum(dist.pmf(j) * (kappa - i - j) for j in range(kappa - i))
    return row


def build_boundary_system(dist: ClaimDistribution, kappa: int, roots: RootSet) -> BoundarySystem:
    """Assemble the kappa x kappa system for the first supremum probabilities.

    For a root of multiplicity l, derivative orders 0..l-1 of the row
    polynomial replace what would otherwise be l identical rows. The last row
    is the moment row with right-hand side kappa - E X.
    """
    n = kappa
    matrix = np.zeros((n, n), dtype=complex)
    kinds: list = []
    r = 0
    row_polys = [row_polynomial_coeffs(dist, kappa, i) for i in range(n)]
    for root in roots.roots:
        for order in range(root.multiplicity):
            for i in range(n):
                matrix[r, i] = npoly.polyval(root.value, npoly.polyder(row_polys[i], order)) \
                    if order else npoly.polyval(root.value, row_polys[i])
            kinds.append((root.value, order))
            r += 1
    matrix[n - 1, :] = moment_row(dist, kappa)
    kinds.append("moment")
    rhs = np.zeros(n, dtype=complex)
    rhs[n - 1] = kappa - dist.mean()
    return BoundarySystem(matrix=matrix, rhs=rhs, row_kinds=tuple(kinds), kappa=kappa)


def solve_boundary_system(system: BoundarySystem, *, tol_real: float = 1e-8) -> SupremumPmf:
    """Complex LU solve; the solution must be real up to tol_real."""
    try:
        sol = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"boundary system is singular: {exc}") from None
    residual = float(np.max(np.abs(system.matrix @ sol - system.rhs)))
    leak = float(np.max(np.abs(sol.imag))) if sol.size else 0.0
    if leak > tol_real:
        raise ImagLeak(leak, tol_real)
    return SupremumPmf(mass=sol.real, residual=residual, imag_leak=leak, kappa=system.kappa)


def _elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """e_0..e_n of the given values, by iterated convolution."""
    e = np.zeros(values.size + 1, dtype=complex)
    e[0] = 1.0
    for k, v in enumerate(values):
        e[1 : k + 2] = e[1 : k + 2] + v * e[0 : k + 1]
    return e


def sup_pmf_closed_form(dist: ClaimDistribution, kappa: int, roots: RootSet) -> SupremumPmf:
    """Product/symmetric-function cascade for the boundary probabilities.

    Requires simple roots. Writing P = prod_j (alpha_j - 1) and e_k for the
    elementary symmetric sums of the roots, the normalised masses follow

        m_k = (-1)^k e_{kappa-1-k} / (x0 P) - (1/x0) sum_{i<k} F_X(k-i) m_i,

    and the actual probabilities are (kappa - E X) m_k.
    """
    if not roots.all_simple:
        raise MultipleRootsUnsupported("closed form needs simple unit-disk roots")
    x0 = dist.pmf(0)
    if x0 <= 0.0:
        raise ValueError("closed form requires positive mass at zero; reduce support first")
    alphas = roots.values
    e = _elementary_symmetric(alphas)
    prod = complex(np.prod(alphas - 1.0)) if alphas.size else 1.0 + 0.0j
    m = np.zeros(kappa, dtype=complex)
    for k in range(kappa):
        lead = (-1.0) ** k * e[kappa - 1 - k] / (x0 * prod)
        corr = sum(dist.cdf(k - i) * m[i] for i in range(k)) / x0
        m[k] = lead - corr
    mass = (kappa - dist.mean()) * m
    leak = float(np.max(np.abs(mass.imag))) if mass.size else 0.0
    return SupremumPmf(mass=mass.real, residual=0.0, imag_leak=leak, kappa=kappa)


def determinant_identity_error(system: BoundarySystem, roots: RootSet, x0: float) -> float:
    """Relative error of det(A) against the factored closed form.

    det(A) = x0^kappa / (-1)^(kappa+1) * prod_j (alpha_j - 1)
             * prod_{i<j} (alpha_j - alpha_i),
    valid for simple roots, with empty products equal to one. Health check
    only; never part of the solve path.
    """
    if not roots.all_simple:
        raise MultipleRootsUnsupported("determinant identity holds for simple roots")
    kappa = system.kappa
    alphas = roots.values
    formula = x0**kappa * (-1.0) ** (kappa + 1)
    formula *= complex(np.prod(alphas - 1.0)) if alphas.size else 1.0
    for j in range(alphas.size):
        for i in range(j):
            formula *= alphas[j] - alphas[i]
    det = complex(np.linalg.det(system.matrix))
    return abs(det - formula) / abs(formula)


def extend_sup_pmf(
    sup: SupremumPmf,
    dist: ClaimDistribution,
    kappa: int,
    n_max: int,
    *,
    tol_real: float = 1e-8,
    check_negative: bool = True,
) -> np.ndarray:
    """P(M = n) for n = 0..n_max via the convolution recurrence.

    The index-kappa step uses cdf weights,
        m_kappa x0 = m_0 - sum_{i<kappa} m_i F_X(kappa - i),
    and beyond that the full-history form
        m_n x0 = m_{n-kappa} - sum_{i<n} m_i x_{n-i}.

    Forward error grows like (1/|alpha|)^n per unit-disk root alpha; callers
    needing deep tails should prefer the pole-expansion route in
    `ruinwalk.survival`.
    """
    x0 = dist.pmf(0)
    if x0 <= 0.0:
        raise ValueError("extension requires positive mass at zero; reduce support first")
    out = np.zeros(n_max + 1, dtype=float)
    upto = min(kappa - 1, n_max)
    out[: upto + 1] = sup.mass[: upto + 1]
    maxs = dist.max_support()
    for n in range(kappa, n_max + 1):
        if n == kappa:
            val = out[0] - sum(out[i] * dist.cdf(kappa - i) for i in range(kappa))
        else:
            lo = 0 if maxs is None else max(0, n - maxs)
            val = out[n - kappa] - sum(out[i] * dist.pmf(n - i) for i in range(lo, n))
        out[n] = val / x0
        if check_negative and out[n] < -tol_real:
            raise NegativePi(
                f"extended supremum mass at index {n} is {out[n]:.3e}; "
                "upstream inputs or conditioning are suspect"
            )
    return out
