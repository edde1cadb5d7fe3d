"""Wigner functions of spin-j cat states, three ways.

* ``wigner_closed_half`` / ``wigner_closed_general`` - closed forms of the
  kernel mean Tr[rho Delta(alpha, beta)], built from exact displaced-parity
  matrix elements on the 2j shell.  These agree with the brute-force kernel
  trace to rounding and obey |W| <= 1.

* ``wigner_kernel_trace`` - the brute-force route: contract a density matrix
  against explicitly constructed kernel matrices.  Serves as the oracle for
  everything else.

* ``wigner_gaussian_half`` / ``wigner_gaussian_general`` - a closed form in
  which each Dicke component |n> enters as if it were a coherent state of
  amplitude n, so every term is a pure Gaussian in phase space.  This
  surrogate is useful for shape-level studies (its peaks track the shell
  structure) but it is NOT the kernel mean: for any single-shell state the
  true kernel mean is an even function of (alpha, beta) while the Gaussian
  form is not, so no constant rescaling can reconcile them.  Use
  ``reconcile_gaussian_form`` to quantify the mismatch on a grid.

Two output conventions: KERNEL_MEAN returns the dimensionless expectation
Tr[rho Delta] (bounded by 1); DENSITY multiplies by 1/pi^2, normalizing the
integral of W over dq1 dp1 dq2 dp2 to Tr[rho] = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fockspace import (
    DensityMatrix,
    single_mode_kernel,
    smoothed_kernel_element,
    warn_if_truncated,
)
from .states import CatParams, cat_shell_amplitudes, spin_coherent_amplitudes

__all__ = [
    "PhasePoint",
    "WignerConvention",
    "wigner_closed_half",
    "wigner_closed_general",
    "wigner_gaussian_half",
    "wigner_gaussian_general",
    "wigner_kernel_trace",
    "GaussianFormReport",
    "reconcile_gaussian_form",
    "wigner_grid",
]

IMAG_RESIDUE_TOL = 1e-10
THETA_BOUNDARY_TOL = 1e-12
SYMMETRY_VIOLATION_THRESHOLD = 0.01  # W^2 below this counts as parity violation


@dataclass(frozen=True)
class PhasePoint:
    """A point (alpha, beta) of two-mode phase space; q = sqrt(2) Re, p = sqrt(2) Im."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError(f"phase point must be finite, got ({self.alpha}, {self.beta})")

    @classmethod
    def from_quadratures(cls, q1: float, p1: float, q2: float, p2: float) -> "PhasePoint":
        return cls((q1 + 1j * p1) / np.sqrt(2), (q2 + 1j * p2) / np.sqrt(2))

    @property
    def q1(self) -> float:
        return float(np.sqrt(2) * self.alpha.real)

    @property
    def p1(self) -> float:
        return float(np.sqrt(2) * self.alpha.imag)

    @property
    def q2(self) -> float:
        return float(np.sqrt(2) * self.beta.real)

    @property
    def p2(self) -> float:
        return float(np.sqrt(2) * self.beta.imag)

    def quadratures(self) -> tuple[float, float, float, float]:
        return (self.q1, self.p1, self.q2, self.p2)


class WignerConvention(enum.Enum):
    """Normalization of the returned Wigner value."""

    KERNEL_MEAN = "kernel-mean"
    DENSITY = "density"

    @property
    def factor(self) -> float:
        return 1.0 if self is WignerConvention.KERNEL_MEAN else 1.0 / np.pi**2


def _as_real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        raise ArithmeticError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _require_interior_theta(params: CatParams) -> None:
    for name in ("theta1", "theta2"):
        th = getattr(params, name)
        if th < THETA_BOUNDARY_TOL or th > np.pi - THETA_BOUNDARY_TOL:
            raise ValueError(
                f"{name} = {th} lies on the boundary of ]0, pi[; the general "
                "closed form is stated for interior angles only"
            )


# ---------------------------------------------------------------------------
# exact closed forms (kernel mean)
# ---------------------------------------------------------------------------

def _closed_kernel_mean(params: CatParams, alpha: complex, beta: complex,
                        noise: float = 0.0) -> complex:
    """Sum over the 2j shell of amplitude pairs times kernel matrix elements.

    With noise > 0 the mode-1 element is the Gaussian-smoothed one, which is
    exactly the kernel mean after a random-displacement channel of strength
    ``noise`` on mode 1.
    """
    twoj = params.twoj
    c = cat_shell_amplitudes(params)
    k1 = np.empty((twoj + 1, twoj + 1), dtype=complex)
    k2 = np.empty((twoj + 1, twoj + 1), dtype=complex)
    for row in range(twoj + 1):
        for col in range(twoj + 1):
            k1[row, col] = smoothed_kernel_element(row, col, alpha, noise)
            k2[row, col] = smoothed_kernel_element(twoj - row, twoj - col, beta, 0.0)
    return np.einsum("n,m,nm,nm->", c.conj(), c, k1, k2)


def wigner_closed_half(params: CatParams, point: PhasePoint,
                       conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> float:
    """Closed-form kernel mean for a spin-1/2 cat.

    With c = cos(t1/2) + cos(t2/2), d = e^(-i p1) sin(t1/2) + e^(-i p2) sin(t2/2):

        W = N^2 e^(-2|a|^2 - 2|b|^2) [ 4|c|^2 |b|^2 - |c|^2
                                       + 4|d|^2 |a|^2 - |d|^2
                                       + 8 Re(c d* a b*) ]

    Accepts the full theta range [0, pi].  Agrees with the kernel trace to
    rounding and obeys |W| <= 1 in kernel-mean convention.
    """
    if params.twoj != 1:
        raise ValueError(f"wigner_closed_half requires j = 1/2, got j = {params.j}")
    from .states import cat_norm_half

    n = cat_norm_half(params)
    c = np.cos(params.theta1 / 2) + np.cos(params.theta2 / 2)
    d = np.exp(-1j * params.phi1) * np.sin(params.theta1 / 2) + np.exp(
        -1j * params.phi2
    ) * np.sin(params.theta2 / 2)
    a, b = point.alpha, point.beta
    bracket = (
        abs(c) ** 2 * (4 * abs(b) ** 2 - 1)
        + abs(d) ** 2 * (4 * abs(a) ** 2 - 1)
        + 8 * np.real(c * np.conj(d) * a * np.conj(b))
    )
    w = n**2 * np.exp(-2 * (abs(a) ** 2 + abs(b) ** 2)) * bracket
    return conv.factor * float(w)


def wigner_closed_general(params: CatParams, point: PhasePoint,
                          conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> float:
    """Closed-form kernel mean for a general spin-j cat (theta strictly inside
    ]0, pi[; use wigner_closed_half or the kernel trace on the boundary)."""
    _require_interior_theta(params)
    w = _closed_kernel_mean(params, point.alpha, point.beta)
    return conv.factor * _as_real(w, "closed-form Wigner value")


# ---------------------------------------------------------------------------
# Gaussian-branch surrogate forms
# ---------------------------------------------------------------------------

def _gaussian_form(params: CatParams, alpha: complex, beta: complex) -> float:
    """Double sum over (m, n) of Gaussian terms centred on the Dicke indices.

    Term (m, n) carries exp(-|2j - 2 alpha + m + n|^2 / 2 + (alpha - alpha*)(m - n))
    and the mirrored beta factor; the (n, m) term is its conjugate, so the sum
    is real.  Accumulated with pairwise numpy summation after log-space
    amplitude construction, which is adequate up to j ~ 50.
    """
    twoj = params.twoj
    j = params.j
    a = spin_coherent_amplitudes(j, params.theta1, params.phi1) + spin_coherent_amplitudes(
        j, params.theta2, params.phi2
    )
    from .states import cat_norm_general

    nt = cat_norm_general(params)
    km = np.arange(twoj + 1)
    m = km - j
    # alpha factor for every (m, n) pair; mm indexes the conjugated amplitude
    mm, nn = np.meshgrid(m, m, indexing="ij")
    e1 = np.exp(
        -np.abs(twoj - 2 * alpha + mm + nn) ** 2 / 2
        + (alpha - np.conj(alpha)) * (mm - nn)
    )
    e2 = np.exp(
        -np.abs(twoj - 2 * beta - mm - nn) ** 2 / 2
        + (beta - np.conj(beta)) * (nn - mm)
    )
    total = np.einsum("m,n,mn,mn->", a.conj(), a, e1, e2)
    return nt**2 * _as_real(total, "Gaussian-form Wigner value")


def wigner_gaussian_half(params: CatParams, point: PhasePoint,
                         conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> float:
    """Four-term Gaussian-branch form for a spin-1/2 cat.

    The four terms are Gaussians centred where the Dicke components would sit
    if they were coherent amplitudes (0 and 1); see the module docstring for
    the relation to the true kernel mean.
    """
    if params.twoj != 1:
        raise ValueError(f"wigner_gaussian_half requires j = 1/2, got j = {params.j}")
    c = np.cos(params.theta1 / 2) + np.cos(params.theta2 / 2)
    d = np.exp(-1j * params.phi1) * np.sin(params.theta1 / 2) + np.exp(
        -1j * params.phi2
    ) * np.sin(params.theta2 / 2)
    from .states import cat_norm_half

    n = cat_norm_half(params)
    a, b = point.alpha, point.beta
    t1 = abs(c) ** 2 * np.exp(-2 * abs(a) ** 2) * np.exp(-2 * abs(1 - b) ** 2)
    cross = (
        c
        * d
        * np.exp(-0.5 * abs(2 * a - 1) ** 2 - a + np.conj(a))
        * np.exp(-0.5 * abs(1 - 2 * b) ** 2 + b - np.conj(b))
    )
    t4 = abs(d) ** 2 * np.exp(-2 * abs(1 - a) ** 2) * np.exp(-2 * abs(b) ** 2)
    w = n**2 * (t1 + 2 * np.real(cross) + t4)
    return conv.factor * float(w)


def wigner_gaussian_general(params: CatParams, point: PhasePoint,
                            conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> float:
    """Gaussian-branch form for a general spin-j cat (theta inside ]0, pi[)."""
    _require_interior_theta(params)
    return conv.factor * _gaussian_form(params, point.alpha, point.beta)


# ---------------------------------------------------------------------------
# brute-force kernel trace
# ---------------------------------------------------------------------------

def wigner_kernel_trace(rho: DensityMatrix, point: PhasePoint,
                        conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> float:
    """W = Tr[rho Delta(alpha, beta)] by direct contraction.

    Kernel entries are exact matrix elements on rho's stored block, so the
    result is exact for states genuinely supported inside their cutoff (any
    pure shell state); for channel outputs it is off by at most the recorded
    tail defect, and a TruncationWarning fires when that exceeds 1e-8.
    """
    warn_if_truncated(rho)
    c = rho.cutoff
    k1 = single_mode_kernel(point.alpha, c.n1_max)
    k2 = single_mode_kernel(point.beta, c.n2_max)
    w = np.einsum("abxy,xa,yb->", rho.as_modes(), k1, k2, optimize=True)
    return conv.factor * _as_real(w, "kernel-trace Wigner value")


# ---------------------------------------------------------------------------
# reconciliation of the Gaussian form against the kernel trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianFormReport:
    """Best single constant relating the Gaussian form to the kernel mean on a
    sample of points, and the residual shape mismatch that remains."""

    scale: float
    max_residual: float
    rms_residual: float
    matched: bool
    tol: float
    n_points: int


def reconcile_gaussian_form(params: CatParams, points: list[PhasePoint],
                            tol: float = 1e-5) -> GaussianFormReport:
    """Least-squares fit of kernel-mean W = scale * Gaussian-form W.

    ``matched`` is true only if one constant brings every sampled point within
    ``tol``.  For spin-shell cats this fails structurally (the kernel mean is
    even under (alpha, beta) -> -(alpha, beta); the Gaussian form is not) and
    the report then documents the mismatch rather than hiding it.
    """
    if params.twoj == 1:
        exact = np.array([wigner_closed_half(params, pt) for pt in points])
        gauss = np.array([wigner_gaussian_half(params, pt) for pt in points])
    else:
        exact = np.array([wigner_closed_general(params, pt) for pt in points])
        gauss = np.array([wigner_gaussian_general(params, pt) for pt in points])
    denom = float(gauss @ gauss)
    scale = float(gauss @ exact) / denom if denom > 0 else 0.0
    residual = np.abs(scale * gauss - exact)
    return GaussianFormReport(
        scale=scale,
        max_residual=float(residual.max()),
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        matched=bool(residual.max() <= tol),
        tol=tol,
        n_points=len(points),
    )


def wigner_grid(params: CatParams, grid, evaluator: str = "closed",
                conv: WignerConvention = WignerConvention.KERNEL_MEAN):
    """Evaluate a cat state's Wigner function over a GridSpec; see
    sweep.evaluate_grid for the full record layout."""
    from .sweep import evaluate_grid

    return evaluate_grid(params, grid, evaluator=evaluator, conv=conv)
