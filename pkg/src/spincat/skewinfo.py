"""Variance and Wigner-Yanase skew information against the displaced parity kernel.

The skew information I(rho, Delta) = -1/2 Tr[sqrt(rho), Delta]^2 expands to

    I = Tr[rho Delta^2] - Tr[sqrt(rho) Delta sqrt(rho) Delta],

and this form is evaluated literally, with Delta^2 the computed square of the
truncated kernel rather than the identity it equals in infinite dimension.
Keeping the computed square makes the chain of inequalities

    0 <= I <= Var = Tr[rho Delta^2] - W^2,    I + W^2 <= Tr[rho Delta^2] <= 1

exact at any truncation (a truncated kernel is a contraction), so the
symmetry/asymmetry budget I + W^2 can never spuriously exceed 1.  For pure
states the budget saturates: I + W^2 = 1 up to the neglected Fock tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fockspace import (
    SQRT_EIG_ABORT,
    DensityMatrix,
    adequate_n_max,
    single_mode_kernel,
)
from .states import StateVector
from .wigner import PhasePoint

__all__ = [
    "SymmetryRecord",
    "SkewEvaluator",
    "parity_variance",
    "skew_information",
    "pure_point_values",
    "symmetry_sweep",
]

SKEW_CLAMP = -1e-9
PURITY_TOL = 1e-10
AUDIT_TOL = 1e-7
AUDIT_POINTS = 5


@dataclass(frozen=True)
class SymmetryRecord:
    """Symmetry (W^2) and asymmetry (skew information) of one phase point."""

    point: PhasePoint
    w: float
    w_squared: float
    skew: float
    budget: float  # skew + w_squared; <= 1 always, = 1 for pure states


def _kernel_columns(alpha: complex, block: int) -> np.ndarray:
    """First ``block`` columns of Delta(alpha), rows extended far enough that
    the neglected tail is below ~1e-10."""
    n_eval = adequate_n_max(4.0 * abs(alpha) ** 2, block - 1)
    return single_mode_kernel(alpha, n_eval)[:, :block]


def pure_point_values(psi: StateVector, point: PhasePoint) -> tuple[float, float]:
    """(W, I) for a pure state from the commutator definition.

    For rank-1 sqrt(rho) = rho the skew information reduces to
    I = ||Delta psi||^2 - <psi|Delta|psi>^2, which needs only kernel columns
    over the state's support; every kernel entry is exact, so the only
    truncation error is the Fock tail of Delta psi, controlled by the
    adequate-cutoff rule.
    """
    c = psi.cutoff
    psi4 = psi.amplitudes.reshape(c.dim1, c.dim2)
    c1 = _kernel_columns(point.alpha, c.dim1)
    c2 = _kernel_columns(point.beta, c.dim2)
    dpsi = c1 @ psi4 @ c2.T  # (N1, N2) image of Delta |psi>
    w = complex(np.vdot(psi4, dpsi[: c.dim1, : c.dim2]))
    if abs(w.imag) > 1e-10:
        raise ArithmeticError(f"kernel mean has imaginary residue {w.imag:.3e}")
    norm_sq = float(np.real(np.vdot(dpsi, dpsi)))
    return w.real, norm_sq - w.real**2


class SkewEvaluator:
    """Skew-information engine for one state, reused across phase points.

    The eigendecomposition of rho (hence sqrt(rho)) is computed once on the
    state's support block; each point then costs two kernel-column builds and
    two small matrix products.  Skew values in [-1e-9, 0) are clamped to zero
    and counted; anything more negative raises (the truncation was inadequate).
    """

    def __init__(self, rho: DensityMatrix):
        d1, d2 = rho.mode_support()
        block4 = rho.as_modes()[:d1, :d2, :d1, :d2]
        self.d1, self.d2 = d1, d2
        self.block = np.ascontiguousarray(block4.reshape(d1 * d2, d1 * d2))
        lam, vec = np.linalg.eigh(self.block)
        if lam.min() < SQRT_EIG_ABORT:
            raise ValueError(
                f"state has eigenvalue {lam.min():.3e} < {SQRT_EIG_ABORT}; "
                "not a physical state"
            )
        lam = np.where(lam < 1e-14, 0.0, lam)
        self.sqrt_block = (vec * np.sqrt(lam)) @ vec.conj().T
        self.clamped_points = 0
        # grid sweeps revisit the same axis values; cache kernel columns
        self._columns_cache: dict[tuple[int, complex], np.ndarray] = {}

    def _columns(self, mode: int, value: complex) -> np.ndarray:
        key = (mode, complex(value))
        cols = self._columns_cache.get(key)
        if cols is None:
            cols = _kernel_columns(value, self.d1 if mode == 1 else self.d2)
            if len(self._columns_cache) > 4096:
                self._columns_cache.clear()
            self._columns_cache[key] = cols
        return cols

    def values(self, point: PhasePoint) -> tuple[float, float, float]:
        """(W, variance, skew) at one phase point."""
        c1 = self._columns(1, point.alpha)
        c2 = self._columns(2, point.beta)
        k1, g1 = c1[: self.d1, :], c1.conj().T @ c1
        k2, g2 = c2[: self.d2, :], c2.conj().T @ c2
        block4 = self.block.reshape(self.d1, self.d2, self.d1, self.d2)
        w = np.einsum("abxy,xa,yb->", block4, k1, k2, optimize=True)
        if abs(w.imag) > 1e-10:
            raise ArithmeticError(f"kernel mean has imaginary residue {w.imag:.3e}")
        w = w.real
        # Tr[rho Delta^2]: the block of Delta^2 is the column Gram matrix
        t1 = np.real(np.einsum("abxy,xa,yb->", block4, g1, g2, optimize=True))
        delta_block = np.kron(k1, k2)
        sd = self.sqrt_block @ delta_block
        t2 = float(np.real(np.vdot(sd.conj().T, sd)))  # Tr[(sqrt(rho) Delta)^2]
        skew = t1 - t2
        if skew < SKEW_CLAMP:
            raise ArithmeticError(
                f"skew information {skew:.3e} below clamp threshold; increase "
                "the truncation"
            )
        if skew < 0.0:
            self.clamped_points += 1
            skew = 0.0
        return w, t1 - w * w, skew


def parity_variance(rho: DensityMatrix, point: PhasePoint) -> float:
    """Var(rho, Delta) = Tr[rho Delta^2] - W^2.

    Equals 1 - W^2 up to the truncation tail, since Delta^2 = 1 on the
    untruncated space.
    """
    d1, d2 = rho.mode_support()
    block4 = rho.as_modes()[:d1, :d2, :d1, :d2]
    c1 = _kernel_columns(point.alpha, d1)
    c2 = _kernel_columns(point.beta, d2)
    k1, g1 = c1[:d1, :], c1.conj().T @ c1
    k2, g2 = c2[:d2, :], c2.conj().T @ c2
    w = np.einsum("abxy,xa,yb->", block4, k1, k2, optimize=True)
    t1 = np.real(np.einsum("abxy,xa,yb->", block4, g1, g2, optimize=True))
    return float(t1 - w.real**2)


def skew_information(rho: DensityMatrix, point: PhasePoint) -> float:
    """One-shot commutator-definition skew information; for repeated points on
    the same state use SkewEvaluator directly."""
    return SkewEvaluator(rho).values(point)[2]


def _pure_vector(rho: DensityMatrix) -> StateVector:
    purity = rho.purity()
    if abs(purity - 1.0) > PURITY_TOL:
        raise ValueError(
            f"pure_hint set but purity is {purity}; state is not pure"
        )
    lam, vec = np.linalg.eigh(rho.entries)
    return StateVector(rho.cutoff, np.ascontiguousarray(vec[:, -1]))


def symmetry_sweep(rho: DensityMatrix, grid, pure_hint: bool = False,
                   seed: int = 0) -> list[SymmetryRecord]:
    """One SymmetryRecord per grid point, row-major over the grid axes.

    With ``pure_hint`` the skew column is the fast path 1 - W^2, spot-audited
    against the commutator definition at 5 random grid points (tolerance
    1e-7); an audit failure aborts, since it means the state was not actually
    pure or the truncation is inadequate.
    """
    coords = grid.coordinates()
    records: list[SymmetryRecord] = []
    if pure_hint:
        psi = _pure_vector(rho)
        for q1, p1, q2, p2 in coords:
            pt = PhasePoint.from_quadratures(q1, p1, q2, p2)
            w, _ = pure_point_values(psi, pt)
            records.append(SymmetryRecord(pt, w, w * w, 1.0 - w * w, 1.0))
        rng = np.random.default_rng(seed)
        audit_idx = rng.choice(len(records), size=min(AUDIT_POINTS, len(records)),
                               replace=False)
        engine = SkewEvaluator(rho)
        for i in audit_idx:
            rec = records[i]
            _, _, skew = engine.values(rec.point)
            if abs(skew - rec.skew) > AUDIT_TOL:
                raise RuntimeError(
                    f"pure-path audit failed at {rec.point}: fast skew "
                    f"{rec.skew} vs commutator {skew}"
                )
        return records
    engine = SkewEvaluator(rho)
    for q1, p1, q2, p2 in coords:
        pt = PhasePoint.from_quadratures(q1, p1, q2, p2)
        w, _, skew = engine.values(pt)
        records.append(SymmetryRecord(pt, w, w * w, skew, skew + w * w))
    return records
