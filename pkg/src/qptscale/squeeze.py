"""Single-mode Bogoliubov relation between two ground-state bases.

One vacuum expanded over the other basis is a squeezed vacuum: only even
number states appear, with amplitudes controlled by tanh(r) where r is half
the difference of the two Bogoliubov angles.  Everything here is a metric
quantity (absolute overlaps), so both phase angles of the transformation are
fixed to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, NumericError

R_CAP_DEFAULT = 20.0


@dataclass(frozen=True)
class SqueezeMap:
    """Relative squeeze between two single-mode ground-state bases.

    P11 = cosh(r) and Q11 = sinh(r) are the coefficients mixing creation and
    annihilation operators of the two bases; bosonic commutation enforces
    P11^2 - Q11^2 = 1.
    """

    r: float
    theta_c: float = 0.0
    theta_r: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise InputError("squeeze parameter must be finite")
        if abs(self.r) > 700.0:
            raise InputError("squeeze parameter too large: cosh(r) overflows")
        if self.theta_c != 0.0 or self.theta_r != 0.0:
            raise InputError("phase angles are fixed to zero for metric quantities")

    @property
    def P11(self) -> float:
        return math.cosh(self.r)

    @property
    def Q11(self) -> float:
        return math.sinh(self.r)

    @property
    def q(self) -> float:
        """Expansion parameter tanh(r)."""
        return math.tanh(self.r)

    def check_invariants(self) -> None:
        # P11^2 - Q11^2 = 1 within 1e-12 wherever float64 can resolve it;
        # the cancellation in cosh^2 - sinh^2 grows like eps * cosh(r)^2
        prod = (self.P11 - self.Q11) * (self.P11 + self.Q11)
        tol = max(1e-12, 8.0 * 2.3e-16 * self.P11**2)
        if abs(prod - 1.0) > tol:
            raise NumericError(f"P11^2 - Q11^2 = {prod!r} deviates from 1")
        if self.P11 < 1.0:
            raise NumericError("P11 must be >= 1")


def relative_map(theta1: float, theta2: float) -> SqueezeMap:
    """Squeeze map between the ground bases at Bogoliubov angles theta1, theta2.

    The relative squeeze is r = (theta2 - theta1) / 2.
    """
    if not (math.isfinite(theta1) and math.isfinite(theta2)):
        raise InputError("angles must be finite")
    return SqueezeMap(r=(theta2 - theta1) / 2.0)


@dataclass(frozen=True)
class GroundExpansion:
    """Even-number-state amplitudes of one vacuum in the other basis.

    ``amplitudes[n]`` is the coefficient of the 2n-th number state; odd
    states are absent by parity.  ``tail_bound`` bounds the probability
    weight beyond the truncation.
    """

    amplitudes: np.ndarray
    n_max: int
    tail_bound: float
    r: float


def ground_expansion(map: SqueezeMap, n_max: int, *,
                     r_cap: float = R_CAP_DEFAULT) -> GroundExpansion:
    """Expansion of the mapped vacuum over even number states.

    a_{2n} = (cosh r)^{-1/2} * sqrt((2n-1)!!/(2n)!!) * tanh(r)^n, accumulated
    multiplicatively to avoid factorial overflow.
    """
    if n_max < 0:
        raise InputError("n_max must be nonnegative")
    if abs(map.r) >= r_cap:
        raise DomainError(
            f"|r| = {abs(map.r):.3f} >= cap {r_cap}: refine the parameter step")
    q = map.q
    amps = np.empty(n_max + 1)
    amps[0] = math.cosh(map.r) ** -0.5
    for n in range(n_max):
        amps[n + 1] = amps[n] * q * math.sqrt((2 * n + 1) / (2 * n + 2))
    tail = float(amps[-1] ** 2 * math.sinh(map.r) ** 2)
    return GroundExpansion(amplitudes=amps, n_max=n_max, tail_bound=tail, r=map.r)


def fidelity(map: SqueezeMap) -> float:
    """Vacuum-vacuum overlap |<0_1|0_2>| = (1 - tanh^2 r)^{1/4} = cosh(r)^{-1/2}."""
    return 1.0 / math.sqrt(math.cosh(map.r))


def _signed_overlaps(map: SqueezeMap, n_rows: int, n_cols: int) -> np.ndarray:
    """Signed overlaps S[n, m] = <n_1|m_2> via two three-term recursions.

    Row 0 is seeded by annihilating the bra vacuum; each column then climbs
    in n.  Both recursions follow from inserting the Bogoliubov relation in
    matrix elements of the annihilators, so no factorials ever appear.
    """
    p = map.P11
    q = map.q
    s = np.zeros((n_rows + 1, n_cols + 1))
    s[0, 0] = math.cosh(map.r) ** -0.5
    for m in range(1, n_cols):
        s[0, m + 1] = -q * math.sqrt(m / (m + 1)) * s[0, m - 1]
    for m in range(n_cols + 1):
        for n in range(n_rows):
            acc = q * math.sqrt(n / (n + 1)) * s[n - 1, m] if n else 0.0
            if m:
                acc += math.sqrt(m / (n + 1)) * s[n, m - 1] / p
            s[n + 1, m] = acc
    return s


def overlap_matrix(map: SqueezeMap, n_max: int, *, m_max: int | None = None,
                   tol_trunc: float = 1e-10) -> np.ndarray:
    """Metric overlaps C[n, m] = |<n_1|m_2>| for n <= n_max, m <= m_max.

    Entries with odd n+m vanish identically (parity selection of the
    quadratic Bogoliubov relation).  Every returned column must carry at
    least 1 - tol_trunc of its probability within the n_max rows, otherwise
    a NumericError names the first offending column; pass more rows or fewer
    columns in that case.
    """
    if n_max < 0:
        raise InputError("n_max must be nonnegative")
    m_max = n_max if m_max is None else m_max
    if m_max < 0:
        raise InputError("m_max must be nonnegative")
    c = np.abs(_signed_overlaps(map, n_max, m_max))
    if tol_trunc is not None:
        sums = np.sum(c * c, axis=0)
        bad = np.nonzero(sums < 1.0 - tol_trunc)[0]
        if bad.size:
            raise NumericError(
                f"overlap column {bad[0]} holds weight {sums[bad[0]]:.12f} "
                f"< 1 - {tol_trunc:g}; increase n_max or reduce m_max")
    return c


def participation_ratio(map: SqueezeMap, m: int, n_max: int) -> float:
    """Participation ratio chi = 1 / sum_n C_nm^4 of basis state m.

    Requires the overlap column to be converged (probability weight within
    1e-10 of unity) at the given n_max.
    """
    if m < 0:
        raise InputError("m must be nonnegative")
    if n_max < 0:
        raise InputError("n_max must be nonnegative")
    col = _signed_overlaps(map, n_max, m)[:, m]
    weight = float(np.sum(col**2))
    if weight < 1.0 - 1e-10:
        raise NumericError(
            f"overlap column {m} unconverged at n_max={n_max}: weight {weight:.12f}")
    return float(1.0 / np.sum(col**4))
