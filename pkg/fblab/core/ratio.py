"""Ratio functions R_n = λ_n J_{ν+1}(λ_n x)/J_ν(λ_n x) and their Mittag-Leffler parts."""
import math
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np
from loguru import logger

from fblab.config import RatioConfig
from fblab.core.bessel import Order, ZeroTable, as_order, bessel_j, compute_zeros
from fblab.schemas import Status
from fblab.utils.exceptions import DomainError, PoleProximityError

ArrayLike = Union[float, np.ndarray]

POLE_THRESHOLD = 1e-9
# Direct quotient is used up to this x in auto mode; it loses digits as J_ν(λx) -> 0 at x = 1.
DIRECT_LIMIT = 0.9
POWER_SUMS = 24


class Enclosure(NamedTuple):
    """Value of a truncated series with a certified interval for its tail."""

    value: float
    lower: float
    upper: float
    status: Status


def pin2_term(u: ArrayLike) -> ArrayLike:
    """
    g(u) = 1/u² - π²/(4 sin²(πu/2)) on [0, 1].

    Bounded between 1 - π²/4 and 0; the Laurent expansion of csc² is used
    near u = 0 where the two terms cancel.
    """
    u_arr = np.asarray(u, dtype=float)
    u = np.atleast_1d(u_arr).ravel()
    out = np.empty_like(u)
    small = u < 0.05
    z = np.pi * u[small] / 2.0
    z2 = z * z
    out[small] = -(np.pi**2 / 4.0) * (1.0 / 3.0 + z2 / 15.0 + 2.0 * z2**2 / 189.0 + z2**3 / 675.0
                                      + 2.0 * z2**4 / 10395.0)
    big = u[~small]
    out[~small] = 1.0 / big**2 - np.pi**2 / (4.0 * np.sin(np.pi * big / 2.0) ** 2)
    out = out.reshape(u_arr.shape)
    return out if out.ndim else float(out)


class RatioEvaluator:
    """Evaluates R_n^ν, S_n^ν, R^ν - R_n^ν and (R^ν)' from a zero table."""

    def __init__(self, zeros: ZeroTable, truncation: int = 512):
        """
        Initialize the evaluator.

        Args:
            zeros: Zero table with more than ``truncation`` zeros; zeros
                beyond the truncation sharpen the tail estimates.
            truncation: Number M of explicitly summed Mittag-Leffler terms.

        Raises:
            DomainError: If M < 10 or the table is too short.
        """
        if truncation < 10:
            raise DomainError(f"truncation must be >= 10, got {truncation}")
        if len(zeros) <= truncation:
            raise DomainError(f"zero table has {len(zeros)} zeros, need more than {truncation}")
        self.order = zeros.order
        self.zeros = zeros
        self.truncation = truncation
        self._head = zeros.zeros[:truncation]
        self._power_tails = self._tail_power_sums()
        if len(zeros) < 2 * truncation:
            logger.debug(f"Short zero table ({len(zeros)}) for truncation {truncation}; tails use asymptotics")

    @classmethod
    def build(cls, order: Union[Order, float], n_max: int = 0, config: Optional[RatioConfig] = None) -> "RatioEvaluator":
        """
        Compute a zero table sized for the truncation and index range.

        Args:
            order: Bessel order.
            n_max: Largest index the caller will request.
            config: Ratio configuration.
        """
        config = config or RatioConfig()
        truncation = max(config.truncation, 4 * n_max)
        count = max(config.table_factor * truncation, truncation + n_max + 1)
        return cls(compute_zeros(as_order(order), count), truncation)

    @property
    def nu(self) -> float:
        return self.order.nu

    @property
    def max_index(self) -> int:
        """Largest n for which S_n^ν tails are resolved."""
        return self.truncation // 4

    def lam(self, n: int) -> float:
        return self.zeros.zero(n)

    def _tail_power_sums(self) -> np.ndarray:
        """P_j = Σ_{k>M} λ_k^{-2j} for j = 1..POWER_SUMS."""
        nu = self.nu
        lam = self.zeros.zeros
        M = self.truncation
        L = len(lam)
        sums = np.empty(POWER_SUMS)
        # Rayleigh: Σ λ_k^{-2} = 1/(4ν + 4)
        sums[0] = 1.0 / (4.0 * nu + 4.0) - math.fsum((1.0 / self._head**2).tolist())

        A = math.pi * (L + 0.5) + self.order.mcmahon_offset
        e = (4.0 * nu * nu - 1.0) / 8.0
        stored = lam[M:]
        for j in range(2, POWER_SUMS + 1):
            integral = A ** (1 - 2 * j) / (math.pi * (2 * j - 1))
            midpoint = 2 * j * math.pi / 24.0 * A ** (-2 * j - 1)
            correction = 2 * j * e * A ** (-2 * j - 1) / (math.pi * (2 * j + 1))
            sums[j - 1] = math.fsum((stored ** (-2.0 * j)).tolist()) + integral + midpoint + correction
        return sums

    def _tail_series(self, c: np.ndarray, odd_weights: bool = False) -> np.ndarray:
        """Σ_j w_j c^{2(j-1)} P_j with w_j = 1 or 2j - 1."""
        c2 = c * c
        weights = 2.0 * np.arange(1, POWER_SUMS + 1) - 1.0 if odd_weights else np.ones(POWER_SUMS)
        coeffs = weights * self._power_tails
        result = np.full_like(c, coeffs[-1])
        for a in coeffs[-2::-1]:
            result = result * c2 + a
        return result

    def _check_index(self, n: int) -> None:
        if not 1 <= n <= self.max_index:
            raise DomainError(
                f"index {n} outside 1..{self.max_index}; raise the truncation above {4 * n}"
            )

    def poles(self, n: int) -> np.ndarray:
        """Interior poles λ_k/λ_n, k < n, of R_n^ν."""
        self._check_index(n)
        return self.zeros.zeros[: n - 1] / self.lam(n)

    def last_pole_midpoint(self, n: int) -> float:
        """Midpoint between the last interior pole of R_n and 1 (0 for n = 1)."""
        if n == 1:
            return 0.0
        return 0.5 * (1.0 + self.zeros.zeros[n - 2] / self.lam(n))

    def s_function(self, n: int, x: ArrayLike) -> ArrayLike:
        """
        S_n^ν(x) = Σ_{k≠n} 2x/((λ_k/λ_n)² - x²) on [0, 1].

        The first M terms are summed directly, the rest through the power
        sums P_j; infinite at the interior poles of R_n.
        """
        self._check_index(n)
        x_arr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(x_arr).ravel()
        if np.any((xs < 0) | (xs > 1)):
            raise DomainError("S_n is evaluated on [0, 1]")
        lam_n = self.lam(n)
        r = (self._head / lam_n) ** 2
        r[n - 1] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            head = np.sum(2.0 * xs[:, None] / (r[None, :] - xs[:, None] ** 2), axis=1)
        tail = 2.0 * xs * lam_n**2 * self._tail_series(lam_n * xs)
        out = (head + tail).reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def s_function_enclosure(self, n: int, x: float, tolerance: Optional[float] = None) -> Enclosure:
        """
        S_n^ν(x) with a certified tail interval.

        The tail Σ_{k>M} 2xλ_n²/(λ_k² - λ_n²x²) lies between 2xλ_n²P_1 and
        2xλ_n²P_1/(1 - ρ), ρ = (λ_n x/λ_{M+1})².

        Returns:
            Enclosure; status is inconclusive when the interval is wider
            than ``tolerance``.
        """
        value = float(self.s_function(n, x))
        lam_n = self.lam(n)
        r = (self._head / lam_n) ** 2
        r[n - 1] = np.inf
        head = math.fsum((2.0 * x / (r - x * x)).tolist())
        rho = (lam_n * x / self.zeros.zero(self.truncation + 1)) ** 2
        tail_low = 2.0 * x * lam_n**2 * self._power_tails[0]
        tail_high = tail_low / (1.0 - rho)
        lower, upper = head + tail_low, head + tail_high
        status = Status.PASS
        if tolerance is not None and upper - lower > tolerance:
            status = Status.INCONCLUSIVE
        return Enclosure(value, lower, upper, status)

    def ratio_r(self, n: int, x: ArrayLike, mode: str = "auto") -> ArrayLike:
        """
        R_n^ν(x) = λ_n J_{ν+1}(λ_n x)/J_ν(λ_n x).

        Args:
            n: Index.
            x: Points in (0, 1).
            mode: "direct" quotient, "series" = 1/(1-x) - 1/(1+x) + S_n,
                or "auto" (direct up to x = 0.9, series beyond).

        Raises:
            PoleProximityError: Within 1e-9 of an interior pole, where both
                modes are ill-conditioned.
        """
        self._check_index(n)
        x_arr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(x_arr).ravel()
        if np.any((xs <= 0) | (xs >= 1)):
            raise DomainError("R_n is evaluated on (0, 1)")
        poles = self.poles(n)
        if len(poles):
            distance = np.abs(xs[:, None] - poles[None, :])
            close = np.argwhere(distance < POLE_THRESHOLD)
            if len(close):
                i, k = close[0]
                raise PoleProximityError(
                    f"x={xs[i]!r} within {distance[i, k]:.2e} of pole lambda_{k + 1}/lambda_{n}",
                    pole_index=int(k) + 1,
                    distance=float(distance[i, k]),
                )

        if mode == "direct":
            out = self._direct(n, xs)
        elif mode == "series":
            out = self._series(n, xs)
        elif mode == "auto":
            out = np.empty_like(xs)
            direct = xs <= DIRECT_LIMIT
            out[direct] = self._direct(n, xs[direct])
            out[~direct] = self._series(n, xs[~direct])
        else:
            raise DomainError(f"unknown ratio mode: {mode}")
        out = out.reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def _direct(self, n: int, xs: np.ndarray) -> np.ndarray:
        lam_n = self.lam(n)
        z = lam_n * xs
        return lam_n * bessel_j(self.order.next, z) / bessel_j(self.order, z)

    def _series(self, n: int, xs: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 - xs) - 1.0 / (1.0 + xs) + self.s_function(n, xs)

    def diff_r(self, n: int, x: ArrayLike) -> ArrayLike:
        """
        R^ν(x) - R_n^ν(x) = S_1^ν(x) - S_n^ν(x).

        The endpoint singularities cancel; the interior poles of R_n remain.
        """
        self._check_index(n)
        x_arr = np.asarray(x, dtype=float)
        if n == 1:
            out = np.zeros_like(x_arr)
            return out if out.ndim else 0.0
        return self.s_function(1, x_arr) - self.s_function(n, x_arr)

    def endpoint_slopes(self, n: int, h: float = 1e-3) -> Tuple[float, float]:
        """
        Limits of (R - R_n)(x)/x at 0 and (R - R_n)(x)/(1 - x) at 1, by Richardson extrapolation.

        The quotient at 0 is even in x, so one step removes the h² term;
        at 1 the first step removes the h term.
        """
        if n < 2:
            raise DomainError("endpoint slopes are defined for n >= 2")

        def left(step: float) -> float:
            return float(self.diff_r(n, step)) / step

        def right(step: float) -> float:
            return float(self.diff_r(n, 1.0 - step)) / step

        at_zero = (4.0 * left(h / 2.0) - left(h)) / 3.0
        at_one = 2.0 * right(h / 2.0) - right(h)
        return at_zero, at_one

    def endpoint_slope_targets(self, n: int) -> Tuple[float, float]:
        """-(λ_n² - λ_1²)/(2ν+2) at 0 and (λ_n² - λ_1²)/3 at 1."""
        gap = self.lam(n) ** 2 - self.lam(1) ** 2
        return -gap / (2.0 * self.nu + 2.0), gap / 3.0

    def diff_r_sign_changes(self, n: int, x: np.ndarray) -> int:
        """Sign changes of R - R_n between grid neighbours not separated by a pole."""
        x = np.sort(np.asarray(x, dtype=float))
        values = self.diff_r(n, x)
        poles = self.poles(n) if n > 1 else np.array([])
        changes = 0
        for a, b, fa, fb in zip(x[:-1], x[1:], values[:-1], values[1:]):
            if not (np.isfinite(fa) and np.isfinite(fb)):
                continue
            if np.any((poles > a) & (poles < b)):
                continue
            if fa * fb < 0:
                changes += 1
        return changes

    def r_prime_series(self, x: ArrayLike) -> ArrayLike:
        """2λ_1² Σ_{k≥2} (λ_k² + λ_1²x²)/(λ_k² - λ_1²x²)² on [0, 1]."""
        x_arr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(x_arr).ravel()
        lam_1 = self.lam(1)
        c = lam_1 * xs
        u = self._head[1:] ** 2
        head = np.sum((u[None, :] + c[:, None] ** 2) / (u[None, :] - c[:, None] ** 2) ** 2, axis=1)
        out = (2.0 * lam_1**2 * (head + self._tail_series(c, odd_weights=True))).reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def r_prime(self, x: ArrayLike) -> ArrayLike:
        """(R^ν)'(x) = 1/(1+x)² + 1/(1-x)² + the positive series term."""
        x_arr = np.asarray(x, dtype=float)
        if np.any((x_arr <= 0) | (x_arr >= 1)):
            raise DomainError("R' is evaluated on (0, 1)")
        return 1.0 / (1.0 + x_arr) ** 2 + 1.0 / (1.0 - x_arr) ** 2 + self.r_prime_series(x_arr)

    def modified_gap(self, x: ArrayLike) -> ArrayLike:
        """R^ν(x) - 1/(1-x) = S^ν(x) - 1/(1+x), increasing from -1 to ν + 1/2."""
        x_arr = np.asarray(x, dtype=float)
        return self.s_function(1, x_arr) - 1.0 / (1.0 + x_arr)
