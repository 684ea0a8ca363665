"""Bessel functions of the first kind, their positive zeros and zero-sum identities."""
import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np
from loguru import logger
from scipy import special

from fblab.config import ZeroConfig
from fblab.schemas import IdentityCheck, IdentityReport, Status, ZeroTableSchema
from fblab.utils.exceptions import AccuracyLossWarning, DomainError, ZeroCertificationError

# Ascending series is used up to this argument, scipy's large-argument path beyond.
SERIES_CUTOFF = 4.0
SERIES_TERMS = 40
# Below this argument J_{3/2} is taken from the series (closed form cancels).
CLOSED_FORM_MIN_Z = 0.5

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Order:
    """Order ν > -1 of a Bessel function."""

    nu: float

    def __post_init__(self):
        if not (isinstance(self.nu, (int, float, np.floating)) and self.nu > -1):
            raise DomainError(f"Bessel order must satisfy nu > -1, got {self.nu}")
        object.__setattr__(self, "nu", float(self.nu))

    @property
    def next(self) -> "Order":
        """The order ν + 1."""
        return Order(self.nu + 1.0)

    @property
    def mcmahon_offset(self) -> float:
        """D_ν = π(2ν - 1)/4, the phase of the zero asymptotics λ_n ≈ πn + D_ν."""
        return math.pi * (2.0 * self.nu - 1.0) / 4.0

    @property
    def envelope(self) -> float:
        """Upper end of the argument range with a 1e-12 relative accuracy guarantee."""
        return 50.0 * (1.0 + abs(self.nu))


def as_order(order: Union[Order, float]) -> Order:
    """Coerce a float into an Order."""
    return order if isinstance(order, Order) else Order(order)


class BesselValue(NamedTuple):
    """Value of J_ν together with the accuracy-loss flag."""

    value: ArrayLike
    accuracy_loss: bool


def _series(nu: float, z: np.ndarray) -> np.ndarray:
    """Ascending power series (z/2)^ν Σ (-z²/4)^k / (k! Γ(ν+k+1))."""
    q = -(z * z) / 4.0
    term = np.full_like(z, special.rgamma(nu + 1.0))
    total = term.copy()
    for k in range(1, SERIES_TERMS):
        term = term * q / (k * (nu + k))
        total += term
    return np.power(z / 2.0, nu) * total


def _closed_form(nu: float, z: np.ndarray) -> np.ndarray:
    """Elementary forms of J_{-1/2}, J_{1/2} and J_{3/2}."""
    scale = np.sqrt(2.0 / (np.pi * z))
    if nu == -0.5:
        return scale * np.cos(z)
    if nu == 0.5:
        return scale * np.sin(z)
    return scale * (np.sin(z) / z - np.cos(z))


def _evaluate(nu: float, z: np.ndarray, closed_form: bool = True) -> np.ndarray:
    """Evaluate J_ν on an array of positive arguments without validation."""
    if closed_form and nu in (-0.5, 0.5):
        return _closed_form(nu, z)

    out = np.empty_like(z)
    small = z <= SERIES_CUTOFF
    if closed_form and nu == 1.5:
        small = z < CLOSED_FORM_MIN_Z
        out[~small] = _closed_form(nu, z[~small])
    else:
        out[~small] = special.jv(nu, z[~small])
    out[small] = _series(nu, z[small])
    return out


def _validated(z: ArrayLike) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if arr.size and not np.all(arr > 0):
        raise DomainError("Bessel argument must be positive")
    return arr


def bessel_j(order: Union[Order, float], z: ArrayLike, closed_form: bool = True) -> ArrayLike:
    """
    Evaluate the Bessel function of the first kind J_ν(z) for z > 0.

    Uses the ascending series for z <= 4 and scipy's evaluation beyond;
    ν ∈ {-1/2, 1/2, 3/2} dispatch to elementary closed forms unless
    ``closed_form`` is False.

    Args:
        order: Order ν > -1.
        z: Positive argument (scalar or array).
        closed_form: Use elementary forms for half-integer orders.

    Returns:
        J_ν(z) with the shape of ``z``.

    Raises:
        DomainError: If z <= 0 or ν <= -1.
    """
    order = as_order(order)
    arr = _validated(z)
    values = _evaluate(order.nu, np.atleast_1d(arr), closed_form=closed_form)
    if arr.ndim == 0:
        return float(values[0])
    return values.reshape(arr.shape)


def bessel_j_flagged(order: Union[Order, float], z: ArrayLike) -> BesselValue:
    """
    Evaluate J_ν(z) and flag arguments outside the accuracy envelope.

    Outside z <= 50(1 + |ν|) the value is still returned; an
    AccuracyLossWarning is issued and the flag is set.
    """
    order = as_order(order)
    values = bessel_j(order, z)
    loss = bool(np.any(np.asarray(z) > order.envelope))
    if loss:
        warnings.warn(
            f"J_{order.nu} evaluated beyond z = {order.envelope:g}; relative accuracy not guaranteed",
            AccuracyLossWarning,
            stacklevel=2,
        )
    return BesselValue(values, loss)


def bessel_j_deriv(order: Union[Order, float], z: ArrayLike) -> ArrayLike:
    """
    Derivative J_ν'(z) = (ν/z) J_ν(z) - J_{ν+1}(z).

    Raises:
        DomainError: As bessel_j.
    """
    order = as_order(order)
    arr = _validated(z)
    return order.nu / arr * bessel_j(order, arr) - bessel_j(order.next, arr)


class ZeroTable:
    """Immutable table of the first positive zeros of J_ν with sign-change brackets."""

    def __init__(self, order: Order, zeros: np.ndarray, brackets: np.ndarray, tolerance: float):
        """
        Initialize a zero table.

        Args:
            order: Bessel order.
            zeros: Increasing positive zeros λ_1 < λ_2 < ...
            brackets: Array of shape (N, 2) enclosing each zero.
            tolerance: Absolute accuracy the zeros were refined to.

        Raises:
            ZeroCertificationError: If the table is not increasing or a zero
                lies outside its bracket.
        """
        zeros = np.array(zeros, dtype=float)
        brackets = np.array(brackets, dtype=float).reshape(-1, 2)
        if len(zeros) != len(brackets):
            raise ZeroCertificationError("zeros and brackets differ in length")
        if len(zeros) and (zeros[0] <= 0 or np.any(np.diff(zeros) <= 0)):
            raise ZeroCertificationError("zeros must be positive and strictly increasing")
        outside = np.nonzero((zeros < brackets[:, 0]) | (zeros > brackets[:, 1]))[0]
        if len(outside):
            raise ZeroCertificationError(
                f"zero {outside[0] + 1} lies outside its bracket", index=int(outside[0]) + 1
            )
        zeros.setflags(write=False)
        brackets.setflags(write=False)
        self.order = order
        self.zeros = zeros
        self.brackets = brackets
        self.tolerance = float(tolerance)

    @property
    def nu(self) -> float:
        return self.order.nu

    def __len__(self) -> int:
        return len(self.zeros)

    def zero(self, n: int) -> float:
        """The n-th zero λ_n (1-based)."""
        if not 1 <= n <= len(self.zeros):
            raise DomainError(f"zero index {n} outside 1..{len(self.zeros)}")
        return float(self.zeros[n - 1])

    def verify_brackets(self) -> None:
        """
        Re-check that J_ν changes sign across every bracket.

        Raises:
            ZeroCertificationError: Naming the first offending index.
        """
        lo = _evaluate(self.nu, self.brackets[:, 0].copy())
        hi = _evaluate(self.nu, self.brackets[:, 1].copy())
        bad = np.nonzero(np.sign(lo) * np.sign(hi) >= 0)[0]
        if len(bad):
            index = int(bad[0]) + 1
            raise ZeroCertificationError(f"no sign change of J_{self.nu} in bracket {index}", index=index)

    def interlaces_with(self, upper: "ZeroTable") -> bool:
        """Check λ_{n,ν} < λ_{n,ν+1} < λ_{n+1,ν} over the common index range."""
        count = min(len(self) - 1, len(upper))
        if count <= 0:
            return True
        below = self.zeros[:count] < upper.zeros[:count]
        above = upper.zeros[:count] < self.zeros[1 : count + 1]
        return bool(np.all(below) and np.all(above))

    def mcmahon_deviation(self) -> np.ndarray:
        """|λ_n - (πn + D_ν)| for every stored index."""
        n = np.arange(1, len(self) + 1)
        return np.abs(self.zeros - (np.pi * n + self.order.mcmahon_offset))

    def to_schema(self) -> ZeroTableSchema:
        return ZeroTableSchema(
            nu=self.nu,
            zeros=self.zeros.tolist(),
            brackets=self.brackets.tolist(),
            tolerance=self.tolerance,
        )

    def to_json(self) -> str:
        return self.to_schema().model_dump_json()

    @classmethod
    def from_json(cls, document: str) -> "ZeroTable":
        """
        Load a table from JSON and re-verify every bracket.

        Raises:
            ZeroCertificationError: If any bracket fails verification.
        """
        schema = ZeroTableSchema.model_validate(json.loads(document))
        table = cls(Order(schema.nu), np.array(schema.zeros), np.array(schema.brackets), schema.tolerance)
        table.verify_brackets()
        logger.debug(f"Loaded and re-verified {len(table)} zeros of J_{table.nu}")
        return table


def _scan_brackets(nu: float, count: int, step: float) -> tuple:
    """Locate the first ``count`` sign changes of J_ν on a uniform scan."""
    offset = math.pi * (2.0 * nu - 1.0) / 4.0
    upper = math.pi * (count + 1) + abs(offset) + 2.0
    while True:
        grid = np.concatenate([
            np.geomspace(1e-6, step, 16, endpoint=False),
            np.arange(step, upper + step, step),
        ])
        positive = _evaluate(nu, grid) >= 0
        idx = np.nonzero(positive[:-1] != positive[1:])[0]
        if len(idx) >= count:
            idx = idx[:count]
            return grid[idx], grid[idx + 1]
        logger.debug(f"Zero scan for nu={nu} found {len(idx)} < {count} sign changes, extending")
        upper *= 1.5


def compute_zeros(order: Union[Order, float], count: int, config: Optional[ZeroConfig] = None) -> ZeroTable:
    """
    Compute the first ``count`` positive zeros of J_ν.

    Sign changes on a scan give brackets; each zero is refined by Newton's
    method seeded with πn + D_ν and safeguarded by bisection inside its
    bracket. The stored bracket is a narrow interval around the refined zero
    with a verified sign change.

    Args:
        order: Bessel order.
        count: Number of zeros.
        config: Zero search configuration.

    Returns:
        Certified ZeroTable.

    Raises:
        DomainError: If count < 1.
        ZeroCertificationError: If refinement or certification fails.
    """
    order = as_order(order)
    config = config or ZeroConfig()
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    nu = order.nu

    lo, hi = _scan_brackets(nu, count, config.scan_step)
    lo, hi = lo.copy(), hi.copy()
    positive_lo = _evaluate(nu, lo) >= 0

    n = np.arange(1, count + 1)
    guess = np.pi * n + order.mcmahon_offset
    x = np.where((guess > lo) & (guess < hi), guess, 0.5 * (lo + hi))

    converged = np.zeros(count, dtype=bool)
    for iteration in range(config.max_iterations):
        f = _evaluate(nu, x)
        fp = nu / x * f - _evaluate(nu + 1.0, x)
        same = (f >= 0) == positive_lo
        lo = np.where(same, x, lo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - f / fp
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        x_new = np.where(inside, newton, 0.5 * (lo + hi))
        tol = np.maximum(config.tolerance, 4.0 * np.spacing(x_new))
        converged = (np.abs(x_new - x) <= tol) | (hi - lo <= tol)
        x = x_new
        if np.all(converged):
            logger.debug(f"Refined {count} zeros of J_{nu} in {iteration + 1} iterations")
            break
    else:
        index = int(np.nonzero(~converged)[0][0]) + 1
        raise ZeroCertificationError(f"zero {index} of J_{nu} did not converge", index=index)

    brackets = _certify(nu, x)
    table = ZeroTable(order, x, brackets, config.tolerance)
    logger.info(f"Computed {count} zeros of J_{nu} (largest {x[-1]:.6f})")
    return table


def _certify(nu: float, zeros: np.ndarray) -> np.ndarray:
    """Narrow brackets around refined zeros with a verified sign change."""
    width = 1e-7 * np.maximum(1.0, zeros)
    for _ in range(3):
        lo, hi = zeros - width, zeros + width
        ok = np.sign(_evaluate(nu, lo)) * np.sign(_evaluate(nu, hi)) < 0
        if np.all(ok):
            return np.column_stack([lo, hi])
        width = np.where(ok, width, width * 100.0)
    index = int(np.nonzero(~ok)[0][0]) + 1
    raise ZeroCertificationError(f"cannot certify a sign change around zero {index} of J_{nu}", index=index)


def identity_residuals(
    table: ZeroTable, n: int, tail: int, tolerance: Optional[float] = None
) -> IdentityReport:
    """
    Check the Rayleigh sum and both Calogero sums against their closed forms.

    Each identity is summed over k <= tail; the neglected tail is enclosed
    by integral comparison assuming πk + D_ν - 1 <= λ_k <= πk + D_ν + 1 for
    every k > tail. The assumption is checked on the last ten summed zeros
    and on every stored zero past the tail; zeros beyond the table are
    taken on trust, so a report is INCONCLUSIVE whenever a checked zero
    violates it. An identity passes when target minus partial sum lies in
    the tail interval, up to a rounding allowance.

    Args:
        table: Zero table with at least ``tail`` zeros.
        n: Index of the distinguished zero in the Calogero sums.
        tail: Number of summed terms; 0 gives an inconclusive report.
        tolerance: Optional maximum width of a tail interval.

    Returns:
        IdentityReport with one check per identity.

    Raises:
        DomainError: If the table is too short or n is out of range.
    """
    nu = table.nu
    names = ("rayleigh", "calogero", "calogero-squared")

    if tail == 0:
        checks = [
            IdentityCheck(name=name, target=0.0, partial_sum=0.0, residual=0.0,
                          tail_lower=0.0, tail_upper=math.inf, status=Status.INCONCLUSIVE)
            for name in names
        ]
        return IdentityReport(nu=nu, n=n, tail=tail, checks=checks)

    if tail > len(table):
        raise DomainError(f"table has {len(table)} zeros, tail {tail} requested")
    if not 1 <= n <= tail // 2:
        raise DomainError(f"n must lie in 1..{tail // 2}, got {n}")

    lam = table.zeros[:tail]
    b = lam[n - 1]
    offset = table.order.mcmahon_offset
    a0 = math.pi * tail + offset - 1.0
    a1 = math.pi * (tail + 1) + offset + 1.0

    checked = np.arange(max(1, tail - 9), len(table) + 1)
    deviation = np.abs(table.zeros[checked - 1] - (np.pi * checked + offset))
    asymptotics_hold = bool(np.all(deviation <= 1.0)) and a0 > 0
    separated = a0 >= 2.0 * b

    others = np.delete(lam, n - 1)
    rayleigh_terms = 1.0 / lam**2
    calogero_terms = 2.0 * b**2 / (others**2 - b**2)
    squared_terms = b**4 / (b**2 - others**2) ** 2

    specs = [
        ("rayleigh", 1.0 / (4.0 * nu + 4.0), rayleigh_terms,
         (1.0 / (math.pi * a1), 1.0 / (math.pi * a0)) if a0 > 0 else None),
        ("calogero", nu + 1.0, calogero_terms,
         (2.0 * b**2 / (math.pi * a1), (8.0 / 3.0) * b**2 / (math.pi * a0)) if separated else None),
        ("calogero-squared", (b**2 - (nu + 1.0) * (nu + 5.0)) / 12.0, squared_terms,
         (b**4 / (3.0 * math.pi * a1**3), (16.0 / 9.0) * b**4 / (3.0 * math.pi * a0**3)) if separated else None),
    ]

    checks = []
    for name, target, terms, bounds in specs:
        partial = math.fsum(terms.tolist())
        residual = target - partial
        slack = 1e-12 * max(1.0, abs(target), math.fsum(np.abs(terms).tolist()))
        if bounds is None or not asymptotics_hold:
            status = Status.INCONCLUSIVE
            lower, upper = 0.0, math.inf
        else:
            lower, upper = bounds
            if tolerance is not None and upper - lower > tolerance:
                status = Status.INCONCLUSIVE
            elif lower - slack <= residual <= upper + slack:
                status = Status.PASS
            else:
                status = Status.FAIL
        if status is not Status.PASS:
            logger.warning(f"Identity {name} for nu={nu}, n={n}, tail={tail}: {status.value}")
        checks.append(IdentityCheck(name=name, target=target, partial_sum=partial, residual=residual,
                                    tail_lower=lower, tail_upper=upper, status=status))
    return IdentityReport(nu=nu, n=n, tail=tail, checks=checks)
