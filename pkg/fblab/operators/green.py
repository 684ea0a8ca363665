"""Green function of 𝔻_ν𝔻_ν* in the Lebesgue setting and the integral operator T_ν."""
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from fblab.core.bessel import bessel_j
from fblab.core.quadrature import QuadratureRule
from fblab.core.systems import Setting, SystemSpec
from fblab.utils.exceptions import DomainError, UnsupportedCombinationError

ArrayLike = Union[float, np.ndarray]

TAIL_NODES, TAIL_WEIGHTS = special.roots_legendre(24)


class GreenAux:
    """
    Auxiliary functions of the Green function.

    F(x) = ∫₀ˣ ψ_1² du in closed form, q_ν = -(ν+1/2)/x + R^ν, and the
    kernel K_ν(x, ξ) = F(x)(1 - F(ξ))/(ψ_1(x)ψ_1(ξ)) for x ≤ ξ, mirrored.
    """

    def __init__(self, spec: SystemSpec, panels: int = 8, order: int = 16):
        """
        Raises:
            UnsupportedCombinationError: If ``spec`` is not a Lebesgue system.
        """
        if spec.setting is not Setting.LEBESGUE:
            raise UnsupportedCombinationError("the Green function is built on the Lebesgue system")
        self.spec = spec
        self.nu = spec.nu
        self.lam1 = spec.lam(1)
        self._scale = 1.0 / float(bessel_j(self.nu + 1.0, self.lam1)) ** 2
        self.panels = panels
        self.order = order

    def F(self, x: ArrayLike) -> ArrayLike:
        """[x²J_ν² - (2νx/λ_1) J_ν J_{ν+1} + x²J_{ν+1}²](λ_1 x) / J_{ν+1}(λ_1)², with F(0) = 0."""
        x_arr = np.asarray(x, dtype=float)
        z = self.lam1 * np.where(x_arr == 0.0, 1.0, x_arr)
        j0 = bessel_j(self.nu, z)
        j1 = bessel_j(self.nu + 1.0, z)
        out = self._scale * (x_arr**2 * j0**2 - 2.0 * self.nu * x_arr / self.lam1 * j0 * j1 + x_arr**2 * j1**2)
        out = np.where(x_arr == 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def complement(self, x: ArrayLike) -> ArrayLike:
        """
        1 - F(x).

        Past x = 1/2 this is ∫ₓ¹ ψ_1² du by Gauss–Legendre, since the closed
        form loses every digit as x → 1.
        """
        x_arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x_arr).ravel()
        out = 1.0 - np.atleast_1d(self.F(flat))
        near = (flat > 0.5) & (flat < 1.0)
        if np.any(near):
            lo = flat[near]
            half = 0.5 * (1.0 - lo)
            nodes = lo[:, None] + half[:, None] * (TAIL_NODES[None, :] + 1.0)
            out[near] = half * (self.psi1(nodes) ** 2 @ TAIL_WEIGHTS)
        out = out.reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def q(self, x: ArrayLike) -> ArrayLike:
        """q_ν(x) = -(ν+1/2)/x + R^ν(x); 𝔻_ν = d + q_ν and 𝔻_ν* = -d + q_ν."""
        x_arr = np.asarray(x, dtype=float)
        return -(self.nu + 0.5) / x_arr + self.spec.ratio.ratio_r(1, x_arr)

    def psi1(self, x: np.ndarray) -> np.ndarray:
        return self.spec.basis([1], np.asarray(x, dtype=float).ravel())[0].reshape(np.shape(x))

    def kernel(self, x: ArrayLike, xi: ArrayLike) -> ArrayLike:
        """K_ν(x, ξ), symmetric and continuous across x = ξ."""
        x_arr, xi_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
        if np.any((x_arr <= 0) | (x_arr >= 1) | (xi_arr <= 0) | (xi_arr >= 1)):
            raise DomainError("Green function points must lie in (0, 1)")
        lo = np.minimum(x_arr, xi_arr)
        hi = np.maximum(x_arr, xi_arr)
        out = self.F(lo) * self.complement(hi) / (self.psi1(x_arr) * self.psi1(xi_arr))
        return out if np.ndim(out) else float(out)

    def apply(self, f: Callable[[np.ndarray], np.ndarray], x: ArrayLike) -> np.ndarray:
        """
        T_ν f(x) = (1-F(x))/ψ_1(x) ∫₀ˣ F f/ψ_1 dξ + F(x)/ψ_1(x) ∫ₓ¹ (1-F) f/ψ_1 dξ.

        Each piece is integrated with its own rule graded toward both ends.
        """
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x_arr)
        for i, point in enumerate(x_arr):
            left = QuadratureRule.interval(0.0, point, self.panels, self.order)
            right = QuadratureRule.interval(point, 1.0, self.panels, self.order)
            inner = left.integrate(lambda s: self.F(s) * f(s) / self.psi1(s))
            outer = right.integrate(lambda s: self.complement(s) * f(s) / self.psi1(s))
            out[i] = (self.complement(point) * inner + self.F(point) * outer) / float(self.psi1(np.array([point]))[0])
        return out.reshape(np.shape(x)) if np.ndim(x) else out

    def square_integral(self, panels: int = 16) -> float:
        """∫∫ K_ν² over the unit square, finite for every ν > -1."""
        rule = QuadratureRule.interval(0.0, 1.0, panels, self.order)
        f = self.F(rule.nodes)
        g = self.complement(rule.nodes)
        psi = self.psi1(rule.nodes)
        below = np.tril(np.ones((len(rule), len(rule)), dtype=bool))
        lo = np.where(below, f[None, :], f[:, None])
        hi = np.where(below, g[:, None], g[None, :])
        k = lo * hi / np.outer(psi, psi)
        return float(rule.weights @ k**2 @ rule.weights)

    def spectral_square_integral(self, count: Optional[int] = None) -> float:
        """
        Σ_{n≥2} (λ_n² - λ_1²)^{-2}, the same integral from the eigen-relation.

        Terms past the zero table are approximated by Σ (πn)^{-4}.
        """
        zeros = self.spec.zeros.zeros
        count = len(zeros) if count is None else count
        gaps = zeros[1:count] ** 2 - self.lam1**2
        tail = 1.0 / (3.0 * np.pi**4 * count**3)
        return float(np.sum(gaps**-2.0) + tail)


def green_eval(aux: GreenAux, x: ArrayLike, xi: ArrayLike) -> ArrayLike:
    return aux.kernel(x, xi)


def green_apply(aux: GreenAux, f: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """The operator T_ν as a closure."""
    return lambda x: aux.apply(f, x)


def eigen_relation_residual(aux: GreenAux, n: int, x: np.ndarray) -> float:
    """max |T_ν(𝔻ψ_n) - 𝔻ψ_n/(λ_n² - λ_1²)| over ``x``."""
    spec = aux.spec

    def d_psi(s: np.ndarray) -> np.ndarray:
        return spec.derivative_basis([n], np.asarray(s).ravel())[0].reshape(np.shape(s))

    applied = aux.apply(d_psi, x)
    target = d_psi(np.asarray(x, dtype=float)) / spec.derivative_norm_sq(n)
    return float(np.max(np.abs(applied - target)))
