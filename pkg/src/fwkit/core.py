"""First-order oracles for the objectives used throughout the package.

Points and gradients are plain 1-D ``float64`` numpy arrays.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ._validation import (check_nonnegative, check_positive, check_square_matrix,
                          check_vector, frozen)
from .exceptions import ContractViolation

KINDS = ("distance_squared", "quadratic", "custom")


@dataclass(frozen=True)
class Objective:
    """Differentiable objective with optional curvature metadata.

    Use the constructors :func:`distance_squared`, :func:`quadratic` and
    :func:`custom` rather than instantiating directly.

    Attributes
    ----------
    kind : {'distance_squared', 'quadratic', 'custom'}
    dim : int
    smoothness_L : float or None
        Declared smoothness constant.
    strong_convexity_mu : float or None
        Declared strong convexity modulus.
    is_convex : bool
    p : ndarray or None
        Anchor point of ``distance_squared``.
    Q, b, constant : ndarray, ndarray, float
        Data of ``quadratic``: ``f(x) = x'Qx/2 + b'x + constant``.
    """

    kind: str
    dim: int
    smoothness_L: Optional[float] = None
    strong_convexity_mu: Optional[float] = None
    is_convex: bool = True
    p: Optional[np.ndarray] = field(default=None, repr=False)
    Q: Optional[np.ndarray] = field(default=None, repr=False)
    b: Optional[np.ndarray] = field(default=None, repr=False)
    constant: float = 0.0
    func: Optional[Callable] = field(default=None, repr=False, compare=False)
    grad: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractViolation(f"unknown objective kind {self.kind!r}")
        L, mu = self.smoothness_L, self.strong_convexity_mu
        if L is not None and mu is not None and mu > L:
            raise ContractViolation(
                f"strong convexity {mu} exceeds smoothness {L}")

    @property
    def hessian(self):
        """Constant Hessian for quadratic kinds, ``None`` otherwise."""
        if self.kind == "distance_squared":
            return 2.0 * np.eye(self.dim)
        if self.kind == "quadratic":
            return self.Q
        return None

    def value_and_gradient(self, x):
        # hot path: no validation
        if self.kind == "distance_squared":
            d = x - self.p
            return float(d @ d), 2.0 * d
        if self.kind == "quadratic":
            Qx = self.Q @ x
            return float(0.5 * (x @ Qx) + self.b @ x + self.constant), Qx + self.b
        value = float(self.func(x))
        g = np.asarray(self.grad(x), dtype=np.float64)
        return value, g

    def value(self, x):
        if self.kind == "distance_squared":
            d = x - self.p
            return float(d @ d)
        if self.kind == "quadratic":
            return float(0.5 * (x @ (self.Q @ x)) + self.b @ x + self.constant)
        return float(self.func(x))

    def with_constants(self, smoothness_L=None, strong_convexity_mu=None):
        """Copy with re-declared curvature constants (both are replaced)."""
        return replace(self, smoothness_L=smoothness_L,
                       strong_convexity_mu=strong_convexity_mu)


def distance_squared(p):
    """``f(x) = ||x - p||^2``; exactly 2-smooth and 2-strongly convex."""
    p = check_vector(p, name="p")
    return Objective("distance_squared", p.size, smoothness_L=2.0,
                     strong_convexity_mu=2.0, is_convex=True, p=frozen(p))


def quadratic(Q, b=None, constant=0.0, smoothness_L=None,
              strong_convexity_mu=None, is_convex=None):
    """``f(x) = x'Qx/2 + b'x + constant`` for symmetric ``Q``.

    Undeclared constants are read off the spectrum of ``Q``: ``L`` is the
    largest eigenvalue magnitude, ``mu`` the smallest eigenvalue (convex
    case only).
    """
    Q = check_square_matrix(Q)
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise ContractViolation("Q must be symmetric")
    n = Q.shape[0]
    b = np.zeros(n) if b is None else check_vector(b, n, name="b")
    eig = np.linalg.eigvalsh(Q)
    if is_convex is None:
        is_convex = bool(eig[0] >= -1e-12 * max(1.0, abs(eig[-1])))
    if smoothness_L is None:
        smoothness_L = float(np.abs(eig).max())
    if strong_convexity_mu is None and is_convex:
        strong_convexity_mu = min(max(float(eig[0]), 0.0), smoothness_L)
    if smoothness_L is not None:
        smoothness_L = check_nonnegative(smoothness_L, "smoothness_L")
    return Objective("quadratic", n, smoothness_L=smoothness_L,
                     strong_convexity_mu=strong_convexity_mu,
                     is_convex=bool(is_convex), Q=frozen(Q), b=frozen(b),
                     constant=float(constant))


def custom(func, grad, dim, smoothness_L=None, strong_convexity_mu=None,
           is_convex=True):
    """Wrap user callables ``func(x) -> float`` and ``grad(x) -> array``."""
    if not callable(func) or not callable(grad):
        raise ContractViolation("func and grad must be callable")
    if smoothness_L is not None:
        smoothness_L = check_positive(smoothness_L, "smoothness_L")
    return Objective("custom", int(dim), smoothness_L=smoothness_L,
                     strong_convexity_mu=strong_convexity_mu,
                     is_convex=bool(is_convex), func=func, grad=grad)


def evaluate(obj, x):
    """First-order oracle: return ``(f(x), grad f(x))``.

    Raises
    ------
    ContractViolation
        If ``x`` does not match the objective's dimension.
    """
    x = check_vector(x, obj.dim)
    value, g = obj.value_and_gradient(x)
    g = check_vector(g, obj.dim, name="gradient")
    return value, g


def finite_difference_gradient(obj, x, h=1e-6):
    """Central-difference gradient estimate, one coordinate at a time."""
    x = check_vector(x, obj.dim)
    h = check_positive(h, "h")
    out = np.empty_like(x)
    e = np.zeros_like(x)
    for i in range(x.size):
        e[i] = h
        out[i] = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
        e[i] = 0.0
    return out
