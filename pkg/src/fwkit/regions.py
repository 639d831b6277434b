"""Feasible regions: linear minimization oracles, membership, diameters.

Every region is immutable. Ties in the LMO are broken towards the lowest
coordinate index, and a zero cost vector yields the lexicographically first
vertex, so runs are replayable bit for bit.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive, check_positive_int, check_vector
from .exceptions import ContractViolation, UnsupportedRegionError


class Region:
    """Base class. Subclasses are frozen dataclasses with a ``n`` field."""

    kind = None

    @property
    def dim(self):
        return self.n

    def lmo(self, c):
        """Return an extreme point minimizing ``<c, v>`` over the region."""
        return self._lmo(check_vector(c, self.n, name="c"))

    def contains(self, x, tol=1e-9):
        """True iff ``x`` satisfies the defining constraints within ``tol``."""
        tol = check_nonnegative(tol, "tol")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,) or not np.all(np.isfinite(x)):
            return False
        return bool(self._contains(x, tol))

    def diameter(self):
        raise NotImplementedError

    def center(self):
        """A canonical interior (or relative-interior) point."""
        return np.zeros(self.n)

    def vertices(self):
        """All extreme points as rows of an array (small instances only)."""
        raise UnsupportedRegionError(f"{self.kind} has no finite vertex set")

    def sample(self, rng, size):
        """Draw ``size`` feasible points (rows) using generator ``rng``."""
        raise NotImplementedError

    def to_dict(self):
        d = {"kind": self.kind}
        d.update(self.__dict__)
        return d


@dataclass(frozen=True)
class Simplex(Region):
    """Probability simplex ``conv{e_1, ..., e_n}``."""

    n: int
    kind = "simplex"

    def __post_init__(self):
        check_positive_int(self.n, "n")

    def _lmo(self, c):
        v = np.zeros(self.n)
        v[np.argmin(c)] = 1.0
        return v

    def _contains(self, x, tol):
        return x.min() >= -tol and abs(x.sum() - 1.0) <= tol

    def diameter(self):
        return math.sqrt(2.0) if self.n > 1 else 0.0

    def center(self):
        return np.full(self.n, 1.0 / self.n)

    def vertices(self):
        return np.eye(self.n)

    def sample(self, rng, size):
        w = rng.exponential(size=(size, self.n))
        return w / w.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class Box(Region):
    """Hypercube ``[lo, hi]^n``."""

    n: int
    lo: float = 0.0
    hi: float = 1.0
    kind = "box"

    def __post_init__(self):
        check_positive_int(self.n, "n")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.lo > self.hi:
            raise ContractViolation(f"invalid box bounds [{self.lo}, {self.hi}]")

    def _lmo(self, c):
        return np.where(c < 0, float(self.hi), float(self.lo))

    def _contains(self, x, tol):
        return x.min() >= self.lo - tol and x.max() <= self.hi + tol

    def diameter(self):
        return (self.hi - self.lo) * math.sqrt(self.n)

    def center(self):
        return np.full(self.n, 0.5 * (self.lo + self.hi))

    def vertices(self):
        if self.n > 16:
            raise UnsupportedRegionError("vertex enumeration limited to n <= 16")
        pts = itertools.product((float(self.lo), float(self.hi)), repeat=self.n)
        return np.array(list(pts))

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size=(size, self.n))

    def inequalities(self):
        """Explicit description ``A z <= b``: rows ``z_i <= hi`` then ``-z_i <= -lo``."""
        eye = np.eye(self.n)
        A = np.vstack([eye, -eye])
        b = np.concatenate([np.full(self.n, float(self.hi)), np.full(self.n, -float(self.lo))])
        return A, b


@dataclass(frozen=True)
class KSparse(Region):
    """K-sparse polytope: ``{||x||_1 <= K tau} & {||x||_inf <= tau}``.

    Its vertices have exactly ``K`` entries equal to ``+-tau``.
    """

    n: int
    K: int
    tau: float = 1.0
    kind = "ksparse"

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.K, "K")
        check_positive(self.tau, "tau")
        if self.K > self.n:
            raise ContractViolation(f"K={self.K} exceeds dimension n={self.n}")

    def _lmo(self, c):
        # stable sort keeps the lowest index first among equal magnitudes
        idx = np.argsort(-np.abs(c), kind="stable")[: self.K]
        v = np.zeros(self.n)
        # zero cost picks -tau (lexicographically first vertex)
        v[idx] = np.where(c[idx] < 0, self.tau, -self.tau)
        return v

    def _contains(self, x, tol):
        return np.abs(x).max() <= self.tau + tol and np.abs(x).sum() <= self.K * self.tau + tol

    def diameter(self):
        return 2.0 * self.tau * math.sqrt(self.K)

    def vertices(self):
        if math.comb(self.n, self.K) * 2 ** self.K > 200_000:
            raise UnsupportedRegionError("too many vertices to enumerate")
        out = []
        for support in itertools.combinations(range(self.n), self.K):
            for signs in itertools.product((-1.0, 1.0), repeat=self.K):
                v = np.zeros(self.n)
                v[list(support)] = np.array(signs) * self.tau
                out.append(v)
        return np.array(out)

    def sample(self, rng, size):
        # random convex combinations of a few random vertices
        out = np.empty((size, self.n))
        for i in range(size):
            m = 4
            w = rng.exponential(size=m)
            w /= w.sum()
            pts = np.zeros((m, self.n))
            for j in range(m):
                support = rng.choice(self.n, size=self.K, replace=False)
                pts[j, support] = rng.choice((-self.tau, self.tau), size=self.K)
            out[i] = w @ pts
        return out


@dataclass(frozen=True)
class L1Ball(Region):
    """``{x : ||x||_1 <= r}``."""

    n: int
    r: float = 1.0
    kind = "l1ball"

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive(self.r, "r")

    def _lmo(self, c):
        j = int(np.argmax(np.abs(c)))
        v = np.zeros(self.n)
        v[j] = self.r if c[j] < 0 else -self.r
        return v

    def _contains(self, x, tol):
        return np.abs(x).sum() <= self.r + tol

    def diameter(self):
        return 2.0 * self.r

    def vertices(self):
        eye = np.eye(self.n) * self.r
        return np.vstack([-eye, eye])

    def sample(self, rng, size):
        w = rng.exponential(size=(size, self.n + 1))
        w /= w.sum(axis=1, keepdims=True)
        signs = rng.choice((-1.0, 1.0), size=(size, self.n))
        return self.r * signs * w[:, : self.n]


@dataclass(frozen=True)
class L2Ball(Region):
    """Euclidean ball ``{x : ||x||_2 <= r}``."""

    n: int
    r: float = 1.0
    kind = "l2ball"

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive(self.r, "r")

    def _lmo(self, c):
        norm = np.linalg.norm(c)
        if norm == 0.0:
            v = np.zeros(self.n)
            v[0] = -self.r
            return v
        return -self.r * c / norm

    def _contains(self, x, tol):
        return np.linalg.norm(x) <= self.r + tol

    def diameter(self):
        return 2.0 * self.r

    def sample(self, rng, size):
        d = rng.standard_normal((size, self.n))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        radius = self.r * rng.uniform(size=(size, 1)) ** (1.0 / self.n)
        return d * radius


REGIONS = {cls.kind: cls for cls in (Simplex, Box, KSparse, L1Ball, L2Ball)}


def region_from_dict(d):
    """Build a region from its JSON descriptor, e.g. ``{"kind": "simplex", "n": 10}``."""
    d = dict(d)
    try:
        cls = REGIONS[d.pop("kind")]
    except KeyError as exc:
        raise ContractViolation(f"unknown or missing region kind in {d!r}") from exc
    try:
        return cls(**d)
    except TypeError as exc:
        raise ContractViolation(f"bad {cls.kind} descriptor: {exc}") from exc


def lmo(region, c):
    return region.lmo(c)


def membership(region, x, tol=1e-9):
    return region.contains(x, tol)


def diameter(region):
    return region.diameter()


@dataclass(frozen=True)
class DualPrices:
    """Nonnegative multipliers for the rows of ``A z <= b``."""

    lam: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def complementarity_gap(self, x):
        """``<lambda, b - A x>``."""
        return float(self.lam @ (self.b - self.A @ x))


def box_dual_prices(region, gradient):
    """Dual prices certifying ``lmo(region, gradient)`` on a box.

    With rows ``z_i <= hi`` (prices ``max(-g_i, 0)``) and ``-z_i <= -lo``
    (prices ``max(g_i, 0)``) one has ``g = -lambda A`` and
    ``<g, v> = -<lambda, b>`` at the LMO vertex ``v``.
    """
    if not isinstance(region, Box):
        raise UnsupportedRegionError(
            f"closed-form dual prices are only implemented for boxes, not {region.kind}")
    g = check_vector(gradient, region.n, name="gradient")
    A, b = region.inequalities()
    lam = np.concatenate([np.maximum(-g, 0.0), np.maximum(g, 0.0)])
    return DualPrices(lam=lam, A=A, b=b)
