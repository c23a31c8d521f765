import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from orlicz_kit.errors import (
    DimensionError,
    InvalidFunction,
    InvalidInput,
    InvalidParameter,
)
from orlicz_kit.orlicz import OrliczFunction, inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NumericContext:
    """Tolerances shared by every computation on a space."""

    tol: float = 1e-10
    bisect_rtol: float = 1e-12
    newton_steps: int = 3
    dps: int = 50

    def to_dict(self):
        return {
            "tol": self.tol,
            "bisect_rtol": self.bisect_rtol,
            "newton_steps": self.newton_steps,
            "dps": self.dps,
        }


class OrliczVector:
    """A coordinate sequence of fixed length; coordinates are stored as given."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Iterable[float]):
        array = np.array(coords, dtype=float).reshape(-1)
        array.setflags(write=False)
        self._coords = array

    @classmethod
    def basis(cls, dim: int, index: int, sign: float = 1.0) -> "OrliczVector":
        if not 0 <= index < dim:
            raise DimensionError(f"Basis index {index} outside 0..{dim - 1}")
        coords = np.zeros(dim)
        coords[index] = sign
        return cls(coords)

    @classmethod
    def zeros(cls, dim: int) -> "OrliczVector":
        return cls(np.zeros(dim))

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def space_dim(self) -> int:
        return self._coords.size

    def support(self) -> np.ndarray:
        return np.flatnonzero(self._coords)

    def restrict(self, indices) -> "OrliczVector":
        """f * 1_indices."""
        out = np.zeros_like(self._coords)
        idx = np.asarray(indices, dtype=int)
        out[idx] = self._coords[idx]
        return OrliczVector(out)

    def is_zero(self) -> bool:
        return not np.any(self._coords)

    def to_list(self):
        return [float(x) for x in self._coords]

    def _other(self, other: "OrliczVector") -> np.ndarray:
        if other.space_dim != self.space_dim:
            raise DimensionError(
                f"Dimension mismatch: {self.space_dim} vs {other.space_dim}"
            )
        return other.coords

    def __add__(self, other):
        return OrliczVector(self._coords + self._other(other))

    def __sub__(self, other):
        return OrliczVector(self._coords - self._other(other))

    def __mul__(self, scalar):
        return OrliczVector(self._coords * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return OrliczVector(self._coords / float(scalar))

    def __neg__(self):
        return OrliczVector(-self._coords)

    def __len__(self):
        return self.space_dim

    def __eq__(self, other):
        if not isinstance(other, OrliczVector):
            return NotImplemented
        return np.array_equal(self._coords, other.coords)

    __hash__ = None

    def __repr__(self):
        return f"OrliczVector({self.to_list()})"


def disjoint(f: OrliczVector, g: OrliczVector) -> bool:
    if f.space_dim != g.space_dim:
        raise DimensionError(f"Dimension mismatch: {f.space_dim} vs {g.space_dim}")
    return not np.any((f.coords != 0) & (g.coords != 0))


@dataclass(frozen=True)
class LuxemburgSpace:
    """The space l_M^dim with its Luxemburg norm."""

    M: OrliczFunction
    dim: int
    context: NumericContext = field(default_factory=NumericContext)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"Space dimension must be >= 1, got {self.dim}")

    @cached_property
    def unit_level(self) -> float:
        """t1 with M(t1) = 1."""
        if float(self.M(1.0)) == 1.0:
            return 1.0
        return inverse(self.M, 1.0)

    def vector(self, coords: Iterable[float]) -> OrliczVector:
        return self._check(OrliczVector(coords))

    def basis(self, index: int, sign: float = 1.0) -> OrliczVector:
        return OrliczVector.basis(self.dim, index, sign)

    def _check(self, f: OrliczVector) -> OrliczVector:
        if f.space_dim != self.dim:
            raise DimensionError(f"Vector of dimension {f.space_dim} in l_M^{self.dim}")
        return f

    def _profile(self, f: OrliczVector) -> Tuple[np.ndarray, np.ndarray]:
        # distinct nonzero |f(k)| with multiplicities
        self._check(f)
        if not np.all(np.isfinite(f.coords)):
            raise InvalidInput("Vector has a non-finite coordinate")
        values, counts = np.unique(np.abs(f.coords), return_counts=True)
        keep = values > 0
        return values[keep], counts[keep].astype(float)

    def _modular(self, values: np.ndarray, counts: np.ndarray, rho: float) -> float:
        return math.fsum(counts * self.M(values / rho))

    def _modular_slope(self, values, counts, rho: float) -> float:
        scaled = values / rho
        return -math.fsum(counts * scaled * self.M.deriv1(scaled)) / rho

    def modular(self, f: OrliczVector, rho: float) -> float:
        """sum_k M(|f(k)| / rho)."""
        if not rho > 0:
            raise InvalidParameter(f"modular needs rho > 0, got {rho}")
        self._check(f)
        return math.fsum(self.M(f.coords / rho))

    def norm(self, f: OrliczVector, tol: Optional[float] = None) -> float:
        """Luxemburg norm by bisection on the modular, then Newton polish.

        The bracket [max|f|/t1, sum|f|/t1], t1 = M^-1(1), always contains the
        norm by convexity of M.
        """
        tol = self.context.tol if tol is None else tol
        if not tol > 0:
            raise InvalidParameter(f"norm needs tol > 0, got {tol}")
        values, counts = self._profile(f)
        if values.size == 0:
            return 0.0
        lo = float(values[-1]) / self.unit_level
        hi = float(np.dot(values, counts)) / self.unit_level
        if lo >= hi:
            return lo
        while hi - lo > self.context.bisect_rtol * hi:
            mid = 0.5 * (lo + hi)
            if self._modular(values, counts, mid) > 1.0:
                lo = mid
            else:
                hi = mid
        rho = 0.5 * (lo + hi)
        for _ in range(self.context.newton_steps):
            residual = self._modular(values, counts, rho) - 1.0
            slope = self._modular_slope(values, counts, rho)
            if residual == 0.0 or slope == 0.0 or not math.isfinite(slope):
                break
            step = rho - residual / slope
            if not lo <= step <= hi:
                break
            rho = step
        residual = self._modular(values, counts, rho) - 1.0
        if abs(residual) > tol:
            logger.debug("Modular at the norm is off by %g", residual)
        return rho

    def norm_mp(self, f: Union[OrliczVector, Sequence], dps: Optional[int] = None):
        """Luxemburg norm as an mpmath number at ``dps`` decimal digits.

        ``f`` may also be a plain sequence of mpmath numbers, for vectors such
        as f + alpha g whose coordinates are not representable as doubles.
        """
        if self.M.mp_eval is None:
            raise InvalidFunction(f"{self.M.family_tag} has no arbitrary-precision form")
        dps = self.context.dps if dps is None else dps
        with mpmath.workdps(dps):
            if isinstance(f, OrliczVector):
                values, counts = self._profile(f)
                terms = [(mpmath.mpf(v), int(c)) for v, c in zip(values, counts)]
                approx = f
            else:
                coords = [mpmath.mpf(c) for c in f]
                if len(coords) != self.dim:
                    raise DimensionError(f"Vector of dimension {len(coords)} in l_M^{self.dim}")
                terms = [(abs(c), 1) for c in coords if c != 0]
                approx = OrliczVector([float(c) for c in coords])
            if not terms:
                return mpmath.mpf(0)

            def residual(rho):
                return mpmath.fsum(c * self.M.mp_eval(v / rho) for v, c in terms) - 1

            guess = mpmath.mpf(self.norm(approx))
            lo, hi = guess * (1 - mpmath.mpf("1e-9")), guess * (1 + mpmath.mpf("1e-9"))
            if residual(lo) < 0 or residual(hi) > 0:
                unit = mpmath.mpf(self.unit_level)
                lo = max(v for v, _ in terms) / unit * (1 - mpmath.mpf("1e-12"))
                hi = mpmath.fsum(v * c for v, c in terms) / unit * (1 + mpmath.mpf("1e-12"))
            for end in (lo, hi):
                if residual(end) == 0:
                    return end
            return mpmath.findroot(residual, (lo, hi), solver="anderson", verify=False)

    def normalize(self, f: OrliczVector) -> OrliczVector:
        n = self.norm(f)
        if n == 0:
            raise InvalidInput("Cannot normalize the zero vector")
        return f / n

    def distance(self, f: OrliczVector, g: OrliczVector) -> float:
        return self.norm(f - g)
