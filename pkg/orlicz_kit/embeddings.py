import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import mpmath
import numpy as np

from orlicz_kit.basis import BasisBudget, BasisWitness, basis_delta_of_eps, extract_basis_witnesses
from orlicz_kit.disjointness import CERTIFIED, delta_of_eps, witness_split
from orlicz_kit.errors import (
    AlignmentImpossible,
    DimensionError,
    DistinctnessViolation,
    InvalidInput,
    InvalidParameter,
    NotAnEmbedding,
)
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector
from orlicz_kit.reports import mp_record
from orlicz_kit.samples import trial_generators

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 256
EXHAUSTIVE_LIMIT = 8


class SignedPermutation:
    """U e_i = signs[i] e_{perm[i]}; an isometry of l_M^n."""

    def __init__(self, perm: Sequence[int], signs: Optional[Sequence[float]] = None):
        perm = np.array(perm, dtype=int)
        n = perm.size
        if sorted(perm.tolist()) != list(range(n)):
            raise InvalidInput(f"{perm.tolist()} is not a permutation of 0..{n - 1}")
        signs = np.ones(n) if signs is None else np.array(signs, dtype=float)
        if signs.size != n or not np.all(np.abs(signs) == 1):
            raise InvalidInput("Signs must be a vector of +-1 matching the permutation")
        perm.setflags(write=False)
        signs.setflags(write=False)
        self.perm = perm
        self.signs = signs

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(range(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SignedPermutation":
        return cls(rng.permutation(n), rng.choice([-1.0, 1.0], size=n))

    @property
    def n(self) -> int:
        return self.perm.size

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[self.perm, np.arange(self.n)] = self.signs
        return out

    def apply_coords(self, coords: np.ndarray) -> np.ndarray:
        out = np.zeros_like(coords, dtype=float)
        out[self.perm] = self.signs[:, None] * coords if coords.ndim == 2 else self.signs * coords
        return out

    def __call__(self, x: OrliczVector) -> OrliczVector:
        if x.space_dim != self.n:
            raise DimensionError(f"Vector of dimension {x.space_dim} for a permutation of {self.n}")
        return OrliczVector(self.apply_coords(x.coords))

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other."""
        return SignedPermutation(self.perm[other.perm], self.signs[other.perm] * other.signs)

    def inverse(self) -> "SignedPermutation":
        inv = np.empty(self.n, dtype=int)
        inv[self.perm] = np.arange(self.n)
        return SignedPermutation(inv, self.signs[inv])

    def __eq__(self, other):
        if not isinstance(other, SignedPermutation):
            return NotImplemented
        return np.array_equal(self.perm, other.perm) and np.array_equal(self.signs, other.signs)

    __hash__ = None

    def __repr__(self):
        return f"SignedPermutation(perm={self.perm.tolist()}, signs={self.signs.tolist()})"

    def to_dict(self) -> Dict[str, Any]:
        return {"perm": self.perm.tolist(), "signs": [int(s) for s in self.signs]}


@dataclass(frozen=True)
class DistortionEstimate:
    value: float
    norm: float
    inverse_norm: float
    samples: int
    method: str
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "norm": self.norm,
            "inverse_norm": self.inverse_norm,
            "samples": self.samples,
            "method": self.method,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """A linear map l_M^k -> l_M^n; column i is the image of e_i."""

    matrix: np.ndarray
    source: LuxemburgSpace
    target: LuxemburgSpace
    metadata: Dict[str, Any] = field(default_factory=dict)
    distortion_estimate: Optional[DistortionEstimate] = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionError(
                f"Matrix of shape {matrix.shape} for a map l_M^{self.source.dim} -> l_M^{self.target.dim}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def k(self) -> int:
        return self.source.dim

    @property
    def n(self) -> int:
        return self.target.dim

    def image(self, i: int) -> OrliczVector:
        return OrliczVector(self.matrix[:, i])

    def images(self) -> List[OrliczVector]:
        return [self.image(i) for i in range(self.k)]

    def apply(self, x: OrliczVector) -> OrliczVector:
        self.source._check(x)
        return OrliczVector(self.matrix @ x.coords)

    def with_matrix(self, matrix: np.ndarray, **metadata) -> "EmbeddingMap":
        return EmbeddingMap(matrix, self.source, self.target, {**self.metadata, **metadata})

    def after(self, U: SignedPermutation) -> "EmbeddingMap":
        """U o T."""
        return self.with_matrix(U.apply_coords(self.matrix))

    def to_dict(self) -> Dict[str, Any]:
        out = {"matrix": self.matrix.tolist(), "k": self.k, "n": self.n, "metadata": self.metadata}
        if self.distortion_estimate is not None:
            out["distortion"] = self.distortion_estimate.to_dict()
        return out


def _ratio(T: EmbeddingMap, coords: np.ndarray) -> float:
    x = OrliczVector(coords)
    return T.target.norm(T.apply(x)) / T.source.norm(x)


def _polish(T: EmbeddingMap, coords: np.ndarray, sign: float, rounds: int) -> float:
    """Coordinate descent on sign * ||Tx|| / ||x|| from a starting direction."""
    best = coords.copy()
    value = sign * _ratio(T, best)
    step = 0.25 * np.abs(best).max()
    for _ in range(rounds):
        for j in range(best.size):
            for move in (step, -step):
                candidate = best.copy()
                candidate[j] += move
                if not np.any(candidate):
                    continue
                trial = sign * _ratio(T, candidate)
                if trial > value:
                    best, value = candidate, trial
        step *= 0.5
    return sign * value


def _require_injective(matrix: np.ndarray):
    if np.linalg.matrix_rank(matrix) < matrix.shape[1]:
        raise NotAnEmbedding("Matrix columns are linearly dependent")


def distortion(
    T: EmbeddingMap, samples: int = DEFAULT_SAMPLES, seed: int = 0, rounds: int = 3
) -> DistortionEstimate:
    """Sampled lower estimate of max(||T||, ||T^-1||).

    Directions are the basis vectors plus Gaussian samples; the extreme
    ratios are then polished by coordinate descent.
    """
    _require_injective(T.matrix)
    rng = np.random.default_rng(seed)
    directions = np.vstack([np.eye(T.k), rng.normal(size=(samples, T.k))])
    ratios = np.array([_ratio(T, d) for d in directions])
    upper = max(ratios.max(), _polish(T, directions[ratios.argmax()], 1.0, rounds))
    lower = min(ratios.min(), _polish(T, directions[ratios.argmin()], -1.0, rounds))
    return DistortionEstimate(
        value=max(upper, 1.0 / lower),
        norm=upper,
        inverse_norm=1.0 / lower,
        samples=directions.shape[0],
        method="sphere-sampling+coordinate-polish",
        seed=seed,
    )


def _grid_directions(k: int, resolution: int) -> np.ndarray:
    # x and -x give the same ratio, so half the sphere suffices
    theta = np.linspace(0.0, np.pi, resolution, endpoint=False)
    if k == 2:
        return np.column_stack([np.cos(theta), np.sin(theta)])
    phi = np.linspace(0.0, np.pi, resolution)
    t, p = np.meshgrid(theta, phi)
    return np.column_stack(
        [(np.sin(p) * np.cos(t)).ravel(), (np.sin(p) * np.sin(t)).ravel(), np.cos(p).ravel()]
    )


def distortion_grid(T: EmbeddingMap, resolution: int = 2000) -> DistortionEstimate:
    """Dense angular-grid distortion for k in {2, 3}."""
    if T.k not in (2, 3):
        raise DimensionError(f"The angular grid needs k in (2, 3), got {T.k}")
    _require_injective(T.matrix)
    directions = _grid_directions(T.k, resolution)
    ratios = np.array([_ratio(T, d) for d in directions])
    return DistortionEstimate(
        value=max(ratios.max(), 1.0 / ratios.min()),
        norm=float(ratios.max()),
        inverse_norm=float(1.0 / ratios.min()),
        samples=directions.shape[0],
        method="angle-grid",
    )


def _split_blocks(rng: np.random.Generator, n: int, k: int) -> List[np.ndarray]:
    order = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    return np.split(order, cuts)


def random_disjoint_isometry(
    source: LuxemburgSpace, target: LuxemburgSpace, seed, mode: str = "basis"
) -> EmbeddingMap:
    """An exact isometry l_M^k -> l_M^n with disjointly supported columns.

    mode="basis" sends e_i to a random signed basis vector; mode="blocks" (power
    functions only) sends e_i to a random unit vector on its own block.
    """
    k, n = source.dim, target.dim
    if n < k:
        raise DimensionError(f"No isometry from dimension {k} into dimension {n}")
    rng = np.random.default_rng(seed)
    matrix = np.zeros((n, k))
    if mode == "basis":
        rows = rng.choice(n, size=k, replace=False)
        matrix[rows, np.arange(k)] = rng.choice([-1.0, 1.0], size=k)
    elif mode == "blocks":
        if target.M.family != "power" or source.M.p != target.M.p:
            raise InvalidParameter("Block isometries exist only between equal power functions")
        for i, block in enumerate(_split_blocks(rng, n, k)):
            column = np.zeros(n)
            column[block] = rng.normal(size=block.size)
            matrix[:, i] = target.normalize(OrliczVector(column)).coords
    else:
        raise InvalidParameter(f"Unknown isometry mode {mode!r}")
    return EmbeddingMap(
        matrix, source, target, {"generator": "disjoint-isometry", "mode": mode, "seed": int(seed)}
    )


def perturb(
    T: EmbeddingMap, delta, seed, samples: int = DEFAULT_SAMPLES, max_halvings: int = 60
) -> EmbeddingMap:
    """Add a seeded random perturbation, rescaled until the distortion estimate is <= 1 + delta.

    Any delta above the double underflow threshold perturbs the matrix, even
    when 1 + delta rounds to 1: the entries of size delta are still stored.
    """
    delta = float(delta)
    if delta < 0:
        raise InvalidParameter(f"perturb needs delta >= 0, got {delta}")
    if delta == 0:
        return T
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=T.matrix.shape)
    direction /= np.abs(direction).max()
    scale = delta
    for _ in range(max_halvings):
        candidate = T.with_matrix(T.matrix + scale * direction)
        try:
            estimate = distortion(candidate, samples, seed)
        except NotAnEmbedding:
            estimate = None
        if estimate is not None and estimate.value <= 1.0 + delta:
            logger.debug("perturbation seed=%s scale=%g distortion=%r", seed, scale, estimate.value)
            return EmbeddingMap(
                candidate.matrix,
                T.source,
                T.target,
                {
                    **T.metadata,
                    "perturbation": {"seed": int(seed), "scale": scale, "delta": delta},
                    "distortion": estimate.value,
                },
                estimate,
            )
        scale *= 0.5
    logger.warning("No perturbation within 1 + %g after %d halvings; map unchanged", delta, max_halvings)
    return T


@dataclass(frozen=True)
class AlignmentResult:
    U: SignedPermutation
    defect_bound: float
    column_errors: List[float]
    operator_estimate: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "U": self.U.to_dict(),
            "defect_bound": self.defect_bound,
            "column_errors": list(self.column_errors),
            "operator_estimate": self.operator_estimate,
        }


def _pairs(witnesses) -> List[tuple]:
    return [(w.index, w.sign) if isinstance(w, BasisWitness) else (int(w[0]), float(w[1])) for w in witnesses]


def _operator_defect(T1: EmbeddingMap, T2: EmbeddingMap, U: SignedPermutation, samples: int, seed: int) -> float:
    diff = U.apply_coords(T1.matrix) - T2.matrix
    if not np.any(diff):
        return 0.0
    rng = np.random.default_rng(seed)
    directions = np.vstack([np.eye(T1.k), rng.normal(size=(samples, T1.k))])
    return max(
        T1.target.norm(OrliczVector(diff @ d)) / T1.source.norm(OrliczVector(d)) for d in directions
    )


def align(
    T1: EmbeddingMap,
    T2: EmbeddingMap,
    witnesses1,
    witnesses2,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> AlignmentResult:
    """Signed permutation U with U T1 close to T2.

    U e_{s1(k)} = theta1(k) theta2(k) e_{s2(k)}; the remaining indices are
    matched in increasing order with sign +1.
    """
    if T1.k != T2.k or T1.n != T2.n:
        raise DimensionError("T1 and T2 must have the same source and target dimensions")
    w1, w2 = _pairs(witnesses1), _pairs(witnesses2)
    if len(w1) != T1.k or len(w2) != T2.k:
        raise DimensionError("Need one witness per basis vector")
    s1 = [i for i, _ in w1]
    s2 = [i for i, _ in w2]
    if len(set(s1)) < len(s1) or len(set(s2)) < len(s2):
        raise AlignmentImpossible(f"Witness indices collide: {s1} / {s2}")

    perm = np.full(T1.n, -1)
    signs = np.ones(T1.n)
    for (i1, t1), (i2, t2) in zip(w1, w2):
        perm[i1] = i2
        signs[i1] = t1 * t2
    free_from = [i for i in range(T1.n) if perm[i] < 0]
    free_to = sorted(set(range(T1.n)) - set(s2))
    perm[free_from] = free_to
    U = SignedPermutation(perm, signs)

    errors = [T1.target.distance(U(T1.image(i)), T2.image(i)) for i in range(T1.k)]
    return AlignmentResult(
        U=U,
        defect_bound=float(sum(errors)),
        column_errors=errors,
        operator_estimate=_operator_defect(T1, T2, U, samples, seed),
    )


def exhaustive_align(T1: EmbeddingMap, T2: EmbeddingMap) -> AlignmentResult:
    """Minimum of sum_k ||U T1 e_k - T2 e_k|| over every signed permutation U."""
    n = T1.n
    if n > EXHAUSTIVE_LIMIT:
        raise DimensionError(f"Exhaustive search is limited to n <= {EXHAUSTIVE_LIMIT}")
    best_U, best_errors = None, None
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((-1.0, 1.0), repeat=n):
            U = SignedPermutation(perm, signs)
            errors = [T1.target.distance(U(T1.image(i)), T2.image(i)) for i in range(T1.k)]
            if best_errors is None or sum(errors) < sum(best_errors):
                best_U, best_errors = U, errors
    return AlignmentResult(
        U=best_U,
        defect_bound=float(sum(best_errors)),
        column_errors=best_errors,
        operator_estimate=_operator_defect(T1, T2, best_U, DEFAULT_SAMPLES, 0),
    )


@dataclass
class ExperimentReport:
    name: str
    eps: float
    delta: Any
    trials: List[Dict[str, Any]]
    budget: Optional[Dict[str, Any]] = None

    @property
    def failures(self) -> int:
        return sum(1 for t in self.trials if t["failure"] is not None)

    @property
    def max_defect(self) -> float:
        values = [t["defect"] for t in self.trials if t["defect"] is not None]
        return max(values) if values else float("nan")

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {
                "trial": t["trial"],
                "delta_achieved": t["delta_achieved"],
                "perturbation_scale": t["perturbation_scale"],
                "defect": t["defect"],
            }
            for t in self.trials
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.name,
            "eps": self.eps,
            "delta": mp_record(self.delta),
            "failures": self.failures,
            "max_defect": self.max_defect,
            "perturbed": any(t["perturbation_scale"] > 0 for t in self.trials),
            "trials": self.trials,
            "budget": self.budget,
        }


def _achieved(T: EmbeddingMap) -> float:
    return float(T.metadata.get("distortion", 1.0))


def _scale(T: EmbeddingMap) -> float:
    return float(T.metadata.get("perturbation", {}).get("scale", 0.0))


def _trial_maps(source, target, delta, rng, count):
    seeds = rng.integers(2**32, size=2 * count)
    return [
        perturb(random_disjoint_isometry(source, target, seeds[2 * i]), delta, seeds[2 * i + 1])
        for i in range(count)
    ]


def disjointness_experiment(
    space: LuxemburgSpace,
    n: int,
    eps: float,
    trials: int,
    seed: int,
    delta=None,
    mode: str = CERTIFIED,
) -> ExperimentReport:
    """Witness errors of (T e_1, T e_2) for seeded T in Emb_{1+delta}(l_M^2, l_M^n)."""
    source = LuxemburgSpace(space.M, 2, space.context)
    target = LuxemburgSpace(space.M, n, space.context)
    budget = None
    if delta is None:
        budget = delta_of_eps(space.M, space.M, eps, mode=mode)
        delta = budget.delta
    records = []
    for trial, rng in enumerate(trial_generators(seed, trials)):
        (T,) = _trial_maps(source, target, delta, rng, 1)
        pair = witness_split(target, T.image(0), T.image(1))
        failure = None if pair.error <= eps else f"witness error {pair.error:g} > {eps:g}"
        records.append(
            {
                "trial": trial,
                "delta_achieved": _achieved(T),
                "perturbation_scale": _scale(T),
                "defect": pair.error,
                "err_f": pair.err_f,
                "err_g": pair.err_g,
                "failure": failure,
            }
        )
    return ExperimentReport(
        "disjointness", eps, delta, records, budget.to_dict() if budget is not None else None
    )


def eps_transitivity_experiment(
    space: LuxemburgSpace,
    k: int,
    n: int,
    eps: float,
    trials: int,
    seed: int,
    delta=None,
    budget: Optional[BasisBudget] = None,
) -> ExperimentReport:
    """Sample pairs T1, T2 in Emb_{1+delta}(l_M^k, l_M^n), align them and record the defect.

    Basis witnesses use the per-vector tolerance eps / (2k). Failures are
    recorded, never raised.
    """
    if min(k, n, trials) < 1 or not eps > 0:
        raise InvalidParameter("k, n, trials and eps must be positive")
    source = LuxemburgSpace(space.M, k, space.context)
    target = LuxemburgSpace(space.M, n, space.context)
    if budget is None:
        budget = basis_delta_of_eps(space.M, eps / (2 * k))
    if delta is None:
        delta = budget.delta
    if delta > 0 and float(delta) == 0:
        logger.warning(
            "delta = %s underflows a double; trial maps are exact isometries", mpmath.nstr(delta, 6)
        )
    records = []
    for trial, rng in enumerate(trial_generators(seed, trials)):
        T1, T2 = _trial_maps(source, target, delta, rng, 2)
        record = {
            "trial": trial,
            "delta_achieved": max(_achieved(T1), _achieved(T2)),
            "perturbation_scale": max(_scale(T1), _scale(T2)),
            "defect": None,
            "operator_estimate": None,
            "failure": None,
        }
        try:
            w1 = extract_basis_witnesses(budget, target, T1.images())
            w2 = extract_basis_witnesses(budget, target, T2.images())
            result = align(T1, T2, w1, w2, seed=trial)
        except (DistinctnessViolation, AlignmentImpossible) as e:
            record["failure"] = str(e)
        else:
            record["defect"] = result.defect_bound
            record["operator_estimate"] = result.operator_estimate
            record["witness_error"] = max(w.error for w in w1 + w2)
            if result.defect_bound > eps:
                record["failure"] = f"defect {result.defect_bound:g} > {eps:g}"
        records.append(record)
    report = ExperimentReport("transitivity", eps, delta, records, budget.to_dict())
    logger.info(
        "transitivity: %d trials, %d failures, max defect %s",
        trials,
        report.failures,
        mpmath.nstr(report.max_defect, 6),
    )
    return report
