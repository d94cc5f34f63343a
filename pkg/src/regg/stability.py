"""Deterministic checks: quadratic stability, the arcsinh martingale tail
bound, and exchangeable moment inequalities.

Everything here is either a closed-form evaluation or an exact enumeration;
randomness only enters through seeded sweeps over test points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import BudgetExceededError, InvalidParametersError
from .rng import stream
from .spectral import f_envelope, m_semicircle

__all__ = [
    "QuadraticPerturbation",
    "MartingaleSpec",
    "ExchangeableEnsemble",
    "solve_two_roots",
    "stability_check",
    "stability_sweep",
    "ladder_check",
    "ladder_sweep",
    "arcsinh_tail_bound",
    "simulate_martingale_tails",
    "exchangeable_moment_exact",
    "exchangeable_moment_mc",
    "exchangeable_moment_bound_check",
    "exchangeable_matrix_bound_check",
]


def solve_two_roots(z: complex, R: complex) -> tuple[complex, complex]:
    """The two roots of s^2 + z s + 1 = R, the first having the larger
    imaginary part; with R = 0 they are the upper and lower half-plane
    Stieltjes branches."""
    z, R = complex(z), complex(R)
    disc = np.sqrt(z * z - 4.0 + 4.0 * R + 0j)
    if disc.imag < 0:
        disc = -disc
    return (-z + disc) / 2, (-z - disc) / 2


@dataclass(frozen=True)
class QuadraticPerturbation:
    """A perturbed self-consistent point: s solves s^2 + z s + 1 = R with
    |R| bounded by (1 + |z|) r."""

    z: complex
    R: complex
    r: float
    s: complex

    def __post_init__(self) -> None:
        if not complex(self.z).imag > 0:
            raise InvalidParametersError("z must lie in the upper half-plane")
        if not 0 <= self.r <= 1:
            raise InvalidParametersError(f"r must lie in [0, 1], got {self.r}")
        if abs(self.R) > (1 + abs(self.z)) * self.r + 1e-12:
            raise InvalidParametersError("|R| exceeds (1 + |z|) r")
        residual = abs(self.s * self.s + self.z * self.s + 1 - self.R)
        if residual > 1e-12 * max(1.0, abs(self.s) ** 2):
            raise InvalidParametersError(f"root residual {residual:.3e}")


@dataclass(frozen=True)
class StabilityResult:
    lhs: float
    rhs: float
    passed: bool


def stability_check(z: complex, R: complex, r: float) -> StabilityResult:
    """For each root s of s^2 + z s + 1 = R, the distance to the nearer of
    the two unperturbed branches is at most 3 F_z(r)."""
    if not 0 <= r <= 1:
        raise InvalidParametersError(f"r must lie in [0, 1], got {r}")
    if abs(R) > (1 + abs(complex(z))) * r + 1e-12:
        raise InvalidParametersError("|R| exceeds (1 + |z|) r")
    m, mh = solve_two_roots(z, 0.0)
    rhs = 3.0 * f_envelope(z, r)
    lhs = 0.0
    for s in solve_two_roots(z, R):
        lhs = max(lhs, min(abs(s - m), abs(s - mh)))
    return StabilityResult(lhs=lhs, rhs=rhs, passed=lhs <= rhs + 1e-12)


def stability_sweep(npoints: int = 10000, seed: int = 0) -> dict:
    """Randomized deterministic sweep of stability_check over |E| <= 5,
    eta in [1e-4, 3], r in [0, 1], with |R| uniform below its cap and a
    uniform phase."""
    rng = stream(seed, 0)
    worst = 0.0
    failures = 0
    for _ in range(npoints):
        z = complex(rng.uniform(-5, 5), rng.uniform(1e-4, 3))
        r = float(rng.uniform(0, 1))
        mag = (1 + abs(z)) * r * float(rng.uniform(0, 1))
        phase = float(rng.uniform(0, 2 * math.pi))
        R = mag * complex(math.cos(phase), math.sin(phase))
        res = stability_check(z, R, r)
        if not res.passed:
            failures += 1
        if res.rhs > 0:
            worst = max(worst, res.lhs / res.rhs)
    return {"check": "stability_sweep", "points": npoints, "failures": failures,
            "worst_ratio": worst, "pass": failures == 0, "seed": seed}


def ladder_check(E: float, r: float, phase: float, eta_top: float = 3.0,
                 eta_bottom: float = 1e-4, constant: float = 10.0) -> dict:
    """Track the perturbed root continuously down an eta-ladder.

    Starting at eta_top with the root nearest the upper branch, descend a
    dyadic ladder picking at each rung the root nearest the previous one;
    the tracked root must stay within constant * F_z(r) of the upper branch
    at every rung.
    """
    if not 0 <= r <= 1:
        raise InvalidParametersError(f"r must lie in [0, 1], got {r}")
    eta = float(eta_top)
    s_prev = None
    worst = 0.0
    ok = True
    while eta >= eta_bottom:
        z = complex(E, eta)
        R = (1 + abs(z)) * r * complex(math.cos(phase), math.sin(phase))
        roots = solve_two_roots(z, R)
        if s_prev is None:
            m = m_semicircle(z)
            s = min(roots, key=lambda c: abs(c - m))
        else:
            s = min(roots, key=lambda c: abs(c - s_prev))
        s_prev = s
        err = abs(s - m_semicircle(z))
        bound = constant * f_envelope(z, r)
        if bound > 0:
            worst = max(worst, err / bound)
        if err > bound + 1e-12:
            ok = False
        eta /= 2
    return {"check": "ladder", "E": E, "r": r, "phase": phase,
            "worst_ratio": worst, "pass": ok}


def ladder_sweep(ntracks: int = 200, seed: int = 1) -> dict:
    """Randomized collection of ladder checks."""
    rng = stream(seed, 1)
    worst = 0.0
    failures = 0
    for _ in range(ntracks):
        rep = ladder_check(E=float(rng.uniform(-5, 5)),
                           r=float(rng.uniform(0, 1)),
                           phase=float(rng.uniform(0, 2 * math.pi)))
        worst = max(worst, rep["worst_ratio"])
        if not rep["pass"]:
            failures += 1
    return {"check": "ladder_sweep", "tracks": ntracks, "failures": failures,
            "worst_ratio": worst, "pass": failures == 0, "seed": seed}


# ---------------------------------------------------------------------------
# Martingale tail bound

@dataclass(frozen=True)
class MartingaleSpec:
    """Bounded-increment martingale data: |X_{k+1} - X_k| <= step_bound and
    per-step conditional variances."""

    step_bound: float
    variances: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.step_bound > 0:
            raise InvalidParametersError("step bound must be positive")
        if any(v < 0 for v in self.variances):
            raise InvalidParametersError("variances must be nonnegative")

    @property
    def total_variance(self) -> float:
        return float(sum(self.variances))

    @property
    def steps(self) -> int:
        return len(self.variances)


def arcsinh_tail_bound(xi: float, M: float, S: float) -> float:
    """Tail bound 4 exp(-xi / (2 sqrt2 M) * arcsinh(M xi / (2 sqrt2 S)));
    sharper than the Gaussian-type bound when S << M xi."""
    if M <= 0 or S <= 0 or xi < 0:
        raise InvalidParametersError("need M > 0, S > 0, xi >= 0")
    c = 2.0 * math.sqrt(2.0)
    return 4.0 * math.exp(-(xi / (c * M)) * math.asinh(M * xi / (c * S)))


def simulate_martingale_tails(spec: MartingaleSpec, runs: int, seed: int,
                              xi_grid: tuple[float, ...]) -> dict:
    """Empirical tails of the +-step_bound random walk (a martingale whose
    conditional variance meets the spec exactly) against the bound."""
    if any(abs(v - spec.step_bound ** 2) > 1e-12 for v in spec.variances):
        raise InvalidParametersError(
            "the simulator realizes +-M steps, so variances must equal M^2")
    rng = stream(seed, 2)
    steps = rng.integers(0, 2, size=(runs, spec.steps), dtype=np.int8)
    walk = np.abs((2 * steps.sum(axis=1, dtype=np.int64) - spec.steps)
                  * spec.step_bound)
    rows = []
    ok = True
    for xi in xi_grid:
        emp = float(np.mean(walk >= xi))
        bound = arcsinh_tail_bound(xi, spec.step_bound, spec.total_variance)
        rows.append({"xi": xi, "empirical": emp, "bound": bound,
                     "pass": emp <= bound})
        ok = ok and emp <= bound
    return {"check": "arcsinh_tails", "runs": runs, "seed": seed,
            "rows": rows, "pass": ok}


# ---------------------------------------------------------------------------
# Exchangeable moments

@dataclass(frozen=True)
class ExchangeableEnsemble:
    """Coefficients a (mean zero, squared sum at most 1) against a base
    vector or matrix whose exchangeability is realized by uniform
    relabeling."""

    coefficients: tuple
    base_vector: tuple | None = None
    base_matrix: tuple | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.coefficients, dtype=float)
        if abs(a.sum()) > 1e-12:
            raise InvalidParametersError("coefficients must sum to zero")
        if a @ a > 1 + 1e-12:
            raise InvalidParametersError("squared coefficient sum must be <= 1")
        if (self.base_vector is None) == (self.base_matrix is None):
            raise InvalidParametersError(
                "exactly one of base_vector / base_matrix required")
        n = len(self.coefficients)
        if self.base_vector is not None and len(self.base_vector) != n:
            raise InvalidParametersError("base vector length mismatch")
        if self.base_matrix is not None and (
                len(self.base_matrix) != n
                or any(len(row) != n for row in self.base_matrix)):
            raise InvalidParametersError("base matrix shape mismatch")

    @property
    def n(self) -> int:
        return len(self.coefficients)


def _check_budget(n: int, p: int) -> None:
    if n > 8 or p > 6:
        raise BudgetExceededError(f"enumeration limited to n <= 8, p <= 6 "
                                  f"(got n={n}, p={p})")
    if p < 1:
        raise InvalidParametersError("p must be >= 1")


def _all_rational(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def exchangeable_moment_exact(ens: ExchangeableEnsemble, p: int):
    """Exact p-th moment of sum_i a_i Y_i (or of the bilinear form for a
    base matrix) averaged over all n! relabelings.  Returns a Fraction when
    every input is rational, else a compensated-sum float."""
    _check_budget(ens.n, p)
    n = ens.n
    a = list(ens.coefficients)
    if ens.base_vector is not None:
        y = list(ens.base_vector)
        exact = _all_rational(a) and _all_rational(y)
        terms = []
        for perm in itertools.permutations(range(n)):
            x = sum(ai * y[pi] for ai, pi in zip(a, perm))
            terms.append(x ** p)
        if exact:
            return Fraction(sum(terms), math.factorial(n))
        return math.fsum(terms) / math.factorial(n)
    ymat = [list(row) for row in ens.base_matrix]
    exact = _all_rational(a) and all(_all_rational(row) for row in ymat)
    terms = []
    for perm in itertools.permutations(range(n)):
        x = sum(a[i] * a[j] * ymat[perm[i]][perm[j]]
                for i in range(n) for j in range(n))
        terms.append(x ** p)
    if exact:
        return Fraction(sum(terms), math.factorial(n))
    return math.fsum(terms) / math.factorial(n)


def exchangeable_moment_mc(ens: ExchangeableEnsemble, p: int, samples: int,
                           seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, standard error) of the same moment."""
    rng = stream(seed, 3)
    n = ens.n
    a = np.asarray(ens.coefficients, dtype=float)
    perms = rng.permuted(np.tile(np.arange(n), (samples, 1)), axis=1)
    if ens.base_vector is not None:
        y = np.asarray(ens.base_vector, dtype=float)
        vals = (y[perms] @ a) ** p
    else:
        ymat = np.asarray(ens.base_matrix, dtype=float)
        b = np.zeros((samples, n))
        np.put_along_axis(b, perms, a[None, :].repeat(samples, axis=0), axis=1)
        vals = np.einsum("ki,ij,kj->k", b, ymat, b) ** p
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def _p_factor(p: int) -> float:
    return p * p / math.log(p)


def exchangeable_moment_bound_check(ens: ExchangeableEnsemble, p: int,
                                    C: float = 16.0) -> dict:
    """Vector-case moment inequality: the L^p norm of sum a_i Y_i is at most
    C (p^2/log p) times the L^p norm of a single entry."""
    if ens.base_vector is None:
        raise InvalidParametersError("vector-case check needs a base vector")
    if p < 2 or p % 2:
        raise InvalidParametersError("bound check needs even p >= 2")
    moment = exchangeable_moment_exact(ens, p)
    lhs = float(moment) ** (1.0 / p)
    y = np.asarray(ens.base_vector, dtype=float)
    norm_y1 = float(np.mean(np.abs(y) ** p)) ** (1.0 / p)
    rhs = C * _p_factor(p) * norm_y1
    return {"check": "exchangeable_vector_bound", "p": p, "C": C,
            "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs else math.inf,
            "pass": lhs <= rhs + 1e-12}


def exchangeable_matrix_bound_check(ens: ExchangeableEnsemble, p: int,
                                    C: float = 16.0) -> dict:
    """Matrix-case inequality: the bilinear form's L^p norm is at most the
    diagonal entry norm plus C (p^2/log p)^2 times the off-diagonal entry
    norm."""
    if ens.base_matrix is None:
        raise InvalidParametersError("matrix-case check needs a base matrix")
    if p < 2 or p % 2:
        raise InvalidParametersError("bound check needs even p >= 2")
    moment = exchangeable_moment_exact(ens, p)
    lhs = float(moment) ** (1.0 / p)
    ymat = np.asarray(ens.base_matrix, dtype=float)
    n = ens.n
    diag = np.abs(np.diag(ymat)) ** p
    off = np.abs(ymat[~np.eye(n, dtype=bool)]) ** p
    norm_diag = float(diag.mean()) ** (1.0 / p)
    norm_off = float(off.mean()) ** (1.0 / p) if off.size else 0.0
    rhs = norm_diag + C * _p_factor(p) ** 2 * norm_off
    return {"check": "exchangeable_matrix_bound", "p": p, "C": C,
            "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs else math.inf,
            "pass": lhs <= rhs + 1e-12}
