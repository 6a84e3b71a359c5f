"""Spectral-radius profiles, stability thresholds, bound suites, and fuzzing.

The central objects are scans of t -> rho(P(t)) and t -> rho(R(t)) for an
operator family: profiles over a grid, first-crossing threshold searches,
grid assertions of the 2/rho(B) stability bounds, slope checks against
the -pi^T B e prediction, and a randomized conjecture fuzzer that emits
replayable violation certificates.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    GenerationExhaustedError,
    HypothesesUnmetError,
    InvalidGridError,
    NoConvergenceError,
    NotSymmetricError,
    SingularShiftError,
)
from .generators import (
    random_alpha_beta,
    random_bipartite_stochastic,
    random_blur_kernel,
    random_doubly_stochastic,
    random_nonneg_diagonal,
    random_positive_stochastic,
    random_unit_psd,
)
from .matrices import is_positive_semidefinite, structure, validate_stochastic
from .operators import (
    OperatorFamily,
    P_of,
    R_of,
    alpha_beta_B,
    build_deblur,
    build_superres,
    conjecture_hypotheses,
    ConjectureHypotheses,
    gram,
    kernel_denoiser,
    make_family,
    predicted_slope,
)
from .spectral import rho

__all__ = [
    "StabilityProfile",
    "ThresholdReport",
    "TheoremCheckReport",
    "SlopeCheck",
    "ConjectureTrialResult",
    "CampaignSummary",
    "SuiteInstanceResult",
    "profile",
    "profile_to_csv",
    "stability_threshold",
    "check_theorem_bound",
    "slope_check",
    "evaluate_conjecture_family",
    "conjecture_trial",
    "run_campaign",
    "suite_family",
    "run_suite",
    "THEOREMS",
    "GENERATORS",
]

THEOREMS = ("dbl_stochastic", "inpainting", "alpha_beta", "conjecture")
GENERATORS = ("imaging", "general_psd")

_VIOLATION_SLACK = 1e-12
_SUITE_SLACK = 1e-10


def _rho_at(family: OperatorFamily, which: str, t: float) -> float:
    if which == "P":
        return rho(P_of(family, t))
    if which == "R":
        return rho(R_of(family, t))
    raise ValueError(f"which must be 'P' or 'R', got {which!r}")


@dataclass(frozen=True)
class StabilityProfile:
    """rho(P(t)) and rho(R(t)) sampled on a common grid.

    NaN marks points where the value is undefined (singular shift) or the
    eigensolver failed; the scan itself never aborts.
    """

    family_labels: tuple[str, ...]
    grid: np.ndarray
    rho_P: np.ndarray
    rho_R: np.ndarray


def profile(family: OperatorFamily, t_min: float, t_max: float, steps: int) -> StabilityProfile:
    """Sample both spectral radii at `steps` uniform points of [t_min, t_max]."""
    if not (0.0 <= t_min < t_max):
        raise InvalidGridError("need 0 <= t_min < t_max")
    if steps < 2:
        raise InvalidGridError("need steps >= 2")
    grid = np.linspace(t_min, t_max, steps)
    rho_p = np.empty(steps)
    rho_r = np.empty(steps)
    for i, t in enumerate(grid):
        try:
            rho_p[i] = _rho_at(family, "P", float(t))
        except NoConvergenceError:
            rho_p[i] = np.nan
        try:
            rho_r[i] = _rho_at(family, "R", float(t))
        except (SingularShiftError, NoConvergenceError):
            rho_r[i] = np.nan
    return StabilityProfile(family_labels=family.labels, grid=grid, rho_P=rho_p, rho_R=rho_r)


def profile_to_csv(prof: StabilityProfile, path) -> None:
    """Write `t,rho_P,rho_R` rows at 12 significant digits; NaN -> empty field."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "rho_P", "rho_R"])
        for t, rp, rr in zip(prof.grid, prof.rho_P, prof.rho_R):
            writer.writerow(
                [
                    f"{t:.12g}",
                    "" if math.isnan(rp) else f"{rp:.12g}",
                    "" if math.isnan(rr) else f"{rr:.12g}",
                ]
            )


@dataclass(frozen=True)
class ThresholdReport:
    """First loss of stability found by a grid scan plus bisection.

    The classification is relative to the declared scan window: rho is not
    monotone in t, so T_star is the first crossing at the scanned
    resolution, not a global supremum.
    """

    which: str
    classification: str
    T_star: float | None
    bracket: tuple[float, float] | None
    bisect_tol: float
    scan_max: float
    grid_step: float
    eps0: float

    def to_json_dict(self) -> dict:
        return {
            "which": self.which,
            "classification": self.classification,
            "T_star": self.T_star,
            "bracket": list(self.bracket) if self.bracket else None,
            "bisect_tol": self.bisect_tol,
            "scan_max": self.scan_max,
            "grid_step": self.grid_step,
            "eps0": self.eps0,
        }


def _rho_or_inf(family: OperatorFamily, which: str, t: float) -> float:
    # A singular shift inside a threshold scan counts as loss of stability.
    try:
        return _rho_at(family, which, t)
    except SingularShiftError:
        return float("inf")


def stability_threshold(
    family: OperatorFamily,
    which: str,
    scan_max: float,
    grid_step: float | None = None,
    bisect_tol: float = 1e-6,
    eps0: float = 1e-4,
) -> ThresholdReport:
    """Locate the first t > 0 with rho >= 1 (zero slack) inside the scan.

    Scans t = eps0, eps0 + grid_step, ... <= scan_max; a crossing is
    refined by bisection until the bracket is narrower than bisect_tol.
    """
    if grid_step is None:
        grid_step = scan_max / 2048.0
    if not (0.0 < eps0 < grid_step < scan_max) or bisect_tol <= 0.0:
        raise InvalidGridError(
            f"need 0 < eps0 ({eps0}) < grid_step ({grid_step}) < scan_max ({scan_max}) and bisect_tol > 0"
        )

    def report(classification, t_star=None, bracket=None):
        return ThresholdReport(
            which=which,
            classification=classification,
            T_star=t_star,
            bracket=bracket,
            bisect_tol=bisect_tol,
            scan_max=scan_max,
            grid_step=grid_step,
            eps0=eps0,
        )

    if _rho_or_inf(family, which, eps0) >= 1.0:
        return report("unstable_from_start")
    prev = eps0
    t = eps0 + grid_step
    edge = scan_max * (1.0 + 1e-12)
    while t <= edge:
        if _rho_or_inf(family, which, t) >= 1.0:
            lo, hi = prev, t
            while hi - lo > bisect_tol:
                mid = 0.5 * (lo + hi)
                if _rho_or_inf(family, which, mid) >= 1.0:
                    hi = mid
                else:
                    lo = mid
            return report("stable_then_unstable", t_star=0.5 * (lo + hi), bracket=(lo, hi))
        prev = t
        t += grid_step
    return report("stable_throughout_scan")


@dataclass(frozen=True)
class TheoremCheckReport:
    theorem: str
    which: str
    grid_points: int
    upper: float
    passed: bool
    violation: tuple[float, float] | None
    hypotheses_enforced: bool


def _require(condition: bool, details: str) -> None:
    if not condition:
        raise HypothesesUnmetError(details)


def _check_hypotheses(family: OperatorFamily, theorem: str) -> None:
    w = family.W.matrix
    b = family.B
    tol = 1e-10
    if theorem == "dbl_stochastic":
        info = structure(family.W)
        _require(info.doubly_stochastic, "W is not doubly stochastic")
        wtw = validate_stochastic(w.T @ w, tol=1e-8)
        wwt = validate_stochastic(w @ w.T, tol=1e-8)
        _require(structure(wtw).irreducible, "W^T W is not irreducible")
        _require(structure(wwt).irreducible, "W W^T is not irreducible")
        _require(_is_psd(b, tol), "B is not positive semidefinite")
        _require(np.abs(b.sum(axis=1)).max() > tol, "Be = 0")
    elif theorem == "inpainting":
        _require(structure(family.W).irreducible, "W is not irreducible")
        off = b - np.diag(np.diag(b))
        _require(np.abs(off).max() <= 1e-12, "B is not diagonal")
        _require(np.diag(b).min() >= -tol, "B has negative diagonal entries")
        _require(np.diag(b).max() > tol, "B = 0")
    elif theorem == "alpha_beta":
        _require(structure(family.W).primitive, "W is not primitive")
        n = family.n
        beta = float(b[0, 1]) if n > 1 else 0.0
        alpha = float(b[0, 0]) - beta
        expected = alpha * np.eye(n) + beta * np.ones((n, n))
        _require(np.abs(b - expected).max() <= tol, "B is not of the form alpha*I + beta*E")
        _require(alpha >= -tol, "alpha < 0")
        _require(alpha + n * beta > tol, "alpha + n*beta <= 0")
    elif theorem == "conjecture":
        hyp = conjecture_hypotheses(family)
        _require(hyp.w_primitive, "W is not primitive")
        _require(hyp.b_psd, "B is not positive semidefinite")
        _require(hyp.be_bounded_by_rho, f"Be exceeds rho(B)e (margin {hyp.margin})")
        _require(hyp.pibe_positive, f"pi^T B e = {hyp.pibe} is not positive")
    else:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def _is_psd(b: np.ndarray, tol: float) -> bool:
    try:
        return is_positive_semidefinite(b, tol=tol)
    except NotSymmetricError:
        return False


def check_theorem_bound(
    family: OperatorFamily,
    which: str,
    theorem: str,
    grid_steps: int = 64,
    enforce_hypotheses: bool = True,
    slack: float = _SUITE_SLACK,
) -> TheoremCheckReport:
    """Assert rho < 1 - slack at interior points of (0, 2/rho(B)).

    Hypotheses of the named bound are verified first and raise
    HypothesesUnmetError when violated; pass enforce_hypotheses=False to
    probe the bound anyway (diagnostic mode). Failures return the first
    offending (t, rho) rather than raising.
    """
    if grid_steps < 1:
        raise InvalidGridError("need grid_steps >= 1")
    if enforce_hypotheses:
        _check_hypotheses(family, theorem)
    elif theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    if family.rho_B <= 0.0:
        raise HypothesesUnmetError("rho(B) = 0; the interval (0, 2/rho(B)) is empty")
    upper = 2.0 / family.rho_B
    for k in range(1, grid_steps + 1):
        t = upper * k / (grid_steps + 1)
        r = _rho_or_inf(family, which, t)
        if r >= 1.0 - slack:
            return TheoremCheckReport(
                theorem=theorem,
                which=which,
                grid_points=grid_steps,
                upper=upper,
                passed=False,
                violation=(t, r),
                hypotheses_enforced=enforce_hypotheses,
            )
    return TheoremCheckReport(
        theorem=theorem,
        which=which,
        grid_points=grid_steps,
        upper=upper,
        passed=True,
        violation=None,
        hypotheses_enforced=enforce_hypotheses,
    )


class SlopeCheck(NamedTuple):
    fd_slope: float
    predicted: float
    abs_error: float


def slope_check(family: OperatorFamily, which: str, h: float = 1e-5) -> SlopeCheck:
    """One-sided finite-difference slope of rho at 0 vs the -pi^T B e prediction.

    Uses rho(0) = 1 exactly (W is stochastic). h should stay at or below
    1e-4 so t = h remains inside the analyticity neighborhood.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    fd = (_rho_at(family, which, h) - 1.0) / h
    predicted = predicted_slope(family)
    return SlopeCheck(fd_slope=fd, predicted=predicted, abs_error=abs(fd - predicted))


@dataclass(frozen=True)
class ConjectureTrialResult:
    """One fuzzer trial: generated instance, hypotheses, and verdict.

    A `violation` verdict carries a certificate (t, rho, which) with
    0 < t < 2/rho(B) and rho >= 1 - 1e-12; trials are pure functions of
    (n, generator, seed), so certificates replay exactly.
    """

    seed: int
    n: int
    generator: str
    hypotheses: ConjectureHypotheses
    verdict: str
    certificate: tuple[float, float, str] | None

    def to_json_dict(self) -> dict:
        return {
            "record": "trial",
            "seed": self.seed,
            "n": self.n,
            "generator": self.generator,
            "hypotheses": {
                "w_primitive": self.hypotheses.w_primitive,
                "b_psd": self.hypotheses.b_psd,
                "be_bounded_by_rho": self.hypotheses.be_bounded_by_rho,
                "pibe_positive": self.hypotheses.pibe_positive,
                "pibe": self.hypotheses.pibe,
                "margin": self.hypotheses.margin,
            },
            "verdict": self.verdict,
            "certificate": list(self.certificate) if self.certificate else None,
        }


def evaluate_conjecture_family(
    family: OperatorFamily,
    grid_points: int = 256,
    slack: float = _VIOLATION_SLACK,
) -> tuple[ConjectureHypotheses, str, tuple[float, float, str] | None]:
    """Check hypotheses, then scan (0, 2/rho(B)) for a stability violation."""
    hyp = conjecture_hypotheses(family)
    if not hyp.all_met():
        return hyp, "hypotheses_unmet", None
    upper = 2.0 / family.rho_B
    for k in range(1, grid_points + 1):
        t = upper * k / (grid_points + 1)
        for which in ("P", "R"):
            r = _rho_or_inf(family, which, t)
            if r >= 1.0 - slack:
                return hyp, "violation", (t, r, which)
    return hyp, "pass", None


def _imaging_instance(rng: np.random.Generator, n: int) -> OperatorFamily:
    signal = rng.uniform(0.0, 1.0, size=n)
    bandwidth = float(rng.uniform(0.2, 1.0))
    w = kernel_denoiser(signal, bandwidth)
    h = build_deblur(random_blur_kernel(rng, n), n)
    if n >= 4 and rng.random() < 0.5:
        op = build_superres(h, stride=2)
        label = "superres"
    else:
        op = h
        label = "deblur"
    return make_family(w, gram(op), labels=(f"imaging:{label}",))


def _general_psd_instance(rng: np.random.Generator, n: int, cap: int = 1000) -> OperatorFamily:
    for _ in range(cap):
        w = random_positive_stochastic(rng, n)
        b = random_unit_psd(rng, n)
        family = make_family(w, b, labels=("general_psd",))
        hyp = conjecture_hypotheses(family)
        if hyp.all_met():
            return family
    raise GenerationExhaustedError(f"no admissible (W, B) in {cap} rejection rounds")


def conjecture_trial(n: int, generator: str, seed: int) -> ConjectureTrialResult:
    """Run one seeded conjecture trial; deterministic in (n, generator, seed)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    if generator == "imaging":
        family = _imaging_instance(rng, n)
    elif generator == "general_psd":
        family = _general_psd_instance(rng, n)
    else:
        raise ValueError(f"unknown generator {generator!r}; expected one of {GENERATORS}")
    hyp, verdict, certificate = evaluate_conjecture_family(family)
    return ConjectureTrialResult(
        seed=seed,
        n=n,
        generator=generator,
        hypotheses=hyp,
        verdict=verdict,
        certificate=certificate,
    )


@dataclass(frozen=True)
class CampaignSummary:
    trials: int
    passes: int
    violations: int
    hypotheses_unmet: int
    certificates: tuple[tuple[int, int, str, float, float, str], ...]

    def to_json_dict(self) -> dict:
        return {
            "record": "summary",
            "trials": self.trials,
            "passes": self.passes,
            "violations": self.violations,
            "hypotheses_unmet": self.hypotheses_unmet,
            "certificates": [list(c) for c in self.certificates],
        }


def _trial_n(seed: int, n_min: int, n_max: int) -> int:
    return int(np.random.default_rng([seed, 0x6E]).integers(n_min, n_max + 1))


def _run_trial_spec(spec: tuple[int, str, int]) -> ConjectureTrialResult:
    n, generator, seed = spec
    return conjecture_trial(n, generator, seed)


def run_campaign(
    trials: int,
    n_range: tuple[int, int] = (2, 8),
    generators: tuple[str, ...] = ("imaging", "general_psd"),
    base_seed: int = 0,
    workers: int = 1,
) -> tuple[list[ConjectureTrialResult], CampaignSummary]:
    """Run `trials` seeded conjecture trials; trial i uses seed base_seed + i.

    Results are merged in seed order, so the output is identical for any
    worker count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n_min, n_max = n_range
    if not (2 <= n_min <= n_max):
        raise ValueError("need 2 <= n_min <= n_max")
    if not generators:
        raise ValueError("need at least one generator")
    for g in generators:
        if g not in GENERATORS:
            raise ValueError(f"unknown generator {g!r}; expected one of {GENERATORS}")
    specs = []
    for i in range(trials):
        seed = base_seed + i
        specs.append((_trial_n(seed, n_min, n_max), generators[i % len(generators)], seed))
    if workers <= 1:
        results = [_run_trial_spec(s) for s in specs]
    else:
        chunk = max(1, trials // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial_spec, specs, chunksize=chunk))
    counts = Counter(r.verdict for r in results)
    certificates = tuple(
        (r.seed, r.n, r.generator, r.certificate[0], r.certificate[1], r.certificate[2])
        for r in results
        if r.verdict == "violation"
    )
    summary = CampaignSummary(
        trials=trials,
        passes=counts.get("pass", 0),
        violations=counts.get("violation", 0),
        hypotheses_unmet=counts.get("hypotheses_unmet", 0),
        certificates=certificates,
    )
    return results, summary


@dataclass(frozen=True)
class SuiteInstanceResult:
    suite: str
    seed: int
    n: int
    passed: bool
    which_failed: str | None
    violation: tuple[float, float] | None

    def to_json_dict(self) -> dict:
        return {
            "record": "instance",
            "suite": self.suite,
            "seed": self.seed,
            "n": self.n,
            "passed": self.passed,
            "which_failed": self.which_failed,
            "violation": list(self.violation) if self.violation else None,
        }


def suite_family(suite: str, seed: int, n: int) -> OperatorFamily:
    """Deterministically generate one instance of a theorem property suite."""
    rng = np.random.default_rng(seed)
    if suite == "dbl_stochastic":
        w = random_doubly_stochastic(rng, n)
        b = random_unit_psd(rng, n)
    elif suite == "inpainting":
        if n >= 3 and rng.random() < 0.25:
            w = random_bipartite_stochastic(rng, n)
        else:
            w = random_positive_stochastic(rng, n)
        b = random_nonneg_diagonal(rng, n)
    elif suite == "alpha_beta":
        w = random_positive_stochastic(rng, n)
        alpha, beta = random_alpha_beta(rng, n)
        b = alpha_beta_B(alpha, beta, n)
    elif suite == "conjecture":
        return _general_psd_instance(rng, n)
    else:
        raise ValueError(f"unknown suite {suite!r}; expected one of {THEOREMS}")
    return make_family(w, b, labels=(f"suite:{suite}",))


def run_suite(
    suite: str,
    trials: int,
    n_max: int = 8,
    base_seed: int = 0,
    grid_steps: int = 64,
) -> tuple[list[SuiteInstanceResult], dict]:
    """Run `trials` seeded instances of a theorem suite over n in [2, n_max].

    Each instance asserts rho(P) < 1 and rho(R) < 1 at interior grid
    points of (0, 2/rho(B)).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    results = []
    for i in range(trials):
        seed = base_seed + i
        n = _trial_n(seed, 2, n_max)
        family = suite_family(suite, seed, n)
        passed = True
        which_failed = None
        violation = None
        for which in ("P", "R"):
            report = check_theorem_bound(family, which, suite, grid_steps=grid_steps)
            if not report.passed:
                passed = False
                which_failed = which
                violation = report.violation
                break
        results.append(
            SuiteInstanceResult(
                suite=suite,
                seed=seed,
                n=n,
                passed=passed,
                which_failed=which_failed,
                violation=violation,
            )
        )
    summary = {
        "record": "summary",
        "suite": suite,
        "trials": trials,
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
    }
    return results, summary
