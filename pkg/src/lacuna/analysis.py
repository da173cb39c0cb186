"""Norms, lacunarity functionals, and empirical constant estimation.

Function norms are taken against normalized Haar measure,
``||f||_q = ((1/|G|) sum |f|^q)^(1/q)`` with ``||f||_inf = max |f|``;
coefficient norms are plain ``l_p`` sums.  The two functionals under study:

* Khinchin ratio   ``||Q||_q / ||A||_2``   (q > 2), and
* Sidon ratio      ``||A||_p / ||Q||_inf`` with p = 2d/(d+1) by default.

Both are scale-invariant in the coefficients, so the estimators search the
unit sphere: projected gradient ascent on ``||Q||_q^q`` for even q, and a
coordinate-wise phase search that minimizes ``||Q||_inf`` at pinned
modulus.  Trials are independent, seeded per ``(seed, trial)``, and every
accepted step improves the objective, so trajectories are monotone and
results reproduce bit-for-bit.

Theoretical ceilings accompany the estimates when their model constants
are supplied: ``sqrt(d) (2d)^d C kappa_model`` for the Khinchin kind and
``(2d)^d C / c * d^((d+1)/(2d))`` for the Sidon kind, where C is the
largest variation bound of the extraction measures for this d.  The model
constants are configuration inputs, not derived quantities, so only
one-sided (boundedness) claims are ever asserted against the ceilings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chaos import (
    ChaosPolynomial,
    CompressedIndex,
    compress,
    enumerate_polynomial,
    term_values,
)
from .dissociation import DEFAULT_ENUM_BUDGET, CharacterSystem, is_d_dissociated
from .errors import (
    InvalidP,
    InvalidQ,
    NotDissociated,
    UnsupportedQ,
    ZeroPolynomial,
)
from .parallel import map_indexed, trial_rng
from .riesz import extraction_coefficients

_ASCENT_STEP = 0.1
_ASCENT_TOL = 1e-9
_ASCENT_MAX_STEPS = 500


def lq_norm(values, q) -> float:
    """Normalized-Haar L_q norm of a value table; q = inf gives max |f|."""
    vals = np.abs(np.asarray(values, dtype=np.complex128))
    if math.isinf(q):
        return float(vals.max())
    q = float(q)
    if q < 1:
        raise InvalidQ(f"q must be >= 1 or infinity, got {q}")
    return float(np.mean(vals**q) ** (1.0 / q))


def lp_coeff_norm(coefficients, p) -> float:
    """(sum |A_i|^p)^(1/p) over a coefficient vector."""
    p = float(p)
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    mags = np.abs(np.asarray(coefficients, dtype=np.complex128))
    if math.isinf(p):
        return float(mags.max())
    return float(np.sum(mags**p) ** (1.0 / p))


def _nonzero_coefficients(polynomial: ChaosPolynomial) -> np.ndarray:
    coeffs = polynomial.coefficient_vector()
    if coeffs.size == 0 or not np.abs(coeffs).max():
        raise ZeroPolynomial("ratio undefined for the zero polynomial")
    return coeffs


def khinchin_ratio(polynomial: ChaosPolynomial, q) -> float:
    """||Q||_q / ||A||_2 for q > 2."""
    if not math.isinf(q) and float(q) <= 2:
        raise InvalidQ(f"the L_2-L_q comparison needs q > 2, got {q}")
    coeffs = _nonzero_coefficients(polynomial)
    return lq_norm(polynomial.values(), q) / lp_coeff_norm(coeffs, 2)


def sidon_ratio(polynomial: ChaosPolynomial, p: float | None = None) -> float:
    """||A||_p / ||Q||_inf with p defaulting to 2d/(d+1)."""
    coeffs = _nonzero_coefficients(polynomial)
    if p is None:
        d = polynomial.degree
        p = 2 * d / (d + 1)
    return lp_coeff_norm(coeffs, p) / lq_norm(polynomial.values(), math.inf)


def values_matrix(system: CharacterSystem, indices: Sequence) -> np.ndarray:
    """Column t holds the value table of the t-th index's character product."""
    cols = [term_values(system, compress(idx)) for idx in indices]
    return np.stack(cols, axis=1) if cols else np.zeros((system.group.size, 0), complex)


def _grad_lq_q_matrix(matrix: np.ndarray, coeffs: np.ndarray, q: int) -> np.ndarray:
    """Complex gradient of ||Q||_q^q in the coefficients, for even q.

    Entry t is d/dRe(A_t) + i * d/dIm(A_t).
    """
    v = matrix @ coeffs
    weight = np.abs(v) ** (q - 2) * v
    return q * (matrix.conj().T @ weight) / matrix.shape[0]


def grad_lq_q(polynomial: ChaosPolynomial, q: int) -> np.ndarray:
    """Gradient of ||Q||_q^q over (re, im) of each coefficient, q in {4, 6, 8}.

    Returned as one complex number per term in canonical term order: the
    real part is the derivative in Re(A_t), the imaginary part in Im(A_t).
    """
    if q not in (4, 6, 8):
        raise UnsupportedQ(f"analytic gradient supports q in {{4, 6, 8}}, got {q}")
    indices = [idx for idx, _ in polynomial.terms()]
    matrix = values_matrix(polynomial.system, indices)
    return _grad_lq_q_matrix(matrix, polynomial.coefficient_vector(), q)


def khinchin_ceiling(d: int, kappa_model: float) -> float:
    """sqrt(d) (2d)^d C kappa_model with C = max_s variation bound."""
    c_max = max(extraction_coefficients(d, s).variation_bound for s in range(1, d + 1))
    return math.sqrt(d) * (2 * d) ** d * c_max * float(kappa_model)


def sidon_ceiling(d: int, c_model: float) -> float:
    """(2d)^d C / c * d^((d+1)/(2d)) with C = max_s variation bound."""
    c_max = max(extraction_coefficients(d, s).variation_bound for s in range(1, d + 1))
    return (2 * d) ** d * c_max / float(c_model) * d ** ((d + 1) / (2 * d))


@dataclass(eq=False)
class ConstantEstimate:
    """Empirical lacunarity constant plus the run that produced it."""

    kind: str
    d: int
    exponent: float
    system_size: int
    trials: int
    seed: int
    constant: float
    coefficients: np.ndarray
    ceiling: float | None = None
    histories: list[list[float]] | None = None

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "exponent": self.exponent,
            "system_size": self.system_size,
            "trials": self.trials,
            "seed": self.seed,
            "constant": self.constant,
            "ceiling": self.ceiling,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }


def _default_indices(system: CharacterSystem, d: int) -> list[CompressedIndex]:
    return [compress(idx) for idx in enumerate_polynomial(len(system), d)]


def _check_estimator_args(system, d, trials, check, budget):
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if check:
        report = is_d_dissociated(system, d, budget=budget)
        if not report.dissociated:
            raise NotDissociated(
                f"system is not {d}-dissociated; witness {report.witness}",
                report=report,
            )


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return vec / np.linalg.norm(vec)


def estimate_khinchin_constant(
    system: CharacterSystem,
    d: int,
    q,
    trials: int,
    seed: int,
    indices: Sequence | None = None,
    kappa_model: float | None = None,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
    workers: int = 1,
    record_history: bool = False,
) -> ConstantEstimate:
    """Maximize ||Q||_q / ||A||_2 over unit coefficient vectors.

    Each trial starts from a random unit vector; for even q in {4, 6, 8}
    it then runs projected gradient ascent (step 0.1, halved on
    non-improvement, stop at relative stall 1e-9 or 500 steps).
    """
    if not math.isinf(q) and float(q) <= 2:
        raise InvalidQ(f"q must exceed 2, got {q}")
    _check_estimator_args(system, d, trials, check, budget)
    idx = list(indices) if indices is not None else _default_indices(system, d)
    matrix = values_matrix(system, idx)
    n = matrix.shape[1]
    use_ascent = q in (4, 6, 8)

    def run_trial(t: int) -> tuple[float, np.ndarray, list[float]]:
        rng = trial_rng(seed, t)
        coeffs = _random_unit(rng, n)
        ratio = lq_norm(matrix @ coeffs, q)
        history = [ratio]
        if use_ascent:
            step = _ASCENT_STEP
            for _ in range(_ASCENT_MAX_STEPS):
                grad = _grad_lq_q_matrix(matrix, coeffs, int(q))
                candidate = coeffs + step * grad
                candidate /= np.linalg.norm(candidate)
                new_ratio = lq_norm(matrix @ candidate, q)
                if new_ratio > ratio:
                    gain = new_ratio - ratio
                    coeffs, ratio = candidate, new_ratio
                    history.append(ratio)
                    if gain < _ASCENT_TOL:
                        break
                else:
                    step /= 2
                    if step < 1e-14:
                        break
        return ratio, coeffs, history

    results = map_indexed(run_trial, trials, workers=workers)
    best = max(range(trials), key=lambda t: results[t][0])
    ceiling = khinchin_ceiling(d, kappa_model) if kappa_model is not None else None
    return ConstantEstimate(
        kind="khinchin",
        d=d,
        exponent=float(q),
        system_size=len(system),
        trials=trials,
        seed=seed,
        constant=results[best][0],
        coefficients=results[best][1],
        ceiling=ceiling,
        histories=[r[2] for r in results] if record_history else None,
    )


def estimate_sidon_constant(
    system: CharacterSystem,
    d: int,
    trials: int,
    seed: int,
    p: float | None = None,
    indices: Sequence | None = None,
    c_model: float | None = None,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
    workers: int = 1,
    phase_grid: int = 16,
    max_sweeps: int = 40,
    record_history: bool = False,
) -> ConstantEstimate:
    """Maximize ||A||_p / ||Q||_inf over unimodular coefficient patterns.

    The modulus of every coefficient is pinned to one (the sharpness
    question lives in the phases), so maximizing the ratio means driving
    ||Q||_inf down: random phase starts followed by coordinate-wise sweeps
    over a phase grid, accepting only strict improvements.
    """
    default_p = 2 * d / (d + 1)
    p_eff = default_p if p is None else float(p)
    if p_eff < 1:
        raise InvalidP(f"p must be >= 1, got {p_eff}")
    _check_estimator_args(system, d, trials, check, budget)
    idx = list(indices) if indices is not None else _default_indices(system, d)
    matrix = values_matrix(system, idx)
    n = matrix.shape[1]
    candidates = np.exp(2j * np.pi * np.arange(phase_grid) / phase_grid)

    def run_trial(t: int) -> tuple[float, np.ndarray, list[float]]:
        rng = trial_rng(seed, t)
        coeffs = np.exp(2j * np.pi * rng.uniform(size=n))
        values = matrix @ coeffs
        peak = float(np.abs(values).max())
        coeff_norm = lp_coeff_norm(coeffs, p_eff)
        history = [coeff_norm / peak]
        for _ in range(max_sweeps):
            improved = False
            for t_idx in range(n):
                shifted = values[:, None] + np.outer(
                    matrix[:, t_idx], candidates - coeffs[t_idx]
                )
                peaks = np.abs(shifted).max(axis=0)
                pick = int(np.argmin(peaks))
                if peaks[pick] < peak - 1e-13:
                    values = shifted[:, pick]
                    coeffs = coeffs.copy()
                    coeffs[t_idx] = candidates[pick]
                    peak = float(peaks[pick])
                    history.append(coeff_norm / peak)
                    improved = True
            if not improved:
                break
        return coeff_norm / peak, coeffs, history

    results = map_indexed(run_trial, trials, workers=workers)
    best = max(range(trials), key=lambda t: results[t][0])
    ceiling = None
    if c_model is not None and abs(p_eff - default_p) < 1e-12:
        ceiling = sidon_ceiling(d, c_model)
    return ConstantEstimate(
        kind="sidon",
        d=d,
        exponent=p_eff,
        system_size=len(system),
        trials=trials,
        seed=seed,
        constant=results[best][0],
        coefficients=results[best][1],
        ceiling=ceiling,
        histories=[r[2] for r in results] if record_history else None,
    )
