"""Riesz-product densities, modulated variants, and extraction measures.

For a d-dissociated system {gamma_1 .. gamma_m} the degree-d Riesz product
is the pointwise product of one factor per character,

    rho(x) = prod_i [ 1 + (1/2d) * ( sum_{k=1..d} gamma_i^k(x)
                                     + sum_{k in S'_i} gamma_i^{-k}(x) ) ],

where S'_i keeps exactly the inverse powers gamma_i^{-k} that do not
coincide with any forward power gamma_i^j, j = 1..d.  Every factor is a
real trigonometric expression bounded below by 0, so rho is a probability
density whenever no character power gamma_i^k, k <= d, degenerates to the
trivial character (i.e. whenever all orders exceed d).

The modulated variant attaches a unimodular weight to every power.  With
w = exp(2*pi*i/(2d+1)) and a digit vector y (one digit per character), the
weight on gamma_i^{+-k} is w^{+-k*y_i}, mimicking an evaluation of
generalized Rademacher functions with base 2d+1 at y:

    rho_y(x) = prod_i [ 1 + (1/2d) * sum_{k in S''_i}
                        ( w^{k*y_i} gamma_i^k(x) + w^{-k*y_i} gamma_i^{-k}(x) ) ],

where S''_i drops a power k as soon as gamma_i^{-k} equals gamma_i^j for
some j < k.  Each factor is again real and nonnegative.

Exact Fourier laws hold in the *nondegenerate regime*: every character
order exceeds 2d and the system is 2d-dissociated.  That combination makes
the representation of a product gamma_{k_1}^{e_1} ... (|e_i| <= d) unique,
which is what forces

    rho^(s-fold product)   = (2d)^{-s},
    rho_y^(s-fold product) = (product of weights) * (2d)^{-s},

zero off the product spectrum, and the two convolution identities below.
Plain d-dissociation is not enough: exponent differences of two bounded
representations reach 2d.  Operations that promise an exact law check the
regime and raise DegenerateOrder / NotDissociated otherwise; the densities
themselves can always be constructed.

The extraction measure nu_s = c_1 rho + c_2 rho*rho + ... + c_d rho^{*d}
solves a d x d power system in the nodes (2d)^{-i} so that its Fourier
coefficients are 1 on s-fold products and 0 on j-fold products for
j <= d, j != s.  Convolving a degree-d chaos polynomial with nu_s therefore
isolates its s-homogeneous part, and convolving the weighted polynomial
with rho_y recovers the same part scaled by (2d)^{-s}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .chaos import ChaosPolynomial, CompressedIndex, decompose, term_values
from .dissociation import (
    DEFAULT_ENUM_BUDGET,
    CharacterSystem,
    is_d_dissociated,
)
from .errors import DegenerateOrder, NotDissociated
from .groups import (
    Character,
    DensityMeasure,
    FourierTable,
    char_pow,
    fourier,
    convolve,
    inverse_fourier,
)


def riesz_inverse_powers(gamma: Character, d: int) -> set[int]:
    """Powers k in 1..d with gamma^{-k} different from every gamma^j, j = 1..d."""
    forward = {char_pow(gamma, j).exponents for j in range(1, d + 1)}
    return {
        k for k in range(1, d + 1) if char_pow(gamma, -k).exponents not in forward
    }


def riesz_modulated_powers(gamma: Character, d: int) -> set[int]:
    """Powers k in 1..d kept in the modulated factor.

    k is dropped as soon as gamma^{-k} equals gamma^j for some j < k, so
    each self-paired power appears exactly once.
    """
    kept = set()
    for k in range(1, d + 1):
        inverse = char_pow(gamma, -k).exponents
        if not any(char_pow(gamma, j).exponents == inverse for j in range(1, k)):
            kept.add(k)
    return kept


def _require_dissociated(system: CharacterSystem, d: int, budget: int):
    report = is_d_dissociated(system, d, budget=budget)
    if not report.dissociated:
        raise NotDissociated(
            f"system is not {d}-dissociated; witness {report.witness}",
            report=report,
        )


def degenerate_characters(system: CharacterSystem, d: int) -> list[int]:
    """Positions of characters whose order is at most 2d."""
    return [i for i, chi in enumerate(system.characters) if chi.order <= 2 * d]


def require_nondegenerate(
    system: CharacterSystem,
    d: int,
    budget: int = DEFAULT_ENUM_BUDGET,
    check_dissociation: bool = True,
):
    """Guard for the exact coefficient laws.

    Raises DegenerateOrder when some character order is <= 2d, and
    NotDissociated when the system is not 2d-dissociated; both conditions
    together make bounded product representations unique.
    """
    bad = degenerate_characters(system, d)
    if bad:
        orders = [system.characters[i].order for i in bad]
        raise DegenerateOrder(
            f"characters at positions {bad} have orders {orders} <= 2d = {2 * d}; "
            "no closed-form coefficient law, use the transform directly"
        )
    if check_dissociation:
        _require_dissociated(system, 2 * d, budget)


def riesz_density(
    system: CharacterSystem,
    d: int,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> DensityMeasure:
    """The degree-d Riesz product density over the full finite system.

    With ``check`` the system is verified to be d-dissociated first.  For
    dissociated systems whose character orders all exceed d the result is a
    probability density: real, nonnegative, mass one.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if check and len(system):
        _require_dissociated(system, d, budget)
    group = system.group
    values = np.ones(group.size, dtype=np.complex128)
    for gamma in system.characters:
        factor = np.ones(group.size, dtype=np.complex128)
        for k in range(1, d + 1):
            factor += char_pow(gamma, k).values / (2 * d)
        for k in riesz_inverse_powers(gamma, d):
            factor += char_pow(gamma, -k).values / (2 * d)
        values *= factor
    return DensityMeasure(group, values)


@dataclass(frozen=True)
class ModulationPoint:
    """Digit vector over Z_{2d+1}, one digit per system character.

    ``rademacher_value(i, k)`` returns w^{k * digits[i]} with
    w = exp(2*pi*i/base), the value a base-(2d+1) generalized Rademacher
    function raised to the k-th power takes at this point.
    """

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if any(not 0 <= y < self.base for y in self.digits):
            raise ValueError(f"digits must lie in 0..{self.base - 1}")

    @cached_property
    def _roots(self) -> np.ndarray:
        roots = np.exp(2j * np.pi * np.arange(self.base) / self.base)
        roots.flags.writeable = False
        return roots

    def rademacher_value(self, index: int, power: int) -> complex:
        return complex(self._roots[(power * self.digits[index]) % self.base])

    @classmethod
    def zero(cls, base: int, count: int) -> "ModulationPoint":
        return cls(base, (0,) * count)

    @classmethod
    def random(cls, rng: np.random.Generator, base: int, count: int) -> "ModulationPoint":
        return cls(base, tuple(int(x) for x in rng.integers(0, base, size=count)))


def modulated_riesz_density(
    system: CharacterSystem,
    d: int,
    y: ModulationPoint,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> DensityMeasure:
    """Riesz product with unimodular weights w^{+-k*y_i} on the powers.

    Every factor is real and nonnegative pointwise, so the total variation
    equals the mass; for systems with all orders > d both equal 1.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if y.base != 2 * d + 1:
        raise ValueError(f"modulation base {y.base} must equal 2d+1 = {2 * d + 1}")
    if len(y.digits) != len(system):
        raise ValueError("one modulation digit per system character is required")
    if check and len(system):
        _require_dissociated(system, d, budget)
    group = system.group
    values = np.ones(group.size, dtype=np.complex128)
    for i, gamma in enumerate(system.characters):
        factor = np.ones(group.size, dtype=np.complex128)
        for k in riesz_modulated_powers(gamma, d):
            factor += y.rademacher_value(i, k) * char_pow(gamma, k).values / (2 * d)
            factor += y.rademacher_value(i, -k) * char_pow(gamma, -k).values / (2 * d)
        values *= factor
    return DensityMeasure(group, values)


def product_character(
    system: CharacterSystem, bases: tuple[int, ...], exponents: tuple[int, ...]
) -> Character:
    """gamma_{bases_1}^{e_1} * ... * gamma_{bases_s}^{e_s} as a dual element."""
    chi = system.group.trivial_character
    for b, e in zip(bases, exponents):
        powered = char_pow(system.characters[b], e)
        chi = system.group.character(
            tuple(
                (x + z) % m
                for x, z, m in zip(chi.exponents, powered.exponents, system.group.orders)
            )
        )
    return chi


def _validate_product_spec(system, d, bases, exponents, signed):
    if len(bases) != len(exponents):
        raise ValueError("bases and exponents must have equal length")
    if len(set(bases)) != len(bases):
        raise ValueError("product bases must be distinct")
    if any(not 0 <= b < len(system) for b in bases):
        raise ValueError("product bases must reference system characters")
    lo = -d if signed else 1
    for e in exponents:
        if e == 0 or not lo <= e <= d:
            raise ValueError(f"exponent {e} outside the admissible range for d={d}")


def expected_riesz_coefficient(
    system: CharacterSystem,
    d: int,
    bases: tuple[int, ...] = (),
    exponents: tuple[int, ...] = (),
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> complex:
    """Closed-form Fourier coefficient of rho on an s-fold product: (2d)^{-s}.

    Valid for nonzero exponents with |e_i| <= d in the nondegenerate
    regime; the empty product (the trivial character) returns the mass 1.
    """
    _validate_product_spec(system, d, bases, exponents, signed=True)
    if check:
        require_nondegenerate(system, d, budget=budget)
    return complex((2 * d) ** (-len(bases)))


def expected_modulated_coefficient(
    system: CharacterSystem,
    d: int,
    bases: tuple[int, ...],
    exponents: tuple[int, ...],
    y: ModulationPoint,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> complex:
    """Closed-form Fourier coefficient of rho_y on an s-fold product.

    In the nondegenerate regime the coefficient is the monomial
    prod_i w^{e_i * y_{bases_i}} / (2d)^s with signed exponents e_i.
    """
    _validate_product_spec(system, d, bases, exponents, signed=True)
    if check:
        require_nondegenerate(system, d, budget=budget)
    weight = 1 + 0j
    for b, e in zip(bases, exponents):
        weight *= y.rademacher_value(b, e)
    return weight / (2 * d) ** len(bases)


@dataclass(frozen=True)
class ExponentProfile:
    """Adjusted power per factor for the modulated-product weights.

    ``adjusted[i]`` equals the original power alpha_i unless some j <
    alpha_i has gamma^{-alpha_i} = gamma^j, in which case it flips to
    2d+1-alpha_i.  For character orders > 2d no flip ever fires.
    """

    pairs: tuple[tuple[int, int], ...]
    fired: tuple[bool, ...]

    @property
    def original(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def adjusted(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.pairs)


def modulation_exponents(
    system: CharacterSystem, index: CompressedIndex, d: int
) -> ExponentProfile:
    """Compute the adjusted powers used to weight a compressed chaos index."""
    pairs = []
    fired = []
    for b, a in zip(index.bases, index.exponents):
        if not 1 <= a <= d:
            raise ValueError(f"power {a} outside 1..{d}")
        gamma = system.characters[b]
        inverse = char_pow(gamma, -a).exponents
        hit = any(char_pow(gamma, j).exponents == inverse for j in range(1, a))
        pairs.append((a, 2 * d + 1 - a if hit else a))
        fired.append(hit)
    return ExponentProfile(tuple(pairs), tuple(fired))


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals with partial pivoting."""
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if aug[pivot][col] == 0:
            raise ZeroDivisionError("singular system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                scale = aug[r][col] / aug[col][col]
                aug[r] = [x - scale * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


@dataclass(frozen=True)
class ExtractionSpec:
    """Mixing coefficients for the s-fold extraction measure.

    ``coefficients[j]`` multiplies the j-fold convolution power of rho
    (j = 0 is the point mass at the identity and always carries weight 0);
    ``variation_bound`` is the resulting bound sum |c_j| on the total
    variation of the measure.
    """

    d: int
    s: int
    coefficients: tuple[float, ...]
    variation_bound: float

    def to_json_obj(self) -> dict:
        return {
            "d": self.d,
            "s": self.s,
            "coefficients": list(self.coefficients),
            "variation_bound": self.variation_bound,
        }


def extraction_coefficients_exact(d: int, s: int) -> tuple[Fraction, ...]:
    """Exact rational mixing coefficients (c_0 .. c_d); c_0 is always 0.

    Row i (i = 1..d) of the solved system states
    sum_j c_j ((2d)^{-i})^j = [i == s], so the exact residual vanishes.
    """
    if not 1 <= s <= d:
        raise ValueError(f"s must lie in 1..{d}, got {s}")
    n = 2 * d
    matrix = [
        [Fraction(1, n ** (i * j)) for j in range(1, d + 1)] for i in range(1, d + 1)
    ]
    rhs = [Fraction(1 if i == s else 0) for i in range(1, d + 1)]
    return (Fraction(0), *_solve_exact(matrix, rhs))


def extraction_coefficients(d: int, s: int) -> ExtractionSpec:
    """Solve the d x d power system with nodes (2d)^{-i} for the unit row s.

    Solving exactly over the rationals sidesteps the severe conditioning of
    the small Vandermonde nodes; the returned floats are correctly rounded
    images of the exact solution.  c_0 is pinned to zero, which only
    affects the trivial character and chaos polynomials have no constant
    term.
    """
    exact = extraction_coefficients_exact(d, s)
    coefficients = tuple(float(c) for c in exact)
    bound = float(sum(abs(c) for c in exact))
    return ExtractionSpec(d=d, s=s, coefficients=coefficients, variation_bound=bound)


def extraction_measure(
    system: CharacterSystem,
    d: int,
    s: int,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
    transform_method: str = "auto",
) -> DensityMeasure:
    """The measure whose Fourier coefficients indicate s-fold products.

    Built as the c_j-weighted sum of convolution powers of rho, evaluated
    through one Fourier round trip.  With ``check`` the nondegenerate
    regime is enforced, which is what guarantees the indicator law.
    """
    spec = extraction_coefficients(d, s)
    if check:
        require_nondegenerate(system, d, budget=budget)
    rho = riesz_density(system, d, check=False)
    rho_hat = fourier(rho, method=transform_method).coeffs
    nu_hat = np.full(system.group.size, spec.coefficients[0], dtype=np.complex128)
    power = np.ones_like(rho_hat)
    for j in range(1, d + 1):
        power = power * rho_hat
        nu_hat += spec.coefficients[j] * power
    table = FourierTable(system.group, nu_hat)
    return inverse_fourier(table, method=transform_method)


def extract_homogeneous(
    polynomial: ChaosPolynomial,
    s: int,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """Convolve Q with the s-fold extraction measure; returns value table.

    In the nondegenerate regime the result equals the s-homogeneous part
    of Q pointwise (within one convolution round trip of error).
    """
    d = polynomial.degree
    nu = extraction_measure(polynomial.system, d, s, check=check, budget=budget)
    return convolve(polynomial.as_density(), nu).values


def extract_homogeneous_modulated(
    polynomial: ChaosPolynomial,
    s: int,
    y: ModulationPoint,
    check: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """Weighted-polynomial route to the s-homogeneous part, scaled by (2d)^-s.

    Builds the polynomial whose term for index (k, alpha) carries the extra
    factor prod_i w^{-alpha'_i * y_{k_i}} and convolves it with rho_y.  In
    the nondegenerate regime the weights cancel against the coefficients of
    rho_y and the result is Q^(s) / (2d)^s pointwise, for every y.
    """
    d = polynomial.degree
    if check:
        require_nondegenerate(polynomial.system, d, budget=budget)
    system = polynomial.system
    part = decompose(polynomial)[s - 1]
    weighted = np.zeros(system.group.size, dtype=np.complex128)
    for index, coeff in part.coefficients.items():
        if not coeff:
            continue
        profile = modulation_exponents(system, index, d)
        weight = 1 + 0j
        for b, a_prime in zip(index.bases, profile.adjusted):
            weight *= y.rademacher_value(b, -a_prime)
        weighted += coeff * weight * term_values(system, index)
    rho_y = modulated_riesz_density(system, d, y, check=False)
    return convolve(DensityMeasure(system.group, weighted), rho_y).values
