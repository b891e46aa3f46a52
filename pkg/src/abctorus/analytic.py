"""Entire approximations of step functions and of block-slide maps.

The exact torus maps are compositions of shears: each move adds a
rational step function of one coordinate to another. This module
replaces every step by a real entire function that is uniformly close
to it away from small collars around the jump points, which turns a
block-slide map into a measure-preserving real-analytic diffeomorphism
that is (eps, delta)-close to it.

The approximation of a plateau profile ``beta = (b_0, ..., b_{l-1})``
(values on the ``l`` equal cells of each ``1/N``-period, ``l`` even) is

    s(z) = [sum_{i < l/2} b_i (E_i - E_{i+1})] * Wp(N z)
         + [sum_{i >= l/2} b_i (E_i - E_{i+1})] * Wm(N z)

with the sigmoid windows

    Wp(w) = exp(-exp(-A sin(2 pi w)))       ~ indicator of (0, 1/2) mod 1
    Wm(w) = exp(-exp(+A sin(2 pi w)))       ~ indicator of (1/2, 1) mod 1
    E_i   = Wp(N z - i/l).

For a large amplitude ``A`` each window is a sharp double-exponential
sigmoid; ``E_i - E_{i+1}`` cuts out cell ``i`` and its mirror image half
a period away, and the trailing ``Wp``/``Wm`` factor kills the mirror.
The amplitude conditions

    (A1)  A > -(2l / (pi delta)) * ln(-ln(1 - eps/8))
    (A2)  A >  (2l / (pi delta)) * ln(-ln(eps / (2l)))

guarantee that the deviation from the plateau profile is below ``eps``
outside the union of collars of width ``delta/(l N)`` centred at the
cell boundaries ``i/(l N)`` (total measure ``delta``).

Everything here evaluates in ordinary floats with saturating envelopes:
``exp(-exp(y))`` is monotone in ``y``, so clamping ``y`` to the IEEE
exponent range changes the value by less than 1e-300. Supremum and
Lipschitz bounds on complex strips grow doubly exponentially in the
strip width and are therefore reported as `TowerReal` values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import mp

from .errors import ParamOutOfRange, RangeOverflow
from .exact.blockslide import BlockSlideMap
from .exact.points import TorusPoint, mod1
from .exact.steps import StepFunction
from .towers import TowerReal, WORK_PREC

Frac = Fraction

# exp() overflows IEEE doubles just past 709.78; the envelope
# exp(-exp(y)) is flat to <1e-300 beyond |y| = 709.
_CLAMP = 709.0
_TWO_PI = 2.0 * math.pi

#: Constant in the Lipschitz bound on a strip; read off the derivative
#: chain for the window products (configurable knob, see norm_bounds).
DEFAULT_LIP_CONSTANT = 6.0 * math.pi


def _as_fraction(x) -> Fraction:
    """Exact rational image of x (floats convert by their binary value)."""
    return Fraction(x)


def _mpf_of(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# Amplitude selection.
# ---------------------------------------------------------------------------


def amplitude_lower_bounds(l: int, eps, delta) -> Tuple[mp.mpf, mp.mpf]:
    """Right-hand sides of the amplitude conditions (A1) and (A2).

    Computed in mpmath (unbounded exponent range), so arbitrarily small
    eps/delta never overflow.
    """
    _check_profile_params(l, eps, delta)
    with mp.workprec(WORK_PREC):
        e = _mpf_of(eps)
        d = _mpf_of(delta)
        scale = 2 * l / (mp.pi * d)
        a1 = -scale * mp.log(-mp.log1p(-e / 8))
        a2 = scale * mp.log(-mp.log(e / (2 * l)))
        return a1, a2


def amplitude_conditions_hold(l: int, eps, delta, A) -> bool:
    """True if A strictly satisfies both amplitude conditions."""
    a1, a2 = amplitude_lower_bounds(l, eps, delta)
    with mp.workprec(WORK_PREC):
        a = _mpf_of(A)
        return a > a1 and a > a2


def _check_profile_params(l: int, eps, delta) -> None:
    if not isinstance(l, int) or l < 2 or l % 2:
        raise ParamOutOfRange(f"cell count l must be an even integer >= 2, got {l}")
    eps = _as_fraction(eps)
    delta = _as_fraction(delta)
    if not (0 < eps < Fraction(1, 8)):
        raise ParamOutOfRange(f"eps must lie in (0, 1/8), got {eps}")
    if not (0 < delta < 1):
        raise ParamOutOfRange(f"delta must lie in (0, 1), got {delta}")


def stage_epsilon(n: int) -> Fraction:
    """Stage-n proximity budget 1/(3 * 2^(n+1)) of the stage schedule."""
    if n < 1:
        raise ParamOutOfRange(f"stage index must be >= 1, got {n}")
    return Fraction(1, 3 * 2 ** (n + 1))


def stage_delta(n: int) -> Fraction:
    """Stage-n error-set budget 1/2^(n+1) of the stage schedule."""
    if n < 1:
        raise ParamOutOfRange(f"stage index must be >= 1, got {n}")
    return Fraction(1, 2 ** (n + 1))


def choose_amplitude(l: int, eps=None, delta=None, *, stage: Optional[int] = None) -> int:
    """Amplitude for the entire approximation.

    General mode (stage=None): the smallest power of two strictly
    exceeding both amplitude lower bounds for the given (l, eps, delta).

    Stage mode (stage=n): the fixed schedule A = 2^(2n+5) * l^2 used by
    the iterative constructions, which requires l >= 4 and pairs with
    the stage budgets eps_n = 1/(3*2^(n+1)), delta_n = 1/2^(n+1). If
    eps/delta are passed they must match that schedule. The returned
    amplitude is verified against (A1)/(A2) in either mode.
    """
    if stage is not None:
        n = stage
        if not isinstance(n, int) or n < 1:
            raise ParamOutOfRange(f"stage index must be an integer >= 1, got {n}")
        if not isinstance(l, int) or l < 4 or l % 2:
            raise ParamOutOfRange(
                f"stage amplitude schedule needs even l >= 4, got {l}"
            )
        sched_eps = stage_epsilon(n)
        sched_delta = stage_delta(n)
        for given, sched, name in ((eps, sched_eps, "eps"), (delta, sched_delta, "delta")):
            if given is not None and _as_fraction(given) != sched and abs(
                float(given) - float(sched)
            ) > 1e-15:
                raise ParamOutOfRange(
                    f"stage mode fixes {name}={sched}, got {given}"
                )
        A = 2 ** (2 * n + 5) * l * l
        if not amplitude_conditions_hold(l, sched_eps, sched_delta, A):
            raise ParamOutOfRange(
                f"stage amplitude {A} fails the amplitude conditions at n={n}, l={l}"
            )
        return A

    if eps is None or delta is None:
        raise ParamOutOfRange("general mode needs explicit eps and delta")
    a1, a2 = amplitude_lower_bounds(l, eps, delta)
    with mp.workprec(WORK_PREC):
        bound = max(a1, a2)
        A = 1
        if bound >= 1:
            A = 1 << (int(mp.floor(mp.log(bound, 2))) + 1)
    while not amplitude_conditions_hold(l, eps, delta, A):
        A <<= 1
    return A


# ---------------------------------------------------------------------------
# The entire step and its evaluation.
# ---------------------------------------------------------------------------


def _envelope(y: np.ndarray) -> np.ndarray:
    """exp(-exp(y)) with the exponent clamped to the IEEE range.

    Monotone decreasing from 1 to 0; beyond |y| = 709 the true value
    differs from the saturated branch by less than 1e-300.
    """
    return np.exp(-np.exp(np.clip(y, -_CLAMP, _CLAMP)))


def _clamped_envelope(y: float) -> float:
    """Scalar counterpart of _envelope on plain floats."""
    return math.exp(-math.exp(min(max(y, -_CLAMP), _CLAMP)))


@dataclass(frozen=True)
class EntireStep:
    """Parameter record (beta, N, eps, delta, A) of one entire step.

    The callable value is the 1/N-periodic entire function described in
    the module docstring; it stays within eps of the plateau profile
    beta outside the collar set `error_set(self)` of measure delta.
    """

    beta: Tuple[float, ...]
    N: int
    eps: Fraction
    delta: Fraction
    A: Union[int, float]

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "eps", _as_fraction(self.eps))
        object.__setattr__(self, "delta", _as_fraction(self.delta))
        _check_profile_params(len(self.beta), self.eps, self.delta)
        for b in self.beta:
            if not (0.0 <= b <= 1.0):
                raise ParamOutOfRange(f"plateau values must lie in [0, 1], got {b}")
        if not isinstance(self.N, int) or self.N < 1:
            raise ParamOutOfRange(f"N must be a positive integer, got {self.N}")
        if not amplitude_conditions_hold(len(self.beta), self.eps, self.delta, self.A):
            raise ParamOutOfRange(
                f"amplitude {self.A} violates the amplitude conditions for "
                f"l={len(self.beta)}, eps={self.eps}, delta={self.delta}"
            )

    @property
    def l(self) -> int:
        return len(self.beta)

    # -- real evaluation ----------------------------------------------------

    def __call__(self, x):
        """Value at x (scalar or ndarray; scalars come back as float)."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        A = float(self.A)
        l = self.l
        w = np.mod(arr * self.N, 1.0)
        windows = [_envelope(-A * np.sin(_TWO_PI * np.mod(w - i / l, 1.0)))
                   for i in range(l)]
        windows.append(windows[0])  # E_l == E_0 (full-period shift)
        low = np.zeros(arr.shape)
        high = np.zeros(arr.shape)
        half = l // 2
        for i in range(half):
            low = low + self.beta[i] * (windows[i] - windows[i + 1])
        for i in range(half, l):
            high = high + self.beta[i] * (windows[i] - windows[i + 1])
        out = low * _envelope(-A * np.sin(_TWO_PI * w)) \
            + high * _envelope(A * np.sin(_TWO_PI * w))
        return float(out) if scalar else out

    def eval_at_rational(self, x) -> float:
        """Value at an exact rational, with every window phase reduced in
        rational arithmetic before any float touches it.

        Shifting x by an exact multiple of the period 1/N then reproduces
        the same float bit for bit, so commutation and conjugacy checks
        are not polluted by slope-amplified argument rounding.
        """
        w = Fraction(x) * self.N % 1
        A = float(self.A)
        l = self.l
        phases = [float((w - Fraction(i, l)) % 1) for i in range(l)]
        windows = [_clamped_envelope(-A * math.sin(_TWO_PI * p)) for p in phases]
        windows.append(windows[0])
        half = l // 2
        low = sum(self.beta[i] * (windows[i] - windows[i + 1]) for i in range(half))
        high = sum(self.beta[i] * (windows[i] - windows[i + 1]) for i in range(half, l))
        wf = float(w)
        return low * _clamped_envelope(-A * math.sin(_TWO_PI * wf)) \
            + high * _clamped_envelope(A * math.sin(_TWO_PI * wf))

    # -- complex evaluation -------------------------------------------------

    def eval_complex(self, z: complex) -> complex:
        """Value at a complex point, with the same saturating envelopes.

        The inner exponent of each window picks up an oscillating part
        of size up to A*sinh(2 pi N |Im z|) off the real axis; once that
        excursion passes the IEEE exponent range the doubly exponential
        envelopes leave the float range somewhere on the line and the
        symbolic strip bounds (norm_bounds) must be used instead, which
        is signalled by RangeOverflow.
        """
        z = complex(z)
        if z.imag == 0.0:
            return complex(self(z.real), 0.0)
        A = float(self.A)
        b = _TWO_PI * self.N * abs(z.imag)
        try:
            excursion = A * math.sinh(b)
        except OverflowError:
            excursion = math.inf
        if excursion > _CLAMP:
            raise RangeOverflow(
                f"imaginary part {z.imag} too large for float evaluation "
                f"(phase excursion {excursion:.3g} > {_CLAMP:g}); "
                "use the symbolic strip bounds instead"
            )
        l = self.l
        w = complex((self.N * z.real) % 1.0, self.N * z.imag)
        windows = [self._envelope_c(-A * cmath.sin(_TWO_PI * (w - i / l)))
                   for i in range(l)]
        windows.append(windows[0])
        low = 0j
        high = 0j
        half = l // 2
        for i in range(half):
            low += self.beta[i] * (windows[i] - windows[i + 1])
        for i in range(half, l):
            high += self.beta[i] * (windows[i] - windows[i + 1])
        out = low * self._envelope_c(-A * cmath.sin(_TWO_PI * w)) \
            + high * self._envelope_c(A * cmath.sin(_TWO_PI * w))
        if not (math.isfinite(out.real) and math.isfinite(out.imag)):
            raise RangeOverflow(
                f"entire step exceeds the float range at {z}; "
                "use the symbolic strip bounds instead"
            )
        return out

    @staticmethod
    def _envelope_c(y: complex) -> complex:
        """Complex exp(-exp(y)) with the real-axis saturation branches."""
        if y.real > _CLAMP:
            return 0j
        if y.real < -_CLAMP:
            return 1 + 0j
        u = cmath.exp(y)
        if -u.real > _CLAMP:
            raise RangeOverflow(
                "inner exponential leaves the float range "
                "(oscillatory blow-up off the real axis)"
            )
        return cmath.exp(-u)

    # -- collars ------------------------------------------------------------

    def error_set(self) -> "ErrorSet":
        return error_set(self)


def eval_entire_step(s: EntireStep, x):
    """Module-level alias for s(x)."""
    return s(x)


def eval_entire_step_complex(s: EntireStep, z: complex) -> complex:
    """Module-level alias for s.eval_complex(z)."""
    return s.eval_complex(z)


# ---------------------------------------------------------------------------
# Collars (the error set of one entire step).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorSet:
    """Union of closed collars of half-width delta/(2 l N) centred at the
    cell boundaries i/(l N); the collar at 0 wraps around and is stored
    as two pieces. Total measure is exactly delta."""

    cell_count: int          # l * N collars
    spacing: Fraction        # 1/(l N)
    halfwidth: Fraction      # delta/(2 l N)
    pieces: Tuple[Tuple[Fraction, Fraction], ...]

    def total_measure(self) -> Fraction:
        return 2 * self.halfwidth * self.cell_count

    def contains(self, x) -> bool:
        """Collar membership, exact for rational x (floats convert by
        their exact binary value)."""
        r = _as_fraction(x) % self.spacing
        return r <= self.halfwidth or self.spacing - r <= self.halfwidth


@lru_cache(maxsize=None)
def error_set(s: EntireStep) -> ErrorSet:
    """The collar set outside of which s is within eps of its plateaus."""
    ln = s.l * s.N
    spacing = Fraction(1, ln)
    h = s.delta / (2 * ln)
    pieces = [(Fraction(0), h)]
    for i in range(1, ln):
        centre = Fraction(i, ln)
        pieces.append((centre - h, centre + h))
    pieces.append((1 - h, Fraction(1)))
    return ErrorSet(ln, spacing, h, tuple(pieces))


# ---------------------------------------------------------------------------
# Proximity verification and sweeps.
# ---------------------------------------------------------------------------


def verify_proximity(s: EntireStep, target: StepFunction, samples: int = 10**4) -> float:
    """Max |s(x) - target(x)| over a uniform mid-point grid with the
    collar points skipped. The approximation contract is that this stays
    below s.eps."""
    if samples < 1:
        raise ParamOutOfRange(f"need at least one sample, got {samples}")
    collars = error_set(s)
    xs = [Fraction(2 * j + 1, 2 * samples) for j in range(samples)]
    kept = [x for x in xs if not collars.contains(x)]
    if not kept:
        return 0.0
    vals = s(np.array([float(x) for x in kept]))
    ref = np.array([float(target(x)) for x in kept])
    return float(np.max(np.abs(vals - ref)))


def proximity_sweep(
    s: EntireStep, target: StepFunction, samples: int = 512
) -> Tuple[Tuple[Fraction, Fraction, float, int], ...]:
    """(x, target(x), s(x), in_collar) rows over a mid-point grid, for
    CSV emission and plotting."""
    if samples < 1:
        raise ParamOutOfRange(f"need at least one sample, got {samples}")
    collars = error_set(s)
    rows = []
    for j in range(samples):
        x = Fraction(2 * j + 1, 2 * samples)
        rows.append((x, target(x), float(s(float(x))), int(collars.contains(x))))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Strip bounds (tower-valued).
# ---------------------------------------------------------------------------


def sup_norm_bound(A, N: int, rho) -> TowerReal:
    """Supremum bound 2 pi N A exp(2 e^X + X + 2 pi N rho), X = A e^(2 pi N rho),
    for the entire step on the complex strip |Im z| <= rho."""
    if rho < 0:
        raise ParamOutOfRange(f"strip width rho must be >= 0, got {rho}")
    with mp.workprec(WORK_PREC):
        b = 2 * mp.pi * N * _mpf_of(rho)
        X = TowerReal.from_number(A) * TowerReal(1, b)
        expo = X.exp() * 2 + X
        if b != 0:
            expo = expo + TowerReal.from_number(b)
        return TowerReal.from_number(2 * mp.pi * N) * TowerReal.from_number(A) * expo.exp()


def lipschitz_norm_bound(
    A, N: int, l: int, rho, lip_constant: float = DEFAULT_LIP_CONSTANT
) -> TowerReal:
    """Lipschitz bound C A l N exp(4 e^X), X = A e^(2 pi N rho), on the
    same strip; C defaults to 6 pi and is a configurable knob."""
    if rho < 0:
        raise ParamOutOfRange(f"strip width rho must be >= 0, got {rho}")
    with mp.workprec(WORK_PREC):
        b = 2 * mp.pi * N * _mpf_of(rho)
        X = TowerReal.from_number(A) * TowerReal(1, b)
        return (
            TowerReal.from_number(lip_constant)
            * TowerReal.from_number(A)
            * TowerReal.from_number(l * N)
            * (X.exp() * 4).exp()
        )


def norm_bounds(
    s: EntireStep, rho, lip_constant: float = DEFAULT_LIP_CONSTANT
) -> Tuple[TowerReal, TowerReal]:
    """(sup bound, Lipschitz bound) of the entire step on the strip of
    half-width rho, as tower-arithmetic values."""
    return (
        sup_norm_bound(s.A, s.N, rho),
        lipschitz_norm_bound(s.A, s.N, s.l, rho, lip_constant),
    )


# ---------------------------------------------------------------------------
# Whole block-slide maps.
# ---------------------------------------------------------------------------


def step_to_plateau(step: StepFunction) -> Tuple[Tuple[Fraction, ...], int, int]:
    """Equal-cell plateau form (beta, N, l) of a step function.

    N is the number of periods per unit (the period must be 1/N), l the
    smallest even cell count per period resolving every breakpoint, and
    beta the cell values read at cell centres.
    """
    period = step.period
    if period.numerator != 1:
        raise ParamOutOfRange(
            f"step period must be a unit fraction 1/N, got {period}"
        )
    N = period.denominator
    l = 1
    for b in step.breakpoints:
        l = l * (b * N).denominator // gcd(l, (b * N).denominator)
    if l % 2:
        l *= 2
    if l < 2:
        l = 2
    beta = tuple(step(Fraction(2 * i + 1, 2 * l) * period) for i in range(l))
    return beta, N, l


@dataclass(frozen=True)
class AnalyticMove:
    """One analytic shear: x[target] += sign * step(x[source]) with an
    entire step, or an exact constant shift (already entire) when the
    profile is constant."""

    target: int
    source: int
    sign: int
    step: Optional[EntireStep]
    constant: Fraction = Fraction(0)

    @property
    def is_constant(self) -> bool:
        return self.step is None


@dataclass(frozen=True)
class AnalyticBlockSlide:
    """Entire approximation of a block-slide map.

    Moves mirror the exact map one for one (constant shears stay exact);
    outside the pulled-back collar set — membership is decided by
    running the exact intermediate orbit and testing each move's source
    coordinate against its collars — every point moves within eps of the
    exact image. Total collar measure is below delta because the exact
    moves preserve measure.
    """

    dim: int
    moves: Tuple[AnalyticMove, ...]
    exact: BlockSlideMap
    eps: Fraction
    delta: Fraction

    def transform(self, pts: np.ndarray) -> np.ndarray:
        """Apply to a (dim, n) float array of points (mod 1)."""
        out = np.array(pts, dtype=float, copy=True) % 1.0
        if out.ndim != 2 or out.shape[0] != self.dim:
            raise ParamOutOfRange(
                f"expected a ({self.dim}, n) coordinate array, got shape {out.shape}"
            )
        for mv in self.moves:
            if mv.is_constant:
                shift = mv.sign * float(mv.constant)
                out[mv.target] = (out[mv.target] + shift) % 1.0
            else:
                out[mv.target] = (out[mv.target] + mv.sign * mv.step(out[mv.source])) % 1.0
        return out

    def __call__(self, x) -> Tuple[float, ...]:
        coords = [float(c) for c in x]
        if len(coords) != self.dim:
            raise ParamOutOfRange(
                f"expected a point of dimension {self.dim}, got {len(coords)}"
            )
        col = self.transform(np.array(coords, dtype=float).reshape(self.dim, 1))
        return tuple(float(v) for v in col[:, 0])

    def transform_rational(self, coords: Sequence) -> Tuple[Fraction, ...]:
        """Apply to an exact rational point, keeping coordinates rational.

        Each entire-step value is evaluated through eval_at_rational and
        converted back to an exact rational (binary floats are rational),
        so the image is a well-defined rational point and shifts by exact
        periods of the step profiles commute with this map bit for bit.
        """
        out = [Fraction(c) % 1 for c in coords]
        if len(out) != self.dim:
            raise ParamOutOfRange(
                f"expected a point of dimension {self.dim}, got {len(out)}"
            )
        for mv in self.moves:
            if mv.is_constant:
                out[mv.target] = (out[mv.target] + mv.sign * mv.constant) % 1
            else:
                val = Fraction(mv.step.eval_at_rational(out[mv.source]))
                out[mv.target] = (out[mv.target] + mv.sign * val) % 1
        return tuple(out)

    def in_error_set(self, x) -> bool:
        """True if the exact intermediate orbit of x feeds a collar point
        into any non-constant move."""
        pt = x if isinstance(x, TorusPoint) else TorusPoint(x)
        for exact_move, mv in zip(self.exact.moves, self.moves):
            if mv.step is not None and error_set(mv.step).contains(pt[mv.source]):
                return True
            pt = exact_move.apply(pt)
        return False

    def error_measure_bound(self) -> Fraction:
        """Sum of the per-move collar measures (>= the measure of the
        pulled-back error set; stays below delta by construction)."""
        return sum(
            (error_set(mv.step).total_measure() for mv in self.moves if mv.step is not None),
            Fraction(0),
        )

    def commutes_with_rotation(self, q: int) -> bool:
        """Structural commutation with the rotation by 1/q of the first
        coordinate: every non-constant move fed by coordinate 0 must have
        a period dividing 1/q (N a multiple of q)."""
        if q < 1:
            raise ParamOutOfRange(f"q must be >= 1, got {q}")
        return all(
            mv.is_constant or mv.source != 0 or mv.step.N % q == 0
            for mv in self.moves
        )

    def inverse(self) -> "AnalyticBlockSlide":
        """Exact inverse: shears invert by flipping their sign (the source
        coordinate is untouched by the move), applied in reverse order."""
        moves = tuple(
            AnalyticMove(mv.target, mv.source, -mv.sign, mv.step, mv.constant)
            for mv in reversed(self.moves)
        )
        return AnalyticBlockSlide(
            dim=self.dim,
            moves=moves,
            exact=self.exact.inverse(),
            eps=self.eps,
            delta=self.delta,
        )


def approximate_blockslide(m: BlockSlideMap, eps, delta) -> AnalyticBlockSlide:
    """(eps, delta)-close entire approximation of a block-slide map.

    The budgets are split evenly over the non-constant moves, with one
    spare share so the summed collar measure stays strictly below delta
    (per-move budgets are also capped at the admissible ranges; smaller
    budgets only sharpen the result). Constant shears are kept exact —
    they are already entire — so rotations survive unchanged.
    """
    eps_total = _as_fraction(eps)
    delta_total = _as_fraction(delta)
    if eps_total <= 0:
        raise ParamOutOfRange(f"eps must be positive, got {eps}")
    if delta_total <= 0:
        raise ParamOutOfRange(f"delta must be positive, got {delta}")
    nonconstant = sum(1 for mv in m.moves if len(mv.step.values) > 1)
    moves = []
    if nonconstant:
        # one spare share keeps the summed budgets strictly below the
        # requested totals, as the proximity contract demands
        eps_i = min(eps_total / (nonconstant + 1), Fraction(1, 9))
        delta_i = min(delta_total / (nonconstant + 1), Fraction(1, 2))
    for mv in m.moves:
        if len(mv.step.values) == 1:
            moves.append(
                AnalyticMove(mv.target, mv.source, mv.sign, None, mod1(mv.step.values[0]))
            )
            continue
        beta, N, l = step_to_plateau(mv.step)
        # a shear by v and one by v mod 1 are the same torus map, so the
        # plateau values are reduced to [0, 1) before approximation
        beta = tuple(mod1(b) for b in beta)
        A = choose_amplitude(l, eps_i, delta_i)
        estep = EntireStep(tuple(float(b) for b in beta), N, eps_i, delta_i, A)
        moves.append(AnalyticMove(mv.target, mv.source, mv.sign, estep))
    return AnalyticBlockSlide(
        dim=m.dim,
        moves=tuple(moves),
        exact=m,
        eps=eps_total,
        delta=delta_total,
    )


__all__ = [
    "DEFAULT_LIP_CONSTANT",
    "AnalyticBlockSlide",
    "AnalyticMove",
    "EntireStep",
    "ErrorSet",
    "amplitude_conditions_hold",
    "amplitude_lower_bounds",
    "approximate_blockslide",
    "choose_amplitude",
    "error_set",
    "eval_entire_step",
    "eval_entire_step_complex",
    "lipschitz_norm_bound",
    "norm_bounds",
    "proximity_sweep",
    "step_to_plateau",
    "stage_delta",
    "stage_epsilon",
    "sup_norm_bound",
    "verify_proximity",
]
