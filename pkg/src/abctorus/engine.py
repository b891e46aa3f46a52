"""Finite-stage assembly of conjugated-rotation torus maps.

The maps under study have the form

    T_n = H_n^{-1} o phi^{alpha_n} o H_n,        H_n = h_n o H_{n-1},

where phi^t rotates the first coordinate by t and each conjugation h_m is
a block-slide map together with an entire approximation.  Because h_m
commutes with phi^{alpha_{m-1}} and alpha advances by

    p_{n+1} = s_n k_n l_n q_n p_n + 1,       q_{n+1} = s_n k_n l_n q_n^2,

(equivalently alpha_{n+1} = alpha_n + 1/(s_n k_n l_n q_n^2)), the stage
maps form a telescoping family: T_n permutes the pulled-back partition
F_{q_n} = H_n^{-1} T_{q_n} cyclically with step p_n.  Everything here is
finite and verifiable — the exact model in rational arithmetic and the
analytic model up to the collar sets of its entire steps.

Stage schedules pair eps_n = 1/(3*2^{n+1}) and delta_n = 1/2^{n+1} with
the amplitude 2^{2n+5} l_n^2, matching the analytic layer's stage mode.
Parameters are deliberately toy-sized: the inequalities that force the
true construction's astronomically large l_n, q_n live in the symbolic
ledger (bounds module), not here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .analytic import (
    AnalyticBlockSlide,
    AnalyticMove,
    EntireStep,
    approximate_blockslide,
    choose_amplitude,
    stage_delta,
    stage_epsilon,
    step_to_plateau,
)
from .bounds import TranslationParams
from .errors import InvalidIndexFunction, ParamOutOfRange, UnsupportedDimension
from .exact.blockslide import BlockSlideMap, BlockSlideMove
from .exact.builders import (
    build_abc_conjugation,
    build_grid_refine,
    build_minimal_combinatorics,
)
from .exact.partitions import PartitionSpec
from .exact.points import TorusPoint, mod1
from .minimal import MinimalConjugation, minimal_stage

ROTATION_POWER_CAP = 10**3  # |power| <= q_n * this in eval_stage_map


# ---------------------------------------------------------------------------
# Stage parameters.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbCParams:
    """Stage-n parameter record.

    p/q is the rotation number alpha_n (always in lowest terms), k, l, s
    are the stage multipliers feeding the recursion, eps the proximity
    budget of the stage's analytic conjugation, and a the tower index
    function {0..k-1} -> {0..q-1} of the stage's column combinatorics
    (identically zero when the scenario does not rearrange columns).
    """

    n: int
    p: int
    q: int
    k: int
    l: int
    s: int
    eps: Fraction
    a: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if self.n < 0:
            raise ParamOutOfRange(f"stage index must be >= 0, got {self.n}")
        if self.q < 1 or self.p < 0:
            raise ParamOutOfRange(f"need q >= 1 and p >= 0, got p={self.p}, q={self.q}")
        if gcd(self.p, self.q) != 1:
            raise ParamOutOfRange(
                f"p and q must be coprime, got gcd({self.p}, {self.q}) = "
                f"{gcd(self.p, self.q)}"
            )
        for name, v in (("k", self.k), ("l", self.l), ("s", self.s)):
            if v < 1:
                raise ParamOutOfRange(f"{name} must be >= 1, got {v}")
        if self.l % 2:
            raise ParamOutOfRange(f"l must be even, got {self.l}")
        if self.eps <= 0:
            raise ParamOutOfRange(f"eps must be positive, got {self.eps}")
        if len(self.a) != self.k:
            raise ParamOutOfRange(
                f"index function must have k={self.k} entries, got {len(self.a)}"
            )
        for v in self.a:
            if not (0 <= v < self.q):
                raise ParamOutOfRange(
                    f"index function values must lie in [0, {self.q}), got {v}"
                )

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.p, self.q)


def advance_params(
    params: AbCParams,
    k: Optional[int] = None,
    l: Optional[int] = None,
    s: Optional[int] = None,
    a: Optional[Sequence[int]] = None,
) -> AbCParams:
    """Next-stage record under p' = s k l q p + 1, q' = s k l q^2.

    The multipliers default to the input record's own; overrides redefine
    them for this step and are carried forward.  The new rotation number
    is alpha + 1/(s k l q^2) exactly, automatically in lowest terms since
    p' = 1 mod every prime factor of q'.
    """
    k = params.k if k is None else int(k)
    l = params.l if l is None else int(l)
    s = params.s if s is None else int(s)
    if k < 1 or l < 1 or s < 1:
        raise ParamOutOfRange(f"k, l, s must be >= 1, got k={k}, l={l}, s={s}")
    if l % 2:
        raise ParamOutOfRange(f"l must be even, got {l}")
    step = s * k * l * params.q
    p_next = step * params.p + 1
    q_next = step * params.q
    n_next = params.n + 1
    a_next = tuple(int(v) for v in a) if a is not None else (0,) * k
    return AbCParams(
        n=n_next, p=p_next, q=q_next, k=k, l=l, s=s,
        eps=stage_epsilon(n_next), a=a_next,
    )


def circle_params(q0: int = 3, p0: int = 1, l: int = 4, s: int = 1) -> AbCParams:
    """Starting record of the two-torus circle-factor scenario: k is
    coupled to l and the column combinatorics are trivial."""
    return AbCParams(n=1, p=p0, q=q0, k=l, l=l, s=s,
                     eps=stage_epsilon(1), a=(0,) * l)


def meets_strict_epsilon(params: AbCParams) -> bool:
    """Whether eps_n < 2^{-q_n}, the strict smallness regime.

    Literal comparison while 2^{-q} is storable as a Fraction; beyond
    q = 50000 the check runs on logarithms (log2(1/eps) > q).
    """
    if params.q <= 50000:
        return params.eps < Fraction(1, 2) ** params.q
    inv = 1 / params.eps
    # eps < 2^{-q}  <=>  log2(1/eps) > q; floor(log2) via bit_length
    return inv.numerator.bit_length() - inv.denominator.bit_length() > params.q


# ---------------------------------------------------------------------------
# Stage maps.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageIncrement:
    """One built conjugation plus the parameter advance it entails.

    exact is anything callable on TorusPoint with an exact ``inverse()``
    (a block-slide map, or the O(1) minimality-stage evaluator).
    analytic may be None for stages whose entire counterpart was not
    built (oversized realizations); exact-model workflows are unaffected.
    """

    scenario: str
    params_before: AbCParams
    params_after: AbCParams
    exact: Union[BlockSlideMap, MinimalConjugation]
    analytic: Optional[AnalyticBlockSlide]


@dataclass(frozen=True)
class StageMaps:
    """Immutable stack of built stages.

    records[0] is the initial parameter record; records[m] the record
    after m advances (so records[m].alpha is the rotation number of the
    stage-m map T_m).  conjugations_*[m-1] hold h_m in both models.
    """

    scenario: str
    dim: int
    records: Tuple[AbCParams, ...]
    conjugations_exact: Tuple[BlockSlideMap, ...]
    conjugations_analytic: Tuple[AnalyticBlockSlide, ...]

    @staticmethod
    def start(scenario: str, params: AbCParams, dim: int = 2) -> "StageMaps":
        return StageMaps(scenario, dim, (params,), (), ())

    @property
    def stage_count(self) -> int:
        return len(self.conjugations_exact)

    def extend(self, inc: StageIncrement) -> "StageMaps":
        head = self.records[-1]
        records = self.records
        if inc.params_before != head:
            # stage builders may fill in the head's column combinatorics
            # (the index function a) while constructing the conjugation;
            # accept the refreshed head as long as nothing else changed
            if replace(head, a=inc.params_before.a) != inc.params_before:
                raise ParamOutOfRange(
                    "increment was built from a different parameter record "
                    "than the current head of this stack"
                )
            records = records[:-1] + (inc.params_before,)
        return StageMaps(
            scenario=self.scenario,
            dim=self.dim,
            records=records + (inc.params_after,),
            conjugations_exact=self.conjugations_exact + (inc.exact,),
            conjugations_analytic=self.conjugations_analytic + (inc.analytic,),
        )

    def _check_stage(self, stage: int) -> int:
        if not (1 <= stage <= self.stage_count):
            raise ParamOutOfRange(
                f"stage must be in 1..{self.stage_count}, got {stage}"
            )
        return stage

    def alpha(self, stage: int) -> Fraction:
        self._check_stage(stage)
        return self.records[stage].alpha

    def exact_stack(self, stage: int) -> BlockSlideMap:
        """H_stage as one exact block-slide map (h_1 runs first)."""
        self._check_stage(stage)
        out = BlockSlideMap.identity(self.dim)
        for h in self.conjugations_exact[:stage]:
            out = out.then(h)
        return out

    def apply_exact(self, x: TorusPoint, stage: int, inverse: bool = False) -> TorusPoint:
        self._check_stage(stage)
        if inverse:
            for h in reversed(self.conjugations_exact[:stage]):
                x = h.inverse()(x)
        else:
            for h in self.conjugations_exact[:stage]:
                x = h(x)
        return x

    def _analytic_slice(self, stage: int) -> Tuple[AnalyticBlockSlide, ...]:
        slice_ = self.conjugations_analytic[:stage]
        if any(h is None for h in slice_):
            raise ParamOutOfRange(
                f"a stage in 1..{stage} carries no analytic conjugation; "
                "only the exact model is available for this stack"
            )
        return slice_

    def apply_analytic(
        self, pts: np.ndarray, stage: int, inverse: bool = False
    ) -> np.ndarray:
        """H_stage (or its inverse) on a (dim, n) float array."""
        self._check_stage(stage)
        self._analytic_slice(stage)
        out = pts
        if inverse:
            for h in reversed(self.conjugations_analytic[:stage]):
                out = h.inverse().transform(out)
        else:
            for h in self.conjugations_analytic[:stage]:
                out = h.transform(out)
        return out

    def apply_analytic_rational(
        self, coords: Sequence, stage: int, inverse: bool = False
    ) -> Tuple[Fraction, ...]:
        """H_stage (or its inverse) through the exact-rational analytic
        path (entire-step values frozen to their float rationals)."""
        self._check_stage(stage)
        self._analytic_slice(stage)
        out = tuple(Fraction(c) for c in coords)
        if inverse:
            for h in reversed(self.conjugations_analytic[:stage]):
                out = h.inverse().transform_rational(out)
        else:
            for h in self.conjugations_analytic[:stage]:
                out = h.transform_rational(out)
        return out


# ---------------------------------------------------------------------------
# Circle-factor scenario.
# ---------------------------------------------------------------------------


def build_stage_circle(params: AbCParams) -> StageIncrement:
    """One stage of the two-torus circle-factor scenario.

    The conjugation is the d = 2 grid refinement: three shears

        h_1(x) = (x_1 + psi_1(x_2), x_2)
        h_2(x) = (x_1, x_2 + psi_2(x_1))
        h_3(x) = (x_1 - psi_3(x_2), x_2)

    applied in that order, with plateau profiles

        beta^(1) = (0, (l-1)/(l^2 q), ..., 1/(l^2 q)),      N = 1
        beta^(2) = (0, 1/l, ..., (l-1)/l),                  N = l q
        beta^(3) = (0, 1/(l^2 q), ..., (l-1)/(l^2 q)),      N = 1

    read off the exact step functions.  The analytic counterparts use
    the stage schedule (eps_n, delta_n) and amplitude 2^{2n+5} l^2; all
    three commute with phi^{alpha} for every alpha with denominator q
    because their x_1-sourced profile has period 1/(l q).
    """
    n, l, q = params.n, params.l, params.q
    if n < 1:
        raise ParamOutOfRange(f"stage schedules start at n = 1, got {n}")
    if l < 4 or l % 2:
        raise ParamOutOfRange(
            f"the circle scenario needs even l >= 4 (amplitude lemma), got {l}"
        )
    if params.k != params.l:
        raise ParamOutOfRange(
            f"the circle scenario couples k to l, got k={params.k}, l={params.l}"
        )
    eps, delta = stage_epsilon(n), stage_delta(n)
    A = choose_amplitude(l, stage=n)

    exact = build_grid_refine(l, q, 2)
    moves = []
    for mv in exact.moves:
        beta, N, cells = step_to_plateau(mv.step)
        if cells != l:
            raise ParamOutOfRange(
                f"refinement profile has {cells} cells, expected l={l}"
            )
        estep = EntireStep(tuple(float(b) for b in beta), N, eps, delta, A)
        moves.append(AnalyticMove(mv.target, mv.source, mv.sign, estep))
    analytic = AnalyticBlockSlide(
        dim=2, moves=tuple(moves), exact=exact, eps=eps, delta=delta
    )
    return StageIncrement(
        scenario="circle",
        params_before=params,
        params_after=advance_params(params),
        exact=exact,
        analytic=analytic,
    )


def run_circle_scenario(
    stages: int, q0: int = 3, p0: int = 1, l: int = 4, s: int = 1
) -> StageMaps:
    """Build the circle-factor scenario for the given number of stages."""
    if stages < 1:
        raise ParamOutOfRange(f"need at least one stage, got {stages}")
    maps = StageMaps.start("circle", circle_params(q0=q0, p0=p0, l=l, s=s))
    for _ in range(stages):
        maps = maps.extend(build_stage_circle(maps.records[-1]))
    return maps


# ---------------------------------------------------------------------------
# Translation-factor scenario.
# ---------------------------------------------------------------------------

# move-count cap under which the "auto" policy builds the entire
# approximation of a stage conjugation (the realizations grow quickly;
# oversized stages keep analytic=None and stay exact-only)
AUTO_ANALYTIC_MOVE_CAP = 4096


def _section_time(gamma: Tuple[int, int], y1: Fraction, y2: Fraction) -> Fraction:
    """Time coordinate tau of y under the linear flow along gamma on T^2.

    tau = (y2 + j)/gamma2 for the unique j in [0, gamma2) with
    y1 - (y2 + j) * gamma1/gamma2 mod 1 in [0, 1/gamma2); equivalently
    y = (flow for time tau)(w) with w in the fundamental section
    [0, 1/gamma2) x {0}.  The candidate positions are gamma2 equally
    spaced points at pitch 1/gamma2 (gcd(gamma1, gamma2) = 1), so
    exactly one falls inside the half-open window.  By construction
    tau(y + t*gamma mod 1) = tau(y) + t mod 1.
    """
    g1, g2 = gamma
    width = Fraction(1, g2)
    for j in range(g2):
        if (y1 - (y2 + j) * Fraction(g1, g2)) % 1 < width:
            return (y2 + j) / g2
    raise InvalidIndexFunction(
        f"no section window contains the point; gamma={gamma} is not a "
        "primitive direction"
    )


def translation_index_function(
    gamma: Sequence[int], gamma_next: Sequence[int], k: int, q: int
) -> Tuple[int, ...]:
    """Index function a of a translation-scenario conjugation.

    a[i] = -o(i) mod q with o(c) = floor(q * tau(P_c)), where
    P_c = (c/(k q)) * gamma_next mod 1 walks the next-stage translation
    direction across the k q tower columns and tau is the flow-time
    coordinate of the current direction gamma.  The congruence
    gamma_next = gamma mod q makes o advance by exactly 1 mod q between
    the same column of consecutive 1/q-blocks, so each residue class
    meets every index exactly once; both facts are checked before the
    function returns.  Cost is O(k q gamma_2).

    One-dimensional factors have tau(y) = y, hence o(c) = c // k and a
    identically zero (the circle scenario's trivial combinatorics).
    """
    gamma = tuple(int(g) for g in gamma)
    gamma_next = tuple(int(g) for g in gamma_next)
    if k < 1 or q < 1:
        raise ParamOutOfRange(f"need k >= 1 and q >= 1, got k={k}, q={q}")
    if len(gamma_next) != len(gamma):
        raise ParamOutOfRange(
            f"direction lengths differ: {len(gamma)} vs {len(gamma_next)}"
        )
    if len(gamma) == 1:
        return (0,) * k
    if len(gamma) != 2:
        raise UnsupportedDimension(
            f"index functions are implemented for 1- and 2-dimensional "
            f"translation factors, got h={len(gamma)}"
        )
    for g in (gamma, gamma_next):
        if g[1] < 1 or g[0] < 1 or gcd(g[0], g[1]) != 1:
            raise ParamOutOfRange(f"direction {g} must be positive and primitive")
    if any((gn - g) % q for gn, g in zip(gamma_next, gamma)):
        raise InvalidIndexFunction(
            f"the congruence gamma' = gamma mod q fails: {gamma_next} vs "
            f"{gamma} mod {q}"
        )
    o = []
    for c in range(k * q):
        y1 = Fraction(c * gamma_next[0], k * q) % 1
        y2 = Fraction(c * gamma_next[1], k * q) % 1
        o.append(int(q * _section_time(gamma, y1, y2)))
    for i in range(k):
        vals = [o[i + a * k] for a in range(q)]
        if sorted(vals) != list(range(q)) or any(
            v != (vals[0] + a) % q for a, v in enumerate(vals)
        ):
            raise InvalidIndexFunction(
                f"column class {i} does not meet every index exactly once: {vals}"
            )
    return tuple((-o[i]) % q for i in range(k))


def build_stage_translation(
    params: AbCParams,
    chain: TranslationParams,
    analytic: Union[bool, str] = "auto",
) -> StageIncrement:
    """One stage of the translation-factor scenario along a parameter chain.

    The record must match a non-final chain level by (p, q), and the
    chain must have been generated with a grid multiplier (l_base) so
    every level carries the l its conjugation consumes.  For a
    two-dimensional factor the stage couples k = s * gamma'_2, computes
    the index function from the flow-time coordinate, and builds the
    tower conjugation over the l^2 q-column grid; the advance is the
    chain's own (q' = m s q^2), whose ratio q'/(k q) = l q is integral
    by construction.  One-dimensional factors delegate to the circle
    scenario (k = l, trivial index function) and re-check that the
    chain's advance coincides with the circle advance.

    analytic: True builds the entire approximation regardless of size,
    False skips it, "auto" builds it only when the exact realization
    stays within AUTO_ANALYTIC_MOVE_CAP moves.
    """
    if analytic not in (True, False, "auto"):
        raise ParamOutOfRange(f"analytic must be True, False or 'auto', got {analytic!r}")
    idx = next(
        (
            i
            for i in range(len(chain.levels) - 1)
            if chain.levels[i].p == params.p and chain.levels[i].q == params.q
        ),
        None,
    )
    if idx is None:
        raise ParamOutOfRange(
            f"record alpha = {params.p}/{params.q} does not match any "
            "non-final level of the chain"
        )
    lv, nxt = chain.levels[idx], chain.levels[idx + 1]
    if lv.l is None:
        raise ParamOutOfRange(
            "chain level carries no grid multiplier; generate the chain "
            "with l_base set to feed the stage builder"
        )
    if chain.h == 1:
        if params.k != lv.l or params.l != lv.l or params.s != lv.s:
            raise ParamOutOfRange(
                f"one-dimensional factors couple k = l = {lv.l}, s = {lv.s}; "
                f"got k={params.k}, l={params.l}, s={params.s}"
            )
        inc = build_stage_circle(params)
        if (inc.params_after.p, inc.params_after.q) != (nxt.p, nxt.q):
            raise ParamOutOfRange(
                f"chain advance ({nxt.p}, {nxt.q}) does not match the circle "
                f"advance ({inc.params_after.p}, {inc.params_after.q})"
            )
        return StageIncrement(
            scenario="translation",
            params_before=inc.params_before,
            params_after=inc.params_after,
            exact=inc.exact,
            analytic=inc.analytic,
        )
    if chain.h != 2:
        raise UnsupportedDimension(
            f"stage maps are implemented for 1- and 2-dimensional "
            f"translation factors, got h={chain.h}"
        )
    n, q = params.n, params.q
    k, l, s = lv.s * nxt.gamma[-1], lv.l, lv.s
    if params.k != k or params.l != l or params.s != s:
        raise ParamOutOfRange(
            f"record multipliers (k={params.k}, l={params.l}, s={params.s}) "
            f"do not match the chain level (k={k}, l={l}, s={s})"
        )
    ratio, rem = divmod(nxt.q, k * q)
    if rem:
        raise ParamOutOfRange(
            f"k q = {k * q} does not divide the next denominator {nxt.q}"
        )
    a = translation_index_function(lv.gamma, nxt.gamma, k, q)
    before = replace(params, a=a)
    exact = build_abc_conjugation(a, k, l, q, 2)
    built_analytic = None
    if analytic is True or (
        analytic == "auto" and len(exact.moves) <= AUTO_ANALYTIC_MOVE_CAP
    ):
        built_analytic = approximate_blockslide(
            exact, stage_epsilon(n), stage_delta(n)
        )
    # the multipliers carried forward are the next level's own when the
    # chain still prescribes them (so the following build can re-check
    # its record against the chain); the terminal record keeps this
    # stage's multipliers as information only
    if idx + 2 < len(chain.levels) and nxt.l is not None:
        k_fwd = nxt.s * chain.levels[idx + 2].gamma[-1]
        l_fwd, s_fwd = nxt.l, nxt.s
    else:
        k_fwd, l_fwd, s_fwd = k, l, s
    after = AbCParams(
        n=n + 1, p=nxt.p, q=nxt.q, k=k_fwd, l=l_fwd, s=s_fwd,
        eps=stage_epsilon(n + 1), a=(0,) * k_fwd,
    )
    return StageIncrement(
        scenario="translation",
        params_before=before,
        params_after=after,
        exact=exact,
        analytic=built_analytic,
    )


def run_translation_scenario(
    chain: TranslationParams,
    stages: Optional[int] = None,
    analytic: Union[bool, str] = "auto",
) -> StageMaps:
    """Build the translation-factor scenario along a parameter chain.

    stages defaults to every buildable level (len(levels) - 1); the
    chain must carry grid multipliers (l_base).
    """
    max_stages = len(chain.levels) - 1
    stages = max_stages if stages is None else stages
    if not (1 <= stages <= max_stages):
        raise ParamOutOfRange(
            f"stages must be in 1..{max_stages}, got {stages}"
        )
    lv1 = chain.levels[0]
    if lv1.l is None:
        raise ParamOutOfRange(
            "chain carries no grid multipliers; generate it with l_base set"
        )
    if chain.h == 1:
        k1 = lv1.l
    elif chain.h == 2:
        k1 = lv1.s * chain.levels[1].gamma[-1]
    else:
        raise UnsupportedDimension(
            f"stage maps are implemented for 1- and 2-dimensional "
            f"translation factors, got h={chain.h}"
        )
    start = AbCParams(
        n=1, p=lv1.p, q=lv1.q, k=k1, l=lv1.l, s=lv1.s,
        eps=stage_epsilon(1), a=(0,) * k1,
    )
    maps = StageMaps.start("translation", start)
    for _ in range(stages):
        maps = maps.extend(
            build_stage_translation(maps.records[-1], chain, analytic=analytic)
        )
    return maps


# ---------------------------------------------------------------------------
# Minimality scenario.
# ---------------------------------------------------------------------------


def build_stage_minimal(
    params: AbCParams, r: int, analytic: Union[bool, str] = "auto"
) -> StageIncrement:
    """One stage of the minimality scenario: k couples to l^2 and the
    conjugation composes the trapping shear with the stripe-squeezing
    involution (see the minimal module).

    The exact model is the O(1) evaluator; the entire approximation is
    built from the block-slide realization, which grows quickly with l —
    under the "auto" policy it is attempted only for l <= 4 (True forces
    it, False skips it).  The advance is the generic one with k = l^2,
    i.e. q' = s l^3 q^2.
    """
    if analytic not in (True, False, "auto"):
        raise ParamOutOfRange(f"analytic must be True, False or 'auto', got {analytic!r}")
    n, l, q = params.n, params.l, params.q
    if params.k != l * l:
        raise ParamOutOfRange(
            f"the minimality scenario couples k to l^2, got k={params.k}, l={l}"
        )
    if r < 1:
        raise ParamOutOfRange(f"need r >= 1 bands, got {r}")
    stage = minimal_stage(n, l, q, r)
    exact = stage.conjugation()
    built_analytic = None
    if analytic is True or (analytic == "auto" and l <= 4):
        shear = BlockSlideMap(2, (BlockSlideMove(1, 0, 1, stage.kappa),))
        realization = build_minimal_combinatorics(l, q, r, 2).then(shear)
        if analytic is True or len(realization.moves) <= AUTO_ANALYTIC_MOVE_CAP:
            built_analytic = approximate_blockslide(
                realization, stage_epsilon(n), stage_delta(n)
            )
    return StageIncrement(
        scenario="minimal",
        params_before=params,
        params_after=advance_params(params),
        exact=exact,
        analytic=built_analytic,
    )


def run_minimal_scenario(
    n: int,
    l: int,
    q: int,
    r: int,
    p: int = 1,
    s: int = 1,
    stages: int = 1,
    analytic: Union[bool, str] = "auto",
) -> StageMaps:
    """Build the minimality scenario at a prescribed toy scale.

    n sets the staircase sharpness (n^2 micro-steps per column), l the
    grid multiplier, p/q the starting rotation number, r the number of
    ergodic-limit bands.  The stage index starts at n directly — the
    scenario is studied one stage at a time at a chosen sharpness, not
    accumulated from stage 1.
    """
    if stages < 1:
        raise ParamOutOfRange(f"need at least one stage, got {stages}")
    start = AbCParams(
        n=n, p=p, q=q, k=l * l, l=l, s=s,
        eps=stage_epsilon(n), a=(0,) * (l * l),
    )
    maps = StageMaps.start("minimal", start)
    for _ in range(stages):
        maps = maps.extend(build_stage_minimal(maps.records[-1], r, analytic=analytic))
    return maps


# ---------------------------------------------------------------------------
# Stage-map evaluation.
# ---------------------------------------------------------------------------


def eval_stage_map(
    maps: StageMaps,
    x,
    model: str = "exact",
    power: int = 1,
    stage: Optional[int] = None,
):
    """T_stage^power(x) — conjugate, rotate by power*alpha, unconjugate.

    The exact model takes and returns TorusPoint (rational); the
    analytic model takes a coordinate sequence or (dim, n) array of
    floats and returns the matching shape.  The rotation is applied as
    one exact multiple power*alpha mod 1, so the guard on |power| only
    protects against meaninglessly large requests.
    """
    stage = maps.stage_count if stage is None else stage
    maps._check_stage(stage)
    rec = maps.records[stage]
    if abs(power) > rec.q * ROTATION_POWER_CAP:
        raise ParamOutOfRange(
            f"|power| = {abs(power)} exceeds the guard q_n * {ROTATION_POWER_CAP}"
        )
    shift = mod1(power * rec.alpha)
    if model == "exact":
        if not isinstance(x, TorusPoint):
            x = TorusPoint(tuple(Fraction(c) for c in x))
        y = maps.apply_exact(x, stage)
        y = y.shifted(0, shift)
        return maps.apply_exact(y, stage, inverse=True)
    if model == "analytic":
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        pts = arr.reshape(maps.dim, 1) if single else arr
        out = maps.apply_analytic(pts, stage).copy()
        out[0] = (out[0] + float(shift)) % 1.0
        out = maps.apply_analytic(out, stage, inverse=True)
        return tuple(float(v) for v in out[:, 0]) if single else out
    raise ParamOutOfRange(f"model must be 'exact' or 'analytic', got {model!r}")


def eval_stage_map_rational(
    maps: StageMaps, coords: Sequence, power: int = 1, stage: Optional[int] = None
) -> Tuple[Fraction, ...]:
    """T_stage^power through the exact-rational analytic path."""
    stage = maps.stage_count if stage is None else stage
    maps._check_stage(stage)
    rec = maps.records[stage]
    if abs(power) > rec.q * ROTATION_POWER_CAP:
        raise ParamOutOfRange(
            f"|power| = {abs(power)} exceeds the guard q_n * {ROTATION_POWER_CAP}"
        )
    y = maps.apply_analytic_rational(coords, stage)
    y = (mod1(y[0] + power * rec.alpha),) + tuple(y[1:])
    return maps.apply_analytic_rational(y, stage, inverse=True)


# ---------------------------------------------------------------------------
# Stage partitions and the finite conjugacy check.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StagePartition:
    """Pulled-back sample clouds of the level-n partition F_{q_n}.

    samples[j] holds the exact H_n-preimages of a 3x3 interior grid of
    atom atoms[j] of T_{q_n}; the stage map permutes these clouds by
    i -> i + p_n mod q_n.
    """

    level: int
    q: int
    p: int
    atoms: Tuple[int, ...]
    samples: Tuple[Tuple[TorusPoint, ...], ...]

    def diameters(self) -> Tuple[Fraction, ...]:
        """Sup-metric diameter of each cloud (a lower bound for the atom
        diameter; tight when the atom is a slanted box)."""
        out = []
        for cloud in self.samples:
            best = Fraction(0)
            for i_, a in enumerate(cloud):
                for b in cloud[i_ + 1:]:
                    d = max(
                        min(abs(a[c] - b[c]), 1 - abs(a[c] - b[c]))
                        for c in range(len(a.coords))
                    )
                    best = max(best, d)
            out.append(best)
        return tuple(out)


_CLOUD_OFFSETS = tuple(
    (Fraction(ux, 4), Fraction(vx, 4)) for ux in (1, 2, 3) for vx in (1, 2, 3)
)


def stage_partition(
    maps: StageMaps, stage: int, atoms: Optional[Sequence[int]] = None
) -> StagePartition:
    """Exact sample clouds of F_{q_stage} for the given atoms (all by
    default; pass a subset when q is large)."""
    maps._check_stage(stage)
    rec = maps.records[stage]
    chosen = tuple(range(rec.q)) if atoms is None else tuple(int(i) for i in atoms)
    clouds = []
    for i in chosen:
        if not (0 <= i < rec.q):
            raise ParamOutOfRange(f"atom index {i} outside [0, {rec.q})")
        cloud = []
        for (u, v) in _CLOUD_OFFSETS:
            w = TorusPoint((Fraction(i + u, rec.q) % 1, v))
            cloud.append(maps.apply_exact(w, stage, inverse=True))
        clouds.append(tuple(cloud))
    return StagePartition(
        level=stage, q=rec.q, p=rec.p, atoms=chosen, samples=tuple(clouds)
    )


@dataclass(frozen=True)
class ConjugacyReport:
    """Outcome of the finite conjugacy check at one stage.

    T_stage should move the atom of F_{q} holding each sample to the
    atom p steps further (mod q); fraction records how many samples did,
    threshold what the model promises (1 exactly; 1 - 2 eps analytically).
    """

    scenario: str
    stage: int
    model: str
    q: int
    p: int
    samples: int
    hits: int
    threshold: Fraction

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hits, self.samples) if self.samples else Fraction(0)

    @property
    def passed(self) -> bool:
        return self.fraction >= self.threshold


def _classify(maps: StageMaps, x: TorusPoint, stage: int, q: int) -> int:
    """Index of the F_q atom containing x: push forward with the exact
    H_stage and read off the T_q block."""
    y = maps.apply_exact(x, stage)
    return int(y[0] * q)


def verify_cyclic_permutation(
    maps: StageMaps,
    stage: int,
    model: str = "exact",
    samples: Optional[int] = None,
    seed: int = 0,
) -> ConjugacyReport:
    """Check that T_stage permutes F_{q} cyclically with step p.

    With samples=None every atom is visited with a 3x3 interior cloud
    (feasible for small q); otherwise the given number of seeded random
    (atom, interior point) pairs is drawn.  Exact model: membership must
    be perfect.  Analytic model: the fraction must reach 1 - 2 eps_n,
    the rest being attributable to the collar sets; sample points are
    exact rationals moved through the rational analytic path, so the
    verdict is deterministic.
    """
    maps._check_stage(stage)
    if model == "exact":
        threshold = Fraction(1)
    elif model == "analytic":
        h_an = maps.conjugations_analytic[stage - 1]
        if h_an is None:
            raise ParamOutOfRange(
                f"stage {stage} carries no analytic conjugation; only the "
                "exact model is available"
            )
        threshold = 1 - 2 * h_an.eps
    else:
        raise ParamOutOfRange(f"model must be 'exact' or 'analytic', got {model!r}")
    rec = maps.records[stage]
    q, p = rec.q, rec.p
    pairs = []
    if samples is None:
        for i in range(q):
            for (u, v) in _CLOUD_OFFSETS:
                pairs.append((i, u, v))
    else:
        if samples < 1:
            raise ParamOutOfRange(f"need at least one sample, got {samples}")
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            i = int(rng.integers(0, q))
            u = Fraction(2 * int(rng.integers(0, 2**16)) + 1, 2**17)
            v = Fraction(2 * int(rng.integers(0, 2**16)) + 1, 2**17)
            pairs.append((i, u, v))
    hits = 0
    for (i, u, v) in pairs:
        w = TorusPoint((Fraction(i + u, q) % 1, v))
        z = maps.apply_exact(w, stage, inverse=True)
        if model == "exact":
            t = eval_stage_map(maps, z, "exact", 1, stage)
        elif model == "analytic":
            t = TorusPoint(eval_stage_map_rational(maps, z.coords, 1, stage))
        else:
            raise ParamOutOfRange(f"model must be 'exact' or 'analytic', got {model!r}")
        if _classify(maps, t, stage, q) == (i + p) % q:
            hits += 1
    return ConjugacyReport(
        scenario=maps.scenario, stage=stage, model=model, q=q, p=p,
        samples=len(pairs), hits=hits, threshold=threshold,
    )


# ---------------------------------------------------------------------------
# Commutation of the conjugations with the previous rotation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutationReport:
    """h_stage o phi^{alpha_{stage-1}} vs phi^{alpha_{stage-1}} o h_stage."""

    stage: int
    alpha: Fraction
    exact_identity: bool
    structural: bool
    analytic_residual: Fraction
    samples: int

    @property
    def passed(self) -> bool:
        return self.exact_identity and self.structural and self.analytic_residual == 0


def check_stage_commutation(
    maps: StageMaps, stage: int, samples: int = 1000, seed: int = 0
) -> CommutationReport:
    """Verify the commutation h_n o phi^{alpha_{n-1}} = phi^{alpha_{n-1}} o h_n
    in all three senses: exact rational identity on random points,
    structural periodicity of the analytic steps, and pointwise equality
    through the rational analytic path (an exact zero, not a tolerance).

    Stages without an analytic conjugation are checked in the exact and
    structural senses only (the structural check then reads the exact
    map's own periodicity; the analytic residual is reported as zero
    because there is nothing to deviate)."""
    maps._check_stage(stage)
    alpha = maps.records[stage - 1].alpha
    h_ex = maps.conjugations_exact[stage - 1]
    h_an = maps.conjugations_analytic[stage - 1]
    rng = np.random.default_rng(seed)
    exact_ok = True
    worst = Fraction(0)
    for _ in range(samples):
        x = TorusPoint((
            Fraction(int(rng.integers(0, 2**24)), 2**24),
            Fraction(int(rng.integers(0, 2**24)), 2**24),
        ))
        lhs = h_ex(x.shifted(0, alpha))
        rhs = h_ex(x).shifted(0, alpha)
        if lhs.coords != rhs.coords:
            exact_ok = False
        if h_an is None:
            continue
        la = h_an.transform_rational((x[0] + alpha, x[1]))
        ra = h_an.transform_rational(x.coords)
        ra = (mod1(ra[0] + alpha),) + tuple(ra[1:])
        for a, b in zip(la, ra):
            d = abs(a - b)
            worst = max(worst, min(d, 1 - d))
    q_prev = maps.records[stage - 1].q
    if h_an is not None:
        structural = h_an.commutes_with_rotation(q_prev)
    elif hasattr(h_ex, "commutes_with_rotation"):
        structural = h_ex.commutes_with_rotation(q_prev)
    else:
        structural = exact_ok
    return CommutationReport(
        stage=stage,
        alpha=alpha,
        exact_identity=exact_ok,
        structural=structural,
        analytic_residual=worst,
        samples=samples,
    )


# ---------------------------------------------------------------------------
# Correspondences between partition levels.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Correspondence:
    """Atom-index unions taking level-`level_from` atoms to unions of
    level-`level_to` atoms (both T_q partitions, pulled back by the
    respective H when read on the torus)."""

    level_from: int
    level_to: int
    unions: Tuple[Tuple[int, ...], ...]

    def compose(self, finer: "Correspondence") -> "Correspondence":
        if finer.level_from != self.level_to:
            raise ParamOutOfRange(
                f"cannot compose levels {self.level_from}->{self.level_to} "
                f"with {finer.level_from}->{finer.level_to}"
            )
        unions = tuple(
            tuple(sorted(j for i in u for j in finer.unions[i]))
            for u in self.unions
        )
        return Correspondence(self.level_from, finer.level_to, unions)


def correspondence(maps: StageMaps, level_from: int, level_to: int) -> Correspondence:
    """The finite correspondence between partition levels.

    One step (t -> t+1) sends atom i of T_{q_t} to the fine atoms of
    T_{q_{t+1}} filling the tower atom R_i of R_{a_t, k_t, q_t}; columns
    have width 1/(k_t q_t), each holding q_{t+1}/(k_t q_t) fine atoms.
    Multi-level correspondences compose the steps; the composition law
    holds by construction and is re-checked in tests.
    """
    if not (0 <= level_from <= level_to <= maps.stage_count):
        raise ParamOutOfRange(
            f"need 0 <= from <= to <= {maps.stage_count}, got "
            f"{level_from}, {level_to}"
        )
    q_from = maps.records[level_from].q
    out = Correspondence(
        level_from, level_from, tuple((i,) for i in range(q_from))
    )
    for t in range(level_from, level_to):
        rec = maps.records[t]
        tower = PartitionSpec.tower(rec.a, rec.k, rec.q)
        ratio = maps.records[t + 1].q // (rec.k * rec.q)
        step_unions = tuple(
            tuple(sorted(c * ratio + u for c in tower.tower_columns(i)
                         for u in range(ratio)))
            for i in range(rec.q)
        )
        out = out.compose(Correspondence(t, t + 1, step_unions))
    return out


@dataclass(frozen=True)
class CorrespondenceDefect:
    """Symmetric-difference bookkeeping for one conjugation step: how
    much of h^{-1} R_i differs from the coarse atom Delta_i."""

    stage: int
    model: str
    per_atom: Tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return sum(self.per_atom, Fraction(0))


def correspondence_defect(
    maps: StageMaps, stage: int, model: str = "exact",
    samples: int = 4096, seed: int = 0,
) -> CorrespondenceDefect:
    """Measure mu(h_stage^{-1} R_i symdiff Delta_i) for every atom i.

    Exact model: h permutes a finite box lattice rigidly, so checking
    one interior point per box is a certificate; the defect is exactly
    zero for the built scenarios.  Analytic model: seeded Monte Carlo
    over the torus; each sample charges 1/samples to the source atom it
    leaves and the image atom it wrongly enters.
    """
    maps._check_stage(stage)
    rec = maps.records[stage - 1]
    tower = PartitionSpec.tower(rec.a, rec.k, rec.q)
    h_ex = maps.conjugations_exact[stage - 1]
    defects = [Fraction(0)] * rec.q
    if model == "exact":
        # Box lattice under which every move of h translates boxes rigidly:
        # on each axis, fine enough for the breakpoints of steps *sourced*
        # there and the shift values of steps *targeting* it.  Then a single
        # interior point certifies its whole box, and the x1 axis resolves
        # both the coarse blocks (pitch 1/q) and the tower columns (1/(kq)).
        cols, rows = rec.k * rec.q, 1
        for mv in h_ex.moves:
            bp = mv.step.period.denominator
            for b in mv.step.breakpoints:
                bp = bp * b.denominator // gcd(bp, b.denominator)
            val = 1
            for v in mv.step.values:
                val = val * v.denominator // gcd(val, v.denominator)
            if mv.target == 0:
                cols = cols * val // gcd(cols, val)
            else:
                rows = rows * val // gcd(rows, val)
            if mv.source == 0:
                cols = cols * bp // gcd(cols, bp)
            else:
                rows = rows * bp // gcd(rows, bp)
        span = cols // rec.q
        box = Fraction(1, cols * rows)
        for i in range(rec.q):
            for c in range(span):
                for r in range(rows):
                    x = TorusPoint((
                        Fraction(2 * (i * span + c) + 1, 2 * cols),
                        Fraction(2 * r + 1, 2 * rows),
                    ))
                    if tower.atom_index(h_ex(x)) != i:
                        defects[i] += box
        return CorrespondenceDefect(stage, model, tuple(defects))
    if model == "analytic":
        h_an = maps.conjugations_analytic[stage - 1]
        rng = np.random.default_rng(seed)
        pts = rng.random((2, samples))
        img = h_an.transform(pts)
        weight = Fraction(1, samples)
        for j in range(samples):
            src = int(pts[0, j] * rec.q)
            dst = tower.atom_index(
                TorusPoint((Fraction(img[0, j]) % 1, Fraction(img[1, j]) % 1))
            )
            if dst != src:
                defects[src] += weight
                defects[dst] += weight
        return CorrespondenceDefect(stage, model, tuple(defects))
    raise ParamOutOfRange(f"model must be 'exact' or 'analytic', got {model!r}")


__all__ = [
    "AUTO_ANALYTIC_MOVE_CAP",
    "ROTATION_POWER_CAP",
    "AbCParams",
    "CommutationReport",
    "ConjugacyReport",
    "Correspondence",
    "CorrespondenceDefect",
    "StageIncrement",
    "StageMaps",
    "StagePartition",
    "advance_params",
    "build_stage_circle",
    "build_stage_minimal",
    "build_stage_translation",
    "check_stage_commutation",
    "circle_params",
    "correspondence",
    "correspondence_defect",
    "eval_stage_map",
    "eval_stage_map_rational",
    "meets_strict_epsilon",
    "run_circle_scenario",
    "run_minimal_scenario",
    "run_translation_scenario",
    "stage_partition",
    "translation_index_function",
    "verify_cyclic_permutation",
]
