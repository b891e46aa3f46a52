"""Constant-time evaluators and zone geometry for minimality stages.

One stage of the minimality scenario conjugates the rotation with

    h  =  h1 o h2          (h2 acts first),

where both layers are measure-preserving torus maps built over the grid
of l^3 q columns (pitch 1/(l^3 q)) by l r rows (pitch 1/(l r)):

* h2 — the stripe-squeezing involution.  Column classes are taken mod
  l^2, so the map commutes with the rotation by 1/(l q) and therefore
  with every rotation it needs to commute with.  Writing a cell as
  (class c, row y):

      c = v < l:            (v, J*r + rho) <-> (J, v*r + rho)
      c = u*l + v, u >= 1:  (u*l + v, t*l + w) <-> (u*l + w, t*l + v)

  The first family folds each full-height stripe onto a horizontal band
  of its block — the mechanism that drags orbits across every height.
  The second family transposes digits inside each band
  N_t = T^1 x [t/r, (t+1)/r), so the r band measures survive the stage.
  Every cell translates rigidly onto its partner, and the map is its own
  inverse pointwise, not merely on cell indices.

* h1 — the trapping shear x2 += kappa(x1), with kappa the 1/(l^3 q)-
  periodic staircase of n^2 micro-steps of pitch delta/(l r) built by
  `build_trapping_step`.  A rotation orbit crossing one column period
  samples all n^2 staircase sections, so its pulled-back height takes
  n^2 nearby but distinct values — at most a bounded number of which
  can hide in any one collar.  That traps a definite fraction of every
  long orbit inside every zone.

`build_minimal_combinatorics` (exact.builders) realizes h2 as an
explicit block-slide composition; that route grows quickly with l and
exists for cross-validation.  The evaluators here act in O(1) per point
and are the production route for orbit-scale diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple, Union

from .errors import ParamOutOfRange
from .exact.points import TorusPoint
from .exact.steps import StepFunction, build_trapping_step

Zone = Union[Tuple[str, int, int], Tuple[str, int, int, int]]


# ---------------------------------------------------------------------------
# The stripe-squeezing involution as a constant-time cell map.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimalCombinatorics:
    """The stripe-squeezing involution h2 evaluated in O(1) per point.

    Pointwise equal to ``build_minimal_combinatorics(l, q, r)`` (the
    block-slide realization; cross-validated in tests) but independent
    of l: each of the l^3 q x l r grid cells translates rigidly onto its
    partner cell, and applying the map twice returns every point.
    """

    l: int
    q: int
    r: int

    def __post_init__(self):
        if self.l < 2 or self.q < 1 or self.r < 1:
            raise ParamOutOfRange(
                f"need l >= 2, q >= 1, r >= 1, got l={self.l}, q={self.q}, "
                f"r={self.r}"
            )

    @property
    def cols(self) -> int:
        return self.l ** 3 * self.q

    @property
    def rows(self) -> int:
        return self.l * self.r

    def cell_image(self, col: int, row: int) -> Tuple[int, int]:
        """Image cell of grid cell (col, row); an involution on cells.

        col indexes the l^3 q columns, row the l r rows.  The block
        s = col // l^2 is preserved (1/(l q)-equivariance); inside the
        block the class c = col mod l^2 trades digits with the row as in
        the module docstring.
        """
        l, r = self.l, self.r
        if not (0 <= col < self.cols and 0 <= row < self.rows):
            raise ParamOutOfRange(
                f"cell ({col}, {row}) outside the {self.cols} x {self.rows} grid"
            )
        s, c = divmod(col, l * l)
        if c < l:
            J, rho = divmod(row, r)
            c2, row2 = J, c * r + rho
        else:
            u, v = divmod(c, l)
            t, w = divmod(row, l)
            c2, row2 = u * l + w, t * l + v
        return s * l * l + c2, row2

    def __call__(self, x: TorusPoint) -> TorusPoint:
        if not isinstance(x, TorusPoint):
            x = TorusPoint(tuple(Fraction(c) for c in x))
        if len(x.coords) != 2:
            raise ParamOutOfRange(
                f"expected a 2-torus point, got dimension {len(x.coords)}"
            )
        cols, rows = self.cols, self.rows
        col = int(x[0] * cols)
        row = int(x[1] * rows)
        col2, row2 = self.cell_image(col, row)
        return TorusPoint((
            x[0] + Fraction(col2 - col, cols),
            x[1] + Fraction(row2 - row, rows),
        ))

    def inverse(self) -> "MinimalCombinatorics":
        """The map is a pointwise involution."""
        return self


# ---------------------------------------------------------------------------
# The full stage conjugation h = h1 o h2.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimalConjugation:
    """One minimality-stage conjugation, h = h1 o h2 with h2 first.

    Callable on TorusPoint with an exact rational result and an exact
    ``inverse()``, so it drops into stage stacks wherever a block-slide
    conjugation would — at O(1) cost per evaluation instead of one term
    per gadget move.
    """

    comb: MinimalCombinatorics
    kappa: StepFunction
    inverted: bool = False

    def __call__(self, x: TorusPoint) -> TorusPoint:
        if not isinstance(x, TorusPoint):
            x = TorusPoint(tuple(Fraction(c) for c in x))
        if self.inverted:
            y = x.shifted(1, -self.kappa(x[0]))
            return self.comb(y)
        y = self.comb(x)
        return y.shifted(1, self.kappa(y[0]))

    def inverse(self) -> "MinimalConjugation":
        return replace(self, inverted=not self.inverted)

    def commutes_with_rotation(self, q_rot: int) -> bool:
        """Structural commutation with the rotation by 1/q_rot of x1.

        Both layers are 1/(l q)-periodic in x1 (the staircase is even
        1/(l^3 q)-periodic), so h commutes with the rotation whenever
        q_rot divides l q — in particular with every rotation number of
        denominator q.
        """
        if q_rot < 1:
            raise ParamOutOfRange(f"q_rot must be >= 1, got {q_rot}")
        return (self.comb.l * self.comb.q) % q_rot == 0


# ---------------------------------------------------------------------------
# Stage geometry: collar resolution, zones, classification.
# ---------------------------------------------------------------------------


def trapping_exponent(n: int, l: int, q: int) -> int:
    """Resolution exponent e of the stage's staircase: delta = 2^-e.

    e = l q + bitlength(n^4 - 1) + 1 makes the accumulated shear of all
    n^2 micro-steps — at most n^4 * delta / (l r) — smaller than
    2^{-l q - 1} of one row, far inside every collar the zone
    bookkeeping uses.  Any smaller delta works equally well; a fixed
    deterministic choice keeps reports reproducible.
    """
    if n < 2:
        raise ParamOutOfRange(f"the staircase needs n >= 2, got {n}")
    if l < 2 or q < 1:
        raise ParamOutOfRange(f"need l >= 2 and q >= 1, got l={l}, q={q}")
    return l * q + (n ** 4 - 1).bit_length() + 1


@dataclass(frozen=True)
class MinimalStage:
    """Geometry bundle of one minimality stage.

    Zones live upstairs, in the coordinates where the stage map is the
    plain rotation: a point y is first unsheared, z = (y1, y2 - kappa(y1)),
    then located on the l^3 q x l r grid.  Writing the column as
    I = s*l^2 + i:

      * i <  l  — zone A_{s,i}: the full-height stripes, one zone per
        (block, stripe); the conjugation folds A_{s,i} into the cell
        [s/(lq), (s+1)/(lq)) x [i/l, (i+1)/l), so visiting every A-zone
        makes the pulled-back orbit 1/l-dense (the minimality mechanism).
      * i >= l — zone B^t_{s,i} with t = row // l: band-local zones; the
        per-band visit frequencies estimate the band measures that
        survive to the limit.

    Points whose within-cell offset falls outside [delta/2, 1 - delta/2]
    on either axis sit in a collar and are reported uncaptured.
    """

    n: int
    l: int
    q: int
    r: int
    delta: Fraction
    comb: MinimalCombinatorics
    kappa: StepFunction

    def conjugation(self) -> MinimalConjugation:
        return MinimalConjugation(comb=self.comb, kappa=self.kappa)

    @property
    def a_zone_count(self) -> int:
        """A-zones, enumerated as l q blocks x l stripes."""
        return self.l * self.q * self.l

    @property
    def b_zone_count(self) -> int:
        """B-zones: r bands x l q blocks x (l^2 - l) columns."""
        return self.r * self.l * self.q * (self.l * self.l - self.l)

    def locate(self, y: TorusPoint) -> Optional[Zone]:
        """Zone of y — ('A', s, i), ('B', t, s, i) — or None in a collar."""
        if not isinstance(y, TorusPoint):
            y = TorusPoint(tuple(Fraction(c) for c in y))
        l = self.l
        z2 = (y[1] - self.kappa(y[0])) % 1
        c_scaled = y[0] * self.comb.cols
        r_scaled = z2 * self.comb.rows
        col, f1 = int(c_scaled), c_scaled % 1
        row, f2 = int(r_scaled), r_scaled % 1
        half = self.delta / 2
        if not (half <= f1 <= 1 - half and half <= f2 <= 1 - half):
            return None
        s, i = divmod(col, l * l)
        if i < l:
            return ("A", s, i)
        return ("B", row // l, s, i)


def minimal_stage(
    n: int, l: int, q: int, r: int, delta: Optional[Fraction] = None
) -> MinimalStage:
    """Assemble the geometry of one minimality stage.

    delta defaults to 2^-trapping_exponent(n, l, q); an explicit value
    (including 0, which collapses the staircase collars) is accepted for
    closed-form measure tests.
    """
    if n < 2:
        raise ParamOutOfRange(f"the staircase needs n >= 2, got {n}")
    if l < 2 or q < 1 or r < 1:
        raise ParamOutOfRange(
            f"need l >= 2, q >= 1, r >= 1, got l={l}, q={q}, r={r}"
        )
    if delta is None:
        delta = Fraction(1, 2 ** trapping_exponent(n, l, q))
    else:
        delta = Fraction(delta)
        if not (0 <= delta < 1):
            raise ParamOutOfRange(f"delta must lie in [0, 1), got {delta}")
    kappa = build_trapping_step(n, l, q, r, delta)
    comb = MinimalCombinatorics(l=l, q=q, r=r)
    return MinimalStage(n=n, l=l, q=q, r=r, delta=delta, comb=comb, kappa=kappa)


__all__ = [
    "MinimalCombinatorics",
    "MinimalConjugation",
    "MinimalStage",
    "minimal_stage",
    "trapping_exponent",
]
