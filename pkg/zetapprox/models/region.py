"""Rectangles and the counting reports built on them."""
import enum
import math
from dataclasses import dataclass, field, replace

from ..errors import ValidationError


class Axis(str, enum.Enum):
    """Split direction of a rectangle."""

    SIGMA = "sigma"
    T = "t"


@dataclass(frozen=True)
class RectRegion:
    """The open rectangle sigma_left < sigma < sigma_right, t_bottom < t < t_top."""

    sigma_left: float
    sigma_right: float
    t_bottom: float
    t_top: float

    def __post_init__(self) -> None:
        for name in ("sigma_left", "sigma_right", "t_bottom", "t_top"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.sigma_left < self.sigma_right:
            raise ValidationError("sigma_left must be below sigma_right.", invariant="sigmaLeft < sigmaRight")
        if not self.t_bottom < self.t_top:
            raise ValidationError("t_bottom must be below t_top.", invariant="tBottom < tTop")

    @property
    def width(self) -> float:
        return self.sigma_right - self.sigma_left

    @property
    def height(self) -> float:
        return self.t_top - self.t_bottom

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex((self.sigma_left + self.sigma_right) / 2, (self.t_bottom + self.t_top) / 2)

    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Corners in counterclockwise order starting bottom-right."""
        return (
            complex(self.sigma_right, self.t_bottom),
            complex(self.sigma_right, self.t_top),
            complex(self.sigma_left, self.t_top),
            complex(self.sigma_left, self.t_bottom),
        )

    def split(self, axis: Axis, at: float) -> tuple["RectRegion", "RectRegion"]:
        """Split at ``at`` along ``axis`` into (lower, upper) parts."""
        if axis == Axis.SIGMA:
            return replace(self, sigma_right=at), replace(self, sigma_left=at)
        return replace(self, t_top=at), replace(self, t_bottom=at)

    def longer_axis(self) -> Axis:
        """The axis along which the rectangle is longer (sigma on ties)."""
        return Axis.SIGMA if self.width >= self.height else Axis.T

    def contains(self, s: complex) -> bool:
        return self.sigma_left < s.real < self.sigma_right and self.t_bottom < s.imag < self.t_top

    def encloses(self, other: "RectRegion") -> bool:
        """True if ``other`` lies inside this rectangle."""
        return (
            self.sigma_left <= other.sigma_left
            and other.sigma_right <= self.sigma_right
            and self.t_bottom <= other.t_bottom
            and other.t_top <= self.t_top
        )

    @classmethod
    def around(cls, center: complex, half_width: float, half_height: float | None = None) -> "RectRegion":
        """A rectangle centred on ``center``."""
        half_height = half_width if half_height is None else half_height
        return cls(
            center.real - half_width,
            center.real + half_width,
            center.imag - half_height,
            center.imag + half_height,
        )


@dataclass(frozen=True)
class LocatedRoot:
    """A certified a-value: a box of the given radius around ``center``."""

    center: complex
    radius: float
    multiplicity: int = 1


@dataclass(frozen=True)
class CountReport:
    """Winding count of zeta_N - a over a rectangle, with its comparison."""

    region: RectRegion
    a: complex
    winding: int
    residual: float = 0.0
    roots: tuple[LocatedRoot, ...] = ()
    predicted: float | None = None
    discrepancy: float | None = None

    def __post_init__(self) -> None:
        if self.winding < 0:
            raise ValidationError("Winding of a holomorphic function cannot be negative.", invariant="winding >= 0")

    @property
    def empirical(self) -> int:
        return self.winding

    @property
    def fully_localized(self) -> bool:
        return sum(root.multiplicity for root in self.roots) == self.winding


@dataclass(frozen=True)
class ClusterReport:
    """a-values at height (T, T+U): all of them, and those within epsilon of the line."""

    total: int
    within: int
    epsilon: float
    sigma_bound: float = 0.0
    T: float = 0.0
    U: float = 0.0
    a: complex = 0j

    def __post_init__(self) -> None:
        if not 0 <= self.within <= self.total:
            raise ValidationError(
                f"within = {self.within} outside [0, {self.total}].", invariant="0 <= within <= total"
            )

    @property
    def outside(self) -> int:
        return self.total - self.within

    @property
    def outside_fraction(self) -> float:
        return self.outside / self.total if self.total else 0.0

    @property
    def empirical(self) -> int:
        return self.total


class StripSide(str, enum.Enum):
    """Which predicate of the strip theorem is checked."""

    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class StripPoint:
    """Predicate outcome at one point; ``statistic`` is the quantity compared."""

    t: float
    sigma: float
    statistic: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class StripReport:
    """Strip predicates along a t-grid at one abscissa."""

    a: complex
    sigma: float
    side: StripSide
    points: tuple[StripPoint, ...] = field(default_factory=tuple)
    # Smallest |sigma - delta/2| beyond which the predicate held on the whole grid.
    threshold: float | None = None

    @property
    def passed(self) -> bool:
        return all(point.passed for point in self.points)
