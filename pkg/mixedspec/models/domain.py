# mixedspec/models/domain.py
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from mixedspec.core.errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Relative slack allowed when checking coordinates against the closed rectangle
COORD_SLACK = 1e-12


class RectDomain(BaseModel):
    """
    The rectangle 0 < x < p, -T < t < T.

    The hyperbolic part is (0, p) x (0, T], the parabolic part (0, p) x [-T, 0),
    and the two are glued along the seam t = 0.
    """
    p: float = Field(..., gt=0, description="Spatial width", examples=[1.0])
    t_max: float = Field(..., gt=0, alias="T", description="Time extent T", examples=[1.0])

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @property
    def t_min(self) -> float:
        return -self.t_max

    def check_x(self, x: ArrayLike) -> None:
        """Raise DomainError unless every x lies in [0, p]."""
        slack = COORD_SLACK * self.p
        xs = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(xs)) or np.any(xs < -slack) or np.any(xs > self.p + slack):
            raise DomainError(f"x outside [0, {self.p}]: {_describe(xs)}")

    def check_t(self, t: ArrayLike, lo: float = None, hi: float = None) -> None:
        """Raise DomainError unless every t lies in [lo, hi] (default [-T, T])."""
        lo = self.t_min if lo is None else lo
        hi = self.t_max if hi is None else hi
        slack = COORD_SLACK * self.t_max
        ts = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(ts)) or np.any(ts < lo - slack) or np.any(ts > hi + slack):
            raise DomainError(f"t outside [{lo}, {hi}]: {_describe(ts)}")

    def check_point(self, x: ArrayLike, t: ArrayLike) -> None:
        self.check_x(x)
        self.check_t(t)

    def __repr__(self) -> str:
        return f"<RectDomain(p={self.p}, T={self.t_max})>"


def _describe(values: np.ndarray) -> str:
    if values.ndim == 0:
        return repr(float(values))
    return f"range [{np.nanmin(values)!r}, {np.nanmax(values)!r}]"
