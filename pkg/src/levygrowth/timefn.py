"""Small serializable time-function wrapper (lags, widths, drifts).

Keeping the common shapes (constant, proportional, affine, table) as tagged
data rather than bare lambdas lets ambit geometry pick exact closed-form
paths and keeps run configurations hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class TimeFn:
    kind: str
    params: tuple = ()
    fn: Optional[Callable] = None

    @staticmethod
    def constant(value):
        return TimeFn("constant", (float(value),))

    @staticmethod
    def proportional(factor):
        """t -> factor * t."""
        return TimeFn("proportional", (float(factor),))

    @staticmethod
    def affine(intercept, slope):
        return TimeFn("affine", (float(intercept), float(slope)))

    @staticmethod
    def table(ts, values):
        ts, values = TimeFn._check_nodes(ts, values)
        return TimeFn("table", (ts, values))

    @staticmethod
    def step(ts, values):
        """Piecewise constant: holds each value from its abscissa onward."""
        ts, values = TimeFn._check_nodes(ts, values)
        return TimeFn("step", (ts, values))

    @staticmethod
    def _check_nodes(ts, values):
        ts = tuple(float(t) for t in ts)
        values = tuple(float(v) for v in values)
        if len(ts) != len(values) or len(ts) == 0:
            raise ValueError("table needs matching, nonempty ts/values")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("table abscissae must be strictly increasing")
        return ts, values

    @staticmethod
    def of(x):
        """Coerce floats, TimeFns and callables to a TimeFn."""
        if isinstance(x, TimeFn):
            return x
        if callable(x):
            return TimeFn("callable", (), x)
        return TimeFn.constant(x)

    @property
    def is_constant(self):
        return self.kind == "constant"

    @property
    def value(self):
        if not self.is_constant:
            raise ValueError("not a constant time function")
        return self.params[0]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full_like(t, self.params[0])
        elif self.kind == "proportional":
            out = self.params[0] * t
        elif self.kind == "affine":
            out = self.params[0] + self.params[1] * t
        elif self.kind == "table":
            ts, values = self.params
            out = np.interp(t, np.asarray(ts), np.asarray(values))
        elif self.kind == "step":
            ts, values = self.params
            idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 1)
            out = np.asarray(values)[idx]
        else:
            out = np.asarray(self.fn(t), dtype=float)
        return out if out.ndim else float(out)

    def describe(self):
        if self.kind == "callable":
            return {"kind": "callable", "name": getattr(self.fn, "__name__", "fn")}
        return {"kind": self.kind, "params": self.params}
