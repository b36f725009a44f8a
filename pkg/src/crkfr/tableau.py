"""Explicit Butcher tableaux driving the local compact Runge-Kutta stages."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    a: np.ndarray  # strictly lower triangular, s x s
    b: np.ndarray  # final-stage weights, sum to 1
    c: np.ndarray  # abscissae, c_i = sum_j a_ij

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != b.size:
            raise ValueError("inconsistent tableau shapes")
        if np.any(np.triu(a) != 0.0):
            raise ValueError("tableau must be explicit (strictly lower triangular A)")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError("tableau weights must sum to 1")

    @property
    def stages(self):
        return len(self.b)

    @property
    def order(self):
        return _ORDER[self.name]


def _make(name, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = a.sum(axis=1)
    for arr in (a, b, c):
        arr.setflags(write=False)
    return ButcherTableau(name, a, b, c)


# Forward Euler: degenerate single-stage scheme used for degree 0.
CRK11 = _make("crk11", [[0.0]], [1.0])

# Midpoint-based two-stage scheme: the time average is the flux of the
# half-step state.
CRK22 = _make("crk22", [[0.0, 0.0], [0.5, 0.0]], [0.0, 1.0])

# Three-stage third-order scheme with averaging weights (1/4, 0, 3/4).
CRK33 = _make(
    "crk33",
    [[0.0, 0.0, 0.0], [1.0 / 3.0, 0.0, 0.0], [0.0, 2.0 / 3.0, 0.0]],
    [0.25, 0.0, 0.75],
)

# Classical four-stage fourth-order scheme.
CRK44 = _make(
    "crk44",
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ],
    [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
)

_BY_NAME = {t.name: t for t in (CRK11, CRK22, CRK33, CRK44)}
_ORDER = {"crk11": 1, "crk22": 2, "crk33": 3, "crk44": 4}


def by_name(name):
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown tableau {name!r}; available: {sorted(_BY_NAME)}") from None


def default_for_degree(degree):
    """Tableau of order degree+1, capped at the four-stage scheme."""
    order = min(degree + 1, 4)
    return _BY_NAME[f"crk{order}{order}"]
