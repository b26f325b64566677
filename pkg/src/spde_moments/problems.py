"""The three benchmark problems, in Ito form, on (0, 2*pi) with u0 = cos x."""

from __future__ import annotations

import numpy as np

from .spatial import FourierGrid, SpdeProblem

EXAMPLES = ("single", "commutative", "noncommutative")

DEFAULT_CONSTANTS = {
    "single": {"epsilon": 0.02, "beta": 0.1, "sigma": 0.5},
    "commutative": {"epsilon": 0.02, "beta": 0.1, "sigma1": 0.5, "sigma2": 0.2},
    "noncommutative": {"epsilon": 0.02, "beta": 0.1, "sigma1": 0.5, "sigma2": 0.2},
}


def build_example(name: str, grid_size: int, constants: dict | None = None) -> SpdeProblem:
    """Assemble one of the named benchmark problems on an M-point grid.

    Constants default to the benchmark values and can be partially
    overridden; unknown constant names are rejected.
    """
    if name not in EXAMPLES:
        raise ValueError(f"unknown example {name!r}; choose from {EXAMPLES}")
    values = dict(DEFAULT_CONSTANTS[name])
    for key, value in (constants or {}).items():
        if key not in values:
            raise ValueError(f"example {name!r} has no constant {key!r}")
        values[key] = float(value)
    grid = FourierGrid(grid_size)
    u0 = np.cos(grid.points)
    eps, beta = values["epsilon"], values["beta"]
    if name == "single":
        # Ito drift absorbs half the squared advection noise.
        sigma = values["sigma"]
        return SpdeProblem(
            grid,
            a=eps + 0.5 * sigma**2,
            b=lambda x: beta * np.sin(x),
            c=0.0,
            sigma=[sigma],
            nu=[0.0],
            u0=u0,
            label="single",
        )
    s1, s2 = values["sigma1"], values["sigma2"]
    if name == "commutative":
        # Advection noise sigma1*cos(x)*du/dx plus reaction noise sigma2*u.
        return SpdeProblem(
            grid,
            a=lambda x: eps + 0.5 * s1**2 * np.cos(x) ** 2,
            b=lambda x: beta * np.sin(x) - 0.25 * s1**2 * np.sin(2 * x),
            c=0.0,
            sigma=[s1 * np.cos(grid.points), 0.0],
            nu=[0.0, s2],
            u0=u0,
            label="commutative",
        )
    # Advection noise sigma1*du/dx plus reaction noise sigma2*cos(x)*u.
    return SpdeProblem(
        grid,
        a=eps + 0.5 * s1**2,
        b=lambda x: beta * np.sin(x),
        c=lambda x: 0.5 * s2**2 * np.cos(x) ** 2,
        sigma=[s1, 0.0],
        nu=[0.0, s2 * np.cos(grid.points)],
        u0=u0,
        label="noncommutative",
    )
