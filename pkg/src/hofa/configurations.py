"""Exact averages of products f_S(sum_{i in S} x_i) over all variable assignments.

This is the common kernel behind Gowers inner products, corner convolutions
and configuration moments.  Variables are numbered 0..nvars-1; the average is
taken over variable 0 in an outer Python loop and over the remaining variables
as one vectorized grid, so memory is O(|A|^(nvars-1)).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .groups import FiniteAbelianGroup

Term = tuple[Sequence[int], np.ndarray]


def _grid_coords(group: FiniteAbelianGroup, nvars: int) -> list[np.ndarray]:
    n, g = group.order, nvars - 1
    out = []
    for i in range(g):
        shape = [1] * g
        shape[i] = n
        out.append(group.coords[np.arange(n).reshape(shape)])
    return out


def configuration_mean(group: FiniteAbelianGroup, nvars: int, terms: Sequence[Term],
                       keep_first: bool = False):
    """E over x_0..x_{nvars-1} of prod_terms vals[sum_{i in vars} x_i].

    With ``keep_first`` the average over x_0 is not taken and an array indexed
    by x_0 is returned.
    """
    if nvars < 1:
        raise ValueError("need at least one variable")
    n, g = group.order, nvars - 1
    full_shape = (n,) * g
    grids = _grid_coords(group, nvars)
    zero = np.zeros((1,) * g + (group.rank,), dtype=np.int64)

    fixed = np.ones((1,) * g, dtype=complex)
    moving = []
    for vars_, vals in terms:
        vals = np.asarray(vals, dtype=complex)
        rest = [v for v in vars_ if v != 0]
        partial = zero
        for v in rest:
            partial = partial + grids[v - 1]
        if 0 in vars_:
            moving.append((partial, vals))
        else:
            fixed = fixed * vals[group.index(partial)]

    out = np.empty(n, dtype=complex)
    for x0 in range(n):
        prod = fixed
        shift = group.coords[x0]
        for partial, vals in moving:
            prod = prod * vals[group.index(partial + shift)]
        out[x0] = np.broadcast_to(prod, full_shape).mean() if g else complex(np.asarray(prod).reshape(-1)[0])
    return out if keep_first else complex(out.mean())
