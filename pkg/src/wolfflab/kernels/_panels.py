"""Panel layout shared by both kernel backends.

Kept free of Python objects so numba can compile it unchanged.
"""
import math

import numpy as np


def panel_edges(a, b, h_max, n_grade, sigma):
    """Breakpoints on [a, b]: uniform interior panels no wider than ``h_max``,
    with the first and last panels split geometrically toward the endpoints
    (ratio ``sigma``, ``n_grade`` levels) to absorb algebraic endpoint
    behaviour."""
    m = int(math.ceil((b - a) / h_max))
    if m < 2:
        m = 2
    pw = (b - a) / m
    edges = np.empty(m + 1 + 2 * n_grade)
    k = 0
    edges[k] = a
    k += 1
    for j in range(n_grade, 0, -1):
        edges[k] = a + pw * sigma ** j
        k += 1
    for i in range(1, m):
        edges[k] = a + i * pw
        k += 1
    for j in range(1, n_grade + 1):
        edges[k] = b - pw * sigma ** j
        k += 1
    edges[k] = b
    return edges
