"""Numerical toolkit for -div(|grad u|^{p-2} grad u) = |x|^a u^q and its Wolff-potential form."""
from ._backend import BACKEND

__version__ = "0.1.0"
