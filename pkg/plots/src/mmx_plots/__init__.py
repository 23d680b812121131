"""Figure rendering for the mmx CSV/JSON artifacts.

This package never imports the solver library. It consumes the documented
file formats (trace CSV, sweep report JSON, spectral report JSON), so the
two components can only drift apart by breaking a file contract, which the
schema validators here catch by name.
"""

from .render import KINDS, FigureSpec, fit_label, render
from .schema import SchemaError

__all__ = ["KINDS", "FigureSpec", "SchemaError", "fit_label", "render"]
