"""zenofig: publication-style figures rendered from zenolab result tables.

Reads only the public CSV/JSON table schema (metadata comment lines or
metadata object, typed columns, rows) — no in-process coupling to the
simulation package.
"""

__version__ = "0.1.0"

from .tables import Table, TableError, read_table
from .figures import FigureSpec, FigureSpecError, RenderSummary, load_figure_spec, render
