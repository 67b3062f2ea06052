"""Languages of primitive substitutions, their lexicographic structure, and the
infinite interval exchanges they induce."""

from .iet import build_T_n, build_T_part_n, build_part_L, verify_theorem, von_neumann_kakutani
from .language import build_factor_table, trace_special_branches
from .measure import estimate_frequencies
from .substitution import thue_morse_substitution

__all__ = ["build_T_n", "build_T_part_n", "build_part_L", "verify_theorem",
           "von_neumann_kakutani", "build_factor_table", "trace_special_branches",
           "estimate_frequencies", "thue_morse_substitution"]
__version__ = "0.1.0"
