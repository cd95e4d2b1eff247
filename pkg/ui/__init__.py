"""UI layer -- Rich tables and output writers."""

from .dashboard import (
    console,
    print_backtest,
    print_calibration,
    print_day_states,
    print_fingerprint,
    print_header,
    print_ic_table,
    print_macro_table,
    print_moments,
    print_trajectory,
    print_validation,
    print_written,
    sparkline,
)
from .output import save_json, write_csv, write_lines

__all__ = [
    "console",
    "print_backtest",
    "print_calibration",
    "print_day_states",
    "print_fingerprint",
    "print_header",
    "print_ic_table",
    "print_macro_table",
    "print_moments",
    "print_trajectory",
    "print_validation",
    "print_written",
    "save_json",
    "sparkline",
    "write_csv",
    "write_lines",
]
