from .tables import (
    DATASET_PROTOCOLS,
    N_U_GRID,
    PI_GRID,
    TIMING_COLUMNS,
    SweepAxis,
    SweepSpec,
    dataset_plan,
    moons_decision_surface,
    sweep,
    table2_protocol,
    timing_plans,
    timing_table,
    write_table_csv,
)

__all__ = [
    "DATASET_PROTOCOLS",
    "N_U_GRID",
    "PI_GRID",
    "TIMING_COLUMNS",
    "SweepAxis",
    "SweepSpec",
    "dataset_plan",
    "moons_decision_surface",
    "sweep",
    "table2_protocol",
    "timing_plans",
    "timing_table",
    "write_table_csv",
]
