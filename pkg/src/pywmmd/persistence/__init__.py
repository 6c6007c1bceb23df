from .atomic import atomic_text_output, atomic_text_outputs
from .model_store import JsonModelStore, ModelStore, TrainingReference
from .report_store import report_to_dict, save_report, write_report_csv

__all__ = [
    "JsonModelStore",
    "ModelStore",
    "TrainingReference",
    "atomic_text_output",
    "atomic_text_outputs",
    "report_to_dict",
    "save_report",
    "write_report_csv",
]
