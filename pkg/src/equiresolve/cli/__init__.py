"""Command line front end: problem files, task runner and report emitters."""

from .dsl import DSLError, ProblemFile, Task, format_problem, parse_problem
from .main import main
from .report import FORMATS, Flags, ReportDoc, emit, load_schema, run_task

__all__ = [
    "DSLError",
    "FORMATS",
    "Flags",
    "ProblemFile",
    "ReportDoc",
    "Task",
    "emit",
    "format_problem",
    "load_schema",
    "main",
    "parse_problem",
    "run_task",
]
