"""Audit runs and accuracy reports."""

from vaa_audit.harness.audit import AuditAborted, run_audit
from vaa_audit.harness.config import ConfigError, EndpointConfig, RetrievalConfig, RunConfig, load_config
from vaa_audit.harness.report import DIMENSIONS, FORMATS, Cell, Report, aggregate, emit_report, render_table

__all__ = [
    "DIMENSIONS",
    "FORMATS",
    "AuditAborted",
    "Cell",
    "ConfigError",
    "EndpointConfig",
    "Report",
    "RetrievalConfig",
    "RunConfig",
    "aggregate",
    "emit_report",
    "load_config",
    "render_table",
    "run_audit",
]
