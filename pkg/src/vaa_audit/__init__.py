"""Audit chat-completion models as voting advice applications."""

from vaa_audit.dataset import (
    LikertOption,
    Party,
    PartyAnswer,
    Questionnaire,
    Statement,
    load_dataset,
    validate_dataset,
)
from vaa_audit.prompting import Dialogue, Setting, Turn, render_setting
from vaa_audit.scoring import AuditRecord, Stance, accuracy, binarize, parse_option, score_record

__all__ = [
    "AuditRecord",
    "Dialogue",
    "LikertOption",
    "Party",
    "PartyAnswer",
    "Questionnaire",
    "Setting",
    "Stance",
    "Statement",
    "Turn",
    "accuracy",
    "binarize",
    "load_dataset",
    "parse_option",
    "render_setting",
    "score_record",
    "validate_dataset",
]

__version__ = "0.1.0"
