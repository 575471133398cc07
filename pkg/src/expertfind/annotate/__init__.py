"""Human-in-the-loop annotation protocol and its HTTP service."""

from .model import (
    DEFAULT_WARMUP_SIZE,
    KAPPA_GATE,
    AnnotationSession,
    EvidenceSet,
    ProtocolError,
    Round,
    SessionLog,
    load_criteria,
    resolve_evidence,
)
from .service import create_app

__all__ = [
    "AnnotationSession",
    "DEFAULT_WARMUP_SIZE",
    "EvidenceSet",
    "KAPPA_GATE",
    "ProtocolError",
    "Round",
    "SessionLog",
    "create_app",
    "load_criteria",
    "resolve_evidence",
]
