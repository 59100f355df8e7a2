#!/usr/bin/env python3
"""
Exception hierarchy for ring-chord.

InputError marks a violated precondition (exit code 1 on the command line),
ComputationError a numerical failure (exit code 2).
"""

from typing import Any, Dict, Optional


class RingChordError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RingChordError, ValueError):
    """Raised when an argument or input file violates a documented precondition."""


class ComputationError(RingChordError, RuntimeError):
    """
    Raised when a numerical routine fails or produces a result that breaks
    one of its invariants.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        """
        Initialize the error.

        Args:
            message: Human-readable description
            diagnostics: Optional mapping with the quantities that triggered the failure
        """
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"
