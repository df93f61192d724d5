"""
Morph Eval

This package contains the loaders, tokenizers, WordPiece trainer, metrics
engine and coverage protocol for morphology-aware tokenizer evaluation.
"""

from morph_eval.models import MetricsReport, MorphAnalysis, TokenizedWord, Vocabulary
from morph_eval.orchestrator import EvaluationOrchestrator, EvaluationResult

__all__ = [
    'EvaluationOrchestrator',
    'EvaluationResult',
    'MetricsReport',
    'MorphAnalysis',
    'TokenizedWord',
    'Vocabulary',
]
