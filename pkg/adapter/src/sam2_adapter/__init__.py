"""Segmenter child process: point-prompt multimask inference over stdio JSON."""

from .backends import StubBackend, build_backend
from .server import serve

__version__ = "0.1.0"
