"""
Text generation backends
"""

from tlapsgen.backends.http import ChatCompletionsBackend
from tlapsgen.backends.replay import ReplayBackend, ScriptedBackend

__all__ = ['backends']

backends = {
    "http": ChatCompletionsBackend,
    "replay": ReplayBackend,
    "scripted": ScriptedBackend
}
