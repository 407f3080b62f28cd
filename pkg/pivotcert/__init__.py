"""Pivot-minor certificates: pure pairs, holes and replayable C_k witnesses."""

__version__ = "0.1.0"
