"""Dictator-game behavioural evaluation harness for LLM agents."""

__version__ = "0.1.0"
