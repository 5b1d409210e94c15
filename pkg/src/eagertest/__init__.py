"""Detect eager tests in Java/JUnit code with method stereotypes and baseline rules."""

__version__ = "0.1.0"
