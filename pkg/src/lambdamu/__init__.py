"""Reference kernel for the simply typed lambda-mu calculus with a realizability model."""

__version__ = "0.1.0"
