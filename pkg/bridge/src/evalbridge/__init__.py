"""Reference remote evaluator: real model inference behind the wire protocol."""

__version__ = "0.1.0"
