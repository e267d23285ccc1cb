"""Template skeletons completed by an LLM, with compile-repair and pass@k evaluation."""

__version__ = "0.1.0"
