"""Long-document clinical QA: scenario construction, hybrid retrieval,
order-preserving context assembly, generation and evaluation."""

__version__ = "0.1.0"
