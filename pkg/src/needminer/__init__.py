"""needminer: identify customer-need posts in short-text streams, quantify
the expressed needs across eight categories, and serve the aggregates."""

__version__ = "0.1.0"
