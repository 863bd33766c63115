"""Patent application analytics engine.

Embedding-based acceptance and value prediction with rolling-window
training, revise-and-rescore screening, acceptance-probability valuation
rescaling, and an application-strength portfolio backtest.
"""

__version__ = "0.1.0"
