"""Combinatory neural programmer-interpreter.

A fixed recurrent core that executes programs assembled from four control
combinators plus a stack-driven map, with programs, appliers, and detectors
living in growable key-value memories.
"""

__version__ = "0.1.0"
