"""Exact simulation of Peres-Mermin sequential correlations by a three-state
automaton family: behavior enumeration, cone section and witness
certification, and rational ensemble reconstruction."""

__version__ = "0.1.0"
