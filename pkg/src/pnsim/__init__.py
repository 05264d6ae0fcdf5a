"""Discrete-event simulator of block propagation in blockchain peer-to-peer
networks, with a proximity-based neighbor selection policy (peers scored by
how early their block announcements arrive) and a fixed-random baseline.
"""

__version__ = "0.1.0"
