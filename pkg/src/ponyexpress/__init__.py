"""Minimum-time message delivery by speed-heterogeneous robots."""
