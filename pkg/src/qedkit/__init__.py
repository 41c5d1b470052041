"""Queueing in the quality-and-efficiency-driven regime.

Exact evaluation, heavy-traffic limits, dimensioning rules and simulation
for many-server and bulk-service queues.
"""

__version__ = "0.1.0"
