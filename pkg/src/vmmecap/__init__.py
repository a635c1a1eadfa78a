"""Capacity-planning toolkit for a virtualized LTE MME.

Analytic signaling-workload and queueing-delay models, dimensioning and
capacity solvers, a cost/scalability analyzer, and a discrete-event
simulator that validates the analytic model end to end.
"""

__version__ = "0.1.0"
