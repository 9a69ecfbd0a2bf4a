"""
Failcluster Package

Failure clustering for parallel debugging: spectrum computation, risk evaluation
formulas, ranking-list failure representation, revised Kendall tau distance,
mountain-method cluster estimation and K-medoids, plus evaluation, fault
injection and the RQ1-RQ4 experiment harness.
"""

__version__ = "1.0.0"

__all__ = ['spectrum', 'formulas', 'srr', 'distance', 'cluster', 'pipeline', 'evaluation',
           'faultgen', 'harness', 'cli', 'errors']
