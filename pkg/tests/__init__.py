"""
QOKD test suite.
"""
