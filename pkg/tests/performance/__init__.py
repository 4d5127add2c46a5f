"""
Acceptance-scale regression tests (marked slow)
"""
