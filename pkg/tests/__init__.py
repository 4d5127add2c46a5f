"""
Test suite for the HyperChange change-detection toolkit
"""
