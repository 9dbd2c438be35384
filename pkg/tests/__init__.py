"""
Test suite for the twoweight lab
"""
