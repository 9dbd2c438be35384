"""
Unit tests package for the twoweight lab
"""
