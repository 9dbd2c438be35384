"""
Integration tests package for the twoweight lab
"""
