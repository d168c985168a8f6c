"""
Bundled example environments
"""
