"""Exact symbolic checks for quantum automorphism groups of finite spaces.

Presentations are noncommutative *-polynomial relations over the Gaussian
rationals; ideal membership is decided by a completed rewriting system.
"""
__version__ = "0.1.0"
