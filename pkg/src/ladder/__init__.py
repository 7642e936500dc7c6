"""Mod-p comparison of cup-product values on cyclotomic p-units with
Eisenstein-congruent period ratios computed from modular symbols."""

__version__ = "0.1.0"
