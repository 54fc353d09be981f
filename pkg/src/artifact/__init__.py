"""Exact computations around the first covering of the Drinfeld upper half plane.

Modules: arith (p-adic and finite field arithmetic), tree (Bruhat-Tits tree and
the special fibre graph), rep (induced representations and the Hecke operator),
curve (Frobenius on Artin-Schreier curves), phimod (filtered phi-modules), theta
(mod p boundary maps) and cli (command line entry point).
"""

__version__ = "0.1.0"
