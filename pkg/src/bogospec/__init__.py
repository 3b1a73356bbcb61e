"""Bogoliubov excitation spectrum of a mean-field Bose gas, with torus and exact-diagonalization oracles."""

__version__ = "0.1.0"
