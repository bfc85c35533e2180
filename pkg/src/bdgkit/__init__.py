"""Numerical toolkit for the BDG minimal graph asymptotics and the Allen–Cahn ansatz built on it."""

__version__ = "0.1.0"
