"""Complexified Gaussian coherent states under non-Hermitian quadratic Hamiltonians."""
