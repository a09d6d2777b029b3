"""Oberbeck-Boussinesq flow with a non-local temperature boundary condition."""
