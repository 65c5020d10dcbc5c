"""A verifying kernel for schematic resolution."""
