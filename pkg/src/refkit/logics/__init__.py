"""Example logics packaged with the kernel."""
