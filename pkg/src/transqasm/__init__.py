"""transqasm: quantum circuit transpilation workbench."""

__version__ = "0.1.0"
