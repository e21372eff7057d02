"""Design and verification toolkit for TSV-transformer quadrature VCOs."""

__version__ = "0.1.0"
