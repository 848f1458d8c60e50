"""Channel model, closed-form analysis and Monte-Carlo validation for
surface-wave (E-FAS) assisted multiuser MIMO downlinks."""

__version__ = "0.1.0"
