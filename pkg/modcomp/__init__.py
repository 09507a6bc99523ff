# This file makes the 'modcomp' directory a Python package.
__version__ = "0.1.0"
