"""rheoflame: wavefronts of time-dependent Finsler and Zermelo media."""

__version__ = '0.1.0'
