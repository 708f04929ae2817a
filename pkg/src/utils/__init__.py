"""
Utility modules for pin2homalg

Logging setup and table rendering shared by the command-line layer.
"""
