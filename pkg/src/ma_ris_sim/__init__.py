"""Link-level simulator for reconfigurable surfaces with movable elements."""

__version__ = "0.1.0"
