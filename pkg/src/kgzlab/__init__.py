"""kgzlab: a desk-scale numerical laboratory for the Klein-Gordon-Zakharov system."""

__version__ = "0.1.0"
