"""
The package contains the app used by the command line interface and its configuration.
"""
from .config.gconvex_config import GConvexConfig
from .gconvex_app import GConvexApp, GConvexAppFactory
