
from pygconvex._version import __version__
