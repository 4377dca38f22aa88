# Version information. setup.py parses this file, keep the assignment on one line
__version__ = '0.1.0'
