# Package name. setup.py parses this file, keep the assignment on one line
__name__ = 'pygconvex'
