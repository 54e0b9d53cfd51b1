"""kNN digraph statistics toolkit."""

try:
    from knnd._knnd import *          # installed wheel layout
    from knnd._knnd import __version__
except ImportError:                   # in-tree build: extension on sys.path
    from _knnd import *
    from _knnd import __version__
