import sys
from os import path as op

sys.path.insert(0, op.join(op.dirname(__file__), ".."))
from phaseless_farfield.version import __version__

project = 'phaseless_farfield'
copyright = '2020, Vikramaditya Gaonkar'
author = 'Vikramaditya Gaonkar'
release = str(__version__)

master_doc = 'index'
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon'
]
# Args(type) blocks in the docstrings are Google style
napoleon_numpy_docstring = False
autodoc_member_order = 'bysource'
intersphinx_mapping = {'python': ('https://docs.python.org/3.9', None),
                       'numpy': ('https://numpy.org/doc/stable', None),
                       'scipy': ('https://docs.scipy.org/doc/scipy', None),
                       'xarray': ('https://docs.xarray.dev/en/stable', None)}

html_theme = 'sphinx_rtd_theme'
