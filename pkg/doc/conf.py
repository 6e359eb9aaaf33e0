# Sphinx configuration for the riscfmimo documentation.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

from riscfmimo import __version__  # noqa: E402


project = 'riscfmimo'
copyright = '2026, riscfmimo developers'
author = 'riscfmimo developers'
version = release = __version__

master_doc = 'index'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
]

autodoc_member_order = 'bysource'

exclude_patterns = ['_build']

html_theme = 'sphinx_rtd_theme'
