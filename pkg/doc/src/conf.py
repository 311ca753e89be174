#!/usr/bin/env python3
#
# ladderstab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath('../..'))


# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.napoleon', 'sphinx.ext.mathjax']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'ladderstab'
copyright = '2022, ladderstab contributors'
author = 'ladderstab contributors'

version = ''
release = ''

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

todo_include_todos = False

# Document Numpy-style attributes of the namedtuple results.
napoleon_use_ivar = True


# -- Options for HTML output ----------------------------------------------

html_theme = 'nature'

html_static_path = ['_static']


# -- Options for HTMLHelp output ------------------------------------------

htmlhelp_basename = 'ladderstabdoc'


# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, 'ladderstab', 'ladderstab Documentation', [author], 1)]
