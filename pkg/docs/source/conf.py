# Sphinx configuration for the chdarcy documentation.
import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

from chdarcy import __version__

project = 'chdarcy'
release = __version__

extensions = [
	"sphinx_rtd_theme",
]

templates_path = ['_templates']
exclude_patterns = []

html_theme = "sphinx_rtd_theme"
html_static_path = ['_static']
