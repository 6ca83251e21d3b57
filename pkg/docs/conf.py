# -*- coding: utf-8 -*-
#
# qhgeo documentation build configuration file.

import sys, os

sys.path.insert(0, os.path.abspath('..'))

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'qhgeo'
copyright = u'2026, qhgeo developers'

version = '0.3'
release = '0.3.0'

exclude_patterns = ['build']
pygments_style = 'sphinx'

html_theme = 'default'
htmlhelp_basename = 'qhgeodoc'

latex_documents = [
  ('index', 'qhgeo.tex', u'qhgeo Documentation',
   u'qhgeo developers', 'manual'),
]

man_pages = [
    ('index', 'qhgeo', u'qhgeo Documentation',
     [u'qhgeo developers'], 1)
]

autodoc_member_order = 'bysource'
