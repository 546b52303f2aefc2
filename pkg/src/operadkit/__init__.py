"""Workbench for coloured operads enriched in finite sets.

The package is organised around a small number of concrete datatypes:
colour sets and permutations (`colours`), coloured rooted trees and their
isomorphisms (`trees`), symmetric collections and the box tensor
(`collections`), operads and the free operad (`operads`), a zoo of
standard operads (`zoo`), the cofibrant resolution by trees with edge
lengths (`w_construction`), algebras and rectification (`algebras`), and
a JSON document layer with a command line front end (`io`, `cli`).
"""

__version__ = "0.1.0"
