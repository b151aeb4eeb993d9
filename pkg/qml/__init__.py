"""
qml - exact finite-field laboratory for quiver representations, stability,
quiver Grassmannians and the orbit correspondence between semistable
representations and Grassmannians of projective and injective representations.
"""

__version__ = "0.1.0"
__author__ = "crisp-sh"
__email__ = "s@crisp.sh"
