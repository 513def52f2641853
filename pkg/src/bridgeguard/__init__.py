"""bridgeguard: detection and prevention of XSS through WebView bridges.

Synthetic registration datasets, seven from-scratch classifiers, feature
ranking, cross-validated evaluation, and an interception engine with an
HTTP gateway for replaying or serving live alert sessions.
"""

__version__ = "0.1.0"
