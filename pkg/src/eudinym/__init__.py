"""Certified, scope-exclusive pseudonyms from a blind-issued BBS credential.

Submodules: ``groups`` (BLS12-381 wrapper), ``commitments``, ``prf``,
``sigma``, ``bbs``, ``actors``, ``transfer``, ``vectors`` and ``cli``.
"""

__version__ = "0.1.0"
