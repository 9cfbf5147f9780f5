"""Exact-arithmetic toolkit for finite quaternionic reflection groups.

Submodules:
    cyclo      -- cyclotomic field elements with a canonical normal form
    quat       -- quaternions, matrices over the quaternions, subspaces
    engine     -- finite matrix-group machinery (closure, conjugacy, ...)
    catalog    -- constructors for the supported group families
    parabolics -- parabolic subgroup classification and normalizer reports
    cli        -- command line front end
"""

__version__ = "0.1.0"
