"""piqlab: exact-arithmetic experiments on preimages of invariant subschemes.

A desk-scale laboratory for iterated-preimage questions of self-maps on the
projective line and its square: exact rational/Gaussian/p-adic scalars,
polynomial machinery, non-archimedean Gauss norms, local uniformization of
one-variable germs, finite-graph stabilization, and the explicit commuting
degree-5 pair over Q(i) that defeats the non-invariant preimage question.
"""

__version__ = "0.1.0"
