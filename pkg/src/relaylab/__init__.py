"""Broadcast-approach rates for two colocated cooperating receivers.

Library layout:

* ``numerics``     special functions, quadrature, root finding
* ``fading``       channel/power configuration, fading laws, closed-form
  power allocations
* ``rate_engine``  generic continuum-layering machinery for any
  equivalent-gain distribution
* ``bounds``       single-user and joint-decoding reference bounds,
  ergodic capacities, relay cut-set bound
* ``af``           amplify-and-forward cooperation (naive, separate
  preprocessing, infinite-session limit)
* ``cf``           Wyner-Ziv compress-and-forward cooperation (naive,
  separate preprocessing, multi-session successive refinement)
* ``df``           decode-and-forward cooperation
* ``strategies``   uniform strategy registry and dispatch
* ``oracle``       deterministic Monte Carlo fading simulator used to
  validate every closed form
* ``cli``          command line front end (eval / sweep / validate)
"""

from .fading import FadingPair, PowerConfig  # noqa: F401

__version__ = "0.1.0"
