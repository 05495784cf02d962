"""Plancherel measure, Young-lattice Markov chains and a Stein's-method CLT for character ratios."""

__version__ = "1.0.0"
