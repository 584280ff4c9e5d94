"""Exact counting of decision-boundary and linear pieces of ReLU networks."""
