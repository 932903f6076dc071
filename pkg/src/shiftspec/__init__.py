"""Specification and stroboscopical properties of generalized shifts and Fort spaces."""
