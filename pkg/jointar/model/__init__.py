"""
Backbone transformer, text and diffusion heads, and inference.
"""
