"""
Toy-FID, attribute match, understanding metrics and experiment tables.
"""
