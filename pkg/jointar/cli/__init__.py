"""
Command-line interface: run configs, checkpoints of runs and the
``jointar`` commands.
"""
