"""
Unified loss, schedules, optimizer and the training loop.
"""
