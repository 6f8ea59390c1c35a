"""
Synthetic scenes corpus with exact symbolic ground truth.
"""
