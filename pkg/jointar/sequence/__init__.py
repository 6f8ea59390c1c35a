"""
Packed multimodal token streams, attention masks and generation orders.
"""
