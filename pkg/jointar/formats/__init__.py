"""
File formats: raw tensors, checkpoints and PPM image dumps.
"""
