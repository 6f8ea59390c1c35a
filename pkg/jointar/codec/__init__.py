"""
Text tokenizer, visual codec and frozen understanding encoder.
"""
