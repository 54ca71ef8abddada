class ExportError(Exception):
    """Invalid input, missing model, or unusable text: nothing was written."""
