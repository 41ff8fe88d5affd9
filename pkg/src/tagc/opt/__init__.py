"""Tag-aware optimization passes."""
