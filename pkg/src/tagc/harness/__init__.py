"""Random program generation and differential testing."""
