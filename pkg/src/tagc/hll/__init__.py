"""The tagged source language."""
