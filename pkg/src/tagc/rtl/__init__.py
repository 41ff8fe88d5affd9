"""Tagged register-transfer IR."""
