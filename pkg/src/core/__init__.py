# core utilities package
