# Command implementations, one module per command family
