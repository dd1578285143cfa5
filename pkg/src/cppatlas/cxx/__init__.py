"""Hand-rolled lexer and declaration parser for a practical C++ subset."""
