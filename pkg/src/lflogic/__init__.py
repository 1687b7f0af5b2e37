"""An interactive proof assistant for typing properties of dependently
typed specifications: a canonical-forms kernel, an assertion logic with
context schemas and nominal constants, and a sequent proof engine."""

__version__ = "0.1.0"
