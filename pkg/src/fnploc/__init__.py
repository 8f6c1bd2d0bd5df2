"""False-name-proof facility location on graphs: rules, verifiers and an existence prover."""

__version__ = "0.1.0"
