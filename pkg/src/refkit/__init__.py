"""refkit: an LCF-style refinement kernel with dependent subgoal telescopes."""

__version__ = "0.1.0"
