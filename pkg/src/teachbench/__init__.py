"""teachbench: a workbench for debugging trained classifiers interactively.

Diagnoses every prediction error of a trained binary classifier as
exactly one of four kinds (mislabeling / representation / learner /
boundary), computes minimal invalidation sets to focus teacher attention,
and runs an error-driven teaching loop with a simulated or human teacher.
"""

__version__ = "0.1.0"
