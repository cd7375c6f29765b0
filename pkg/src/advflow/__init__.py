"""Train a flow anomaly detector, attack it with FGSM, harden it by retraining."""

__version__ = "0.1.0"

from . import attack, cli, data, experiment, linalg, metrics, nn  # noqa: F401
