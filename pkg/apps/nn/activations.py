import numpy as np
from django.db import models

from apps.common.exceptions import InvalidArgument


class Activation(models.TextChoices):
    SOFTSIGN = "softsign", "Softsign"
    RELU = "relu", "ReLU"
    TANH = "tanh", "Tanh"
    IDENTITY = "identity", "Identity"


def softsign(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.abs(x))


def softsign_grad(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.abs(x)) ** 2


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_grad(x):
    return (x > 0.0).astype(float)


def _tanh_grad(x):
    return 1.0 - np.tanh(x) ** 2


# name -> (f, f') with f' evaluated at the pre-activation
ACTIVATIONS = {
    Activation.SOFTSIGN: (softsign, softsign_grad),
    Activation.RELU: (_relu, _relu_grad),
    Activation.TANH: (np.tanh, _tanh_grad),
    Activation.IDENTITY: (lambda x: x, np.ones_like),
}


def get_activation(name: str):
    if name not in Activation.values:
        raise InvalidArgument(f"Unknown activation '{name}'. Allowed: {', '.join(Activation.values)}")
    return ACTIVATIONS[Activation(name)]
