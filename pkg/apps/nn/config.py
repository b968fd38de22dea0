from dataclasses import dataclass


@dataclass(frozen=True)
class NetConfig:
    """
    [nn] section. Layer counts are hidden layers; every net gets an extra
    linear output head on top. Tests shrink hidden_width to keep gradient
    checks fast.
    """
    hidden_width: int = 256
    emission_layers: int = 4
    transition_layers: int = 6
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
