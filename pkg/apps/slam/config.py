from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SlamConfig:
    """[slam] section. The initial pose distribution is a point mass at the known start."""
    particles: int = 50
    chunk_length: int = 5
    batch_chunks: int = 128
    learning_rate: float = 1e-4
    refresh_period: int = 50
    online_updates: int = 25
    learn_emission: bool = True
    # filter process noise on (dtheta, forward); zero means pure dead reckoning
    jitter_dtheta: float = 0.0
    jitter_forward: float = 0.0
    # pose noise spread over the particles when every weight underflows
    reinit_noise: float = 0.01
    # offline smoothing
    offline_particles: int = 1000
    offline_chunk_noise: float = 0.001
    offline_sigma_e: float = 0.01
    offline_sweeps: int = 3
    offline_train_steps: int = 200
    log_every: int = 50

    def exploration(self) -> "SlamConfig":
        return replace(self, particles=20, learning_rate=1e-3)

    @property
    def jitter(self) -> tuple[float, float]:
        return self.jitter_dtheta, self.jitter_forward
