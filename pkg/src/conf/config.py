from pydantic import ConfigDict
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    seed: int = 20240611
    threads: int = 1
    mc_samples: int = 1_000_000
    mc_chunk: int = 100_000
    circle_center_x: float = 0.5
    circle_center_y: float = 0.5
    circle_radius: float = 0.9
    bisection_tol: float = 1e-12
    uniqueness_grid: int = 64
    moment_grid: int = 20_000
    moment_max_order: int = 6
    moment_residual_tol: float = 1e-10
    query_epsilon: float = 1e-3
    recursion_depth: int = 32
    identity_samples: int = 10_000
    z_threshold: float = 4.0
    log_level: str = 'INFO'
    output_dir: str = 'reports'

    model_config = ConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="CHOICE_LAB_", extra="ignore")


config = Settings()
