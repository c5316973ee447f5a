import os
import json
from . import logger


current_path = os.environ.get("current_path", os.getcwd())


class Settings:

    def __init__(
        self,
        concurrency_count: int = 2,
        asymptotic_warn_ratio: float = 10.0,
        n_segments: int = 10,
        jm_step: float = 0.01,
        t_step: float = 0.05,
        peak_fraction: float = 0.5,
        refine_factor: int = 10,
        oracle_max_qubits: int = 14,
        csv_digits: int = 12,
        seed: int = 20240501,
        show_progress: bool = True,
        **kwargs,
    ):
        self.concurrency_count = max(int(concurrency_count), 1)
        self.asymptotic_warn_ratio = float(asymptotic_warn_ratio)
        self.n_segments = max(int(n_segments), 1)
        self.jm_step = float(jm_step)
        self.t_step = float(t_step)
        self.peak_fraction = min(max(float(peak_fraction), 0.0), 1.0)
        self.refine_factor = max(int(refine_factor), 1)
        self.oracle_max_qubits = int(oracle_max_qubits)
        self.csv_digits = max(int(csv_digits), 1)
        self.seed = int(seed)
        self.show_progress = bool(show_progress)
        if kwargs:
            logger.debug(f"Ignoring unknown settings: {sorted(kwargs)}")

    def to_dict(self):
        return self.__dict__

    def save(self):
        dic = self.to_dict()
        os.makedirs(os.path.join(current_path, "WCTdata"), exist_ok=True)
        with open(os.path.join(current_path, "WCTdata", "config.json"), "w", encoding="utf-8") as f:
            json.dump(dic, f, indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, dict):
        return cls(**dict)


def load_cfg():
    config_path = os.path.join(current_path, "WCTdata", "config.json")
    if os.path.exists(config_path):
        try:
            with open(config_path, encoding="utf-8") as f:
                config = Settings.from_dict(json.load(f))
        except Exception as e:
            config = Settings()
            logger.warning(f"Failed to load settings, reset to default: {e}")
    else:
        config = Settings()
    return config


def read_flag_file(path: str) -> dict[str, str]:
    """
    Reads a plain-text flag file: one `key = value` per line, `#` starts a comment.
    Keys are normalized to the argparse dest spelling (dashes become underscores).
    """
    result = dict()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            key = key.strip().lstrip("-").replace("-", "_")
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            result[key] = value.strip()
    return result
