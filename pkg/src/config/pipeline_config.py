"""
Run configuration for synthesis, training and the detection pipeline.
Each section is a dataclass that validates itself and round-trips through JSON.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type, TypeVar

from .settings import get_settings
from utils.exceptions import ConfigurationError, FileProcessingError
from utils.validators import InputValidator

logger = logging.getLogger(__name__)

TASKS = ("hacd", "hbcd")
ABLATIONS = ("base", "base_ssa", "full")
PREDETECTORS = ("diff_rx", "cva")
LOSSES = ("focal", "plain")

# pre-detector chosen by task: Diff-RX for anomalous, CVA for binary change detection
PREDETECTOR_FOR_TASK = {"hacd": "diff_rx", "hbcd": "cva"}

T = TypeVar("T", bound="_ConfigSection")


def _check(result: Tuple[bool, str], key: str) -> None:
    ok, message = result
    if not ok:
        raise ConfigurationError(message, config_key=key)


class _ConfigSection:
    """Shared dict/JSON plumbing for the configuration dataclasses"""

    SECTION = ""
    NESTED: Dict[str, Type["_ConfigSection"]] = {}

    @classmethod
    def from_dict(cls: Type[T], data: Optional[Dict[str, Any]]) -> T:
        """
        Build a section from a plain dictionary

        Args:
            data: Mapping of field names to values (missing keys keep defaults)

        Returns:
            Validated configuration section

        Raises:
            ConfigurationError: Unknown key or invalid value, naming the field
        """
        data = dict(data or {})
        known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
        for key in data:
            if key not in known:
                raise ConfigurationError(
                    "unknown configuration key", config_key=cls._key(key)
                )

        kwargs: Dict[str, Any] = {}
        for key, value in data.items():
            nested = cls.NESTED.get(key)
            if nested is not None:
                if not isinstance(value, dict):
                    raise ConfigurationError(
                        "expected an object", config_key=cls._key(key)
                    )
                kwargs[key] = nested.from_dict(value)
            elif key == "offset" and isinstance(value, list):
                kwargs[key] = tuple(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)  # type: ignore[call-arg]

    @classmethod
    def _key(cls, name: str) -> str:
        return f"{cls.SECTION}.{name}" if cls.SECTION else name

    def to_dict(self) -> Dict[str, Any]:
        """Convert the section (and nested sections) to plain JSON types"""
        result = asdict(self)  # type: ignore[call-overload]
        for key, value in result.items():
            if isinstance(value, tuple):
                result[key] = list(value)
        return result


@dataclass
class SynthConfig(_ConfigSection):
    """Parameters of the simulated bi-temporal scene"""

    SECTION = "synth"

    height: int = 128
    width: int = 128
    bands: int = 32
    materials: int = 6
    noise_amplitude: float = 10.0
    blur_sigma: float = 10.0
    offset: Tuple[int, int] = (1, 1)
    anomaly_count: int = 12
    anomaly_size: int = 4
    jitter: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        v = InputValidator
        _check(v.validate_image_side(self.height), self._key("height"))
        _check(v.validate_image_side(self.width), self._key("width"))
        _check(v.validate_band_count(self.bands), self._key("bands"))
        _check(
            v.validate_positive_int(self.materials, minimum=2), self._key("materials")
        )
        _check(
            v.validate_real(self.noise_amplitude, minimum=0.0),
            self._key("noise_amplitude"),
        )
        _check(
            v.validate_real(self.blur_sigma, minimum=0.0, strict_minimum=True),
            self._key("blur_sigma"),
        )
        _check(v.validate_offset(self.offset), self._key("offset"))
        self.offset = (int(self.offset[0]), int(self.offset[1]))
        if abs(self.offset[0]) >= self.width or abs(self.offset[1]) >= self.height:
            raise ConfigurationError(
                "offset must be smaller than the image", config_key=self._key("offset")
            )
        _check(
            v.validate_non_negative_int(self.anomaly_count), self._key("anomaly_count")
        )
        _check(v.validate_positive_int(self.anomaly_size), self._key("anomaly_size"))
        if self.anomaly_size > min(self.height, self.width):
            raise ConfigurationError(
                "anomaly blocks must fit inside the image",
                config_key=self._key("anomaly_size"),
            )
        _check(v.validate_real(self.jitter, minimum=0.0), self._key("jitter"))
        _check(v.validate_non_negative_int(self.seed), self._key("seed"))


@dataclass
class ModelConfig(_ConfigSection):
    """Widths and switches of the siamese network"""

    SECTION = "train.model"

    n: int = 64
    input_channels: Optional[int] = None
    rsab_count: int = 3
    rcab_count: int = 3
    ca_reduction: int = 4
    use_attention: bool = True

    def __post_init__(self) -> None:
        v = InputValidator
        _check(v.validate_positive_int(self.n, minimum=2), self._key("n"))
        if self.input_channels is not None:
            _check(
                v.validate_band_count(self.input_channels), self._key("input_channels")
            )
        _check(v.validate_positive_int(self.rsab_count), self._key("rsab_count"))
        _check(v.validate_positive_int(self.rcab_count), self._key("rcab_count"))
        _check(v.validate_positive_int(self.ca_reduction), self._key("ca_reduction"))
        if not isinstance(self.use_attention, bool):
            raise ConfigurationError(
                "expected true or false", config_key=self._key("use_attention")
            )

    @property
    def width(self) -> int:
        """Projector / predictor width (2n)"""
        return 2 * self.n

    @property
    def ca_hidden(self) -> int:
        """Channel-attention bottleneck width, floor(n / ratio) with a minimum of 1"""
        return max(1, self.n // self.ca_reduction)


@dataclass
class TrainConfig(_ConfigSection):
    """Optimizer, schedule and pseudo-mask settings"""

    SECTION = "train"
    NESTED = {"model": ModelConfig}

    base_lr: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 1e-4
    epochs: int = 200
    mask_size: int = 8192
    model: ModelConfig = field(default_factory=ModelConfig)
    predetector: Optional[str] = None
    loss: str = "focal"
    seed: int = 0
    log_every: int = 10

    def __post_init__(self) -> None:
        v = InputValidator
        _check(
            v.validate_real(self.base_lr, minimum=0.0, strict_minimum=True),
            self._key("base_lr"),
        )
        _check(
            v.validate_real(self.momentum, minimum=0.0, maximum=1.0),
            self._key("momentum"),
        )
        _check(
            v.validate_real(self.weight_decay, minimum=0.0), self._key("weight_decay")
        )
        _check(v.validate_positive_int(self.epochs), self._key("epochs"))
        _check(v.validate_positive_int(self.mask_size), self._key("mask_size"))
        if self.predetector is not None:
            _check(
                v.validate_choice(self.predetector, PREDETECTORS),
                self._key("predetector"),
            )
        _check(v.validate_choice(self.loss, LOSSES), self._key("loss"))
        _check(v.validate_non_negative_int(self.seed), self._key("seed"))
        _check(v.validate_positive_int(self.log_every), self._key("log_every"))


@dataclass
class PipelineConfig(_ConfigSection):
    """Everything a CLI command needs, after flags are merged in"""

    NESTED = {"train": TrainConfig, "synth": SynthConfig}

    task: str = "hacd"
    x1: Optional[str] = None
    x2: Optional[str] = None
    truth: Optional[str] = None
    out: str = field(default_factory=lambda: str(get_settings().OUTPUT_DIR))
    ablation: str = "full"
    tile: Optional[int] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)

    def __post_init__(self) -> None:
        _check(InputValidator.validate_choice(self.task, TASKS), "task")
        _check(InputValidator.validate_choice(self.ablation, ABLATIONS), "ablation")
        if self.tile is not None:
            _check(InputValidator.validate_positive_int(self.tile, minimum=8), "tile")
        if not self.out:
            raise ConfigurationError(
                "output directory must not be empty", config_key="out"
            )
        self.apply_ablation()

    def apply_ablation(self) -> None:
        """Derive model blocks, loss and pre-detector from ablation and task"""
        self.train.model.use_attention = self.ablation != "base"
        self.train.loss = "focal" if self.ablation == "full" else "plain"
        if self.train.predetector is None:
            self.train.predetector = PREDETECTOR_FOR_TASK[self.task]

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def input_path(self, name: str, default_filename: str) -> Path:
        """Configured input path, falling back to a file inside the output directory"""
        value = getattr(self, name)
        return Path(value) if value else self.out_dir / default_filename

    def to_json(self) -> str:
        """Sorted-key JSON dump used for the effective-config files"""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_pipeline_config(
    path: Optional[str], overrides: Optional[Dict[str, Any]] = None
) -> PipelineConfig:
    """
    Load a pipeline configuration document and apply CLI overrides

    Args:
        path: JSON document path, or None for defaults
        overrides: Dotted keys (e.g. "train.seed") mapped to values; None values
            are ignored

    Returns:
        Validated PipelineConfig
    """
    data: Dict[str, Any] = {}
    if path:
        config_path = Path(path)
        if not config_path.exists():
            raise FileProcessingError(
                f"File not found: {config_path}", filename=config_path.name
            )
        try:
            data = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"invalid JSON ({e.msg} at line {e.lineno})",
                config_key=str(config_path),
            )
        if not isinstance(data, dict):
            raise ConfigurationError(
                "top-level JSON value must be an object", config_key=str(config_path)
            )
        logger.info(f"Loaded configuration from {config_path}")

    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        target = data
        *parents, leaf = dotted.split(".")
        for part in parents:
            target = target.setdefault(part, {})
        target[leaf] = value

    return PipelineConfig.from_dict(data)
