"""
HyperChange command line
Self-supervised hyperspectral change detection
Commands: synth | predetect | train | detect | evaluate | pipeline
"""

import argparse
import logging
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# Add project root to path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent))

from threadpoolctl import threadpool_limits  # noqa: E402

from config.pipeline_config import (  # noqa: E402
    ABLATIONS,
    TASKS,
    PipelineConfig,
    load_pipeline_config,
)
from config.settings import Settings, get_settings  # noqa: E402
from services.pipeline_service import PipelineService  # noqa: E402
from utils.exceptions import BaseChangeDetectionError, ErrorHandler  # noqa: E402

logger = logging.getLogger(__name__)

COMMANDS = ("synth", "predetect", "train", "detect", "evaluate", "pipeline")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration document")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for synthesis and training")
    common.add_argument(
        "--ablation", choices=ABLATIONS, help="model blocks and loss variant"
    )
    common.add_argument(
        "--task",
        choices=TASKS,
        help="anomalous (hacd) or binary (hbcd) change detection",
    )
    common.add_argument(
        "--tile", type=int, help="process the image in square tiles of this size"
    )
    common.add_argument("--x1", help="first-date HCUBE file")
    common.add_argument("--x2", help="second-date HCUBE file")
    common.add_argument("--truth", help="ground-truth PGM label map")

    parser = argparse.ArgumentParser(
        prog="hyperchange", description=__doc__.strip().splitlines()[1]
    )
    subcommands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return subcommands.add_parser(name, parents=[common], help=help_text)

    command("synth", "generate a simulated bi-temporal pair")
    command("predetect", "classical pre-detection and pseudo mask")
    command("train", "train the siamese network")
    detect = command("detect", "feature-space change detection")
    detect.add_argument(
        "--checkpoint", help="checkpoint file (defaults to the output directory)"
    )
    command("evaluate", "metrics against the ground truth")
    command("pipeline", "run every stage in order")
    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Merge CLI flags over the JSON configuration"""
    overrides: Dict[str, Any] = {
        "out": args.out,
        "task": args.task,
        "ablation": args.ablation,
        "tile": args.tile,
        "x1": args.x1,
        "x2": args.x2,
        "truth": args.truth,
        "train.seed": args.seed,
        "synth.seed": args.seed,
    }
    return load_pipeline_config(args.config, overrides)


def run_command(
    command: str, config: PipelineConfig, checkpoint: Optional[str] = None
) -> Dict[str, Path]:
    service = PipelineService(config)
    service.exporter.export_effective_config(config, command)
    handlers: Dict[str, Callable[[], Dict[str, Path]]] = {
        "synth": service.synth,
        "predetect": service.predetect,
        "train": service.train,
        "detect": lambda: service.detect(Path(checkpoint) if checkpoint else None),
        "evaluate": service.evaluate,
        "pipeline": service.run_pipeline,
    }
    return handlers[command]()


def configure_logging(settings: Settings) -> None:
    level = getattr(logging, settings.LOG_LEVEL.upper())
    logging.basicConfig(level=level, format=settings.LOG_FORMAT)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point

    Returns:
        0 on success, 2 for configuration or input errors, 3 for numerical
        failure, 1 for anything unexpected
    """
    settings = get_settings()
    configure_logging(settings)
    args = build_parser().parse_args(argv)

    limits = nullcontext()
    if settings.THREADS:
        limits = threadpool_limits(limits=settings.THREADS)
    try:
        with limits:
            config = config_from_args(args)
            logger.info(
                f"{settings.APP_NAME} {settings.APP_VERSION}: "
                f"{args.command} -> {config.out_dir}"
            )
            checkpoint = getattr(args, "checkpoint", None)
            written = run_command(args.command, config, checkpoint)
    except BaseChangeDetectionError as e:
        print(f"error: {ErrorHandler.get_user_friendly_message(e)}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        exit_code = ErrorHandler.exit_code_for(e)
        if exit_code == 1:
            logger.exception(f"Unexpected failure in {args.command}")
        message = ErrorHandler.get_user_friendly_message(e)
        print(f"error: {message} ({e})", file=sys.stderr)
        return exit_code

    for name, path in written.items():
        logger.info(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
