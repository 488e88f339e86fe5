#!/usr/bin/env python3
"""QUARK command-line interface: generate, train, eval, sweep, inspect."""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.checkpoint import Checkpoint, load_checkpoint
from core.config import Config, RunConfig, apply_overrides, load_run_config
from core.constants import PRESETS, Ablation, DistributionKind, ExitCode
from core.exceptions import ConfigError, QuarkError, StageError
from core.logger import get_logger, setup_logger
from core.utils import stage

logger = get_logger("quark")

# flag dest → configuration key
FLAG_KEYS = {
    'seed': 'seed', 'out': 'output_dir', 'synthetic': 'synthetic', 'k': 'k', 'preset': 'preset',
    'snr': 'snr', 'eeg': 'eeg_path', 'embeddings': 'embeddings_path', 'images': 'image_dir',
    'class_map': 'class_map_path', 'distribution': 'distribution',
    'distribution_total': 'distribution_total', 'train_ratio': 'train_ratio', 'workers': 'workers',
    'window': 'window', 'step': 'step', 'basis_size': 'basis_size', 'c': 'c',
    'alpha': 'alpha', 'beta': 'beta', 'depth': 'depth', 'xi': 'xi',
    'hidden': 'hidden', 'embedding_dim': 'embedding_dim',
    'epochs': 'epochs', 'lr': 'learning_rate', 'batch_size': 'batch_size', 'rho': 'rho',
    'n_pos': 'n_pos', 'n_neg': 'n_neg', 'ablation': 'ablation',
    'checkpoint_every': 'checkpoint_every', 'validate_every': 'validate_every',
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help="key = value configuration file")
    parser.add_argument('--seed', type=int, help="Global seed")
    parser.add_argument('--out', help="Run directory")
    parser.add_argument('--synthetic', metavar='CxN', help="Use a synthetic dataset of C classes x N recordings")
    parser.add_argument('--snr', type=float, help="Synthetic signal-to-noise ratio")
    parser.add_argument('--k', type=int, help="Top-k cut-off")
    parser.add_argument('--preset', choices=sorted(PRESETS), help="Hyperparameter preset")
    parser.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument('--progress', action='store_true', help="Show progress bars")
    parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        help="Any configuration key (repeatable)")

    data = parser.add_argument_group('dataset')
    data.add_argument('--eeg', help="MindBigData TSV or canonical recordings file")
    data.add_argument('--embeddings', help="Item embedding file")
    data.add_argument('--images', help="Directory of raw item images")
    data.add_argument('--class-map', dest='class_map', help="child<TAB>merged class mapping")
    data.add_argument('--distribution', choices=[d.value for d in DistributionKind])
    data.add_argument('--distribution-total', dest='distribution_total', type=int)
    data.add_argument('--train-ratio', dest='train_ratio', type=float)
    data.add_argument('--workers', type=int, help="Sweep worker threads")

    hyper = parser.add_argument_group('hyperparameters')
    hyper.add_argument('--window', type=int, help="Window length")
    hyper.add_argument('--step', type=int, help="Window step")
    hyper.add_argument('--basis-size', dest='basis_size', type=int, help="Basis vectors per segment")
    hyper.add_argument('--c', type=int, help="Selected basis vectors per event")
    hyper.add_argument('--alpha', type=float, help="Continuity filter ratio")
    hyper.add_argument('--beta', type=float, help="Interference filter ratio")
    hyper.add_argument('--depth', type=int, help="GCN depth")
    hyper.add_argument('--xi', type=float, help="GCN teleport ratio")
    hyper.add_argument('--hidden', type=int)
    hyper.add_argument('--embedding-dim', dest='embedding_dim', type=int)

    train = parser.add_argument_group('training')
    train.add_argument('--epochs', type=int)
    train.add_argument('--lr', type=float, help="Adam learning rate")
    train.add_argument('--batch-size', dest='batch_size', type=int)
    train.add_argument('--rho', type=float, help="Regulariser weight")
    train.add_argument('--n-pos', dest='n_pos', type=int)
    train.add_argument('--n-neg', dest='n_neg', type=int)
    train.add_argument('--ablation', choices=[a.value for a in Ablation])
    train.add_argument('--checkpoint-every', dest='checkpoint_every', type=int)
    train.add_argument('--validate-every', dest='validate_every', type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='quark', description='QUARK EEG-to-item recommendation')
    commands = parser.add_subparsers(dest='command', required=True)

    _common(commands.add_parser('generate', help="Write a synthetic dataset to disk"))
    _common(commands.add_parser('train', help="Train and write checkpoint + epoch log"))

    evaluate = commands.add_parser('eval', help="Evaluate a checkpoint with the candidate protocol")
    _common(evaluate)
    evaluate.add_argument('--checkpoint', help="Checkpoint file; untrained parameters when omitted")
    evaluate.add_argument('--baseline', choices=['random'], help="Evaluate a baseline instead of the model")
    evaluate.add_argument('--style', action='store_true', help="Also write feeling/style files")

    sweep = commands.add_parser('sweep', help="Train + evaluate per value of one key")
    _common(sweep)
    sweep.add_argument('--key', required=True, help="Sweepable key or 'ablation'")
    sweep.add_argument('--values', help="Comma-separated values; the documented range when omitted")

    inspect = commands.add_parser('inspect', help="Dump adjacency matrices and collapse probabilities")
    _common(inspect)
    inspect.add_argument('--checkpoint')
    inspect.add_argument('--recording', help="Recording id (first test recording by default)")
    inspect.add_argument('--similarity', action='store_true', help="Also write the representation similarity matrix")
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Flag values as configuration overrides; unset flags are omitted.

    Raises:
        ConfigError: On a malformed --set entry
    """
    overrides: Dict[str, Any] = {}
    for entry in args.set:
        if '=' not in entry:
            raise ConfigError(f"--set expects KEY=VALUE (got '{entry}')")
        key, value = (part.strip() for part in entry.split('=', 1))
        overrides[key] = value
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    return overrides


def resolve_config(args: argparse.Namespace, checkpoint: Optional[Checkpoint] = None) -> RunConfig:
    """Flags > config file > checkpoint config (when given) > defaults."""
    overrides = collect_overrides(args)
    if checkpoint is not None and not args.config:
        config = checkpoint.config
        if 'preset' in overrides:
            config = apply_overrides(config, {'preset': overrides.pop('preset')})
        config = apply_overrides(config, overrides)
    else:
        config = load_run_config(args.config, overrides)
    return config


def _default_out(args: argparse.Namespace, config: RunConfig, subdir: str) -> RunConfig:
    # evaluation of a checkpoint writes next to it unless --out says otherwise
    if args.out is None and getattr(args, 'checkpoint', None):
        return apply_overrides(config, {'output_dir': str(Path(args.checkpoint).parent / subdir)})
    return config


def run_command(args: argparse.Namespace) -> None:
    from agents.eval_agent import EvalAgent
    from agents.generate_agent import GenerateAgent
    from agents.inspect_agent import InspectAgent
    from agents.sweep_agent import SweepAgent
    from agents.train_agent import TrainAgent

    checkpoint = None
    if getattr(args, 'checkpoint', None):
        with stage("checkpoint"):
            checkpoint = load_checkpoint(args.checkpoint)
    with stage("config"):
        config = resolve_config(args, checkpoint)

    with stage(args.command):
        if args.command == 'generate':
            GenerateAgent(config).run()
        elif args.command == 'train':
            TrainAgent(config, show_progress=args.progress).run()
        elif args.command == 'eval':
            config = _default_out(args, config, 'eval')
            EvalAgent(config, show_progress=args.progress).run(
                checkpoint=checkpoint, baseline=args.baseline, with_style=args.style)
        elif args.command == 'sweep':
            values: Optional[List[str]] = None
            if args.values:
                values = [v.strip() for v in args.values.split(',') if v.strip()]
            SweepAgent(config).run(key=args.key, values=values)
        elif args.command == 'inspect':
            config = _default_out(args, config, 'inspect')
            InspectAgent(config).run(checkpoint=checkpoint, recording_id=args.recording,
                                     similarity=args.similarity)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Returns:
        0 on success, 1 on internal errors, 2 on user or configuration errors
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger('', level=args.log_level or Config.LOG_LEVEL)
    try:
        run_command(args)
    except StageError as e:
        print(f"quark {args.command}: stage '{e.stage}' failed: {e.cause}", file=sys.stderr)
        return int(e.exit_code)
    except QuarkError as e:
        print(f"quark {args.command}: {e}", file=sys.stderr)
        return int(e.exit_code)
    except FileNotFoundError as e:
        print(f"quark {args.command}: {e}", file=sys.stderr)
        return int(ExitCode.USER_ERROR)
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        print(f"quark {args.command}: internal error: {e}", file=sys.stderr)
        return int(ExitCode.INTERNAL_ERROR)
    return int(ExitCode.OK)


if __name__ == "__main__":
    sys.exit(main())
