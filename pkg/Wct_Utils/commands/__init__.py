import argparse
import sys
import traceback

from ..base_component import Base_Component
from .. import logger
from ..settings import read_flag_file
from ..model import ChainSpec, uniform_chain


def positive_float(value) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return x


def non_negative_float(value) -> float:
    x = float(value)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"expected a number >= 0, got {value}")
    return x


def positive_integer(value) -> int:
    try:
        x = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value}")
    if x < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return x


def add_chain_arguments(parser: argparse.ArgumentParser):
    """--n/--m/--m-bob and the two ways of giving the wire coupling."""
    parser.add_argument("--n", type=positive_integer, required=True, help="wire length N (>= 2)")
    parser.add_argument("--m", type=positive_integer, default=1, help="Alice's branch count M")
    parser.add_argument("--m-bob", "--mb", dest="m_bob", type=positive_integer, default=1, help="Bob's branch count M~")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--jm-eff", type=positive_float, default=None, help="sqrt(M) J_m / J: wire coupling with the effective end couplings set to 1")
    group.add_argument("--jm", type=positive_float, default=None, help="raw wire coupling J_m, every branch coupled with --j-branch")
    parser.add_argument("--j-branch", type=positive_float, default=1.0, help="branch coupling used together with --jm")


def check_chain_arguments(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if args.n < 2:
        parser.error("--n must be >= 2")
    if args.jm is None and args.jm_eff is None:
        parser.error("one of --jm-eff or --jm is required")
    if args.jm is not None and args.jm_eff is not None:
        # one of them came from the config file; the command line wins
        given = getattr(args, "argv", [])
        if any(a == "--jm" or a.startswith("--jm=") for a in given):
            args.jm_eff = None
        else:
            args.jm = None


def chain_from_args(args: argparse.Namespace) -> ChainSpec:
    if args.jm_eff is not None:
        return uniform_chain(args.n, args.m, args.m_bob, 1.0, args.jm_eff)
    return ChainSpec(args.n, args.m, args.m_bob, [args.j_branch] * args.m, [args.j_branch] * args.m_bob, [args.jm] * (args.n - 1))


def add_output_argument(parser: argparse.ArgumentParser):
    parser.add_argument("-o", "--output", default=None, help="CSV file to write (default: stdout)")


def add_threads_argument(parser: argparse.ArgumentParser, default: int):
    parser.add_argument("--threads", type=positive_integer, default=default, help="worker threads; results do not depend on it")


from . import curve, ensemble, scan, verify, spectrum


class Command_Loader:
    def __init__(self, config=None):
        from .. import config as global_config

        config = config if config is not None else global_config
        CURVE = curve.Curve(config)
        ENSEMBLE = ensemble.Ensemble(config)
        SCAN = scan.Scan(config)
        VERIFY = verify.Verify(config)
        SPECTRUM = spectrum.Spectrum(config)
        self.components: list[Base_Component] = [CURVE, ENSEMBLE, SCAN, VERIFY, SPECTRUM]
        self.command_dict = {i.name: i for i in self.components}

    def build_parser(self) -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
        parser = argparse.ArgumentParser(
            prog="W-Chain-Transfer",
            description="W-state transfer through a branched XX spin chain: curves, ensembles, scans and self-checks.",
        )
        parser.add_argument("--config", default=None, help="plain-text flag file, one 'key = value' per line; flags given on the command line win")
        subparsers = parser.add_subparsers(dest="command", metavar="command")
        subparsers.required = True
        subs = dict()
        for component in self.components:
            component.registered = False
            subs[component.name] = component.register(subparsers)
        return parser, subs


def _bool_value(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _flag_keys(action: argparse.Action) -> list[str]:
    """The dest first, then every option string in file-key form (--m-bob -> m_bob, --mb -> mb)."""
    keys = [action.dest]
    for option in action.option_strings:
        key = option.lstrip("-").replace("-", "_")
        if key not in keys:
            keys.append(key)
    return keys


def apply_flag_file(parser: argparse.ArgumentParser, subs: dict[str, argparse.ArgumentParser], path: str):
    """
    File values become subparser defaults, so settings < file < command-line flags.
    A key may name the dest or any option string of a flag: `m_bob`, `m-bob` and `mb` all set M~.
    """
    try:
        values = read_flag_file(path)
    except (OSError, ValueError) as e:
        parser.error(f"cannot read config file: {e}")
    used = set()
    for sub in subs.values():
        defaults = dict()
        for action in sub._actions:
            if not action.option_strings:
                continue
            given = [key for key in _flag_keys(action) if key in values]
            if not given:
                continue
            if len(given) > 1:
                parser.error(f"{path}: {', '.join(given)} set the same option")
            key = given[0]
            raw = values[key]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                try:
                    flag = _bool_value(raw)
                except ValueError as e:
                    parser.error(f"{path}: {key}: {e}")
                # `no_refine = yes` names the switch, `refine = no` names the dest
                inverted = isinstance(action, argparse._StoreFalseAction) and key != action.dest
                defaults[action.dest] = not flag if inverted else flag
            else:
                # string defaults are converted by argparse with the action's type
                defaults[action.dest] = raw
                action.required = False
            used.add(key)
        if defaults:
            sub.set_defaults(**defaults)
    unknown = sorted(set(values) - used)
    if unknown:
        parser.error(f"{path}: unknown keys: {', '.join(unknown)}")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    loader = Command_Loader()
    parser, subs = loader.build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        apply_flag_file(parser, subs, known.config)
    args = parser.parse_args(argv)
    args.argv = argv
    component: Base_Component = args.component
    component.check_args(args, subs[component.name])
    try:
        return component.run(args)
    except (ValueError, ArithmeticError) as e:
        logger.error(f"{component.name} failed: {e}")
        logger.debug(traceback.format_exc())
        return 1
