import argparse

from . import (
    add_chain_arguments,
    check_chain_arguments,
    chain_from_args,
    add_output_argument,
    add_threads_argument,
    positive_float,
    non_negative_float,
    positive_integer,
)
from ..base_component import Base_Component
from ..stochastic import PerturbationSpec, TEMPORAL_KINDS, COUPLING_TARGETS, NOISE_TARGETS, run_ensemble
from ..utils import arange_inclusive, parse_csv_list, write_csv

TARGET_ALIASES = {"alice": "alice_bonds", "bob": "bob_bonds", "wire": "wire_bonds"}


def parse_targets(value: str) -> frozenset[str]:
    items = parse_csv_list(value)
    if items in (["none"], []):
        return frozenset()
    if items == ["all"]:
        return frozenset(COUPLING_TARGETS)
    result = set()
    for item in items:
        item = TARGET_ALIASES.get(item, item)
        if item not in COUPLING_TARGETS:
            raise argparse.ArgumentTypeError(f"unknown disorder target {item!r}; choose from alice, bob, wire, all, none")
        result.add(item)
    return frozenset(result)


def parse_noise(value: str) -> frozenset[str]:
    items = parse_csv_list(value)
    if items in (["none"], []):
        return frozenset()
    for item in items:
        if item not in NOISE_TARGETS:
            raise argparse.ArgumentTypeError(f"unknown noise kind {item!r}; choose from zz, field, none")
    return frozenset(items)


class Ensemble(Base_Component):
    def __init__(self, config=None):
        self.n_segments = 10
        self.seed = 20240501
        super().__init__("ensemble", "Disorder and noise averages of F, C_W and C_min over a grid of strengths p", config)

    def update_cfg(self, config):
        self.n_segments = config.n_segments
        self.seed = config.seed
        super().update_cfg(config)

    def _arguments(self, parser: argparse.ArgumentParser):
        add_chain_arguments(parser)
        parser.add_argument("--t-max", type=positive_float, required=True, help="measurement time")
        parser.add_argument("--kind", choices=TEMPORAL_KINDS, default="static", help="temporal behaviour of the perturbation")
        parser.add_argument("--targets", type=parse_targets, default=frozenset(COUPLING_TARGETS), help="disordered couplings: comma list of alice, bob, wire (or all, none)")
        parser.add_argument("--noise", type=parse_noise, default=frozenset(), help="noise terms: comma list of zz, field (or none)")
        parser.add_argument("--p-min", type=non_negative_float, default=0.002)
        parser.add_argument("--p-max", type=non_negative_float, default=0.10)
        parser.add_argument("--p-step", type=positive_float, default=0.002)
        parser.add_argument("--realizations", type=positive_integer, default=100)
        parser.add_argument("--segments", type=positive_integer, default=self.n_segments, help="segments for dynamic and fluctuating perturbations")
        parser.add_argument("--seed", type=int, default=self.seed)
        parser.add_argument("--curve-points", type=positive_integer, default=None, help="also average the fidelity curve on this many times in [0, t_max]")
        parser.add_argument("--curve-output", default=None, help="CSV for the averaged curves (p,t,mean_fidelity)")
        add_threads_argument(parser, self.threads)
        add_output_argument(parser)

    def check_args(self, args, parser):
        check_chain_arguments(args, parser)
        if args.p_max < args.p_min:
            parser.error("--p-max must be >= --p-min")
        if args.p_max > 1:
            parser.error("--p-max must be <= 1")
        if not args.targets and not args.noise:
            parser.error("nothing to perturb: give at least one --targets entry or --noise kind")
        if args.curve_points is not None and args.curve_points < 2:
            parser.error("--curve-points must be >= 2")
        if (args.curve_points is None) != (args.curve_output is None):
            parser.error("--curve-points and --curve-output go together")

    def run(self, args) -> int:
        spec = chain_from_args(args)
        pert = PerturbationSpec(
            temporal_kind=args.kind,
            strength_p=0.0,
            coupling_targets=args.targets,
            noise_targets=args.noise,
            n_segments=args.segments,
            seed=args.seed,
        )
        p_grid = [round(p, 12) for p in arange_inclusive(args.p_min, args.p_max, args.p_step)]
        result = run_ensemble(
            spec,
            pert,
            args.t_max,
            args.realizations,
            p_grid,
            max_workers=args.threads,
            curve_points=args.curve_points,
            show_progress=self.show_progress,
        )
        if args.curve_points is not None:
            rows = [(s.p, t, f) for s in result.stats for t, f in zip(result.curve_times, s.curve_mean_fidelity)]
            write_csv(args.curve_output, ["p", "t", "mean_fidelity"], rows, self.csv_digits)
        write_csv(
            args.output,
            ["p", "mean_fidelity", "std_fidelity", "mean_cw", "mean_cmin", "realizations"],
            result.rows(),
            self.csv_digits,
        )
        return 0
