import argparse
import sys

from . import add_output_argument, add_threads_argument, positive_float, positive_integer, non_negative_float
from ..base_component import Base_Component
from ..optimize import scan_optimal
from ..utils import format_value, write_csv


class Scan(Base_Component):
    def __init__(self, config=None):
        self.jm_step = 0.01
        self.t_step = 0.05
        super().__init__("scan", "Optimal wire coupling and measurement time of the ordered chain", config)

    def update_cfg(self, config):
        self.jm_step = config.jm_step
        self.t_step = config.t_step
        super().update_cfg(config)

    def _arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--n", type=positive_integer, required=True, help="wire length N (>= 2)")
        parser.add_argument("--jm-max", type=positive_float, required=True, help="upper bound on sqrt(M) J_m / J")
        parser.add_argument("--jm-min", type=non_negative_float, default=0.0, help="only couplings above this value are scanned")
        parser.add_argument("--jm-step", type=positive_float, default=self.jm_step)
        parser.add_argument("--t-bound", type=positive_float, required=True, help="search window (0, t_bound] for the first peak")
        parser.add_argument("--t-step", type=positive_float, default=self.t_step)
        parser.add_argument("--no-refine", dest="refine", action="store_false", help="skip the refinement pass around the coarse optimum")
        add_threads_argument(parser, self.threads)
        add_output_argument(parser)

    def check_args(self, args, parser):
        if args.n < 2:
            parser.error("--n must be >= 2")

    def run(self, args) -> int:
        jm_steps = max(int(round(args.jm_max / args.jm_step)), 1)
        t_steps = max(int(round(args.t_bound / args.t_step)), 1)
        result = scan_optimal(
            args.n,
            args.jm_max,
            jm_steps,
            args.t_bound,
            t_steps,
            jm_min=args.jm_min,
            refine=args.refine,
            max_workers=args.threads,
            show_progress=self.show_progress,
        )
        if args.output is not None:
            write_csv(args.output, ["jm", "t", "fidelity"], result.rows(), self.csv_digits)
        sys.stdout.write("best_jm,best_t,best_fidelity\n")
        sys.stdout.write(",".join(format_value(x, self.csv_digits) for x in (result.best_jm, result.best_t, result.best_fidelity)) + "\n")
        sys.stdout.flush()
        return 0
