import argparse

from . import add_output_argument, positive_float, positive_integer
from ..base_component import Base_Component
from ..asymptotics import AsymptoticRegime, approx_eigenvalues, dense_eigenvalues
from ..utils import write_csv


class Spectrum(Base_Component):
    def __init__(self, config=None):
        self.warn_ratio = 10.0
        super().__init__("spectrum", "Dense and perturbative eigenvalues of the effective linear chain", config)

    def update_cfg(self, config):
        self.warn_ratio = config.asymptotic_warn_ratio
        super().update_cfg(config)

    def _arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--n", type=positive_integer, required=True, help="wire length N of the (N+2)-site chain")
        parser.add_argument("--j", type=positive_float, default=1.0, help="end coupling J")
        parser.add_argument("--jm", type=positive_float, required=True, help="wire coupling J_m (>= J)")
        add_output_argument(parser)

    def check_args(self, args, parser):
        if args.n < 2:
            parser.error("--n must be >= 2")
        if args.jm < args.j:
            parser.error("--jm must be >= --j")

    def run(self, args) -> int:
        regime = AsymptoticRegime(args.n, args.j, args.jm, warn_ratio=self.warn_ratio)
        dense = dense_eigenvalues(regime)
        approx = approx_eigenvalues(regime)
        write_csv(args.output, ["k", "dense", "approx"], ((k + 1, d, a) for k, (d, a) in enumerate(zip(dense, approx))), self.csv_digits)
        return 0
