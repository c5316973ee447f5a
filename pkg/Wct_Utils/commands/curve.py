import argparse
import numpy as np

from . import add_chain_arguments, check_chain_arguments, chain_from_args, add_output_argument, positive_float, non_negative_float
from ..base_component import Base_Component
from ..model import build_hamiltonian, check_branch_ratio
from ..evolve import w_initial_state, propagate_curve
from ..metrics import fidelity_w, fidelity_alice
from ..asymptotics import AsymptoticRegime, asymptotic_fidelity, alice_asymptotic_fidelity
from ..utils import arange_inclusive, write_csv


class Curve(Base_Component):
    def __init__(self, config=None):
        self.t_step = 0.05
        self.warn_ratio = 10.0
        super().__init__("curve", "Fidelity of Bob and Alice against time for the ordered chain", config)

    def update_cfg(self, config):
        self.t_step = config.t_step
        self.warn_ratio = config.asymptotic_warn_ratio
        super().update_cfg(config)

    def _arguments(self, parser: argparse.ArgumentParser):
        add_chain_arguments(parser)
        parser.add_argument("--t-max", type=non_negative_float, required=True, help="last time of the curve, in units of hbar/J")
        parser.add_argument("--dt", type=positive_float, default=self.t_step, help="time step")
        parser.add_argument("--asymptotic", action="store_true", help="add the closed-form columns for J_m >> J")
        add_output_argument(parser)

    def check_args(self, args, parser):
        check_chain_arguments(args, parser)

    def run(self, args) -> int:
        spec = chain_from_args(args)
        check_branch_ratio(spec)
        times = arange_inclusive(0.0, args.t_max, args.dt) if args.t_max > 0 else np.zeros(1)
        amplitudes = propagate_curve(build_hamiltonian(spec), w_initial_state(spec), times)
        columns = [times, np.atleast_1d(fidelity_w(amplitudes, spec)), np.atleast_1d(fidelity_alice(amplitudes, spec))]
        header = ["t", "fidelity_bob", "fidelity_alice"]
        if args.asymptotic:
            regime = AsymptoticRegime.from_spec(spec, warn_ratio=self.warn_ratio)
            columns += [np.atleast_1d(asymptotic_fidelity(regime, times)), np.atleast_1d(alice_asymptotic_fidelity(regime, times))]
            header += ["fidelity_asymptotic", "fidelity_alice_asymptotic"]
        write_csv(args.output, header, zip(*columns), self.csv_digits)
        return 0
