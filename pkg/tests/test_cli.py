import numpy as np
import pytest

from Wct_Utils.commands import Command_Loader, apply_flag_file, main
from Wct_Utils.commands.verify import CHECKS, run_checks
from Wct_Utils.model import SingleExcitationHamiltonian, build_hamiltonian

CHAIN = ["--n", "6", "--m", "2", "--mb", "2", "--jm-eff", "1.5"]


def read_rows(text: str):
    lines = text.strip().splitlines()
    return lines[0], [[float(x) for x in line.split(",")] for line in lines[1:]]


def flipped_noise_sign(spec, noise=None):
    h = np.array(build_hamiltonian(spec, noise).matrix)
    h[np.diag_indices_from(h)] *= -1
    return SingleExcitationHamiltonian(h, spec)


class TestCurve:
    def test_rows(self, capsys):
        assert main(["curve", *CHAIN, "--t-max", "1", "--dt", "0.25"]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header == "t,fidelity_bob,fidelity_alice"
        assert [r[0] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert rows[0][1:] == [0.0, 1.0]
        assert all(0 <= r[1] <= 1 and r[1] + r[2] <= 1 + 1e-12 for r in rows)

    def test_zero_length(self, capsys):
        assert main(["curve", *CHAIN, "--t-max", "0"]) == 0
        assert capsys.readouterr().out == "t,fidelity_bob,fidelity_alice\n0,0,1\n"

    def test_asymptotic_columns(self, capsys):
        assert main(["curve", "--n", "6", "--jm-eff", "20", "--t-max", "2", "--dt", "1", "--asymptotic"]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header == "t,fidelity_bob,fidelity_alice,fidelity_asymptotic,fidelity_alice_asymptotic"
        t = rows[-1][0]
        assert rows[-1][3] == pytest.approx(np.sin(2 * t / 20) ** 2, rel=1e-10)

    def test_file_output(self, tmp_path, capsys):
        out = tmp_path / "sub" / "curve.csv"
        assert main(["curve", *CHAIN, "--t-max", "0.5", "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert out.read_text().startswith("t,fidelity_bob,fidelity_alice\n0,0,1\n")

    def test_mapping_failure_writes_nothing(self, tmp_path):
        out = tmp_path / "curve.csv"
        argv = ["curve", "--n", "6", "--m", "2", "--jm", "20", "--t-max", "1", "--asymptotic", "-o", str(out)]
        assert main(argv) == 1
        assert not out.exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["curve", "--t-max", "1", "--jm-eff", "1"],
        ["curve", "--n", "6", "--t-max", "1"],
        ["curve", "--n", "6", "--jm", "1", "--jm-eff", "1", "--t-max", "1"],
        ["curve", "--n", "1", "--jm", "1", "--t-max", "1"],
        ["curve", "--n", "6", "--jm", "1", "--t-max", "1", "--dt", "0"],
        ["curve", "--n", "6", "--jm", "-1", "--t-max", "1"],
        ["ensemble", *CHAIN, "--t-max", "1", "--p-min", "0.2", "--p-max", "0.1"],
        ["ensemble", *CHAIN, "--t-max", "1", "--targets", "none"],
        ["ensemble", *CHAIN, "--t-max", "1", "--targets", "middle"],
        ["ensemble", *CHAIN, "--t-max", "1", "--curve-points", "5"],
        ["spectrum", "--n", "4", "--jm", "0.5"],
        ["verify", "--check", "no_such_check"],
        ["transfer"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


class TestEnsemble:
    def test_zero_strength_matches_curve(self, capsys):
        assert main(["curve", *CHAIN, "--t-max", "3", "--dt", "0.5"]) == 0
        _, curve = read_rows(capsys.readouterr().out)
        assert main(["ensemble", *CHAIN, "--t-max", "3", "--p-min", "0", "--p-max", "0", "--realizations", "1"]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header == "p,mean_fidelity,std_fidelity,mean_cw,mean_cmin,realizations"
        assert len(rows) == 1
        p, f, std, cw, cmin, n = rows[0]
        assert (p, std, n) == (0.0, 0.0, 1.0)
        assert f == pytest.approx(curve[-1][1], abs=1e-10)
        assert cw == pytest.approx(cmin, abs=1e-10)
        assert cw == pytest.approx(f, abs=1e-10)

    def test_output_independent_of_threads(self, tmp_path):
        outputs = []
        for threads in ("1", "3"):
            out = tmp_path / f"ensemble_{threads}.csv"
            argv = ["ensemble", *CHAIN, "--t-max", "2", "--kind", "fluctuating", "--noise", "zz,field",
                    "--p-min", "0.01", "--p-max", "0.03", "--p-step", "0.01", "--realizations", "5",
                    "--threads", threads, "-o", str(out)]
            assert main(argv) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert len(outputs[0].decode().strip().splitlines()) == 4

    def test_curve_output(self, tmp_path):
        curve = tmp_path / "curves.csv"
        argv = ["ensemble", *CHAIN, "--t-max", "2", "--kind", "dynamic", "--targets", "alice,bob",
                "--p-min", "0", "--p-max", "0.05", "--p-step", "0.05", "--realizations", "2",
                "--curve-points", "5", "--curve-output", str(curve), "-o", str(tmp_path / "e.csv")]
        assert main(argv) == 0
        header, rows = read_rows(curve.read_text())
        assert header == "p,t,mean_fidelity"
        assert len(rows) == 10
        assert rows[0] == [0.0, 0.0, 0.0]


class TestScan:
    def test_summary_line(self, capsys, tmp_path):
        grid = tmp_path / "grid.csv"
        argv = ["scan", "--n", "10", "--jm-max", "2", "--jm-step", "0.5", "--t-bound", "6", "--t-step", "0.5", "-o", str(grid)]
        assert main(argv) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header == "best_jm,best_t,best_fidelity"
        best_jm, best_t, best_f = rows[0]
        assert 0 < best_jm <= 2 and 0 < best_t <= 6 and 0 < best_f <= 1
        grid_header, samples = read_rows(grid.read_text())
        assert grid_header == "jm,t,fidelity"
        assert best_f == pytest.approx(max(s[2] for s in samples), rel=1e-10)

    def test_empty_grid_is_an_error(self):
        assert main(["scan", "--n", "10", "--jm-max", "1", "--jm-min", "2", "--t-bound", "5"]) == 1


class TestVerify:
    def test_clean_build_passes(self, capsys):
        assert main(["verify"]) == 0
        assert capsys.readouterr().out == f"PASS ({len(CHECKS)} checks)\n"
        assert len(CHECKS) == 13

    def test_single_check(self, capsys):
        assert main(["verify", "--check", "noise_diagonal", "--check", "concurrence"]) == 0
        assert capsys.readouterr().out == "PASS (2 checks)\n"

    def test_sign_error_in_noise_is_caught(self, caplog):
        results = {r.name: r for r in run_checks(builder=flipped_noise_sign)}
        assert not results["noise_diagonal"].passed
        assert results["hamiltonian_symmetry"].passed
        assert results["hopping_matrix"].passed
        assert "Check failed: noise_diagonal" in caplog.text


class TestSpectrum:
    def test_rows(self, capsys):
        assert main(["spectrum", "--n", "5", "--jm", "30"]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header == "k,dense,approx"
        assert [r[0] for r in rows] == [1, 2, 3, 4, 5, 6, 7]
        assert rows[3][1] == pytest.approx(0.0, abs=1e-10)
        assert rows[3][2] == 0.0
        assert rows[0][1] == pytest.approx(rows[0][2], rel=0.05)


class TestConfigFile:
    def test_file_fills_missing_flags(self, tmp_path, capsys):
        cfg = tmp_path / "flags.txt"
        cfg.write_text("# chain\nn = 6\n--jm-eff = 1.5\nt_max = 1   # end\ndt = 0.5\n")
        assert main(["--config", str(cfg), "curve"]) == 0
        _, rows = read_rows(capsys.readouterr().out)
        assert [r[0] for r in rows] == [0.0, 0.5, 1.0]

    def test_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "flags.txt"
        cfg.write_text("n = 6\njm = 3\nt-max = 4\n")
        assert main(["--config", str(cfg), "curve", "--t-max", "0", "--jm-eff", "1.5"]) == 0
        assert capsys.readouterr().out == "t,fidelity_bob,fidelity_alice\n0,0,1\n"

    def test_boolean_key(self, tmp_path, capsys):
        cfg = tmp_path / "flags.txt"
        cfg.write_text("asymptotic = yes\n")
        assert main(["--config", str(cfg), "curve", "--n", "6", "--jm-eff", "20", "--t-max", "0"]) == 0
        assert capsys.readouterr().out.startswith("t,fidelity_bob,fidelity_alice,fidelity_asymptotic")

    @pytest.mark.parametrize("text", ["colour = red\n", "just a line\n", "asymptotic = perhaps\n"])
    def test_bad_file(self, tmp_path, text):
        cfg = tmp_path / "flags.txt"
        cfg.write_text(text)
        with pytest.raises(SystemExit) as e:
            main(["--config", str(cfg), "curve", "--n", "6", "--jm", "1", "--t-max", "1"])
        assert e.value.code == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            main(["--config", str(tmp_path / "nope.txt"), "verify"])
        assert e.value.code == 2


class TestConfigAliases:
    def parse(self, path, argv):
        parser, subs = Command_Loader().build_parser()
        apply_flag_file(parser, subs, str(path))
        return parser.parse_args(argv)

    @pytest.mark.parametrize("key", ["mb", "--mb", "m-bob", "m_bob"])
    def test_every_option_spelling(self, tmp_path, key):
        cfg = tmp_path / "flags.txt"
        cfg.write_text(f"{key} = 3\nn = 6\njm-eff = 1.5\nt-max = 1\n")
        args = self.parse(cfg, ["ensemble"])
        assert args.m_bob == 3
        assert args.n == 6

    def test_alias_and_dest_together(self, tmp_path):
        cfg = tmp_path / "flags.txt"
        cfg.write_text("mb = 2\nm_bob = 3\n")
        with pytest.raises(SystemExit) as e:
            self.parse(cfg, ["ensemble"])
        assert e.value.code == 2

    @pytest.mark.parametrize("text, refine", [("no-refine = yes\n", False), ("no_refine = no\n", True), ("refine = no\n", False), ("refine = yes\n", True)])
    def test_negated_switch(self, tmp_path, text, refine):
        cfg = tmp_path / "flags.txt"
        cfg.write_text(text)
        args = self.parse(cfg, ["scan", "--n", "6", "--jm-max", "2", "--t-bound", "5"])
        assert args.refine is refine

    def test_alias_runs_end_to_end(self, tmp_path, capsys):
        cfg = tmp_path / "flags.txt"
        cfg.write_text("n = 6\nm = 2\nmb = 2\njm = 1.5\nt_max = 0\n")
        assert main(["--config", str(cfg), "curve"]) == 0
        assert capsys.readouterr().out == "t,fidelity_bob,fidelity_alice\n0,0,1\n"
