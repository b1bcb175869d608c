import contextlib
import csv
import io
import json
import os
import tempfile
import unittest
from unittest import mock

from app import create_app
from config import ProductionConfig, TestingConfig
from run import main
from tests.create_test_model import create_sample_model, example_model, hazard_model
from utils.model import model_to_dict
from utils.phi_solver import solver_for


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name
        self.model_path = os.path.join(self.dir, "model.json")
        with contextlib.redirect_stdout(io.StringIO()):
            create_sample_model(self.model_path)
        self.env = mock.patch.dict(os.environ, {"ENGINE_CONFIG": "testing"})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.dir, name)

    def run_cli(self, *args):
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = main(list(args))
        return code, out.getvalue()

    def read_csv(self, name):
        with open(self.path(name), newline="") as f:
            return list(csv.DictReader(f))

    def test_validate_ok(self):
        code, out = self.run_cli("validate", "--model", self.model_path)
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "OK")

    def test_validate_rejects_bad_rows(self):
        data = model_to_dict(example_model())
        data["p1"][0][0] = [0.5, 0.1]
        bad = self.path("bad.json")
        with open(bad, "w") as f:
            json.dump(data, f)
        code, _ = self.run_cli("validate", "--model", bad)
        self.assertEqual(code, 3)

    def test_missing_model_file(self):
        code, _ = self.run_cli("validate", "--model", self.path("absent.json"))
        self.assertEqual(code, 2)

    def test_usage_error(self):
        with contextlib.redirect_stderr(io.StringIO()):
            code, _ = self.run_cli("explode", "--model", self.model_path)
        self.assertEqual(code, 2)

    def test_phi_two_periods(self):
        code, _ = self.run_cli("phi", "--model", self.model_path, "--component", "1",
                               "--init", "A,A", "--backward", "0,0", "--horizon", "2",
                               "--out", self.path("phi.csv"))
        self.assertEqual(code, 0)
        rows = self.read_csv("phi.csv")
        self.assertEqual(list(rows[0]), ["k", "state", "backward", "probability"])
        value = {(r["k"], r["state"], r["backward"]): float(r["probability"]) for r in rows}
        # F_A = (0, .3, .6, ...), p1[(A,A)] = (.8, .2), F_D(1) = .5
        self.assertAlmostEqual(value[("2", "A", "2")], 0.4, places=15)
        self.assertAlmostEqual(value[("2", "A", "1")], 0.8 * 0.3 * 0.7, places=15)
        self.assertAlmostEqual(value[("2", "D", "1")], 0.2 * 0.3 * 0.5, places=15)
        self.assertAlmostEqual(value[("1", "A", "0")], 0.8 * 0.3, places=15)
        with open(self.path("phi.json")) as f:
            self.assertAlmostEqual(json.load(f)["total"], 1.0, places=12)

    def test_degenerate_backward(self):
        code, _ = self.run_cli("phi", "--model", self.model_path, "--init", "A,A",
                               "--backward", "4,0", "--horizon", "2", "--out", self.path("x.csv"))
        self.assertEqual(code, 4)

    def test_horizon_beyond_maximum(self):
        code, _ = self.run_cli("reliability", "--model", self.model_path, "--init", "A,A",
                               "--horizon", "100000", "--out", self.path("x.csv"))
        self.assertEqual(code, 5)

    def test_missing_parameter(self):
        code, _ = self.run_cli("reliability", "--model", self.model_path, "--init", "A,A")
        self.assertEqual(code, 2)

    def test_negative_seed_is_a_usage_error(self):
        for command, extra in (("simulate", ("--horizon", "3")), ("price", ("--maturity", "3"))):
            code, _ = self.run_cli(command, "--model", self.model_path, "--init", "A,A", *extra,
                                   "--mode", "full-expectation", "--paths", "100", "--seed", "-1",
                                   "--out", self.path("x.csv"))
            self.assertEqual(code, 2, command)

    def test_reliability_and_ratio_tables(self):
        code, _ = self.run_cli("reliability", "--model", self.model_path, "--init", "A,A",
                               "--horizon", "6", "--out", self.path("rel.csv"))
        self.assertEqual(code, 0)
        rows = self.read_csv("rel.csv")
        self.assertEqual(len(rows), 7)
        self.assertEqual(rows[0]["system"], "1")
        code, _ = self.run_cli("ratio", "--model", self.model_path, "--init", "A,A",
                               "--horizon", "6", "--out", self.path("ratio.csv"))
        self.assertEqual(code, 0)
        self.assertEqual(list(self.read_csv("ratio.csv")[0]), ["k", "joint", "independent", "ratio"])

    def test_price_and_cva(self):
        common = ("--model", self.model_path, "--init", "A,A", "--maturity", "5",
                  "--spread", "0.02", "--recovery-c", "0.4", "--recovery-b", "0.3",
                  "--discount", "flat:0.01")
        code, _ = self.run_cli("price", *common, "--out", self.path("price.csv"))
        self.assertEqual(code, 0)
        legs = {r["leg"]: float(r["value"]) for r in self.read_csv("price.csv")}
        self.assertEqual(legs["closeout"], 0.0)
        self.assertAlmostEqual(legs["cva"], legs["risk_free_price"] - legs["risky_price"], places=15)

        code, _ = self.run_cli("cva", *common, "--mode", "full-expectation", "--paths", "4000",
                               "--seed", "5", "--out", self.path("cva.csv"))
        self.assertEqual(code, 0)
        with open(self.path("cva.json")) as f:
            summary = json.load(f)
        self.assertEqual(summary["mode"], "full-expectation")
        self.assertIn("semantic_gap", summary["comparison"])

    def test_cva_gap_is_the_closeout_for_independent_names(self):
        model_path = self.path("hazard.json")
        with contextlib.redirect_stdout(io.StringIO()):
            create_sample_model(model_path, hazard_model(0.15, 0.1))
        code, _ = self.run_cli("cva", "--model", model_path, "--init", "A,A", "--maturity", "5",
                               "--spread", "0.02", "--recovery-c", "0.4", "--recovery-b", "0.2",
                               "--discount", "flat:0.01", "--mode", "full-expectation",
                               "--paths", "40000", "--seed", "8", "--out", self.path("gap.csv"))
        self.assertEqual(code, 0)
        with open(self.path("gap.json")) as f:
            comparison = json.load(f)["comparison"]
        gap = comparison["paper"]["cva"] - comparison["full"]["cva"]
        self.assertAlmostEqual(gap, comparison["difference"], places=12)
        self.assertGreater(comparison["std_error"], 0.0)
        self.assertLessEqual(abs(gap - comparison["closeout"]), 5 * comparison["std_error"],
                             f"gap {gap:.6g} closeout {comparison['closeout']:.6g} "
                             f"se {comparison['std_error']:.3g}")

    def test_same_seed_same_bytes(self):
        args = ("price", "--model", self.model_path, "--init", "A,A", "--maturity", "4",
                "--spread", "0.01", "--mode", "full-expectation", "--paths", "3000", "--seed", "42")
        self.run_cli(*args, "--out", self.path("a.csv"))
        self.run_cli(*args, "--out", self.path("b.csv"))
        with open(self.path("a.csv"), "rb") as a, open(self.path("b.csv"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_par_spread(self):
        code, _ = self.run_cli("par-spread", "--model", self.model_path, "--init", "A,A",
                               "--maturity", "5", "--mode", "paper-proposition",
                               "--out", self.path("par.csv"))
        self.assertEqual(code, 0)
        rows = self.read_csv("par.csv")
        self.assertEqual(rows[0]["mode"], "paper-proposition")
        self.assertGreater(float(rows[0]["spread"]), 0.0)

    def test_simulate_with_path_dump(self):
        code, _ = self.run_cli("simulate", "--model", self.model_path, "--init", "A,A",
                               "--horizon", "5", "--paths", "200", "--seed", "1",
                               "--out", self.path("sim.csv"), "--paths-out", self.path("paths.csv"))
        self.assertEqual(code, 0)
        self.assertEqual(len(self.read_csv("sim.csv")), 6)
        self.assertEqual(list(self.read_csv("paths.csv")[0]), ["path_id", "component", "time", "state"])
        with open(self.path("sim.json")) as f:
            self.assertEqual(json.load(f)["a3_violations"], 0)


class TestEngine(unittest.TestCase):
    def test_solvers_are_shared_per_model_and_config(self):
        engine = create_app("testing")
        model = example_model()
        solver = engine.solver(model)
        self.assertIs(solver, solver_for(example_model(), TestingConfig))
        self.assertIs(solver, create_app("testing").solver(model))
        self.assertIsNot(solver, solver_for(model, ProductionConfig))


if __name__ == "__main__":
    unittest.main()
