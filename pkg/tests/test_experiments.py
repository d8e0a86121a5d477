import csv
import io
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stderr

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from levy_storage import main
from levy_storage.levy import resolve_compound_poisson
from levy_storage.properties import ExperimentProperties, parse_config
from levy_storage.schema import (ConfigError, StationarySamplerUnavailableError, TruncatedCP,
                                 UnsupportedModelError)
from levy_storage.schema.report_types import ROW_FIELDS, SUMMARY_FIELDS
from levy_storage.service import (horizon_schedule, run_consistency, run_coverage, run_estimate, run_figures,
                                  run_resampling, run_simulate, write_grid, write_report)
from levy_storage.service.report_writer import companion_path, format_value

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")
SLOW_TESTS_ENABLED = os.environ.get("LEVY_STORAGE_SLOW_TESTS_ENABLED") == "True"

MM1_CONFIG = """\
model:
  kind: compound-poisson
  rate: 1
  jobs:
    kind: exponential
    rate: 2
xi: 0.5
delta: 0.25
horizon: 400
alphas: [0.5, 1, 2]
resample-size: 10
seed: 42
init: fixed
v0: 1.5
"""

DETERMINISTIC_CONFIG = """\
model:
  kind: compound-poisson
  rate: 0.5
  jobs:
    kind: deterministic
    size: 1
horizon: 100
replications: 2
"""


def mm1_config(extra: str = ""):
    return parse_config(MM1_CONFIG + extra)


def read_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as file:
        return list(csv.DictReader(file))


def read_text(path: str) -> str:
    with open(path, encoding="utf-8") as file:
        return file.read()


class TestSimulate(unittest.TestCase):
    def test_grid_from_fixed_start(self):
        grid, metadata = run_simulate(mm1_config())
        self.assertEqual(grid.m, 1600)
        self.assertEqual(grid.values[0], 1.5)
        self.assertEqual(metadata["command"], "simulate")
        self.assertEqual(metadata["init"], "fixed")
        self.assertEqual(metadata["v0"], "1.5")
        self.assertEqual(metadata["delta"], "0.25")

    def test_same_seed_same_grid(self):
        first, _ = run_simulate(mm1_config())
        second, _ = run_simulate(mm1_config())
        self.assertEqual(first.values.tolist(), second.values.tolist())

    def test_stationary_fallback_is_recorded(self):
        _, metadata = run_simulate(parse_config(DETERMINISTIC_CONFIG + "delta: 1\n"))
        self.assertEqual(metadata["init"], "burn-in")
        self.assertNotEqual(metadata["burn_in_time"], "")


class TestEstimate(unittest.TestCase):
    def test_rows(self):
        report = run_estimate(mm1_config())
        ids = [row.experiment_id for row in report.rows]
        self.assertEqual(ids, ["single"] * 3 + ["resample-K=10"] * 3)
        for row in report.rows[:3]:
            with self.subTest(alpha=row.alpha):
                self.assertGreater(row.n, 0)
                self.assertAlmostEqual(row.phi_true, row.alpha * (row.alpha + 1.0) / (row.alpha + 2.0), places=12)
                self.assertEqual(row.phi_true, row.phi_sim)
                if row.ci_lo is not None:
                    self.assertLessEqual(row.ci_lo, row.phi_hat)
                    self.assertLessEqual(row.phi_hat, row.ci_hi)
        for row in report.rows[3:]:
            self.assertIsNone(row.sigma_hat_sq)
        self.assertEqual(report.metadata["command"], "estimate")

    def test_single_estimate_without_resampling(self):
        report = run_estimate(parse_config(MM1_CONFIG.replace("resample-size: 10", "resample-size: 1")))
        self.assertEqual(len(report.rows), 3)

    def test_seed_changes_the_estimate(self):
        first = run_estimate(mm1_config())
        second = run_estimate(parse_config(MM1_CONFIG.replace("seed: 42", "seed: 43")))
        self.assertNotEqual([row.phi_hat for row in first.rows], [row.phi_hat for row in second.rows])


class TestConsistency(unittest.TestCase):
    def test_horizon_schedule(self):
        self.assertEqual(horizon_schedule(100.0, 2), [25.0, 50.0, 100.0])
        self.assertEqual(horizon_schedule(100.0, 0), [100.0])

    def test_rows_and_summary(self):
        report = run_consistency(mm1_config("deltas: [0.5, 1]\ndoublings: 2\n"))
        self.assertEqual(len(report.rows), 2 * 3 * 3)
        self.assertEqual([row.horizon for row in report.rows[:9:3]], [100.0, 200.0, 400.0])
        self.assertEqual(report.rows[0].experiment_id, "T=100")
        self.assertEqual(len(report.summary), 2 * 3)
        for entry in report.summary:
            self.assertEqual(entry.group, "consistency")
            self.assertEqual(entry.count, 3)

    def test_grid_width_beyond_shortest_horizon(self):
        with self.assertRaises(ConfigError) as context:
            run_consistency(mm1_config("deltas: [200]\ndoublings: 2\n"))
        self.assertEqual(context.exception.field, "deltas")


class TestCoverage(unittest.TestCase):
    CONFIG = MM1_CONFIG.replace("init: fixed", "init: stationary").replace("horizon: 400", "horizon: 200")

    def test_replications_do_not_depend_on_their_number(self):
        short = run_coverage(parse_config(self.CONFIG + "replications: 3\n"))
        long = run_coverage(parse_config(self.CONFIG + "replications: 5\n"))
        self.assertEqual(len(short.rows), 3 * 3)
        self.assertEqual(len(long.rows), 5 * 3)
        self.assertEqual(short.rows, long.rows[:9])

    def test_threads_do_not_change_the_rows(self):
        single = run_coverage(parse_config(self.CONFIG + "replications: 4\nthreads: 1\n"))
        pooled = run_coverage(parse_config(self.CONFIG + "replications: 4\nthreads: 3\n"))
        self.assertEqual(single.rows, pooled.rows)
        self.assertEqual([row.experiment_id for row in pooled.rows[::3]], ["0", "1", "2", "3"])

    def test_single_replication(self):
        report = run_coverage(parse_config(self.CONFIG + "replications: 1\n"))
        self.assertEqual(len(report.summary), 3)
        for entry in report.summary:
            self.assertIn(entry.coverage, (0.0, 1.0))
            self.assertIsNone(entry.empirical_variance)
            self.assertGreater(entry.reference_variance, 0.0)

    def test_no_exact_stationary_sampler(self):
        with self.assertRaises(StationarySamplerUnavailableError) as context:
            run_coverage(parse_config(DETERMINISTIC_CONFIG))
        self.assertEqual(context.exception.code, 6)

    def test_stationary_mm1_acceptance(self):
        if not SLOW_TESTS_ENABLED:
            self.skipTest("LEVY_STORAGE_SLOW_TESTS_ENABLED is not True")
        config = ExperimentProperties().load(os.path.join(CONFIG_DIR, "mm1-coverage.yaml"))
        entry = run_coverage(config).summary[0]
        self.assertEqual(entry.count, 500)
        self.assertGreaterEqual(entry.coverage, 0.90)
        self.assertLessEqual(entry.coverage, 0.98)
        self.assertAlmostEqual(entry.reference_variance, 104.0 / 243.0, places=12)
        self.assertLess(abs(entry.empirical_variance / entry.reference_variance - 1.0), 0.2)


class TestResampling(unittest.TestCase):
    def test_rows_and_summary(self):
        report = run_resampling(mm1_config("deltas: [0.5, 1]\nresample-sizes: [1, 4]\nresample-repeats: 2\n"))
        self.assertEqual(len(report.rows), 2 * 2 * 2 * 3)
        self.assertEqual(report.rows[0].experiment_id, "K=1;repeat=0")
        self.assertEqual(len(report.summary), 2 * 2 * 3)
        self.assertEqual({entry.K for entry in report.summary}, {1, 4})
        for entry in report.summary:
            self.assertIsNotNone(entry.empirical_variance)
            self.assertGreaterEqual(entry.empirical_variance, 0.0)


class TestFigures(unittest.TestCase):
    def test_data_sets(self):
        config = mm1_config("""\
figures:
  alpha-max: 2
  alpha-step: 0.5
  probe-horizon: 20
  probe-delta: 0.5
  probe-realisations: 2
  interval-horizon: 50
  interval-delta: 0.5
  resample-horizon: 20
  resample-size: 5
  resample-deltas: [1, 0.5]
  resample-realisations: 2
""")
        report = run_figures(config)
        ids = [row.experiment_id for row in report.rows]
        self.assertEqual(ids.count("probes-0"), 5)
        self.assertEqual(ids.count("probes-1"), 5)
        self.assertEqual(ids.count("interval"), 5)
        self.assertEqual(ids.count("resample-0") + ids.count("resample-1"), 2 * 2 * 5)
        for row in report.rows:
            if row.alpha == 0.0:
                self.assertEqual(row.phi_hat, 0.0)
                self.assertEqual(row.phi_true, 0.0)
        self.assertIn("alpha-max", report.metadata["figures"])


class TestReportWriter(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def test_format_value(self):
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(3), "3")

    def test_companion_path(self):
        self.assertEqual(companion_path(os.path.join("runs", "a.csv"), "meta"), os.path.join("runs", "a.meta.csv"))
        self.assertEqual(companion_path("out", "summary"), "out.summary.csv")

    def test_report_files(self):
        out = os.path.join(self.directory.name, "nested", "estimate.csv")
        written = write_report(run_estimate(mm1_config()), out)
        self.assertEqual(written, [out, companion_path(out, "meta")])

        self.assertEqual(read_text(out).splitlines()[0], ",".join(ROW_FIELDS))
        rows = read_csv(out)
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[0]["experiment_id"], "single")
        self.assertEqual(rows[3]["sigma_hat_sq"], "")
        self.assertEqual(rows[0]["seed"], "42")

        metadata = {row["key"]: row["value"] for row in read_csv(written[1])}
        self.assertEqual(metadata["command"], "estimate")
        self.assertEqual(metadata["seed"], "42")

    def test_summary_file(self):
        out = os.path.join(self.directory.name, "consistency.csv")
        written = write_report(run_consistency(mm1_config("deltas: [1]\ndoublings: 1\n")), out)
        self.assertEqual(len(written), 3)
        self.assertEqual(read_text(written[1]).splitlines()[0], ",".join(SUMMARY_FIELDS))

    def test_same_seed_writes_identical_files(self):
        outputs = []
        for name in ("first", "second"):
            out = os.path.join(self.directory.name, name, "estimate.csv")
            outputs.append([read_text(path) for path in write_report(run_estimate(mm1_config()), out)])
        self.assertEqual(outputs[0], outputs[1])

    def test_grid_file(self):
        out = os.path.join(self.directory.name, "grid.csv")
        grid, metadata = run_simulate(mm1_config())
        written = write_grid(grid, metadata, out)
        lines = read_text(out).splitlines()
        self.assertEqual(lines[0], "i,t,v")
        self.assertEqual(lines[1], "0,0,1.5")
        self.assertEqual(len(lines), grid.m + 2)
        self.assertTrue(os.path.exists(written[1]))


class TestSimulatedSurrogate(unittest.TestCase):
    def test_tabulated_jobs_have_no_closed_form_exponent(self):
        config = parse_config("""\
model:
  kind: compound-poisson
  rate: 0.5
  jobs:
    kind: tabulated
    probabilities: [0, 0.5, 1]
    quantiles: [1, 1.5, 2]
xi: 1
delta: 0.5
horizon: 100
alphas: [1]
init: fixed
""")
        report = run_estimate(config)
        row = report.rows[0]
        self.assertIsNone(row.phi_true)
        self.assertGreater(row.phi_sim, 0.0)
        self.assertNotIn("r_eps", report.metadata)

    def test_infinite_activity_input_is_simulated_through_its_truncation(self):
        config = parse_config("epsilon: 1.0e-3\ntable-size: 256\nhorizon: 20\ndelta: 0.5\ninit: fixed\n")
        expected = resolve_compound_poisson(TruncatedCP(base=config.model.to_spec(), epsilon=1e-3), table_size=256)
        _, metadata = run_simulate(config)
        self.assertEqual(metadata["epsilon"], "0.001")
        self.assertEqual(metadata["r_eps"], repr(expected.rate))
        self.assertEqual(int(metadata["table_size"]), len(expected.jobs.quantiles))
        self.assertLess(float(metadata["truncated_mean"]), 0.8)

    def test_sum_of_compound_poisson_components_is_unsupported(self):
        config = parse_config("""\
model:
  - {kind: compound-poisson, rate: 0.2, jobs: {kind: exponential, rate: 2}}
  - {kind: compound-poisson, rate: 0.1, jobs: {kind: deterministic, size: 1}}
horizon: 10
delta: 1
""")
        with self.assertRaises(UnsupportedModelError) as context:
            run_simulate(config)
        self.assertEqual(context.exception.code, 6)


class TestMain(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _config(self, text: str) -> str:
        path = os.path.join(self.directory.name, "config.yaml")
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
        return path

    def _main(self, *argv: str) -> tuple[int, str]:
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            code = main(list(argv))
        return code, stderr.getvalue()

    def test_estimate_succeeds(self):
        out = os.path.join(self.directory.name, "estimate.csv")
        code, _ = self._main("estimate", "--config", self._config(MM1_CONFIG), "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(len(read_csv(out)), 6)

    def test_seed_flag_overrides_config(self):
        out = os.path.join(self.directory.name, "estimate.csv")
        code, _ = self._main("estimate", "--config", self._config(MM1_CONFIG), "--out", out, "--seed", "5")
        self.assertEqual(code, 0)
        self.assertEqual({row["seed"] for row in read_csv(out)}, {"5"})

    def test_simulate_writes_grid(self):
        out = os.path.join(self.directory.name, "grid.csv")
        code, _ = self._main("simulate", "--config", self._config(MM1_CONFIG), "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(read_csv(out)[0], {"i": "0", "t": "0", "v": "1.5"})

    def test_invalid_config_exit_code(self):
        out = os.path.join(self.directory.name, "estimate.csv")
        code, message = self._main("estimate", "--config", self._config("xi: -1\n"), "--out", out)
        self.assertEqual(code, 2)
        self.assertIn("levy-storage estimate:", message)
        self.assertFalse(os.path.exists(out))

    def test_invalid_override_exit_code(self):
        code, _ = self._main("estimate", "--config", self._config(MM1_CONFIG), "--threads", "0",
                             "--out", os.path.join(self.directory.name, "estimate.csv"))
        self.assertEqual(code, 2)

    def test_missing_config_exit_code(self):
        code, _ = self._main("estimate", "--config", os.path.join(self.directory.name, "missing.yaml"))
        self.assertEqual(code, 2)

    def test_unavailable_sampler_exit_code(self):
        code, message = self._main("coverage", "--config", self._config(DETERMINISTIC_CONFIG),
                                   "--out", os.path.join(self.directory.name, "coverage.csv"))
        self.assertEqual(code, 6)
        self.assertIn("(code: 6)", message)

    def test_unknown_command(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                main(["bogus"])


if __name__ == '__main__':
    unittest.main()
