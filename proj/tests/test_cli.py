"""End-to-end checks of the qkdlab command-line tool.

usage: test_cli.py <qkdlab executable> <result.schema.json>
"""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

EXE = None
SCHEMA = None


def run(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([EXE, *args], capture_output=True, text=True, env=full_env)


def run_json(*args):
    p = run(*args)
    if p.returncode != 0:
        raise AssertionError(f"{args} exited {p.returncode}: {p.stderr}")
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, SCHEMA, format_checker=jsonschema.FormatChecker())
    return doc


class ExitCodes(unittest.TestCase):
    def test_unknown_preset(self):
        p = run("crossing", "--preset", "bogus")
        self.assertEqual(p.returncode, 1)
        self.assertIn("bogus", p.stderr)

    def test_zero_rounds(self):
        self.assertEqual(run("simulate", "--rounds", "0").returncode, 1)

    def test_empty_grid(self):
        self.assertEqual(run("sweep", "--points", "0").returncode, 1)
        self.assertEqual(run("sweep", "--from", "0.9", "--to", "0.8").returncode, 1)

    def test_usage_errors(self):
        self.assertEqual(run().returncode, 1)
        self.assertEqual(run("no-such-command").returncode, 1)
        self.assertEqual(run("--base", "10", "crossing", "--preset", "3deb").returncode, 1)
        self.assertEqual(run("simulate", "--channel", "warp").returncode, 1)
        self.assertEqual(run("simulate", "--sifting", "pairs:0-9").returncode, 1)
        self.assertEqual(run("cloner-eval", "--v", "0.9", "--x", "0.3", "--y", "0.3").returncode, 1)


class Schema(unittest.TestCase):
    def test_every_command_validates(self):
        cases = [
            ["bases"],
            ["cloner-eval", "--published"],
            ["cloner-eval", "--v", "1", "--x", "0", "--y", "0"],
            ["crossing", "--preset", "3deb"],
            ["crossing", "--preset", "qubit"],
            ["symmetric", "--preset", "3deb"],
            ["thresholds"],
            ["table"],
            ["--format", "json", "table"],
            ["sweep", "--points", "5"],
            ["simulate", "--rounds", "3000", "--channel", "depolarizing:0.8"],
            ["simulate", "--rounds", "100000", "--channel", "clone:optimal", "--compare"],
            ["survey", "--rounds", "3000"],
        ]
        for args in cases:
            with self.subTest(args=args):
                doc = run_json(*args)
                self.assertEqual(doc["command"], args[-1] if args[0] == "--format" else args[0])
                self.assertIn("timestamp", doc)

    def test_schema_rejects_malformed(self):
        doc = run_json("--no-timestamp", "table")
        doc["result"][0]["error_rate"] = "high"
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate(doc, SCHEMA)


class Reproducibility(unittest.TestCase):
    def test_byte_identical(self):
        for args in (["crossing", "--preset", "universal"],
                     ["simulate", "--rounds", "20000", "--seed", "3", "--channel", "clone:optimal"],
                     ["survey", "--rounds", "5000", "--seed", "1"]):
            with self.subTest(args=args):
                a = run("--no-timestamp", *args)
                b = run("--no-timestamp", *args, env={"QKDLAB_THREADS": "1"})
                self.assertEqual(a.returncode, 0)
                self.assertEqual(a.stdout, b.stdout)
                self.assertNotIn("timestamp", a.stdout)

    def test_seed_and_input_echo(self):
        doc = run_json("simulate", "--rounds", "1000", "--seed", "42")
        self.assertEqual(doc["seed"], 42)
        self.assertEqual(doc["input"]["rounds"], 1000)
        self.assertTrue(doc["version"])

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "out.json")
            self.assertEqual(run("--no-timestamp", "-o", path, "thresholds").returncode, 0)
            with open(path) as f:
                self.assertEqual(f.read(), run("--no-timestamp", "thresholds").stdout)

    def test_config_file_and_rounds_csv(self):
        with tempfile.TemporaryDirectory() as d:
            cfg = os.path.join(d, "cfg.json")
            with open(cfg, "w") as f:
                json.dump({"rounds": 500, "seed": 9, "channel": {"kind": "depolarizing", "visibility": 0.5}}, f)
            rounds = os.path.join(d, "rounds.csv")
            doc = run_json("simulate", "--config", cfg, "--rounds-csv", rounds)
            self.assertEqual(doc["result"]["rounds"], 500)
            with open(rounds) as f:
                rows = list(csv.DictReader(f))
            self.assertEqual(len(rows), 500)
            self.assertEqual(list(rows[0].keys()), ["round", "basis_i", "basis_j", "a", "b"])
            counts = doc["result"]["outcome_counts"]
            recount = [0] * 144
            for r in rows:
                i, j, a, b = (int(r[k]) for k in ("basis_i", "basis_j", "a", "b"))
                recount[((i * 4 + j) * 3 + a) * 3 + b] += 1
            self.assertEqual(recount, counts)


class Table(unittest.TestCase):
    def test_csv(self):
        p = run("--format", "csv", "table")
        self.assertEqual(p.returncode, 0)
        lines = p.stdout.strip().splitlines()
        self.assertEqual(lines[0], "protocol,f_a_star,error_rate,paper_value,delta")
        rows = list(csv.DictReader(io.StringIO(p.stdout)))
        self.assertEqual([r["protocol"] for r in rows], ["3DEB", "12-state", "3D-BB84", "Ekert91"])
        for r in rows:
            self.assertLess(abs(float(r["error_rate"]) - float(r["paper_value"])), 1.5e-3)
            self.assertAlmostEqual(float(r["delta"]), float(r["error_rate"]) - float(r["paper_value"]), places=8)

    def test_json_matches_csv(self):
        rows = run_json("table")["result"]
        self.assertEqual(len(rows), 4)
        csv_rows = list(csv.DictReader(io.StringIO(run("--format", "csv", "table").stdout)))
        for j, c in zip(rows, csv_rows):
            self.assertEqual(j["protocol"], c["protocol"])
            self.assertAlmostEqual(j["error_rate"], float(c["error_rate"]), places=9)


class Crossing(unittest.TestCase):
    def test_presets(self):
        self.assertLess(abs(run_json("crossing", "--preset", "3deb")["result"]["F_A_star"] - 0.7753), 5e-4)
        self.assertLess(abs(run_json("crossing", "--preset", "universal")["result"]["F_A_star"] - 0.7733), 1e-3)

    def test_bases(self):
        ref = run_json("crossing", "--preset", "3deb")["result"]["F_A_star"]
        for b in ("3", "e"):
            doc = run_json("--base", b, "crossing", "--preset", "3deb")
            self.assertEqual(doc["result"]["log_base"], b)
            self.assertLess(abs(doc["result"]["F_A_star"] - ref), 1e-6)


class Simulate(unittest.TestCase):
    def test_ideal(self):
        r = run_json("simulate", "--rounds", "100000", "--channel", "ideal", "--seed", "7")["result"]
        self.assertEqual(r["qber"], 0.0)
        self.assertEqual(r["sifted_errors"], 0)

    def test_clone_optimal(self):
        r = run_json("simulate", "--rounds", "100000", "--channel", "clone:optimal", "--seed", "7")["result"]
        n = r["sifted_count"]
        se = math.sqrt(0.2247 * (1 - 0.2247) / n)
        self.assertLess(abs(r["qber"] - 0.2247), 3 * se)

    def test_paired_sifting(self):
        r = run_json("simulate", "--rounds", "20000", "--sifting", "pairs:0-0,1-1")["result"]
        self.assertEqual(r["accepted_pairs"], [[0, 0], [1, 1]])
        self.assertEqual(r["qber"], 0.0)

    def test_plain_convention(self):
        r = run_json("survey", "--rounds", "2000", "--bob-basis", "plain")["result"]
        self.assertEqual(r["perfect_pairs"], [[0, 0], [1, 3], [2, 2], [3, 1]])


class Sweep(unittest.TestCase):
    def test_sign_change(self):
        p = run("--format", "csv", "sweep", "--from", "0.70", "--to", "0.85", "--points", "151")
        self.assertEqual(p.returncode, 0)
        rows = list(csv.DictReader(io.StringIO(p.stdout)))
        self.assertEqual(len(rows), 151)
        self.assertEqual(list(rows[0].keys()),
                         ["index", "f_a", "v", "x", "y", "f_b", "i_ab", "i_ae", "i_be", "r_bound"])
        gaps = [(float(r["f_a"]), float(r["i_ab"]) - float(r["i_ae"])) for r in rows]
        changes = [(gaps[k - 1][0], gaps[k][0]) for k in range(1, len(gaps)) if (gaps[k - 1][1] > 0) != (gaps[k][1] > 0)]
        self.assertEqual(len(changes), 1)
        lo, hi = changes[0]
        self.assertLessEqual(lo, 0.7753)
        self.assertGreaterEqual(hi, 0.7753)

    def test_single_point_at_optimum(self):
        rows = run_json("sweep", "--from", "0.7753", "--to", "0.7753", "--points", "1")["result"]
        self.assertEqual(len(rows), 1)
        self.assertLessEqual(abs(rows[0]["I_AB"] - rows[0]["I_AE"]), 1e-3)

    def test_identity_point(self):
        rows = run_json("--base", "3", "sweep", "--from", "1", "--to", "1", "--points", "1")["result"]
        self.assertAlmostEqual(rows[0]["R_bound"], 1.0, places=8)


if __name__ == "__main__":
    EXE = os.path.abspath(sys.argv[1])
    with open(sys.argv[2]) as f:
        SCHEMA = json.load(f)
    jsonschema.Draft202012Validator.check_schema(SCHEMA)
    unittest.main(argv=[sys.argv[0], "-v"])
