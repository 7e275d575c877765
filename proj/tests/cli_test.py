# Copyright 2026 The itshap Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Black-box checks of the itshap command line tool.

Usage: cli_test.py <itshap binary> <repo root>
"""

import csv
import json
import os
import random
import subprocess
import sys
import tempfile
import unittest

BINARY = None
ROOT = None


def run(*args):
    return subprocess.run([BINARY, *args], capture_output=True, text=True)


def data(name):
    return os.path.join(ROOT, "data", name)


def golden(name):
    with open(os.path.join(ROOT, "tests", "golden", name)) as f:
        return json.load(f)


class ExplainTest(unittest.TestCase):

    def check_golden(self, problem, instance, order, backend, name):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "report.json")
            proc = run("explain", "--problem", data(problem), "--instance",
                       instance, "--order", str(order), "--backend", backend,
                       "--out", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as f:
                got = json.load(f)
        want = golden(name)
        self.assertEqual(got["instance"], want["instance"])
        self.assertEqual(got["order"], want["order"])
        self.assertEqual([c["subset"] for c in got["components"]],
                         [c["subset"] for c in want["components"]])
        for g, w in zip(got["components"], want["components"]):
            for a, b in zip(g["values"], w["values"]):
                self.assertAlmostEqual(a, b, delta=1e-12)
        self.assertLessEqual(abs(got["efficiency_residual"]), 1e-12)
        for key in ("value", "weight", "contracted"):
            self.assertIn(key, got["ranks"])

    def test_xor_goldens(self):
        for backend in ("auto", "dense", "tt", "both"):
            self.check_golden("xor.json", "2,2", 1, backend, "xor_k1.json")
            self.check_golden("xor.json", "2,2", 2, backend, "xor_k2.json")

    def test_unanimity_goldens(self):
        for backend in ("dense", "tt"):
            self.check_golden("unanimity.json", "2,2,1", 1, backend,
                              "unanimity_k1.json")
            self.check_golden("unanimity.json", "2,2,1", 2, backend,
                              "unanimity_k2.json")

    def test_both_reports_backend_diff(self):
        proc = run("explain", "--problem", data("xor.json"), "--instance",
                   "1,2", "--order", "2", "--backend", "both")
        self.assertEqual(proc.returncode, 0)
        doc = json.loads(proc.stdout)
        self.assertLessEqual(doc["max_backend_diff"], 1e-9)

    def test_exit_codes(self):
        xor = data("xor.json")
        cases = [
            (("explain", "--problem", xor, "--instance", "2,2", "--order", "0"), 2),
            (("explain", "--problem", xor, "--instance", "2,2", "--order", "3"), 2),
            (("explain", "--problem", xor, "--instance", "2,x", "--order", "1"), 2),
            (("explain", "--problem", xor, "--instance", "2,3", "--order", "1"), 3),
            (("explain", "--problem", data("missing.json"), "--instance", "1,1",
              "--order", "1"), 2),
            (("explain", "--problem", xor, "--instance", "1,1", "--order", "1",
              "--backend", "gpu"), 2),
            (("frobnicate",), 2),
        ]
        for args, code in cases:
            with self.subTest(args=args):
                self.assertEqual(run(*args).returncode, code)


class VerifyTest(unittest.TestCase):

    def test_fixtures_pass(self):
        for name in ("xor.json", "unanimity.json"):
            proc = run("verify", "--problem", data(name))
            self.assertEqual(proc.returncode, 0, proc.stdout + proc.stderr)
            self.assertNotIn("FAIL", proc.stdout)

    def test_random_trials_pass(self):
        proc = run("verify", "--trials", "10", "--seed", "3")
        self.assertEqual(proc.returncode, 0, proc.stdout)

    def test_zero_trials_is_usage_error(self):
        self.assertEqual(run("verify", "--trials", "0").returncode, 2)

    def test_corrupted_weight_is_caught(self):
        proc = run("verify", "--problem", data("unanimity.json"),
                   "--corrupt-weight")
        self.assertEqual(proc.returncode, 1)
        failing = [l for l in proc.stdout.splitlines() if l.startswith("FAIL")]
        self.assertTrue(any("efficiency" in l for l in failing), proc.stdout)


class DecomposeTest(unittest.TestCase):

    def test_exact_decomposition(self):
        with tempfile.TemporaryDirectory() as tmp:
            src = os.path.join(tmp, "t.json")
            out = os.path.join(tmp, "tt.json")
            with open(src, "w") as f:
                json.dump({"mode_sizes": [2, 3, 2],
                           "entries": list(range(1, 13))}, f)
            proc = run("decompose", "--problem", src, "--tol", "0", "--out", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as f:
                tt = json.load(f)
        self.assertEqual(tt["mode_sizes"], [2, 3, 2])
        self.assertEqual(tt["ranks"][0], 1)
        self.assertEqual(tt["ranks"][-1], 1)
        err = [l for l in proc.stdout.splitlines()
               if l.startswith("reconstruction_error:")]
        self.assertEqual(len(err), 1)
        self.assertLessEqual(float(err[0].split(":")[1]), 1e-12)

    def test_problem_model(self):
        proc = run("decompose", "--problem", data("unanimity.json"), "--tol", "0")
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertIn("ranks:", proc.stderr)
        self.assertEqual(json.loads(proc.stdout)["mode_sizes"], [2, 2, 2, 1])

    def decompose(self, tensor, tol):
        with tempfile.TemporaryDirectory() as tmp:
            src = os.path.join(tmp, "t.json")
            with open(src, "w") as f:
                json.dump(tensor, f)
            proc = run("decompose", "--problem", src, "--tol", str(tol),
                       "--out", os.path.join(tmp, "tt.json"))
        self.assertEqual(proc.returncode, 0, proc.stderr)
        line = [l for l in proc.stdout.splitlines() if l.startswith("ranks:")][0]
        return [int(r) for r in line.split(":")[1].split()]

    def test_rank_one_model(self):
        a, b, c, d = [1.0, 2.0], [0.5, -1.0, 3.0], [2.0, 1.0], [1.0, 4.0]
        entries = [w * x * y * z for w in a for x in b for y in c for z in d]
        ranks = self.decompose({"mode_sizes": [2, 3, 2, 2], "entries": entries}, 0)
        self.assertEqual(ranks, [1, 1, 1, 1, 1])

    def test_truncation_on_noisy_low_rank(self):
        rng = random.Random(5)
        sizes = [3, 3, 3, 3]
        vecs = [[[rng.uniform(-1, 1) for _ in range(m)] for m in sizes]
                for _ in range(2)]
        entries = []
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    for l in range(3):
                        v = sum(t[0][i] * t[1][j] * t[2][k] * t[3][l] for t in vecs)
                        entries.append(v + 1e-3 * rng.uniform(-1, 1))
        doc = {"mode_sizes": sizes, "entries": entries}
        exact = self.decompose(doc, 0)
        loose = self.decompose(doc, 1e-2)
        self.assertLess(sum(loose), sum(exact))
        self.assertTrue(all(a <= b for a, b in zip(loose, exact)))

    def test_negative_tolerance(self):
        proc = run("decompose", "--problem", data("xor.json"), "--tol", "-1")
        self.assertEqual(proc.returncode, 2)


class BenchTest(unittest.TestCase):

    def bench(self, config):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "bench.json")
            out = os.path.join(tmp, "bench.csv")
            with open(cfg, "w") as f:
                json.dump(config, f)
            proc = run("bench", "--config", cfg, "--out", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as f:
                return list(csv.DictReader(f))

    def test_rows_per_case(self):
        rows = self.bench({"cases": [{"n": 4, "k": 2, "rank": 2},
                                     {"n": 5, "k": 1, "rank": 1}],
                           "min_ms": 0})
        self.assertEqual(len(rows), 6)
        self.assertEqual({r["backend"] for r in rows},
                         {"enumeration", "dense", "tt"})
        for r in rows:
            self.assertGreaterEqual(float(r["wall_ms"]), 0.0)

    def test_scaling_config_rows(self):
        rows = self.bench({"cases": [{"n": 8, "k": 2, "rank": 2},
                                     {"n": 10, "k": 2, "rank": 2},
                                     {"n": 12, "k": 2, "rank": 2}],
                           "min_ms": 0})
        self.assertEqual(len(rows), 9)
        self.assertEqual([r["n"] for r in rows], ["8"] * 3 + ["10"] * 3 + ["12"] * 3)

    def test_empty_config(self):
        self.assertEqual(self.bench({"cases": []}), [])

    def test_bad_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "bench.json")
            with open(cfg, "w") as f:
                f.write('{"cases": [{"n": 4}]}')
            self.assertEqual(run("bench", "--config", cfg).returncode, 2)


if __name__ == "__main__":
    BINARY = os.path.abspath(sys.argv.pop(1))
    ROOT = os.path.abspath(sys.argv.pop(1))
    unittest.main(verbosity=2)
