import json
import shutil
import sys
import tempfile
import unittest
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from database.db import Catalog
from main import (EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main)


class TestCLI(unittest.TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def _run(self, *argv, name="out") -> tuple:
        out = self.tmp / name
        code = main(["--out", str(out), *argv])
        report = out / "report.json"
        document = json.loads(report.read_text(encoding="utf-8")) if report.exists() else None
        return code, document

    def _write(self, name: str, text: str) -> Path:
        path = self.tmp / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_presets_list(self):
        print("\n[TEST] presets --list succeeds and reports every preset")
        code, doc = self._run("presets", "--list")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(doc["presets"]), 6)
        self.assertTrue((self.tmp / "out" / "manifest.json").exists())

    def test_round_unknot_has_no_quadrisecants(self):
        print("\n[TEST] quadrisecants on round_unknot reports zero lines")
        code, doc = self._run("quadrisecants", "--preset", "round_unknot", "--edges", "16")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(doc["count"], 0)
        self.assertEqual(doc["kind"], "quadrisecants")

    def test_reports_are_reproducible(self):
        print("\n[TEST] Same inputs and seed give byte-identical reports")
        args = ("--seed", "3", "quadrisecants", "--preset", "hopf", "--edges", "8", "--perturb", "1/10000")
        self.assertEqual(main(["--out", str(self.tmp / "a"), *args]), EXIT_OK)
        self.assertEqual(main(["--out", str(self.tmp / "b"), "--workers", "2", *args]), EXIT_OK)
        first = (self.tmp / "a" / "report.json").read_bytes()
        second = (self.tmp / "b" / "report.json").read_bytes()
        self.assertEqual(first, second)
        patterns = {q["pattern"] for q in json.loads(first)["quadrisecants"]}
        self.assertIn("ABAB", patterns)

    def test_degree8_auto(self):
        print("\n[TEST] degree8 --auto proves degree at least 8")
        code, doc = self._run("degree8", "--auto")
        self.assertEqual(code, EXIT_OK)
        self.assertGreaterEqual(doc["root_count"], 8)
        self.assertEqual(doc["surface_total_degree"], 8)

    def test_roots(self):
        print("\n[TEST] roots counts distinct and repeated roots")
        code, doc = self._run("roots", "--coeffs", "0,0,-1,0,1")   # t^4 - t^2
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(doc["distinct_roots"], 3)
        self.assertEqual(doc["roots_with_multiplicity"], 4)
        code, doc = self._run("roots", "--coeffs", "0,0,-1,0,1", "--lo", "0", "--hi", "2", name="interval")
        self.assertEqual(doc["distinct_roots"], 1)
        self.assertIsNone(doc["roots_with_multiplicity"])

    def test_roots_on_line(self):
        print("\n[TEST] roots restricts a polynomial file to a line")
        poly = self._write("sphere.poly", "1 x^2\n1 y^2\n1 z^2\n-1\n")
        code, doc = self._run("roots", "--poly", str(poly), "--line", "0,0,0:1,0,0")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(doc["distinct_roots"], 2)

    def test_usage_errors(self):
        print("\n[TEST] Bad flags exit with the usage code")
        self.assertEqual(main(["quadrisecants", "--bogus"]), EXIT_USAGE)
        self.assertEqual(main(["no-such-command"]), EXIT_USAGE)

    def test_input_errors(self):
        print("\n[TEST] Invalid links and polynomials exit with the input code")
        bowtie = self._write("bowtie.json", json.dumps({"version": 1, "components": [
            [["0", "0", "0"], ["1", "1", "0"], ["1", "0", "0"], ["0", "1", "0"]]]}))
        code, doc = self._run("validate", "--link", str(bowtie))
        self.assertEqual(code, EXIT_INPUT)
        self.assertIsNone(doc)
        code, _ = self._run("roots", "--coeffs", "0,0", name="zero")
        self.assertEqual(code, EXIT_INPUT)
        code, _ = self._run("quadrisecants", "--preset", "trefoil_t23", "--edges", "5", name="short")
        self.assertEqual(code, EXIT_INPUT)

    def test_failed_run_keeps_manifest(self):
        print("\n[TEST] A failing run still leaves its manifest")
        bowtie = self._write("bowtie.json", json.dumps({"version": 1, "components": [
            [["0", "0", "0"], ["1", "1", "0"], ["1", "0", "0"], ["0", "1", "0"]]]}))
        code, doc = self._run("validate", "--link", str(bowtie), name="failed")
        self.assertEqual(code, EXIT_INPUT)
        self.assertIsNone(doc)
        manifest = json.loads((self.tmp / "failed" / "manifest.json").read_text(encoding="utf-8"))
        self.assertEqual(manifest["subcommand"], "validate")

    def test_strict_degeneracy(self):
        print("\n[TEST] --strict aborts on a degenerate configuration")
        link = self._write("collinear.json", json.dumps({"version": 1, "components": [
            [["0", "0", "0"], ["1", "0", "0"], ["2", "0", "0"], ["3", "0", "0"],
             ["3", "1", "1"], ["0", "1", "-1"]]]}))
        self.assertEqual(main(["--out", str(self.tmp / "loose"), "quadrisecants", "--link", str(link)]), EXIT_OK)
        self.assertEqual(main(["--out", str(self.tmp / "strict"), "--strict", "quadrisecants",
                               "--link", str(link)]), EXIT_DEGENERATE)

    def test_obstruction_outputs(self):
        print("\n[TEST] obstruction writes the chart and the chord-disk mesh")
        svg, mesh = self.tmp / "chart.svg", self.tmp / "disk.obj"
        code, doc = self._run("obstruction", "--preset", "round_unknot", "--edges", "12",
                              "--samples", "4", "--svg", str(svg), "--mesh", str(mesh))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(doc["arcs"], [])
        self.assertEqual(doc["chord_disk"]["triangles"], 12)
        self.assertTrue(svg.exists())
        faces = [l for l in mesh.read_text(encoding="utf-8").splitlines() if l.startswith("f ")]
        self.assertEqual(len(faces), 11)  # the apex edge triangle is flat

    def test_preset_export_and_reload(self):
        print("\n[TEST] An exported preset loads back through --link")
        path = self.tmp / "trefoil.json"
        code, _ = self._run("presets", "--name", "trefoil_t23", "--edges", "12", "--write", str(path))
        self.assertEqual(code, EXIT_OK)
        code, doc = self._run("validate", "--link", str(path), name="check")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(doc["valid"])

    def test_catalog(self):
        print("\n[TEST] --catalog records the run")
        db_path = self.tmp / "runs.db"
        code = main(["--out", str(self.tmp / "c"), "--catalog", str(db_path), "roots", "--coeffs", "-2,0,1"])
        self.assertEqual(code, EXIT_OK)
        catalog = Catalog(db_path)
        runs = catalog.list_runs()
        catalog.close()
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0].subcommand, "roots")
        self.assertEqual(runs[0].result_count, 2)


if __name__ == '__main__':
    unittest.main()
