"""Package-level sanity: exports resolve and the kernel benchmark runs."""

import subprocess
import sys
from pathlib import Path

import ecodiv

BENCH = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"


def test_all_exports_resolve():
    for name in ecodiv.__all__:
        assert getattr(ecodiv, name) is not None


def test_version_string():
    assert ecodiv.__version__


def test_benchmark_script_runs_and_verifies_equality():
    result = subprocess.run(
        [sys.executable, str(BENCH), "--trials", "8", "--horizon", "20"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0, result.stderr
    assert "python kernel" in result.stdout
    if "compiled kernel: not built" not in result.stdout:
        assert "outputs bit-identical: True" in result.stdout
