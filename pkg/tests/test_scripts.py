import os
import subprocess
import sys

import pytest

SCRIPTS = os.path.join(os.path.dirname(__file__), os.pardir, "scripts")


@pytest.mark.parametrize("name,args", [("witness_demo.py", ["--n", "4", "--count", "2"]),
                                       ("signature_sweep.py", ["--instances", "2", "--max-n", "3"])])
def test_script_runs(name, args):
    out = subprocess.run([sys.executable, os.path.join(SCRIPTS, name), *args],
                         capture_output=True, text=True, check=True)
    assert "fail" not in out.stderr.lower()
    assert len(out.stdout.splitlines()) >= 3
