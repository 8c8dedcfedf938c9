import json
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("argv", [
    ["scramble_sweep.py", "--trials", "20"],
    ["intercept_resend_qber.py", "--rounds", "100", "--seeds", "2"],
])
def test_script_runs(argv):
    proc = subprocess.run([sys.executable, str(SCRIPTS / argv[0]), *argv[1:]], capture_output=True, text=True, check=True)
    payload = json.loads(proc.stdout)
    assert payload["config"] and payload["results"]
