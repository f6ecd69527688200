import os
import subprocess
import sys
from pathlib import Path

import pytest

SRC_DIR = Path(__file__).resolve().parents[1] / "src"
if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))


@pytest.fixture
def run_cli():
    """Run `python -m satqlink ...` with the package importable."""

    def _run(*args, cwd=None):
        env = dict(os.environ)
        env["PYTHONPATH"] = str(SRC_DIR) + os.pathsep + env.get("PYTHONPATH", "")
        return subprocess.run(
            [sys.executable, "-m", "satqlink", *map(str, args)],
            capture_output=True,
            text=True,
            cwd=cwd,
            env=env,
        )

    return _run
