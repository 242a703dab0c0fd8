import sys

import pytest


@pytest.fixture
def report(capsys):
    """Print a line to the terminal even while pytest captures output."""

    def emit(line: str) -> None:
        with capsys.disabled():
            sys.stdout.write("\n" + line + "\n")

    return emit
