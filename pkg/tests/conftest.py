import sys
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Context manager recording one acceptance criterion as PASS or FAIL.

    The body may put a short result summary in ``rec["detail"]``.
    """
    verdicts = request.config.stash.setdefault(_VERDICTS, {})

    @contextmanager
    def run(number: int, title: str):
        rec = {"detail": ""}
        try:
            yield rec
        except BaseException:
            verdicts[number] = (title, False, rec["detail"])
            raise
        verdicts[number] = (title, True, rec["detail"])
        print(f"criterion {number}: PASS {title}: {rec['detail']}")

    return run


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        title, ok, detail = verdicts[number]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
