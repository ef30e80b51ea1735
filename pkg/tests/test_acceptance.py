"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from basilica.acceptance import CRITERIA, check

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = check(number)
    line = f"{result.line()} ({result.seconds:.1f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, result.detail
