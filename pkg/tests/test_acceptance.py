"""Acceptance criteria; each test prints one PASS/FAIL line (shown with ``pytest -s`` or ``-rA``)."""

import pytest

from diffbound.acceptance import CRITERIA
from diffbound.chainbound import T_bound


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = CRITERIA[number]()
    print(result.line())
    assert result.passed, result.line()


def test_large_T_hex_form():
    # 2^(2^21 + 22): one hex digit '4' and 524293 zeros
    digits = format(T_bound(2, 3, 1), "x")
    assert digits[0] == "4" and set(digits[1:]) == {"0"} and len(digits) == 524294
