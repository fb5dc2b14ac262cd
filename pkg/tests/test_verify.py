import pytest

from spheremass.verify import SUITES, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    checks, _ = run_suite(name)
    assert checks
    bad = [f"{c.name}: {c.detail}" for c in checks if not c.passed]
    assert not bad
