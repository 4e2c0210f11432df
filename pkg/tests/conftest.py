import sys

import pytest

from flowqubo import (
    brute_force,
    build_ds_discrete,
    build_il_discrete,
    load_default_ds_space,
    load_default_il_space,
    reformulate,
)


@pytest.fixture(scope="session")
def il_space():
    return load_default_il_space()


@pytest.fixture(scope="session")
def ds_space():
    return load_default_ds_space()


@pytest.fixture(scope="session")
def il_program(il_space):
    return build_il_discrete(il_space)


@pytest.fixture(scope="session")
def ds_program(ds_space):
    return build_ds_discrete(ds_space)


@pytest.fixture(scope="session")
def il_oracle(il_program):
    return brute_force(il_program)


@pytest.fixture(scope="session")
def ds_oracle(ds_program):
    return brute_force(ds_program)


@pytest.fixture(scope="session")
def il_reform(il_program):
    return reformulate(il_program)


@pytest.fixture(scope="session")
def ds_reform(ds_program):
    return reformulate(ds_program)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    gate = sys.modules.get("test_acceptance")
    lines = getattr(gate, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
