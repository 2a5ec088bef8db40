import sys

import pytest

from eudinym import bbs
from eudinym.commitments import PseudonymSeed
from eudinym.groups import DeterministicRng, random_scalar

ATTRS = ("age_over_18", "expiry")
VALUES = {"age_over_18": "true", "expiry": "2031-01-01"}


def issue(keypair, seed=None, rng=None, values=VALUES):
    """Blind issuance round trip; returns (seed, credential)."""
    seed = seed or PseudonymSeed.generate(rng)
    req, state = bbs.blind_issuance_request(seed, random_scalar(rng), keypair.public, rng)
    sig = bbs.blind_sign(keypair, req, values, rng)
    return seed, bbs.unblind(keypair.public, sig, state)


@pytest.fixture(scope="session")
def issuer():
    return bbs.keygen(4, ATTRS, DeterministicRng("fixture/issuer"))


@pytest.fixture(scope="session")
def other_issuer():
    return bbs.keygen(4, ATTRS, DeterministicRng("fixture/other-issuer"))


@pytest.fixture(scope="session")
def holder(issuer):
    return issue(issuer, rng=DeterministicRng("fixture/holder"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
