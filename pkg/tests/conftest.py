import pytest

from emograph.constants import data_path
from emograph.lexicon import Lexicon
from emograph.text import NormalizationConfig, load_captions


@pytest.fixture(scope="session")
def bundled_lexicon():
    return Lexicon.bundled()


@pytest.fixture(scope="session")
def norm_config():
    return NormalizationConfig.default()


@pytest.fixture(scope="session")
def fixture_captions():
    return load_captions(data_path("fixture_captions.jsonl"))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    from test_acceptance import CRITERIA

    outcomes = {}
    for status in ("passed", "failed", "skipped", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_A" not in nodeid:
                continue
            if getattr(rep, "when", "call") == "setup" and status == "passed":
                continue
            cid = nodeid.split("::test_")[1].split("_")[0]
            label = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "N/A "}[status]
            detail = ", ".join(f"{k}={v}" for k, v in getattr(rep, "user_properties", []))
            if status == "skipped" and isinstance(rep.longrepr, tuple):
                detail = rep.longrepr[2].removeprefix("Skipped: ")
            outcomes[cid] = (label, detail)
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid, desc in CRITERIA.items():
        if cid in outcomes:
            label, detail = outcomes[cid]
            terminalreporter.write_line(f"{cid} {label} {desc}" + (f" [{detail}]" if detail else ""))
