import pytest


def stream_bits(stream) -> str:
    """Payload of a CompressedStream as a '0'/'1' string."""
    s = "".join(format(b, "08b") for b in stream.payload)
    return s[: stream.payload_bits]


def writer_bits(w) -> str:
    s = "".join(format(b, "08b") for b in w.getvalue())
    return s[: w.bit_length]


@pytest.fixture
def bits():
    return writer_bits


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(rep, "when", "call") == "call":
                name = nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
