"""Smoke tests for the stackprobe python module."""

import hashlib

import pytest

import stackprobe as sp


TINY_CONFIG = "# tiny case\necho FUZZ\n--\n"


def test_defaults_match_the_published_campaign():
    assert sp.default_charset() == "!/09:@AZ['az{~"
    assert len(sp.default_charset()) == 14
    assert sp.DEFAULT_MAX_LEN == 1025


def test_parse_and_plan_per_case_arithmetic():
    cfg = sp.parse_config(TINY_CONFIG, name="tiny")
    assert cfg.name == "tiny"
    assert len(cfg) == 1
    assert cfg.cases[0].placeholder_count == 1
    plan = sp.plan(cfg)
    assert plan.per_case_count == 14 * 1025 == 14350
    assert plan.total_count == 14350


def test_sixteen_case_config_reproduces_the_published_total():
    text = "".join(f"svc op{i} FUZZ\n--\n" for i in range(16))
    cfg = sp.parse_config(text, name="svc")
    assert sp.plan(cfg).total_count == 229600


def test_generate_tiny_sweep_exactly():
    cfg = sp.parse_config(TINY_CONFIG, name="tiny", charset="!/", max_len=2)
    rendered = [c.rendered for c in sp.generate(cfg)]
    assert rendered == ["echo !", "echo !!", "echo /", "echo //"]


def test_roundtrip_serialization():
    cfg = sp.parse_config(TINY_CONFIG, name="tiny", charset="ab", max_len=3)
    text = sp.serialize_config(cfg)
    again = sp.parse_config(text, name="tiny")
    assert again.charset == "ab"
    assert again.max_len == 3
    assert sp.serialize_config(again) == text


def test_emit_script_is_deterministic(tmp_path):
    cfg = sp.parse_config(TINY_CONFIG, name="tiny", charset="xy", max_len=4)
    first = tmp_path / "one.sh"
    second = tmp_path / "two.sh"
    assert sp.emit_script(cfg, str(first)) == 8
    assert sp.emit_script(cfg, str(second)) == 8
    a = hashlib.sha256(first.read_bytes()).hexdigest()
    b = hashlib.sha256(second.read_bytes()).hexdigest()
    assert a == b


def test_empty_config_raises():
    with pytest.raises(sp.StackprobeError):
        sp.parse_config("", name="empty")


def test_bed_and_sfuzz_parameters():
    assert len(sp.bed_functions()) == 13
    assert sp.bed_functions()[0] == "HEAD"
    payloads = sp.bed_payloads()
    assert len(payloads) == 8
    assert payloads[-1] == "%n%n%n%n"
    lengths = sp.sfuzz_lengths(10024)
    assert lengths[0] == 1 and lengths[-1] == 10024 and len(lengths) == 15


def test_classification_labels():
    assert sp.classify_status(200) == ["normal"]
    assert sp.classify_status(404) == ["client_error"]
    assert sp.classify_status(500) == ["server_error", "anomaly"]
    assert sp.classify_outcome("timeout") == ["anomaly"]


def test_redaction():
    assert sp.redact_value("password1") == "p***"
    assert sp.redact_value("") == "***"
    assert sp.redact_value(sp.redact_value("password1")) == "p***"


def test_fixture_scan_roundtrip(tmp_path):
    root = tmp_path / "fsroot"
    written = sp.seed_fixture(str(root))
    assert len(written) == 7
    findings = sp.scan_tree(str(root))
    locators = {f["locator"].rsplit(":", 1)[0] for f in findings}
    assert locators == set(written)
    # Redaction is on by default; admin material is still flagged.
    admin = [f for f in findings if f["admin"]]
    assert admin and all(f["value"].endswith("***") for f in findings)

    raw = sp.scan_tree(str(root), redact=False)
    assert any(f["value"] == "adminpassword" for f in raw)


def test_port_labels_table():
    labels = sp.port_labels()
    assert len(labels) == 19
    assert labels[35357] == "Keystone API"
    assert labels[80] == "HTTP"
    assert labels[3306] == "MySQL"


def test_report_aggregation(tmp_path):
    ports = tmp_path / "ports.jsonl"
    ports.write_text(
        '{"record":"port","port":5000,"state":"open","service":"Keystone API"}\n'
    )
    findings = sp.aggregate([str(ports)])
    assert len(findings) == 1
    assert findings[0]["severity"] == "info"
    text = sp.render_report([str(ports)])
    assert "open port 5000" in text
    assert text == sp.render_report([str(ports)])
