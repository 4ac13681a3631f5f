import pytest
from hypothesis import given
from hypothesis import strategies as st

from autotriage.alerts import (
    Alert,
    CategorySource,
    EntityRef,
    categorize,
    extract_static_features,
    parse_alert,
    strip_entities,
    tactic_ordinal,
)
from autotriage.errors import EmptyCategory, MalformedTimestamp, MissingField

LISTING_RECORD = {
    "id": "unique_alert_uri",
    "metadata": {
        "creator": {"detector": {"id": "d1"}, "rule": {"id": "r9"}},
        "severity": 0.75,
        "title": "Unfamiliar sign-in properties",
        "created_at": 1_700_000_000,
    },
    "entities": [{"identifier": "host-1", "kind": "host"}],
    "tenant_id": "11772",
}


class TestParseAlert:
    def test_listing_style_record(self):
        alert = parse_alert(LISTING_RECORD)
        assert alert.id == "unique_alert_uri"
        assert alert.tenant_id == "11772"
        assert alert.severity == 0.75
        assert alert.title == "Unfamiliar sign-in properties"
        assert alert.detector == "d1" and alert.rule == "r9"
        assert alert.entities == [EntityRef("host-1", "host")]

    def test_no_tactics_defaults_to_zero(self):
        record = dict(LISTING_RECORD)
        alert = parse_alert(record)
        assert alert.mitre_tactic_max == 0
        assert alert.severity is not None

    @pytest.mark.parametrize("missing", ["id", "tenant_id"])
    def test_missing_required_field(self, missing):
        record = {k: v for k, v in LISTING_RECORD.items() if k != missing}
        with pytest.raises(MissingField) as err:
            parse_alert(record)
        assert err.value.name == missing

    def test_missing_timestamp_and_title(self):
        record = {"id": "x", "tenant_id": "t", "title": "a"}
        with pytest.raises(MissingField):
            parse_alert(record)
        record = {"id": "x", "tenant_id": "t", "created_at": 5}
        with pytest.raises(MissingField):
            parse_alert(record)

    def test_malformed_timestamp(self):
        record = dict(LISTING_RECORD, created_at="not a time", metadata={"title": "a"})
        with pytest.raises(MalformedTimestamp):
            parse_alert(record)

    def test_iso_timestamp(self):
        record = dict(LISTING_RECORD)
        record["created_at"] = "2022-01-14T00:00:00Z"
        record["metadata"] = {"title": "x"}
        alert = parse_alert(record)
        assert alert.created_at == 1642118400.0

    def test_flat_record_with_tactics(self):
        alert = parse_alert({
            "id": "a", "tenant_id": "t", "created_at": 10.0, "title": "x",
            "mitre_tactics": ["TA0002", "TA0005"],
            "mitre_techniques": ["T1059", "T1027"],
        })
        assert alert.mitre_tactic_max == 7  # defense evasion
        assert len(alert.mitre_techniques) == 2


class TestStripEntities:
    def test_email_in_title(self):
        assert (strip_entities("Potential stolen user credential for user@domain")
                == "potential stolen user credential for <entity>")

    def test_ipv4(self):
        assert strip_entities("Malware on 10.0.0.5") == "malware on <entity>"

    def test_empty(self):
        assert strip_entities("") == ""

    def test_mixed_entities(self):
        title = "Beacon to c2.bad.example from 10.1.2.3 via /usr/bin/curl"
        assert strip_entities(title) == "beacon to <entity> from <entity> via <entity>"

    @given(st.text(max_size=120))
    def test_idempotent(self, title):
        once = strip_entities(title)
        assert strip_entities(once) == once

    @given(st.text(max_size=120))
    def test_total_and_lowercase(self, title):
        out = strip_entities(title)
        assert out == out.lower()
        assert "  " not in out


class TestCategorize:
    def test_detector_rule_pair(self):
        alert = parse_alert(LISTING_RECORD)
        category = categorize(alert)
        assert category.value == "d1::r9"
        assert category.source == CategorySource.DETECTOR_RULE

    def test_title_fallback(self):
        record = dict(LISTING_RECORD)
        record["metadata"] = {"title": "Unfamiliar sign-in properties", "created_at": 1}
        alert = parse_alert(record)
        category = categorize(alert)
        assert category.value == "unfamiliar sign-in properties"
        assert category.source == CategorySource.NORMALIZED_TITLE

    def test_deterministic_and_idempotent(self):
        first = categorize(parse_alert(LISTING_RECORD))
        second = categorize(parse_alert(LISTING_RECORD))
        assert first == second
        alert = parse_alert(LISTING_RECORD)
        assert categorize(alert) is categorize(alert)

    def test_same_detector_rule_share_category_regardless_of_title(self):
        a = parse_alert({"id": "1", "tenant_id": "t", "created_at": 1, "title": "one",
                         "detector": "d", "rule": "r"})
        b = parse_alert({"id": "2", "tenant_id": "t", "created_at": 2, "title": "two",
                         "detector": "d", "rule": "r"})
        assert categorize(a) == categorize(b)

    def test_empty_category_raises(self):
        alert = parse_alert({"id": "1", "tenant_id": "t", "created_at": 1, "title": "  "})
        with pytest.raises(EmptyCategory):
            categorize(alert)

    def test_preassigned_category_is_kept(self):
        alert = parse_alert({"id": "1", "tenant_id": "t", "created_at": 1,
                             "title": "whatever", "category": "pkg_install"})
        assert categorize(alert).value == "pkg_install"


class TestStaticFeatures:
    def test_counts(self):
        alert = Alert(
            id="a", tenant_id="t", created_at=0.0, title="x",
            entities=[EntityRef("e1"), EntityRef("e2"), EntityRef("e3")],
            entity_relationship_count=2,
            mitre_techniques=["T1", "T2", "T3", "T4"],
            mitre_tactic_max=max(tactic_ordinal("TA0002"), tactic_ordinal("TA0005")),
        )
        assert extract_static_features(alert) == [3.0, 2.0, 7.0, 4.0]

    def test_empty_alert(self):
        alert = Alert(id="a", tenant_id="t", created_at=0.0, title="x")
        assert extract_static_features(alert) == [0.0, 0.0, 0.0, 0.0]

    def test_max_ordinal(self):
        alert = Alert(id="a", tenant_id="t", created_at=0.0, title="x",
                      entities=[EntityRef("e1")], mitre_tactic_max=14)
        feats = extract_static_features(alert)
        assert feats[2] == 14.0
        assert len(feats) == 4 and all(v >= 0 for v in feats)

    def test_tactic_ordinal_range(self):
        assert tactic_ordinal("TA0043") == 1
        assert tactic_ordinal("Impact") == 14
        assert tactic_ordinal("made-up-tactic") == 0
