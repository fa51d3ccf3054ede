import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clg.docmodel import parse_document
from clg.rules import (
    DEFAULTS,
    RULES,
    RuleConfig,
    RuleConfigError,
    check_document,
    load_rule_config,
    parse_rule_config,
    selector_matches,
)
from conftest import wrap


def run(lex, tb, path, text, cfg=None):
    src = wrap(path, text)
    return check_document(parse_document(src), lex, tb, cfg, "t.xml"), src


def ids(diags):
    return sorted(d.rule_id for d in diags)


GOLDEN = [
    ("safetyadvice/cause", "Maschinenschaden durch liegengebliebenes Werkzeug!", []),
    (
        "safetyadvice/cause",
        "Liegengebliebenes Werkzeug führt zu Maschinenschaden.",
        ["CAUSE-SAFETY-ELLIPSIS", "CAUSE-SAFETY-EXCLAIM"],
    ),
    ("errordescription/cause", "Kein Kraftstoff im Tank.", ["CAUSE-ERROR-SENTENCE"]),
    ("errordescription/cause", "Kein Kraftstoff ist im Tank.", []),
    ("symptom", "Mastarm fährt nicht richtig hoch.", []),
    ("symptom", "Warum fährt der Mastarm nicht hoch?", ["SYMPTOM-NO-QUESTION"]),
    ("action/step", "Drücken Sie die Taste.", []),
    ("action/step", "Die Taste drücken.", ["STEP-IMPERATIVE"]),
    ("descriptive", "Die Walze wird gereinigt.", ["NO-PASSIVE"]),
]


@pytest.mark.parametrize("path, text, expected", GOLDEN)
def test_golden(lex, tb, path, text, expected):
    diags, _ = run(lex, tb, path, text)
    assert ids(diags) == expected


def test_safety_example_from_original_rules(lex, tb):
    diags, _ = run(lex, tb, "safetyadvice/cause", "Verbrühungsgefahr durch herausspritzendes Öl!")
    assert diags == []


def test_cause_rules_need_parent_context(lex, tb):
    # a cause under errordescription is not a hazard cause
    diags, _ = run(lex, tb, "errordescription/cause", "Maschinenschaden durch Werkzeug!")
    assert ids(diags) == ["CAUSE-ERROR-PERIOD", "CAUSE-ERROR-SENTENCE"]


def test_nominalized_infinitive_is_not_finite(lex, tb):
    diags, _ = run(lex, tb, "safetyadvice/cause", "Verletzungsgefahr beim Wenden!")
    assert "CAUSE-SAFETY-ELLIPSIS" not in ids(diags)


def test_symptom_question_word_only(lex, tb):
    diags, _ = run(lex, tb, "symptom", "Warum läuft der Motor nicht.")
    assert ids(diags) == ["SYMPTOM-NO-QUESTION"]
    assert "question word 'Warum'" in diags[0].message


def test_symptom_needs_verb(lex, tb):
    diags, _ = run(lex, tb, "symptom", "Mastarm nicht oben.")
    assert ids(diags) == ["SYMPTOM-NO-QUESTION"]


class TestPassive:
    @pytest.mark.parametrize(
        "text",
        [
            "Die Walzen werden gewaschen.",
            "Der Motor wurde eingeschaltet.",
            "Wird die Walze gereinigt?",
        ],
    )
    def test_flags(self, lex, tb, text):
        diags, _ = run(lex, tb, "descriptive", text)
        assert "NO-PASSIVE" in ids(diags)

    @pytest.mark.parametrize(
        "text",
        ["Die Walze ist gereinigt.", "Der Motor wird warm."],
    )
    def test_no_werden_no_flag(self, lex, tb, text):
        diags, _ = run(lex, tb, "descriptive", text)
        assert "NO-PASSIVE" not in ids(diags)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(
            st.sampled_from(
                ["Die", "Walze", "ist", "gereinigt", "hat", "gewaschen", "gedreht", "sind", "Öl", "geölt"]
            ),
            min_size=1,
            max_size=8,
        )
    )
    def test_precision_guard(self, lex, tb, words):
        diags, _ = run(lex, tb, "descriptive", " ".join(words) + ".")
        assert "NO-PASSIVE" not in ids(diags)


class TestCompoundLength:
    @pytest.mark.parametrize(
        "word, severity",
        [
            ("Farbreibwalze", None),
            ("Farbwerkschutzvorrichtung", "warning"),
            ("Farbwerkwalzenschutzvorrichtung", "error"),
        ],
    )
    def test_levels(self, lex, tb, word, severity):
        diags, _ = run(lex, tb, "descriptive", f"Die {word} ist sauber.")
        found = [d.severity for d in diags if d.rule_id == "COMPOUND-LENGTH"]
        assert found == ([severity] if severity else [])

    def test_unsegmentable_skipped(self, lex, tb):
        diags, _ = run(lex, tb, "descriptive", "Die Qwertzwalzenvorrichtung ist sauber.")
        assert diags == []

    def test_analysis_skipped_opt_in(self, lex, tb):
        cfg = RuleConfig.default().with_severity("ANALYSIS-SKIPPED", "info")
        diags, _ = run(lex, tb, "descriptive", "Die Qwertzwalze ist sauber.", cfg)
        assert [(d.rule_id, d.severity) for d in diags] == [("ANALYSIS-SKIPPED", "info")]


class TestTerms:
    def test_deprecated(self, lex, tb):
        diags, src = run(lex, tb, "descriptive", "Die Chromwalze ist sauber.")
        (d,) = diags
        assert d.rule_id == "TERM-DEPRECATED"
        assert d.suggestion == "Feuchtreibwalze"
        assert src[d.span.start:d.span.end] == "Chromwalze"

    def test_deprecated_plural(self, lex, tb):
        diags, _ = run(lex, tb, "descriptive", "Die Chromwalzen sind sauber.")
        assert ids(diags) == ["TERM-DEPRECATED"]

    def test_ambiguous_is_info(self, lex, tb):
        diags, _ = run(lex, tb, "descriptive", "Die Wendung ist defekt.")
        (d,) = diags
        assert (d.rule_id, d.severity) == ("TERM-AMBIGUOUS", "info")
        assert "C-perfecting, C-perfecting-unit" in d.message


def test_max_tokens(lex, tb):
    long = "Kein Kraftstoff ist im Tank weil die Pumpe seit dem letzten Wechsel der Walze nicht läuft."
    diags, _ = run(lex, tb, "errordescription/cause", long)
    assert [(d.rule_id, d.severity) for d in diags] == [("MAX-TOKENS", "info")]
    cfg = parse_rule_config(["MAX-TOKENS\tcause\twarning\t20"])
    diags, _ = run(lex, tb, "errordescription/cause", long, cfg)
    assert diags == []


class TestConfig:
    def test_empty_file_defaults(self, tmp_path):
        p = tmp_path / "rules.tsv"
        p.write_text("# nothing\n")
        assert load_rule_config(p) == RuleConfig.default()

    def test_absent_defaults(self, tmp_path):
        assert load_rule_config(tmp_path / "missing.tsv") == RuleConfig.default()
        assert load_rule_config(None) == RuleConfig.default()

    def test_disable(self):
        cfg = parse_rule_config(["NO-PASSIVE\t*\toff"])
        assert cfg.entries["NO-PASSIVE"].severity == "off"
        assert cfg.entries["STEP-IMPERATIVE"] == DEFAULTS["STEP-IMPERATIVE"]

    @pytest.mark.parametrize(
        "line, message",
        [
            ("BOGUS\t*\terror", "unknown rule"),
            ("NO-PASSIVE\t*\tfatal", "severity"),
            ("NO-PASSIVE\t*", "expected"),
            ("NO-PASSIVE\ta//b\terror", "selector"),
            ("MAX-TOKENS\tcause\tinfo\tmany", "MAX-TOKENS"),
        ],
    )
    def test_errors(self, line, message):
        with pytest.raises(RuleConfigError, match=message):
            parse_rule_config([line])

    def test_every_rule_has_default(self):
        assert set(RULES) == set(DEFAULTS)

    def test_retarget_selector(self, lex, tb):
        cfg = parse_rule_config(["CAUSE-ERROR-PERIOD\tcause\terror"])
        diags, _ = run(lex, tb, "safetyadvice/cause", "Maschinenschaden durch Werkzeug!", cfg)
        assert ids(diags) == ["CAUSE-ERROR-PERIOD"]


@pytest.mark.parametrize(
    "selector, path, expected",
    [
        ("*", ("a",), True),
        ("safetyadvice/cause", ("m", "safetyadvice", "cause"), True),
        ("safetyadvice/cause", ("m", "errordescription", "cause"), False),
        ("cause", ("m", "errordescription", "cause"), True),
        ("*/cause", ("x", "cause"), True),
        ("a/b/c", ("b", "c"), False),
    ],
)
def test_selector(selector, path, expected):
    assert selector_matches(selector, path) is expected


CORPUS = (
    "<module id='m'>"
    "<safetyadvice><cause>Liegengebliebenes Werkzeug führt zu Maschinenschaden.</cause></safetyadvice>\n"
    "<errordescription><cause>Kein Kraftstoff im Tank.</cause></errordescription>\n"
    "<action><step>Die Chromwalze reinigen.</step><step>Drücken Sie die Taste.</step></action>\n"
    "<descriptive>Die Walze wird gereinigt. Die Wendung ist defekt. "
    "Die Farbwerkwalzenschutzvorrichtung prüfen.</descriptive>\n"
    "<symptom>Warum fährt der Mastarm nicht hoch?</symptom>"
    "</module>"
)


def test_sorted_and_deterministic(lex, tb):
    tree = parse_document(CORPUS)
    a = check_document(tree, lex, tb, None, "c.xml")
    b = check_document(parse_document(CORPUS), lex, tb, None, "c.xml")
    assert a == b
    keys = [(d.span.line, d.span.column, d.rule_id) for d in a]
    assert keys == sorted(keys)


def test_spans_contain_offending_tokens(lex, tb):
    diags = check_document(parse_document(CORPUS), lex, tb, None, "c.xml")
    texts = {d.rule_id: CORPUS[d.span.start:d.span.end] for d in diags}
    assert "führt" in texts["CAUSE-SAFETY-ELLIPSIS"]
    assert texts["CAUSE-SAFETY-EXCLAIM"].endswith("Maschinenschaden.")
    assert texts["NO-PASSIVE"] == "wird gereinigt"
    assert texts["TERM-AMBIGUOUS"] == "Wendung"
    assert texts["COMPOUND-LENGTH"] == "Farbwerkwalzenschutzvorrichtung"
    assert texts["SYMPTOM-NO-QUESTION"] == "Warum fährt der Mastarm nicht hoch?"
    for d in diags:
        assert 0 <= d.span.start < d.span.end <= len(CORPUS)
        assert d.severity != "off"


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(DEFAULTS)), st.sampled_from(["error", "warning", "info"]))
def test_severity_projection(lex, tb, rule_id, severity):
    tree = parse_document(CORPUS)
    base_cfg = RuleConfig.default()
    if base_cfg.entries[rule_id].severity == "off":
        base_cfg = base_cfg.with_severity(rule_id, "info")
    base = check_document(tree, lex, tb, base_cfg, "c.xml")
    changed = check_document(tree, lex, tb, base_cfg.with_severity(rule_id, severity), "c.xml")
    assert len(base) == len(changed)
    for a, b in zip(base, changed):
        assert (a.rule_id, a.span, a.message) == (b.rule_id, b.span, b.message)
        if a.rule_id != rule_id:
            assert a.severity == b.severity


@pytest.mark.parametrize("rule_id", sorted(DEFAULTS))
def test_disabled_rules_are_silent(lex, tb, rule_id):
    cfg = RuleConfig.default().with_severity(rule_id, "off")
    diags = check_document(parse_document(CORPUS), lex, tb, cfg, "c.xml")
    assert all(d.rule_id != rule_id for d in diags)
