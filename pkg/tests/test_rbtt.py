from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import op, service
from wsrep.errors import DuplicateRuleId, RuleSyntaxError
from wsrep.rbtt import (
    Annotation,
    Lexicon,
    Pos,
    RuleType,
    apply_rules,
    build_rbtt_representation,
    export_annotations_xml,
    load_rules,
    parse_rule,
    parse_rules,
    remove_tags,
    tag_service,
    tokenize_tag,
    update_lexicon,
)
from wsrep.rbtt.tagger import START_PARA, START_SENTENCE
from wsrep.representations import Kind

RULES = load_rules()
CAPTCHA = "CAPTCHA-image web service for serving and validating CAPTCHA-images"
ICD9 = (
    "The ICD9 coding system is an international classification system which groups related "
    "disease entities and procedures for the purpose of reporting statistical information. "
    "The system is widely used to for medical billing"
)


def _tag(text: str, sid: str = "s") -> list[Annotation]:
    return apply_rules(tokenize_tag(text), RULES, sid)


class TestTokenizer:
    def test_sentence(self):
        toks = tokenize_tag("The system is widely used.")
        assert [t.surface for t in toks] == ["The", "system", "is", "widely", "used", "."]
        assert toks[0].pos is Pos.DT and {START_PARA, START_SENTENCE} <= toks[0].flags
        assert toks[1].pos is Pos.NOUN and not toks[1].flags
        assert toks[-1].pos is Pos.PUNCT

    def test_empty(self):
        assert tokenize_tag("") == []

    def test_relative_pronoun(self):
        toks = tokenize_tag("which groups related disease entities")
        assert toks[0].pos is Pos.PRP_REL
        # noun-like stems are verbs only in their -ing/-ed forms
        assert toks[1].pos is Pos.NOUN
        assert toks[2].pos is Pos.VERB

    def test_hyphenated_word_is_one_token(self):
        assert [t.surface for t in tokenize_tag("CAPTCHA-image web")] == ["CAPTCHA-image", "web"]

    def test_sentence_and_paragraph_flags(self):
        toks = tokenize_tag("One. Two\n\nThree")
        flags = {t.surface: t.flags for t in toks}
        assert flags["Two"] == {START_SENTENCE}
        assert flags["Three"] == {START_PARA, START_SENTENCE}

    def test_remove_tags(self):
        assert remove_tags("<p>a &amp; b</p><p>c</p>").split() == ["a", "&", "b", "c"]


class TestRuleParsing:
    def test_reference_namews_rule(self):
        rule = parse_rule(
            "nws namews trigger=<flag:startPara,flag:startSentence> "
            "stop=<lemma:web+lemma:service,lemma:webservice> constraints=<forbid_single_determiner>"
        )
        assert rule.rule_type is RuleType.NAMEWS
        assert [[str(m) for m in seq] for seq in rule.trigger] == [["flag:startPara"], ["flag:startSentence"]]
        assert [[str(m) for m in seq] for seq in rule.stop] == [["lemma:web", "lemma:service"], ["lemma:webservice"]]
        assert rule.forbid_single_determiner and rule.max_tokens is None
        assert parse_rule(rule.to_dsl()) == rule

    def test_empty_file(self):
        assert parse_rules("") == []
        assert parse_rules("# only a comment\n\n") == []

    @pytest.mark.parametrize(
        "line",
        [
            "garbage",
            "r1 colour trigger=<lemma:a> stop=<lemma:b>",
            "r1 namews trigger=<nolemma> stop=<lemma:b>",
            "r1 namews trigger=<lemma:a> stop=<flag:startPara>",
            "r1 namews trigger=<lemma:a,> stop=<lemma:b>",
            "r1 namews trigger=<lemma:a> stop=<lemma:b> constraints=<bogus>",
            "r1 namews trigger=<pos:ADJ> stop=<lemma:b>",
        ],
    )
    def test_malformed(self, line):
        with pytest.raises(RuleSyntaxError):
            parse_rule(line)

    def test_error_carries_line(self):
        with pytest.raises(RuleSyntaxError) as exc:
            parse_rules("# c\nbad line\n")
        assert exc.value.line == 2

    def test_duplicate_ids(self):
        line = "r1 namews trigger=<lemma:a> stop=<lemma:b>"
        with pytest.raises(DuplicateRuleId):
            parse_rules(f"{line}\n{line}\n")

    def test_base_rule_set_shape(self):
        by_type = {t: sum(r.rule_type is t for r in RULES) for t in RuleType}
        assert by_type[RuleType.NAMEWS] >= 5
        assert by_type[RuleType.PURPOSE] >= 4
        assert by_type[RuleType.DOMAIN] >= 3


class TestExtraction:
    def test_captcha(self):
        [ann] = _tag(CAPTCHA, "WSID 172")
        assert (ann.rule_type, ann.text) == (RuleType.NAMEWS, "CAPTCHA-image")
        assert export_annotations_xml([ann], "WSID 172") == "<ws><id>WSID 172</id><namews>CAPTCHA-image</namews></ws>"

    def test_icd9(self):
        anns = _tag(ICD9, "WSID 29")
        assert [(a.rule_type, a.text) for a in anns] == [(RuleType.DOMAIN, "medical billing")]
        assert export_annotations_xml(anns, "WSID 29") == "<ws><id>WSID 29</id><domain>medical billing</domain></ws>"

    def test_no_trigger(self):
        assert _tag("Nothing to see here") == []

    def test_single_determiner_rejected(self):
        assert [a for a in _tag("The web service for conversion.") if a.rule_type is RuleType.NAMEWS] == []

    def test_purpose_nominal(self):
        anns = _tag("This is the web service for currency conversion.")
        assert (RuleType.PURPOSE, "currency conversion") in [(a.rule_type, a.text) for a in anns]

    def test_first_rule_wins_overlap(self):
        rules = parse_rules(
            "a domain trigger=<lemma:x> stop=<lemma:z>\n"
            "b purpose trigger=<lemma:x> stop=<lemma:z>\n"
        )
        anns = apply_rules(tokenize_tag("x y z"), rules)
        assert [(a.rule_id, a.text) for a in anns] == [("a", "y")]

    def test_longest_span_within_rule(self):
        [rule] = parse_rules("a domain trigger=<lemma:x> stop=<lemma:z> constraints=<max_tokens(5)>")
        anns = apply_rules(tokenize_tag("x x y z"), [rule])
        assert [a.text for a in anns] == ["x y"]

    def test_end_of_text_closes_punct_rules_only(self):
        rules = parse_rules(
            "p domain trigger=<lemma:for> stop=<punct:any>\nq purpose trigger=<lemma:about> stop=<lemma:zzz>\n"
        )
        anns = apply_rules(tokenize_tag("for billing about stuff"), rules)
        assert [(a.rule_id, a.text) for a in anns] == [("p", "billing about stuff")]

    def test_tag_service_uses_all_docs(self):
        svc = service("s", [op("Op", documentation="It is used for medical billing.")], CAPTCHA)
        assert [a.text for a in tag_service(svc, RULES)] == ["CAPTCHA-image", "medical billing"]

    def test_xml_order_and_escape(self):
        anns = [
            Annotation("s", RuleType.NAMEWS, "A&B", 0, 1, "r"),
            Annotation("s", RuleType.DOMAIN, "x<y", 2, 3, "r"),
        ]
        assert export_annotations_xml(anns, "s") == "<ws><id>s</id><namews>A&amp;B</namews><domain>x&lt;y</domain></ws>"
        assert export_annotations_xml([], "s") == "<ws><id>s</id></ws>"


class TestRepresentation:
    def test_medical_billing(self):
        ann = Annotation("s", RuleType.DOMAIN, "medical billing", 0, 2, "r")
        assert build_rbtt_representation([ann], service("s")).terms == {"medic": 1, "bill": 1}

    def test_captcha(self):
        ann = Annotation("s", RuleType.NAMEWS, "CAPTCHA-image", 0, 1, "r")
        assert build_rbtt_representation([ann], service("s")).terms == {"captcha": 1, "imag": 1}

    def test_empty(self):
        rep = build_rbtt_representation([], service("s"))
        assert rep.kind is Kind.RBTT and rep.terms == {}

    def test_falls_back_to_baseline(self):
        rep = build_rbtt_representation([], service("s", [op("Add")]))
        assert rep.terms == {"add": 1}


class TestLexicon:
    ann = Annotation("a", RuleType.DOMAIN, "medical billing", 0, 2, "dom_used")

    def test_idempotent(self):
        lex = update_lexicon([self.ann, self.ann], Lexicon())
        lex = update_lexicon([self.ann], lex)
        assert lex.frequency("medical billing", "domain") == 1

    def test_two_services(self):
        other = Annotation("b", RuleType.DOMAIN, "medical billing", 5, 7, "dom_used")
        assert update_lexicon([self.ann, other], Lexicon()).frequency("medical billing", RuleType.DOMAIN) == 2

    def test_empty_is_noop(self):
        lex = update_lexicon([self.ann], Lexicon())
        assert update_lexicon([], lex).entries == lex.entries

    def test_rows_round_trip(self):
        lex = update_lexicon([self.ann], Lexicon())
        assert Lexicon.from_rows(lex.to_rows()).entries == lex.entries


vocabulary = st.sampled_from(
    "the a this web service webservice for is used to of which provides allows you medical "
    "billing CAPTCHA-image weather . , ; and data purpose".split()
)
texts = st.lists(vocabulary, max_size=25).map(" ".join)


@settings(max_examples=200, deadline=None)
@given(texts)
def test_namews_never_single_determiner(text):
    for a in _tag(text):
        if a.rule_type is RuleType.NAMEWS:
            toks = tokenize_tag(a.text)
            assert not (len(toks) == 1 and toks[0].pos is Pos.DT)


@settings(max_examples=200, deadline=None)
@given(texts, st.sampled_from(["", " ", "\n", "  \n\t"]))
def test_trailing_whitespace_invariance(text, tail):
    assert _tag(text) == _tag(text + tail)


@settings(max_examples=200, deadline=None)
@given(texts)
def test_annotation_is_substring(text):
    flat = re.sub(r"\s+", " ", text)
    for a in _tag(text):
        assert a.text in flat
