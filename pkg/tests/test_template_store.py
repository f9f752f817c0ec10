import dataclasses
import json

import pytest

from roiwrap import (
    RoiAttribute,
    RoiNotFound,
    RoiSpec,
    Symmetry,
    TemplateNotFound,
    build_page,
    extract,
    induce_delimiters,
    induce_template,
    list_templates,
    load_template,
    locate_roi,
    normalize,
    save_template,
)
from roiwrap.template_store import template_json_bytes


def _delims(source, roi):
    bundle = build_page(source)
    loc = locate_roi(bundle.tokens, bundle.rendered, roi)
    return {d.label: (d.start_tag, d.end_tag) for d in induce_delimiters(source, loc)}


class TestInduceDelimiters:
    def test_fixture_a_matches_published_table(self, a_source, a_roi, a_bundle):
        loc = locate_roi(a_bundle.tokens, a_bundle.rendered, a_roi)
        got = {d.label: (d.start_tag, d.end_tag) for d in induce_delimiters(a_source, loc)}
        assert got == {
            "Title": (None, "<br>"),
            "Author": ("<p>", None),
            "Abstract": ("<p>", None),
            "Publication": ("<p>", "<br>"),
        }

    def test_ordinals_follow_attribute_order(self, a_source, a_roi, a_bundle):
        loc = locate_roi(a_bundle.tokens, a_bundle.rendered, a_roi)
        ordinals = [d.ordinal for d in induce_delimiters(a_source, loc)]
        assert ordinals == [0, 1, 2, 3]

    def test_single_attribute_no_tags(self):
        # the whole page is the region: nothing to find on either side
        roi = RoiSpec(roi_text="only value here", attributes=(RoiAttribute("All", "only value here"),))
        got = _delims("only value here", roi)
        assert got == {"All": (None, None)}

    def test_trailing_tag_past_region_end_is_picked_up(self):
        # mirrors the Publication row: the region ends at displayed text,
        # the delimiter right after it still counts
        roi = RoiSpec(roi_text="only value here", attributes=(RoiAttribute("All", "only value here"),))
        got = _delims("<html><body>only value here</body></html>", roi)
        assert got == {"All": (None, "</body>")}

    def test_wrapped_cell_uses_close_tag(self):
        roi = RoiSpec(roi_text="before X after", attributes=(RoiAttribute("Cell", "X"),))
        got = _delims("<div>before <td>X</td> after</div>", roi)
        assert got == {"Cell": ("<td>", "</td>")}

    def test_inline_styling_is_transparent(self):
        roi = RoiSpec(roi_text="lead value tail", attributes=(RoiAttribute("V", "value"),))
        got = _delims("<div>lead <p><b>value</b> tail</div>", roi)
        assert got["V"][0] == "<p>"

    def test_unknown_tags_are_transparent(self):
        roi = RoiSpec(roi_text="lead value", attributes=(RoiAttribute("V", "value"),))
        got = _delims("<div>lead <p><marquee>value</div>", roi)
        assert got["V"][0] == "<p>"

    def test_displayed_text_blocks_the_scan(self):
        roi = RoiSpec(roi_text="lead mid value", attributes=(RoiAttribute("V", "value"),))
        got = _delims("<div>lead <p>mid value</div>", roi)
        # "mid" sits between the tag and the attribute: no start delimiter
        assert got["V"][0] is None

    def test_shared_occurrence_goes_to_the_later_attribute(self):
        roi = RoiSpec(
            roi_text="one two",
            attributes=(RoiAttribute("A", "one"), RoiAttribute("B", "two")),
        )
        got = _delims("<div>one<p>two</div>", roi)
        assert got == {"A": (None, None), "B": ("<p>", "</div>")}


class TestInduceTemplate:
    def test_fixture_a_template(self, a_bundle, a_roi):
        t = induce_template(a_bundle, a_roi)
        assert t.signature.sigma_upper == 3
        assert t.signature.sigma_lower == 5
        assert t.signature.delta == -2
        assert t.signature.symmetry is Symmetry.LOWER_ASYMMETRIC
        assert t.upper_open_path == ("html", "body", "table", "tr", "td")
        assert t.lower_open_path == ("td", "tr", "table", "body", "html")
        assert [d.label for d in t.delimiters] == ["Title", "Author", "Abstract", "Publication"]
        assert t.history == ()

    def test_unknown_text_propagates(self, a_bundle):
        roi = RoiSpec(roi_text="nothing like this", attributes=())
        with pytest.raises(RoiNotFound):
            induce_template(a_bundle, roi)

    def test_deterministic_apart_from_timestamps(self, a_bundle, a_roi):
        t1 = induce_template(a_bundle, a_roi)
        t2 = induce_template(a_bundle, a_roi)
        strip = lambda t: dataclasses.replace(t, created_at="", updated_at="")
        assert strip(t1) == strip(t2)
        assert t1.id == t2.id  # content-addressed

    def test_closure_each_attribute_re_extracts(self, a_bundle, a_roi):
        t = induce_template(a_bundle, a_roi)
        record = extract(t, a_bundle)
        for (label, text), attr in zip(record.values, a_roi.attributes):
            assert label == attr.label
            assert text == normalize(attr.text)


class TestPersistence:
    def test_save_load_round_trip(self, a_bundle, a_roi, store):
        t = induce_template(a_bundle, a_roi)
        path = save_template(t, store)
        assert path.name == f"{t.id}.json"
        assert load_template(t.id, store) == t

    def test_bytes_stable_after_cycle(self, a_bundle, a_roi, store):
        t = induce_template(a_bundle, a_roi)
        first = template_json_bytes(t)
        save_template(t, store)
        again = template_json_bytes(load_template(t.id, store))
        assert first == again

    def test_canonical_key_order(self, a_bundle, a_roi):
        t = induce_template(a_bundle, a_roi)
        doc = json.loads(template_json_bytes(t))
        assert list(doc) == [
            "id", "source_ref", "roi_spec", "signature", "upper_open_path",
            "lower_open_path", "delimiters", "tag_class_version",
            "created_at", "updated_at", "history",
        ]
        assert list(doc["signature"]) == ["sigma_upper", "sigma_lower", "delta", "symmetry"]

    def test_missing_id(self, store):
        with pytest.raises(TemplateNotFound):
            load_template("missing", store)

    def test_listing_sorted_by_update_stamp(self, a_bundle, a_roi, store, monkeypatch):
        stamps = ["2026-01-03T00:00:00Z", "2026-01-01T00:00:00Z", "2026-01-02T00:00:00Z"]
        ids = []
        for k, stamp in enumerate(stamps):
            monkeypatch.setenv("ROIWRAP_NOW", stamp)
            t = induce_template(a_bundle, a_roi, source_ref=f"page-{k}.html")
            save_template(t, store)
            ids.append((stamp, t.id))
        monkeypatch.delenv("ROIWRAP_NOW")
        assert list_templates(store) == [tid for _, tid in sorted(ids)]

    def test_pinned_clock_gives_identical_bytes(self, a_bundle, a_roi, store, monkeypatch):
        monkeypatch.setenv("ROIWRAP_NOW", "2026-08-08T00:00:00Z")
        t1 = induce_template(a_bundle, a_roi)
        t2 = induce_template(a_bundle, a_roi)
        assert template_json_bytes(t1) == template_json_bytes(t2)
