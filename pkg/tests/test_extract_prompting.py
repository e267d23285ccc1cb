import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridgen.llm import NoCodeFound, extract_code_block
from hybridgen.prompting import TEMPLATE_NAMES, PromptError, Templates, render


def test_prefers_tagged_block():
    text = "intro\n```\nplain\n```\nthen\n```minioo\nclass A { }\n```\n"
    assert extract_code_block(text, "minioo") == "class A { }\n"
    assert extract_code_block(text) == "plain\n"


def test_falls_back_to_first_block():
    assert extract_code_block("```java\nx\n```", "minioo") == "x\n"


def test_unterminated_fence_runs_to_end():
    assert extract_code_block("sure:\n```minioo\nclass A {\n}\n", "minioo") == "class A {\n}\n"


def test_unfenced_response():
    with pytest.raises(NoCodeFound):
        extract_code_block("I cannot help with that.")
    assert extract_code_block("class A { }", parses=lambda t: t.startswith("class")) == "class A { }"
    with pytest.raises(NoCodeFound):
        extract_code_block("prose", parses=lambda t: False)


@given(st.text(alphabet=st.characters(blacklist_characters="`"), max_size=200))
def test_block_content_survives(body):
    body = body if body.endswith("\n") or not body else body + "\n"
    if any(line.strip().startswith("```") for line in body.splitlines()):
        return
    assert extract_code_block(f"text\n```minioo\n{body}```\nmore", "minioo") == body


def test_render_is_single_pass():
    assert render("a {{x}} b", x="{{y}}") == "a {{y}} b"
    with pytest.raises(PromptError):
        render("{{missing}}")


def test_templates_exist_and_override(tmp_path):
    t = Templates()
    for name in TEMPLATE_NAMES:
        assert t.get(name)
    (tmp_path / "system.txt").write_text("custom system\n")
    assert Templates(tmp_path).get("system") == "custom system"
    assert Templates(tmp_path).get("fix") == t.get("fix")
    with pytest.raises(PromptError):
        t.get("nope")
