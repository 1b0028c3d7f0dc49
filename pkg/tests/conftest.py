"""Shared fixtures: aligned trilingual datasets, HTML corpus, source store."""

from __future__ import annotations

import random

import pytest

from polyqa.datamodel import (Article, GroundTruthAnswer, LanguageTag,
                              Paragraph, QaDataset, QaItem)


def make_item(item_id: str, context: str, question: str, answer: str,
              language: LanguageTag) -> QaItem:
    """QaItem whose answer offset is computed from the context itself."""
    start = context.index(answer)
    return QaItem(
        id=item_id,
        question=question,
        answers=(GroundTruthAnswer(text=answer, answer_start=start),),
        language=language,
    )


def make_dataset(code: str, articles: list[tuple[str, list[tuple[str, list]]]],
                 ) -> QaDataset:
    """Build a dataset from (title, [(context, [(id, question, answer)])])."""
    language = LanguageTag(code)
    built = []
    for title, paragraphs in articles:
        built_paragraphs = []
        for context, qas in paragraphs:
            items = tuple(make_item(qid, context, question, answer, language)
                          for qid, question, answer in qas)
            built_paragraphs.append(Paragraph(context=context, qas=items))
        built.append(Article(title=title, paragraphs=tuple(built_paragraphs)))
    return QaDataset(version="1.1", articles=tuple(built), language=language)


EN_HQ = ("The company headquarters are located in Lyon. More than 3000 "
         "employees work for the company in France. The cafeteria opens "
         "at noon every weekday.")
EN_CONTRACT = ("Every work contract starts with a trial period. The trial "
               "period lasts three months for engineers. Holiday requests "
               "must be filed two weeks in advance.")

FR_HQ = ("Le siège de l'entreprise se situe à Lyon. En France, c'est plus "
         "de 3000 collaborateurs qui travaillent pour l'entreprise. La "
         "cafétéria ouvre à midi chaque jour ouvré.")
FR_CONTRACT = ("Chaque contrat de travail commence par une période d'essai. "
               "La période d'essai dure trois mois pour les ingénieurs. Les "
               "demandes de congés doivent être déposées deux semaines à "
               "l'avance.")

JA_HQ = ("会社の本社はリヨンにあります。フランスでは三千人以上の社員がこの会社で働いています。"
         "社員食堂は平日の正午に開きます。")
JA_CONTRACT = ("すべての雇用契約は試用期間から始まります。エンジニアの試用期間は三か月です。"
               "休暇の申請は二週間前までに提出しなければなりません。")


@pytest.fixture(scope="session")
def en_dataset() -> QaDataset:
    return make_dataset("en", [
        ("Company facts", [
            (EN_HQ, [
                ("q1", "Where are the company headquarters located?", "Lyon"),
                ("q2", "How many employees work for the company in France?",
                 "More than 3000"),
                ("q3", "When does the cafeteria open?", "noon"),
            ]),
        ]),
        ("Work contracts", [
            (EN_CONTRACT, [
                ("q4", "How does a work contract start?",
                 "with a trial period"),
                ("q5", "How long is the trial period for engineers?",
                 "three months"),
                ("q6", "How far in advance must holiday requests be filed?",
                 "two weeks"),
            ]),
        ]),
        ("English only", [
            ("This page exists only in the English corpus.", [
                ("q-en-only", "Which corpus holds this page?", "English"),
            ]),
        ]),
    ])


@pytest.fixture(scope="session")
def fr_dataset() -> QaDataset:
    return make_dataset("fr", [
        ("Faits sur l'entreprise", [
            (FR_HQ, [
                ("q1", "Où se situe le siège de l'entreprise ?", "Lyon"),
                ("q2", "Combien de collaborateurs l'entreprise compte-t-elle "
                 "en France ?", "plus de 3000"),
                ("q3", "À quelle heure ouvre la cafétéria ?", "midi"),
            ]),
        ]),
        ("Contrats de travail", [
            (FR_CONTRACT, [
                ("q4", "Comment commence un contrat de travail ?",
                 "par une période d'essai"),
                ("q5", "Combien de temps dure la période d'essai des "
                 "ingénieurs ?", "trois mois"),
                ("q6", "Avec quel préavis faut-il déposer les demandes de "
                 "congés ?", "deux semaines"),
            ]),
        ]),
    ])


@pytest.fixture(scope="session")
def ja_dataset() -> QaDataset:
    return make_dataset("ja", [
        ("会社について", [
            (JA_HQ, [
                ("q1", "会社の本社はどこにありますか。", "リヨン"),
                ("q2", "フランスでは何人の社員が働いていますか。", "三千人以上"),
                ("q3", "社員食堂はいつ開きますか。", "正午"),
            ]),
        ]),
        ("雇用契約", [
            (JA_CONTRACT, [
                ("q4", "雇用契約はどのように始まりますか。", "試用期間から"),
                ("q5", "エンジニアの試用期間はどのくらいですか。", "三か月"),
                ("q6", "休暇の申請はいつまでに提出しますか。", "二週間前"),
            ]),
        ]),
    ])


@pytest.fixture(scope="session")
def trilingual(en_dataset, fr_dataset, ja_dataset):
    return {"en": en_dataset, "fr": fr_dataset, "ja": ja_dataset}


_HTML_WORDS = ("alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
               "golf", "hotel", "india", "juliet", "kilo", "lima")


def make_html_page(seed: int) -> str:
    """Deterministic messy HTML page: boilerplate, entities, nesting."""
    rng = random.Random(seed)
    paragraphs = []
    for _ in range(rng.randint(2, 6)):
        words = [rng.choice(_HTML_WORDS) for _ in range(rng.randint(4, 12))]
        if rng.random() < 0.5:
            words[rng.randrange(len(words))] = "caf&eacute;"
        body = " ".join(words)
        if rng.random() < 0.4:
            body = body.replace(" ", "  ", 2)
        paragraphs.append(f"<p>{body} <b>bold&nbsp;bit</b></p>")
    nav = "<nav><ul><li>Home</li><li>About</li></ul></nav>"
    script = "<script>var hidden = 'should never appear';</script>"
    style = "<style>p { color: red; }</style>"
    return (
        "<html><head><title>Fixture page "
        f"{seed}</title>{style}</head><body>{nav}{script}"
        + "".join(paragraphs)
        + "<div>trailing &amp; entity <i>text</i></div></body></html>"
    )


@pytest.fixture(scope="session")
def html_corpus():
    return [make_html_page(seed) for seed in range(20)]


HR_PAGES = {
    "sites": (
        "<html><head><title>Sites</title></head><body>"
        "<h1>Office locations</h1>"
        "<p>The main office is in Lyon. A second office operates in "
        "Paris near the central station.</p></body></html>"
    ),
    "staffing": (
        "<html><head><title>Staffing</title><script>track();</script></head>"
        "<body><p>Workforce figures: more than 3000 employees work for the "
        "company in France. Recruitment continues in every region.</p>"
        "</body></html>"
    ),
    "contracts": (
        "<html><head><title>Contracts</title></head><body>"
        "<nav>menu</nav><p>Every work contract starts with a trial period "
        "of three months. Holiday requests must be filed two weeks in "
        "advance through the portal.</p></body></html>"
    ),
}


@pytest.fixture()
def hr_store(tmp_path):
    """File-scheme three-source knowledge store, already refreshed."""
    from polyqa.ingestion import SourceConfig, SourceStore, refresh_store

    pages_dir = tmp_path / "pages"
    pages_dir.mkdir()
    configs = []
    for name, html in sorted(HR_PAGES.items()):
        page = pages_dir / f"{name}.html"
        page.write_text(html, "utf-8")
        configs.append(SourceConfig(id=name, url=page.as_uri()))
    store = SourceStore(tmp_path / "store")
    report = refresh_store(store, configs)
    assert all(r.status == "updated" for r in report)
    return store, configs
