import datetime as dt

import pytest

from floodlens.corpus import Article
from floodlens.synth import SynthConfig, generate


def make_article(
    id="a1",
    source="source-01",
    title="title",
    body="body text",
    published=dt.date(2017, 8, 14),
    url=None,
) -> Article:
    return Article(id=id, source=source, title=title, body=body, published=published, url=url)


@pytest.fixture(scope="session")
def default_bundle(tmp_path_factory):
    """The default-seed synthetic bundle (5,000 articles, 1,380 annotated)."""
    out = tmp_path_factory.mktemp("bundle")
    return generate(SynthConfig(), out)


@pytest.fixture(scope="session")
def small_bundle(tmp_path_factory):
    """A fast bundle for plumbing tests."""
    out = tmp_path_factory.mktemp("small_bundle")
    config = SynthConfig(seed=11, n_articles=700, n_annotated=240, n_annotated_flood=70)
    return generate(config, out)
