"""End-to-end: the extraction client speaking the wire protocol to this server.

The client package is exercised through its remote-oracle interface
only; transport runs in-process through the ASGI test client, so the
full HTTP protocol (batching, caching, error handling) is covered
without sockets.
"""

import pytest
from fastapi.testclient import TestClient

pactree = pytest.importorskip("pactree")

from pactree import casestudy
from pactree.extraction import ExtractionConfig, trepac
from pactree.evaluation import true_error_enumerate
from pactree.oracles import RemoteOracle

from mlm_oracle_server.app import create_app


@pytest.fixture()
def remote_oracle():
    client = TestClient(create_app())
    return RemoteOracle(
        str(client.base_url), "synthetic-depth3", batch_size=32, backoff=0.0,
        client=client,
    )


def test_remote_oracle_matches_bundled_fixture(remote_oracle):
    fixture = casestudy.bundled_fixture("synthetic-depth3")
    examples = casestudy.enumerate_examples()
    remote_labels = remote_oracle.query_many(examples)
    assert remote_labels == [fixture.query(e) for e in examples]
    # 360 unique examples at batch size 32
    assert remote_oracle.http_requests == 12


def test_extraction_through_the_wire(remote_oracle):
    dist = casestudy.uniform_distribution()
    config = ExtractionConfig(
        size_limit=10,
        k=0,
        training_size=257,
        candidate_splits=tuple(casestudy.candidate_splits()),
        seed=5,
    )
    report = trepac(remote_oracle, config, dist)
    assert report.training_error == 0.0
    target = casestudy.depth3_occupation_target()
    assert true_error_enumerate(report.tree, target, dist) == 0


def test_server_rejections_surface_as_transport_errors():
    from pactree.errors import TransportError

    client = TestClient(create_app())
    oracle = RemoteOracle(
        str(client.base_url), "no-such-model", backoff=0.0, client=client
    )
    with pytest.raises(TransportError):
        oracle.query(casestudy.enumerate_examples()[0])


def test_dump_fixture_round_trips_into_client(tmp_path):
    from mlm_oracle_server.__main__ import dump_fixture

    out = tmp_path / "stereotype.csv"
    assert dump_fixture("synthetic-stereotype", str(out), cache_dir=None) == 0
    from pactree.oracles import FixtureOracle

    restored = FixtureOracle.from_file(out, casestudy.case_study_space())
    bundled = casestudy.bundled_fixture("synthetic-stereotype")
    assert restored.labels == bundled.labels
