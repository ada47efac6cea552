import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from wagstaff_bls.cyclotomic import phi_at_2
from wagstaff_bls.errors import DbParseError, DbUnavailable
from wagstaff_bls.factordb import DbStatus, FactorDbClient, parse_response
from wagstaff_bls.factoring import BudgetSpec, Provenance, SourceSet, factor_fully

M71 = 2 ** 71 - 1
M67 = 2 ** 67 - 1


class _Server:
    """A local stand-in for the database API; records every query it serves."""

    def __init__(self, responses):
        self.responses = responses
        self.queries = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                q = parse_qs(urlparse(self.path).query).get("query", [""])[0]
                outer.queries.append(q)
                status, body = outer.responses.get(q, (404, "not found"))
                data = body.encode()
                self.send_response(status)
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.httpd = HTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.httpd.server_port}/api"
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()


def _body(status, factors):
    return json.dumps({"id": "x", "status": status, "factors": [[str(f), e] for f, e in factors]})


def test_parse_response_fields():
    r = parse_response(M71, _body("FF", [(228479, 1), (48544121, 1), (212885833, 1)]))
    assert r.status is DbStatus.FULLY_FACTORED
    assert r.factors == [(228479, 1), (48544121, 1), (212885833, 1)]
    assert parse_response(7, '{"status": "P", "factors": [[7, 1]]}').status is DbStatus.PRIME


@pytest.mark.parametrize("body", ["<html>", "[]", '{"factors": []}', '{"status": "ZZ"}',
                                  '{"status": "FF", "factors": {}}',
                                  '{"status": "FF", "factors": [["12x", 1]]}',
                                  '{"status": "FF", "factors": [[5]]}',
                                  '{"status": "FF", "factors": [[0, 1]]}',
                                  '{"status": "FF", "factors": [[true, 1]]}'])
def test_parse_errors(body):
    with pytest.raises(DbParseError):
        parse_response(10, body)


def test_parse_error_is_a_kind_of_unavailable():
    assert issubclass(DbParseError, DbUnavailable)


def test_live_query_then_cache(tmp_path):
    body = _body("FF", [(228479, 1), (48544121, 1), (212885833, 1)])
    with _Server({str(M71): (200, body)}) as srv:
        client = FactorDbClient(srv.url, tmp_path, min_interval=0)
        first = client.lookup(M71)
        second = client.lookup(M71)
    assert srv.queries == [str(M71)]
    assert not first.from_cache and second.from_cache
    assert first.factors == second.factors
    cached = (tmp_path / str(M71)).read_text()
    meta, body_again = cached.split("\n", 1)
    assert meta.startswith("# {") and body_again == body


def test_cache_is_byte_identical_on_reuse(tmp_path):
    body = _body("CF", [(193707721, 1)])
    with _Server({str(M67): (200, body)}) as srv:
        FactorDbClient(srv.url, tmp_path, min_interval=0).lookup(M67)
    before = (tmp_path / str(M67)).read_bytes()
    FactorDbClient("http://127.0.0.1:9/none", tmp_path, offline=True).lookup(M67)
    assert (tmp_path / str(M67)).read_bytes() == before


def test_garbage_is_never_cached(tmp_path):
    with _Server({str(M71): (200, "<html>busy</html>")}) as srv:
        client = FactorDbClient(srv.url, tmp_path, min_interval=0)
        with pytest.raises(DbParseError):
            client.lookup(M71)
    assert not (tmp_path / str(M71)).exists()


def test_http_error_is_unavailable(tmp_path):
    with _Server({}) as srv:
        with pytest.raises(DbUnavailable):
            FactorDbClient(srv.url, tmp_path, min_interval=0).lookup(M71)


def test_unreachable_server_is_unavailable(tmp_path):
    client = FactorDbClient("http://127.0.0.1:9/api", tmp_path, timeout=2)
    with pytest.raises(DbUnavailable):
        client.lookup(M71)


def test_offline_without_cache(tmp_path):
    with pytest.raises(DbUnavailable, match="offline"):
        FactorDbClient(cache_dir=tmp_path, offline=True).lookup(12345)


def test_long_numbers_get_hashed_names(tmp_path):
    client = FactorDbClient(cache_dir=tmp_path)
    assert client.cache_path(M71).name == str(M71)
    big = client.cache_path(10 ** 250)
    assert big.name.startswith("sha256-") and len(big.name) == 7 + 64


def test_environment_configuration(monkeypatch, tmp_path):
    monkeypatch.setenv("WAGSTAFF_FACTORDB_URL", "http://example.invalid/api")
    monkeypatch.setenv("WAGSTAFF_FACTORDB_CACHE", str(tmp_path))
    c = FactorDbClient()
    assert c.base_url == "http://example.invalid/api" and c.cache_dir == tmp_path


def test_rate_limit_spaces_live_queries(tmp_path):
    import time
    body = _body("P", [(7, 1)])
    with _Server({"7": (200, body), "11": (200, body)}) as srv:
        client = FactorDbClient(srv.url, None, min_interval=0.3)
        t = time.monotonic()
        client.lookup(7)
        client.lookup(11)
        assert time.monotonic() - t >= 0.3


def test_recorded_fixture_feeds_the_pipeline(fixtures):
    client = FactorDbClient(cache_dir=fixtures / "factordb_cache", offline=True)
    tiny = BudgetSpec(trial_candidates=1, rho_iterations=10, pm1_b1=2)
    fz = factor_fully(M71, 71, tiny, SourceSet(factordb=client))
    assert fz.complete
    assert fz.as_dict() == {228479: 1, 48544121: 1, 212885833: 1}
    assert {f.provenance for f in fz.factors} == {Provenance.EXTERNAL_DB}


def test_non_dividing_claim_is_discarded(fixtures, caplog):
    # the recorded answer for 2^67 - 1 falsely lists 3
    client = FactorDbClient(cache_dir=fixtures / "factordb_cache", offline=True)
    fz = factor_fully(M67, 67, sources=SourceSet(factordb=client))
    assert 3 not in fz.as_dict()
    assert fz.as_dict() == {193707721: 1, 761838257287: 1}
    assert "does not divide" in caplog.text


def test_composite_claimed_as_factor_is_split_locally(tmp_path):
    n = phi_at_2(71)
    body = _body("CF", [(228479 * 48544121, 1)])
    with _Server({str(n): (200, body)}) as srv:
        client = FactorDbClient(srv.url, tmp_path, min_interval=0)
        fz = factor_fully(n, 71, BudgetSpec(trial_candidates=1), SourceSet(factordb=client))
    assert fz.as_dict() == {228479: 1, 48544121: 1, 212885833: 1}


def test_unavailable_database_degrades_to_local(tmp_path):
    client = FactorDbClient("http://127.0.0.1:9/api", tmp_path, timeout=2)
    fz = factor_fully(M67, 67, sources=SourceSet(factordb=client))
    assert fz.as_dict() == {193707721: 1, 761838257287: 1}
    assert Provenance.EXTERNAL_DB not in {f.provenance for f in fz.factors}


def test_empty_cache_offline_is_pure_local(tmp_path):
    client = FactorDbClient(cache_dir=tmp_path, offline=True)
    fz = factor_fully(phi_at_2(63), 63, sources=SourceSet(factordb=client))
    assert fz.complete
