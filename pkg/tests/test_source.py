import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from blondie.bitcoin import BitcoinBlock, read_raw
from blondie.ethereum import EthereumBlock
from blondie.fabric import FabricBlock
from blondie.source import (
    REPLAY_ENV,
    FetchError,
    FixtureDecodeError,
    HTTPStatusError,
    ReplayMissError,
    decode_payload,
    fetch_block,
    load_fixture,
    load_templates,
    replay_filename,
    resource_path,
)
from helpers import fixture, raw_fixture

GENESIS_HASH = "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f"


def test_load_bitcoin_fixture():
    loaded = load_fixture(fixture("btc_genesis.hex"), "bitcoin", height=0)
    assert len(loaded) == 1
    assert isinstance(loaded[0].record, BitcoinBlock)
    assert loaded[0].source.endswith("btc_genesis.hex")
    assert loaded[0].record.block_hash_hex == GENESIS_HASH


def test_load_ethereum_fixture_pair():
    loaded = load_fixture(fixture("eth_blocks.json"), "ethereum")
    assert [type(s.record) for s in loaded] == [EthereumBlock, EthereumBlock]
    assert [s.index for s in loaded] == [0, 1]


def test_load_fabric_fixture():
    loaded = load_fixture(fixture("fab_chain.json"), "fabric")
    assert len(loaded) == 3 and all(isinstance(s.record, FabricBlock) for s in loaded)


def test_format_mismatch_names_file():
    with pytest.raises(FixtureDecodeError) as info:
        load_fixture(fixture("btc_genesis.hex"), "ethereum")
    assert "btc_genesis.hex" in str(info.value)
    assert info.value.path.endswith("btc_genesis.hex")
    with pytest.raises(FixtureDecodeError):
        load_fixture(fixture("eth_blocks.json"), "bitcoin", height=0)


def test_bitcoin_needs_height_or_mempool():
    with pytest.raises(FixtureDecodeError):
        load_fixture(fixture("btc_genesis.hex"), "bitcoin")
    loaded = load_fixture(fixture("btc_mempool_tx.hex"), "bitcoin", mempool=True)
    assert len(loaded) == 1


def test_unknown_chain_and_missing_file(tmp_path):
    with pytest.raises(ValueError):
        load_fixture(fixture("btc_genesis.hex"), "dogecoin")
    with pytest.raises(OSError):
        load_fixture(tmp_path / "absent.hex", "bitcoin", height=0)


def test_multiline_hex_gets_consecutive_heights(tmp_path):
    path = tmp_path / "two.hex"
    path.write_text(fixture("btc_genesis.hex").read_text().strip() + "\n" + fixture("btc_block1.hex").read_text().strip() + "\n")
    blocks = [s.record for s in load_fixture(path, "bitcoin", height=0)]
    assert [blk.height for blk in blocks] == [0, 1]
    assert blocks[1].header.hash_prev_block[::-1].hex() == GENESIS_HASH


def test_raw_binary_payload():
    raw = raw_fixture("btc_genesis.hex")
    [block] = decode_payload(raw, "bitcoin", height=0)
    assert block.block_hash_hex == GENESIS_HASH
    assert read_raw(raw) == raw


def test_resource_paths_and_templates(tmp_path):
    assert resource_path("bitcoin", GENESIS_HASH) == f"/block/{GENESIS_HASH}/raw"
    assert resource_path("ethereum", 46147) == "/eth/block/46147"
    assert resource_path("fabric", 3) == "/fab/block/3"
    assert resource_path("ethereum", 5, {"ethereum": "/api/v2/blocks/{ref}"}) == "/api/v2/blocks/5"
    assert resource_path("fabric", "a/b") == "/fab/block/a%2Fb"
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"bitcoin": "/rawblock/{ref}"}))
    assert load_templates(cfg) == {"bitcoin": "/rawblock/{ref}"}
    cfg.write_text("[1, 2]")
    with pytest.raises(ValueError):
        load_templates(cfg)
    with pytest.raises(ValueError):
        resource_path("dogecoin", 1)


def _record(replay_dir, path, body):
    replay_dir.mkdir(parents=True, exist_ok=True)
    (replay_dir / replay_filename(path)).write_bytes(body)


def test_replay_hit_is_byte_exact(tmp_path):
    body = raw_fixture("btc_genesis.hex")
    _record(tmp_path, f"/block/{GENESIS_HASH}/raw", body)
    got = fetch_block("http://unused.invalid", "bitcoin", GENESIS_HASH, replay_dir=tmp_path)
    assert got == body
    [block] = decode_payload(got, "bitcoin", height=0)
    assert block.block_hash_hex == GENESIS_HASH


def test_replay_miss(tmp_path):
    with pytest.raises(ReplayMissError) as info:
        fetch_block("http://unused.invalid", "ethereum", 99, replay_dir=tmp_path)
    assert info.value.path == "/eth/block/99"


def test_replay_dir_from_environment(tmp_path, monkeypatch):
    _record(tmp_path, "/fab/block/0", b"[]")
    monkeypatch.setenv(REPLAY_ENV, str(tmp_path))
    assert fetch_block("http://unused.invalid", "fabric", 0) == b"[]"
    with pytest.raises(ReplayMissError):
        fetch_block("http://unused.invalid", "fabric", 1)


class _Handler(BaseHTTPRequestHandler):
    routes: dict = {}

    def do_GET(self):
        body = self.routes.get(self.path)
        if body is None:
            self.send_response(404)
            self.end_headers()
            return
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    httpd = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def test_live_fetch_and_record(server, tmp_path, monkeypatch):
    monkeypatch.delenv(REPLAY_ENV, raising=False)
    body = raw_fixture("btc_block1.hex")
    block1_hash = "00000000839a8e6886ab5951d76f411475428afc90947ee320161bbf18eb6048"
    _Handler.routes = {f"/block/{block1_hash}/raw": body}
    got = fetch_block(server + "/", "bitcoin", block1_hash, record_dir=tmp_path / "rec")
    assert got == body
    [block] = decode_payload(got, "bitcoin", height=1)
    assert block.block_hash_hex == block1_hash
    # the recording replays without the server
    assert fetch_block("http://unused.invalid", "bitcoin", block1_hash, replay_dir=tmp_path / "rec") == body


def test_live_http_error(server, monkeypatch):
    monkeypatch.delenv(REPLAY_ENV, raising=False)
    _Handler.routes = {}
    with pytest.raises(HTTPStatusError) as info:
        fetch_block(server, "ethereum", 5)
    assert info.value.status == 404


def test_transport_errors(monkeypatch):
    monkeypatch.delenv(REPLAY_ENV, raising=False)
    with pytest.raises(FetchError):
        fetch_block("ftp://example.org", "ethereum", 5)
    # nothing listens on port 9 of localhost
    with pytest.raises(FetchError):
        fetch_block("http://127.0.0.1:9", "ethereum", 5, timeout=2)
