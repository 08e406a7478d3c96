import json
import logging
from collections import Counter

import pytest

from builddiff.changedb import NULL_COMMIT, read_changedb
from builddiff.miner import GitRepo, NotARepository, mine, mine_to_file
from repogen import build_fifty, pom


@pytest.fixture(scope="module")
def fifty(tmp_path_factory):
    return build_fifty(tmp_path_factory.mktemp("hist") / "repo")


def test_summary_arithmetic(fifty, tmp_path):
    summary = mine_to_file(fifty.repo.path, tmp_path / "db.jsonl")
    records = read_changedb(tmp_path / "db.jsonl")
    assert summary.commits_total == 50
    assert summary.merges_skipped == 1
    assert summary.malformed_files == 1
    assert summary.commits_with_build_change + summary.commits_without == 49
    assert summary.commits_with_build_change == len({r.commit for r in records})
    assert summary.changes_total == len(records)
    assert Counter(r.commit for r in records) == Counter(fifty.expected_changes)
    assert summary.bcc_ratio == pytest.approx(summary.commits_with_build_change / 50)
    written = json.loads((tmp_path / "summary.json").read_text())
    assert written == summary.to_dict()


def test_merge_and_malformed_not_recorded(fifty):
    records = []
    mine(fifty.repo.path, sink=records.append)
    commits = {r.commit for r in records}
    assert fifty.merge not in commits
    assert fifty.malformed_commit not in commits
    assert all(r.file_path.endswith("pom.xml") for r in records)


def test_malformed_logged_once(fifty, caplog):
    with caplog.at_level(logging.WARNING, logger="builddiff.miner"):
        mine(fifty.repo.path)
    hits = [r for r in caplog.records if "broken/pom.xml" in r.getMessage()]
    assert len(hits) == 1
    assert fifty.malformed_commit in hits[0].getMessage()


def test_deterministic_and_worker_independent(fifty, tmp_path):
    outs = []
    for i, workers in enumerate((1, 1, 4)):
        out = tmp_path / f"db{i}.jsonl"
        mine_to_file(fifty.repo.path, out, workers=workers)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert outs[0]


def test_records_in_topological_order(fifty):
    records = []
    mine(fifty.repo.path, sink=records.append)
    with GitRepo(fifty.repo.path) as repo:
        order = {c.sha: i for i, c in enumerate(repo.commits())}
    positions = [order[r.commit] for r in records]
    assert positions == sorted(positions)


def test_include_initial(make_repo):
    repo = make_repo()
    repo.write("pom.xml", pom("1.0"))
    repo.write("sub/pom.xml", pom("1.0", artifact="sub"))
    root = repo.commit("init")
    repo.write("pom.xml", pom("1.1"))
    repo.commit("bump")
    records = []
    summary = mine(repo.path, sink=records.append, include_initial=True)
    initial = [r for r in records if r.initial]
    assert [(r.commit, r.parent, r.change_type, r.file_path) for r in initial] == [
        (root, NULL_COMMIT, "PROJECT_INSERT", "pom.xml"),
        (root, NULL_COMMIT, "PROJECT_INSERT", "sub/pom.xml"),
    ]
    assert summary.commits_with_build_change == 2
    plain = []
    mine(repo.path, sink=plain.append)
    assert [r.change_type for r in plain] == ["PROJECT_VERSION_UPDATE"]


def test_added_deleted_and_renamed_poms_ignored(make_repo):
    repo = make_repo()
    repo.write("pom.xml", pom("1.0"))
    repo.commit("init")
    repo.write("new/pom.xml", pom("1.0", artifact="new"))
    repo.commit("add module")
    (repo.path / "new" / "pom.xml").rename(repo.path / "pom-copy.xml")
    repo.commit("move module pom away")
    repo.write("other.xml", "<project/>")
    repo.write("tools/custom-pom.xml", pom("9"))
    repo.commit("non-pom xml")
    summary = mine(repo.path)
    assert summary.changes_total == 0
    assert summary.commits_without == 4


def test_timestamps(make_repo):
    repo = make_repo()
    repo.write("pom.xml", pom("1.0"))
    repo.commit("init", when=1_600_000_000)
    repo.write("pom.xml", pom("1.1"))
    repo.clock = 1_600_086_400
    repo.git("add", "-A")
    repo.git("commit", "-q", "-m", "bump", "--date", "1600000100 +0000")
    author, committer = [], []
    mine(repo.path, sink=author.append)
    mine(repo.path, sink=committer.append, use_committer_time=True)
    assert author[0].timestamp == 1_600_000_100
    assert committer[0].timestamp == 1_600_086_400


def test_not_a_repository(tmp_path):
    with pytest.raises(NotARepository):
        mine(tmp_path)
    with pytest.raises(NotARepository):
        mine(tmp_path / "missing")


def test_empty_repository(make_repo):
    repo = make_repo()
    summary = mine(repo.path)
    assert summary.commits_total == 0 and summary.changes_total == 0


def test_blob_reader(make_repo):
    repo = make_repo()
    repo.write("pom.xml", pom("1.0"))
    sha = repo.commit("init")
    with GitRepo(repo.path) as git:
        assert git.read_blob(sha, "pom.xml").decode() == pom("1.0")
        with pytest.raises(KeyError):
            git.read_blob(sha, "nope/pom.xml")
        # the batch process survives a miss
        assert git.read_blob(sha, "pom.xml").startswith(b"<project")
