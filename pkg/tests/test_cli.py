import json

import pytest

from cascata.cli import run

SMALL = """\
n_users = 300
edge_prob = 0.02
reciprocity_target = 0.4
n_windows = 12
window_width = 3600
tweet_rate = 0.08
reply_prob = 0.15
with_text = true
"""


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    cfg = root / "small.toml"
    cfg.write_text(SMALL)
    out = root / "out"
    assert run(["synth", "--synth-config", str(cfg), "--out", str(out), "--seed", "3"]) == 0
    return out


def test_synth_outputs(synth_dir):
    for name in ("corpus.jsonl", "edges.tsv", "truth.tsv", "sentiment_lexicon.tsv", "category_lexicon.tsv",
                 "manifest.json"):
        assert (synth_dir / name).is_file()
    manifest = json.loads((synth_dir / "manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["subcommand"] == "synth"
    assert "corpus.jsonl" in manifest["outputs"]


def test_subcommand_chain(synth_dir, tmp_path):
    corpus, edges = str(synth_dir / "corpus.jsonl"), str(synth_dir / "edges.tsv")
    ann = tmp_path / "ann"
    assert run(["annotate", "--corpus", corpus, "--sentiment-lexicon", str(synth_dir / "sentiment_lexicon.tsv"),
                "--category-lexicon", str(synth_dir / "category_lexicon.tsv"), "--out", str(ann)]) == 0
    means = json.loads((ann / "means.json").read_text())
    assert 0 <= means["mu_p"] <= 1 and means["n_tweets"] > 0

    cas = tmp_path / "cas"
    assert run(["cascades", "--corpus", str(ann / "annotated.jsonl"), "--edges", edges, "--window", "3600",
                "--out", str(cas)]) == 0
    header = (cas / "cascades.tsv").read_text().splitlines()[0].split("\t")
    assert header[:5] == ["cascade_id", "seed_tweet", "n_tweets", "n_sp", "n_c"]
    truth = (synth_dir / "truth.tsv").read_text().splitlines()[1:]
    members = (cas / "cascade_members.tsv").read_text().splitlines()[1:]
    assert len(truth) == len(members)

    cls = tmp_path / "cls"
    assert run(["classify", "--corpus", str(ann / "annotated.jsonl"), "--members",
                str(cas / "cascade_members.tsv"), "--cascades", str(cas / "cascades.tsv"), "--out", str(cls)]) == 0
    rows = (cls / "label_summary.tsv").read_text().splitlines()[1:]
    assert sum(int(r.split("\t")[1]) for r in rows) == len((cas / "cascades.tsv").read_text().splitlines()) - 1

    fit = tmp_path / "fit"
    assert run(["fit", "--column", "n_sp", "--in", str(cls / "cascades_labeled.tsv"), "--out", str(fit)]) == 0
    report = json.loads((fit / "fit_n_sp.json").read_text())
    assert {"alpha", "xmin", "sigma", "ntail", "D", "R", "p_R"} <= set(report) or "error" in report
    assert (fit / "ccdf_n_sp.tsv").is_file()

    cmp_ = tmp_path / "cmp"
    assert run(["compare", "--column", "n_c", "--group-by", "sentiment", "--in",
                str(cls / "cascades_labeled.tsv"), "--weighted", "--n-perm", "100", "--out", str(cmp_)]) == 0
    lines = (cmp_ / "ks_n_c_sentiment.tsv").read_text().splitlines()
    assert lines[0] == "group_a\tgroup_b\tn_a\tn_b\tD\tp\tweighted"

    usr = tmp_path / "usr"
    assert run(["userlevel", "--corpus", str(ann / "annotated.jsonl"), "--edges", edges,
                "--timeline-corpus", str(ann / "annotated.jsonl"), "--n-shuffles", "100", "--out", str(usr)]) == 0
    for name in ("features.tsv", "regressions.tsv", "regressions.json", "neighborhood.tsv",
                 "features_timeline.tsv", "neighborhood_timeline.tsv"):
        assert (usr / name).is_file()


def test_cascades_match_truth(synth_dir, tmp_path):
    assert run(["cascades", "--corpus", str(synth_dir / "corpus.jsonl"), "--edges", str(synth_dir / "edges.tsv"),
                "--window", "3600", "--origin", "1303689600", "--out", str(tmp_path)]) == 0

    def groups(path):
        out = {}
        for line in path.read_text().splitlines()[1:]:
            t, c = line.split("\t")[:2]
            out.setdefault(c, set()).add(t)
        return {frozenset(g) for g in out.values()}

    assert groups(tmp_path / "cascade_members.tsv") == groups(synth_dir / "truth.tsv")


def test_usage_errors_exit_1(tmp_path, capsys):
    assert run([]) == 1
    assert run(["cascades", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert run(["cascades", "--out", str(tmp_path)]) == 1  # missing required inputs
    assert run(["frobnicate"]) == 1
    cfg = tmp_path / "c.toml"
    cfg.write_text("unknown_key = 1\n")
    assert run(["fit", "--config", str(cfg)]) == 1


def test_data_errors_exit_2(tmp_path):
    assert run(["cascades", "--corpus", str(tmp_path / "nope.jsonl"), "--edges", str(tmp_path / "e.tsv"),
                "--out", str(tmp_path / "o")]) == 2
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    edges = tmp_path / "e.tsv"
    edges.write_text("a\tb\n")
    assert run(["cascades", "--corpus", str(empty), "--edges", str(edges), "--out", str(tmp_path / "o")]) == 2


def test_help_and_version(capsys):
    assert run(["--version"]) == 0
    assert "cascata" in capsys.readouterr().out
    assert run(["fit", "--help"]) == 0


def test_config_file_and_flag_precedence(synth_dir, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(f'corpus = "{synth_dir / "corpus.jsonl"}"\nedges = "{synth_dir / "edges.tsv"}"\nwindow = 60\n')
    out = tmp_path / "o"
    assert run(["cascades", "--config", str(cfg), "--window", "3600", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["window"] == 3600
    assert manifest["inputs"]["corpus"]["sha256"]


def test_seed_from_environment(monkeypatch, tmp_path):
    cfg = tmp_path / "s.toml"
    cfg.write_text("n_users = 20\nedge_prob = 0.2\nn_windows = 3\ntweet_rate = 0.5\n")
    monkeypatch.setenv("CASCATA_SEED", "41")
    assert run(["synth", "--synth-config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seed"] == 41
    monkeypatch.setenv("CASCATA_SEED", "x")
    assert run(["synth", "--synth-config", str(cfg), "--out", str(tmp_path / "b")]) == 1


def test_pipeline_small_is_deterministic(tmp_path):
    cfg = tmp_path / "p.toml"
    cfg.write_text(SMALL)
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert run(["pipeline", "--synth-config", str(cfg), "--n-perm", "100", "--n-shuffles", "100",
                    "--seed", "5", "--out", str(out)]) == 0
        outs.append(json.loads((out / "manifest.json").read_text()))
    assert outs[0]["outputs"] == outs[1]["outputs"]
    assert outs[0]["config"] == outs[1]["config"]
    assert outs[0]["config"]["window"] == 3600
