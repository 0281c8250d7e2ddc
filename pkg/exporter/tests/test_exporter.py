"""Exporter tests, including the EMB1 round-trip acceptance check.

The real pretrained model needs a network download, so most tests inject a
deterministic stand-in encoder; the one test that loads the actual model is
skipped when the download is unavailable.
"""

import hashlib

import numpy as np
import pytest

from embed_exporter import (
    DEFAULT_MODEL,
    ExportJob,
    SchemaError,
    export_embeddings,
    read_titles,
)
from embed_exporter.cli import EXIT_INPUT, EXIT_OK, main
from newsimpact.corpus import load_headlines
from newsimpact.embed import load_embeddings

DIM = 24


def dummy_encoder(batch):
    """Deterministic per-title vectors; unnormalized so --normalize matters."""
    rows = []
    for title in batch:
        digest = hashlib.blake2b(title.encode("utf-8"), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        rows.append(rng.normal(size=DIM) * 3.0)
    return np.array(rows)


def write_news(path, rows):
    path.write_text("date,title\n" + "".join(f"{d},{t}\n" for d, t in rows))
    return path


@pytest.fixture
def ten_headline_csv(tmp_path):
    rows = [(f"2024-03-{i + 1:02d}", f"headline number {i} about topic {i % 3}")
            for i in range(10)]
    return write_news(tmp_path / "news.csv", rows)


class TestReadTitles:
    def test_reads_in_order(self, ten_headline_csv):
        titles = read_titles(ten_headline_csv)
        assert len(titles) == 10
        assert titles[0] == "headline number 0 about topic 0"

    def test_empty_titles_skipped_ids_match_ingest(self, tmp_path):
        rows = [("2024-01-02", "alpha"), ("2024-01-03", "   "),
                ("2024-01-04", "beta")]
        path = write_news(tmp_path / "n.csv", rows)
        titles = read_titles(path)
        kept = load_headlines(path)
        assert titles == [h.title for h in kept]
        assert [h.id for h in kept] == [0, 1]

    def test_missing_title_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("date,headline\n2024-01-02,x\n")
        with pytest.raises(SchemaError, match="title"):
            read_titles(path)

    def test_bad_date(self, tmp_path):
        path = write_news(tmp_path / "n.csv", [("02/01/2024", "alpha")])
        with pytest.raises(SchemaError, match="unparsable date"):
            read_titles(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            read_titles(tmp_path / "absent.csv")


class TestExport:
    def test_batching_covers_all_rows(self, ten_headline_csv, tmp_path):
        seen = []

        def spy(batch):
            seen.append(len(batch))
            return dummy_encoder(batch)

        job = ExportJob(ten_headline_csv, tmp_path / "e.emb1", batch_size=4)
        n = export_embeddings(job, encoder=spy)
        assert n == 10
        assert seen == [4, 4, 2]

    def test_unnormalized_preserves_values(self, ten_headline_csv, tmp_path):
        out = tmp_path / "raw.emb1"
        job = ExportJob(ten_headline_csv, out, normalize=False)
        export_embeddings(job, encoder=dummy_encoder)
        matrix = load_embeddings(out)
        expect = dummy_encoder(read_titles(ten_headline_csv)).astype(np.float32)
        assert not matrix.normalized
        assert np.array_equal(matrix.data, expect.astype(np.float64))

    def test_deterministic_ids_and_dims(self, ten_headline_csv, tmp_path):
        outputs = []
        for name in ("a.emb1", "b.emb1"):
            job = ExportJob(ten_headline_csv, tmp_path / name)
            export_embeddings(job, encoder=dummy_encoder)
            outputs.append((tmp_path / name).read_bytes())
        assert outputs[0] == outputs[1]

    def test_invalid_batch_size(self, ten_headline_csv, tmp_path):
        with pytest.raises(ValueError):
            ExportJob(ten_headline_csv, tmp_path / "e.emb1", batch_size=0)

    def test_all_rows_empty(self, tmp_path):
        path = write_news(tmp_path / "n.csv", [("2024-01-02", "  ")])
        with pytest.raises(SchemaError, match="no non-empty headlines"):
            export_embeddings(ExportJob(path, tmp_path / "e.emb1"),
                              encoder=dummy_encoder)

    def test_encoder_shape_mismatch(self, ten_headline_csv, tmp_path):
        with pytest.raises(ValueError, match="shape"):
            export_embeddings(
                ExportJob(ten_headline_csv, tmp_path / "e.emb1"),
                encoder=lambda batch: np.zeros((len(batch) + 1, 4)),
            )


class TestCli:
    def test_missing_input_exit_2(self, tmp_path, capsys):
        code = main(["--input", str(tmp_path / "absent.csv"),
                     "--output", str(tmp_path / "e.emb1")])
        assert code == EXIT_INPUT
        assert "absent.csv" in capsys.readouterr().err


def test_criterion_12_round_trip(ten_headline_csv, tmp_path):
    out = tmp_path / "round.emb1"
    job = ExportJob(ten_headline_csv, out, normalize=True)
    export_embeddings(job, encoder=dummy_encoder)
    matrix = load_embeddings(out)
    ids_ok = matrix.ids == [str(i) for i in range(10)]
    norms = np.linalg.norm(matrix.data, axis=1)
    nonzero = norms > 0.0
    norms_ok = bool(np.all(np.abs(norms[nonzero] - 1.0) <= 1e-3))
    ok = matrix.n == 10 and ids_ok and norms_ok
    line = (f"[{'PASS' if ok else 'FAIL'}] criterion 12: n={matrix.n}, ids in order, "
            f"max |norm-1| = {np.abs(norms[nonzero] - 1.0).max():.2e}")
    print(line)
    assert ok, line


def test_real_model_if_available(ten_headline_csv, tmp_path):
    try:
        from sentence_transformers import SentenceTransformer

        model = SentenceTransformer(DEFAULT_MODEL)
    except Exception as exc:
        pytest.skip(f"pretrained model unavailable: {exc}")
    out = tmp_path / "real.emb1"
    job = ExportJob(ten_headline_csv, out)

    def encode(batch):
        return np.asarray(model.encode(list(batch), show_progress_bar=False))

    export_embeddings(job, encoder=encode)
    matrix = load_embeddings(out)
    assert matrix.n == 10
    assert np.abs(np.linalg.norm(matrix.data, axis=1) - 1.0).max() <= 1e-3
