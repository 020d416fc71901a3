import pytest

from modelexport.embeddings import EmbeddingExportError, export_embeddings


def write_source(path, words, dim=4):
    with open(path, "w") as f:
        f.write("%d %d\n" % (len(words), dim))
        for k, word in enumerate(words):
            f.write(word + " " + " ".join("%.8f" % ((k + 1) * 0.137 * (j + 1)) for j in range(dim)) + "\n")
    return path


class TestExportEmbeddings:
    def test_full_overlap(self, tmp_path):
        words = ["w%02d" % k for k in range(10)]
        source = write_source(tmp_path / "src.txt", words)
        out = tmp_path / "out.txt"
        count = export_embeddings(source, words, out)
        assert count == 10
        lines = out.read_text().splitlines()
        assert lines[0] == "10 4"
        assert len(lines) == 11

    def test_partial_filter(self, tmp_path):
        source = write_source(tmp_path / "src.txt", ["alpha", "beta", "gamma"])
        out = tmp_path / "out.txt"
        assert export_embeddings(source, ["beta"], out) == 1
        assert out.read_text().splitlines()[1].startswith("beta ")

    def test_zero_overlap_rejected(self, tmp_path):
        source = write_source(tmp_path / "src.txt", ["alpha", "beta"])
        with pytest.raises(EmbeddingExportError, match="no overlap"):
            export_embeddings(source, ["missing"], tmp_path / "out.txt")

    def test_empty_vocab_rejected(self, tmp_path):
        source = write_source(tmp_path / "src.txt", ["alpha"])
        with pytest.raises(EmbeddingExportError, match="empty"):
            export_embeddings(source, [], tmp_path / "out.txt")

    def test_dimension_mismatch_names_line(self, tmp_path):
        path = tmp_path / "src.txt"
        path.write_text("alpha 1 2 3\nbeta 1 2\n")
        with pytest.raises(EmbeddingExportError, match="line 2"):
            export_embeddings(path, ["alpha"], tmp_path / "out.txt")

    def test_round_trip_preserves_vectors(self, tmp_path):
        words = ["one", "two", "three"]
        source = write_source(tmp_path / "src.txt", words, dim=5)
        out = tmp_path / "out.txt"
        export_embeddings(source, words, out)

        def parse(path):
            table = {}
            with open(path) as f:
                for lineno, line in enumerate(f):
                    parts = line.split()
                    if lineno == 0:
                        continue
                    table[parts[0]] = [float(x) for x in parts[1:]]
            return table

        original, exported = parse(source), parse(out)
        assert set(original) == set(exported)
        for word in original:
            for a, b in zip(original[word], exported[word]):
                assert abs(a - b) <= 1e-5  # 6-decimal formatting contract
