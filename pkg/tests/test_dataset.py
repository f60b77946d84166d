import hashlib
import json

import numpy as np
import pytest
from PIL import Image

from illusionkit.dataset import (
    MANIFEST_NAME, Charset, DatasetSpec, SampleRecord, build_dataset, category_counts,
    derive_seed, format_counts, import_semantic, read_charset, read_manifest, write_manifest,
)
from illusionkit.errors import DataError, MissingTruth, UnreadableImage
from illusionkit.imaging import read_png


def _spec(font_path, **kw):
    kw.setdefault("charsets", [Charset.load("digits")])
    kw.setdefault("backgrounds", ("vg",))
    kw.setdefault("canvas", (128, 128))
    return DatasetSpec(font=str(font_path), **kw)


def test_builtin_charsets():
    assert read_charset("digits") == list("0123456789")
    letters = read_charset("letters")
    assert len(letters) == 52 and len(set(letters)) == 52
    chinese = read_charset("chinese")
    assert len(chinese) == 170 and len(set(chinese)) == 170


def test_charset_file_with_comments(tmp_path):
    p = tmp_path / "words.txt"
    p.write_text("# words\nhello\tnote\n\nworld\n", encoding="utf-8")
    assert Charset.load(p, "word").entries == ["hello", "world"]
    with pytest.raises(DataError):
        Charset.load(p)


def test_digits_vg_large_cardinality(tmp_path, font_path):
    records, manifest = build_dataset(_spec(font_path), tmp_path, seed=1)
    assert len(records) == 20
    assert sorted(r.background for r in records).count("origin") == 10
    assert len(list((tmp_path / "images").glob("*.png"))) == 20
    assert manifest == tmp_path / MANIFEST_NAME
    assert read_manifest(manifest) == records
    for r in records:
        img = read_png(tmp_path / r.image_path)
        assert img.shape == (128, 128)
        assert r.scale == "Large"
    ill = next(r for r in records if r.background == "vg")
    assert ill.gen_params["origin_id"] == ill.id.replace("-vg", "-origin")
    assert ill.gen_params["p_c"] == {"stripe_width": 12}


def test_build_deterministic(tmp_path, font_path):
    spec = _spec(font_path, backgrounds=("gn", "hd"), scales=("Medium",))

    def digest(d):
        build_dataset(spec, d, seed=5)
        files = sorted(d.rglob("*.png")) + [d / MANIFEST_NAME]
        return [hashlib.sha256(f.read_bytes()).hexdigest() for f in files]

    assert digest(tmp_path / "a") == digest(tmp_path / "b")
    spec.workers = 4
    assert digest(tmp_path / "c") == digest(tmp_path / "a")


def test_seed_changes_noise(tmp_path, font_path):
    spec = _spec(font_path, backgrounds=("gn",), charsets=[Charset("digit", ["3"])])
    a, _ = build_dataset(spec, tmp_path / "a", seed=1)
    b, _ = build_dataset(spec, tmp_path / "b", seed=2)
    assert a[1].seed != b[1].seed
    assert (tmp_path / "a" / a[1].image_path).read_bytes() != (tmp_path / "b" / b[1].image_path).read_bytes()


def test_derive_seed_range():
    s = derive_seed(0, "digit-000-L-vg")
    assert 0 <= s < 2**63 and s == derive_seed(0, "digit-000-L-vg") != derive_seed(1, "digit-000-L-vg")


def test_failure_cleans_up(tmp_path, font_path):
    spec = _spec(font_path, charsets=[Charset("chinese", ["中"])])
    with pytest.raises(Exception):
        build_dataset(spec, tmp_path, seed=0)
    assert not list(tmp_path.rglob("*.png"))
    assert not (tmp_path / MANIFEST_NAME).exists()


def test_generate_rejects_semantic_background(tmp_path, font_path):
    with pytest.raises(DataError):
        build_dataset(_spec(font_path, backgrounds=("semantic_import",)), tmp_path)


def test_manifest_roundtrip_unicode(tmp_path):
    recs = [SampleRecord("c-1", "我", "chinese", "origin", "Small", 0, {"a": [1, 2]}, "images/c.png")]
    path = write_manifest(tmp_path / "m.jsonl", recs)
    assert "我" in path.read_text(encoding="utf-8")
    assert read_manifest(path) == recs


def test_manifest_rejects_duplicates_and_bad_rows(tmp_path):
    r = SampleRecord("x", "1", "digit", "vg", "Large", 0, {}, "i.png")
    with pytest.raises(DataError):
        write_manifest(tmp_path / "m.jsonl", [r, r])
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"id": "x", "truth": "1", "hidden_type": "emoji", "background": "vg",
                               "scale": "Large", "seed": 0, "image_path": "i.png"}) + "\n")
    with pytest.raises(DataError):
        read_manifest(bad)


def _semantic_dir(tmp_path, n=5, truths=None):
    d = tmp_path / "sem"
    d.mkdir()
    for i in range(n):
        Image.fromarray(np.full((16, 16, 3), i * 40, np.uint8)).save(d / f"img{i}.png")
    t = tmp_path / "truths.tsv"
    rows = truths if truths is not None else [f"img{i}.png\tword{i}\tword\tMedium\tTC" for i in range(n)]
    t.write_text("filename\ttruth\thidden_type\tscale\ttheme\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return d, t


def test_import_semantic(tmp_path):
    d, t = _semantic_dir(tmp_path)
    recs = import_semantic(d, t)
    assert len(recs) == 5
    assert recs[0].id == "semantic-img0" and recs[0].truth == "word0"
    assert recs[0].background == "semantic_import" and recs[0].scale == "Medium"
    assert recs[0].image_path == "img0.png"
    for r in recs:
        assert SampleRecord.from_dict(json.loads(r.to_json())) == r
    assert category_counts(recs) == {("Medium", "TC"): 5}


def test_import_semantic_missing_truth(tmp_path):
    d, t = _semantic_dir(tmp_path, truths=["img0.png\ta"])
    with pytest.raises(MissingTruth):
        import_semantic(d, t)


def test_import_semantic_unreadable(tmp_path):
    d, t = _semantic_dir(tmp_path, n=1)
    (d / "junk.png").write_bytes(b"not a png")
    t.write_text(t.read_text() + "junk.png\tjunk\n")
    with pytest.raises(UnreadableImage):
        import_semantic(d, t)


def test_category_table(tmp_path, font_path):
    records, _ = build_dataset(_spec(font_path, charsets=[Charset("digit", ["1", "2"])],
                                     backgrounds=("vg", "mn")), tmp_path, seed=0)
    counts = category_counts(records)
    assert counts == {("Large", "Origin"): 2, ("Large", "VG"): 2, ("Large", "MN"): 2}
    header = format_counts(records).splitlines()[0].split()
    assert header == ["Origin", "TC", "CC", "WV", "VG", "GN", "HD", "LN", "MN"]
