import csv
import io

import numpy as np
import pytest

from scanorder.cli import main
from scanorder.curves import scale_order, universal_order
from scanorder.io.curvefile import read_curve
from scanorder.io.idx import write_idx
from scanorder.io.pgm import read_pgm
from scanorder.order import validate_order


@pytest.fixture
def data(tmp_path, monkeypatch):
    rng = np.random.default_rng(0)
    imgs = np.zeros((12, 8, 8), np.uint8)
    imgs[:, 2:6, 1:7] = rng.integers(50, 256, (12, 4, 6))
    labels = np.arange(12, dtype=np.uint8) % 3
    root = tmp_path / "data" / "toy"
    write_idx(root / "t10k-images-idx3-ubyte.gz", imgs)
    write_idx(root / "t10k-labels-idx1-ubyte.gz", labels)
    const = np.full((4, 32, 32), 200, np.uint8)
    write_idx(tmp_path / "const-images-idx3-ubyte", const)
    monkeypatch.setenv("SCANORDER_DATA", str(tmp_path / "data"))
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_curve_hilbert_32(data):
    assert main(["curve", "--kind", "hilbert", "--size", "32", "--out", "h.txt"]) == 0
    cf = read_curve(data / "h.txt")
    assert len(cf.order) == 1024
    assert cf.order == universal_order("hilbert", 32)


@pytest.mark.parametrize("kind", ["dafner", "mean-dafner", "annealed", "serpentine"])
def test_curve_kinds_from_data(data, kind):
    args = ["curve", "--kind", kind, "--dataset", "toy", "--out", f"{kind}.txt", "--steps", "50"]
    if kind == "serpentine":
        args += ["--size", "8"]
    assert main(args) == 0
    cf = read_curve(data / f"{kind}.txt")
    assert cf.kind == kind
    validate_order(cf.order)


def test_metrics_constant_images_closed_form(data, capsys):
    main(["curve", "--kind", "hilbert", "--size", "32", "--out", "h.txt"])
    rc = main(
        ["metrics", "--images", "const-images-idx3-ubyte", "--curve", "raster", "serpentine", "h.txt", "--lag", "1-3,6"]
    )
    assert rc == 0
    rows = _csv(capsys.readouterr().out)
    assert len(rows) == 3 * 4
    for row in rows:
        k = int(row["lag"])
        assert float(row["rho"]) == pytest.approx(1 - k / 1024, abs=1e-6)


def test_compress_and_bench(data, capsys):
    main(["curve", "--kind", "serpentine", "--size", "8", "--out", "s.txt"])
    capsys.readouterr()
    assert main(["compress", "--dataset", "toy", "--curve", "s.txt"]) == 0
    out = capsys.readouterr()
    rows = _csv(out.out)
    assert len(rows) == 12 and all(int(r["lzw_bytes"]) > 0 for r in rows)
    assert "mean LZW length" in out.err
    assert (
        main(
            [
                "bench",
                "--dataset",
                "toy",
                "--class",
                "1",
                "--orders",
                "raster",
                "dafner",
                "s.txt",
                "--threads",
                "2",
                "--out",
                "b.csv",
            ]
        )
        == 0
    )
    rows = _csv((data / "b.csv").read_text())
    assert [r["order"] for r in rows] == ["raster", "dafner", "s"]
    assert all(r["images"] == "4" for r in rows)


def test_scale(data):
    main(["curve", "--kind", "hilbert", "--size", "4", "--out", "h4.txt"])
    assert main(["scale", "--curve", "h4.txt", "--times", "2", "--out", "h16.txt"]) == 0
    cf = read_curve(data / "h16.txt")
    assert cf.order.size.height == 16
    assert cf.order == scale_order(scale_order(universal_order("hilbert", 4)))


def test_render(data):
    main(["curve", "--kind", "dafner", "--dataset", "toy", "--index", "2", "--out", "d.txt"])
    assert main(["render", "--dataset", "toy", "--curve", "d.txt", "--index", "2", "--out", "o.svg"]) == 0
    assert (data / "o.svg").read_text().startswith("<svg")
    assert main(["render", "--dataset", "toy", "--curve", "d.txt", "--index", "2", "--strip", "--out", "o.pgm"]) == 0
    assert read_pgm(data / "o.pgm").shape == (1, 64)


def test_train_writes_checkpoint_history_and_curve(data):
    rc = main(
        [
            "train", "--dataset", "toy", "--iterations", "3", "--batch-size", "4", "--eval-every", "1",
            "--width", "4", "--res-blocks", "1", "--gnn-blocks", "2", "--out", "run", "--seed", "3",
        ]
    )  # fmt: skip
    assert rc == 0
    hist = _csv((data / "run" / "history.csv").read_text())
    assert [int(r["iteration"]) for r in hist] == [1, 2, 3]
    assert (data / "run" / "checkpoint.bin").stat().st_size > 0
    validate_order(read_curve(data / "run" / "curve.txt").order)
    assert (
        main(
            ["curve", "--kind", "generated", "--checkpoint", "run/checkpoint.bin", "--dataset", "toy", "--out", "g.txt"]
        )
        == 0
    )


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["curve", "--kind", "hilbert"],
        ["curve", "--kind", "nope", "--out", "x"],
        ["metrics", "--curve", "raster"],
        ["bench", "--dataset", "toy", "--lag", "zero"],
        ["bench", "--dataset", "toy", "--objective", "mse"],
    ],
)
def test_usage_errors_exit_1(data, argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err.strip()


def test_unknown_subcommand_prints_usage(data, capsys):
    assert main(["frobnicate"]) == 1
    assert "usage:" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["metrics", "--images", "missing.idx", "--curve", "raster"],
        ["metrics", "--dataset", "nothere", "--curve", "raster"],
        ["curve", "--kind", "hilbert", "--size", "12", "--out", "x.txt"],
        ["scale", "--curve", "missing.txt", "--out", "y.txt"],
    ],
)
def test_data_errors_exit_2(data, argv):
    assert main(argv) == 2


def test_bad_curve_file_exit_2(data):
    (data / "bad.txt").write_text("scanorder-curve 1\nheight 2\nwidth 2\nkind sfc\norder\n0 3 1 2\n")
    assert main(["compress", "--dataset", "toy", "--curve", "bad.txt"]) == 2
