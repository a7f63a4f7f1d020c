import csv
import io
import re
import subprocess
import sys

import pytest

from fannmcu.cli import main
from fannmcu.model import read_network, serialize_dataset, serialize_network
from fannmcu.model.fixtures import APP_A, app_net, xor_dataset, xor_net


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("xor.net", serialize_network(xor_net())),
                       ("xor.data", serialize_dataset(xor_dataset())),
                       ("appA.net", serialize_network(app_net(APP_A)))]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_convert_to_fixed_and_back(files, capsys):
    fixed = str(files["dir"] / "xor_fixed.net")
    code, out, _ = run(["convert", files["xor.net"], "--fixed", "-o", fixed], capsys)
    assert code == 0 and "decimal point:" in out
    assert open(fixed).readline().strip() == "FANN_FIX_2.0"
    assert read_network(fixed).is_fixed
    code, _, err = run(["convert", fixed, "-o", str(files["dir"] / "again.net")], capsys)
    assert code == 3 and "already fixed point" in err
    back = str(files["dir"] / "back.net")
    assert run(["convert", fixed, "--float", "-o", back], capsys)[0] == 0
    assert not read_network(back).is_fixed


def test_convert_rejects_sparse(files, capsys):
    sparse = files["dir"] / "sparse.net"
    sparse.write_text(serialize_network(xor_net()).replace("connection_rate=1.000000",
                                                           "connection_rate=0.500000"))
    code, _, err = run(["convert", str(sparse), "-o", str(files["dir"] / "o.net")], capsys)
    assert code == 3 and "NotFullyConnected" in err


def test_codegen_app_a_cluster(files, capsys):
    outdir = files["dir"] / "gen"
    code, out, _ = run(["codegen", files["appA.net"], "--platform", "pulp-cluster", "--dtype", "fixed",
                        "-o", str(outdir)], capsys)
    assert code == 0
    assert "strategy: neuron-wise DMA" in out
    assert sorted(p.name for p in outdir.iterdir()) == ["fann_shim.h", "network.c", "network.h"]


def test_codegen_float_on_m0_fails(files, capsys):
    code, _, err = run(["codegen", files["xor.net"], "--platform", "cortex-m0", "--dtype", "float",
                        "-o", str(files["dir"] / "g")], capsys)
    assert code == 3 and "FlavorMismatch" in err


def test_codegen_generic_flavor_and_harness(files, capsys):
    code, out, _ = run(["codegen", files["xor.net"], "--platform", "generic", "--data", files["xor.data"],
                        "--name", "xor", "-o", str(files["dir"] / "g")], capsys)
    assert code == 0 and "flavor: GenericC" in out
    assert (files["dir"] / "g" / "xor_test.c").exists()


def test_codegen_custom_target_file(files, capsys):
    tf = files["dir"] / "board.target"
    tf.write_text("name=board\nfamily=CortexM\nfrequency_hz=1e8\ntier ram WorkingRAM 65536\n"
                  "cycles fixed 9\n")
    code, out, _ = run(["codegen", files["xor.net"], "--target-file", str(tf), "-o", str(files["dir"] / "g")],
                       capsys)
    assert code == 0 and "flavor: CortexM" in out


def test_infer_xor(files, capsys):
    code, out, _ = run(["infer", files["xor.net"], files["xor.data"]], capsys)
    assert code == 0 and "accuracy: 1.0000" in out


def test_simulate_app_a_cluster(files, capsys):
    code, out, _ = run(["simulate", files["appA.net"], "--platform", "pulp-cluster", "-n", "1000"], capsys)
    assert code == 0
    ms = float(re.search(r"per inference: \d+ cycles, ([\d.]+) ms", out).group(1))
    assert 0.8 * 0.7 <= ms <= 0.8 * 1.3


def test_simulate_csv(files, capsys):
    code, out, _ = run(["simulate", files["xor.net"], "--platform", "cortex-m4", "--csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["target"] == "cortex-m4"


def test_bench_writes_csv(files, capsys):
    out_csv = files["dir"] / "sweep.csv"
    code, _, _ = run(["bench", "--layers", "1..3", "--targets", "cortex-m4,pulp-cluster",
                      "-o", str(out_csv)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 6 and rows[0]["L"] == "1"
    code, out, _ = run(["bench", "--grid", "8,16x4", "--targets", "pulp-cluster"], capsys)
    assert code == 0 and out.startswith("inputs,outputs")


@pytest.mark.parametrize("argv", [
    ["simulate", "x.net", "--platform", "nope"],
    ["bench", "--targets", "nope"],
    ["bench", "--layers", "a..b"],
    ["bench", "--grid", "8"],
    ["infer", "missing.net", "missing.data"],
])
def test_usage_errors_exit_2(argv, capsys, files):
    argv = [files["xor.net"] if a == "x.net" else a for a in argv]
    assert main(argv) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["convert"])
    assert e.value.code == 2


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "fannmcu", "infer", files["xor.net"], files["xor.data"]],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "accuracy" in r.stdout
