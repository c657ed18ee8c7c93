"""Dataset generation: oracle consistency, determinism, noise, joint mixing."""

import json

import numpy as np
import pytest

from matseq import codec, datasets as ds, ensembles as ens, linalg, serialize
from matseq.datasets import MatrixTask, default_task, make_example
from matseq.ensembles import DimSpec, EnsembleSpec, IidUniform, square_dims
from matseq.errors import ResampleExhaustedError


def decode(tokens, layout):
    return serialize.tokens_to_matrix(tokens, layout)


def test_transpose_is_exact_permutation():
    task = default_task("transpose", scheme_in=codec.P10, scheme_out=codec.P10)
    rec = make_example(task, 0, 100)
    inp = decode(rec.input_tokens, task.layout_in)
    out = decode(rec.output_tokens, task.layout_out)
    assert np.array_equal(inp.T, out)


def test_add_concatenates_operands():
    rec = make_example(default_task("add"), 2, 100)
    assert (rec.rows, rec.cols) == (5, 10)
    left, right = np.split(rec.clean_input, 2, axis=1)
    assert np.allclose(rec.target_exact, left + right)


def test_matvec_and_matmul_use_transposed_left_operand():
    rec = make_example(default_task("matvec"), 1, 7)
    m = rec.clean_input[:, :-1]
    v = rec.clean_input[:, -1:]
    assert np.allclose(rec.target_exact, m.T @ v)
    assert rec.target_exact.shape == (5, 1)

    rec2 = make_example(default_task("matmul"), 1, 7)
    a, b = np.split(rec2.clean_input, 2, axis=1)
    assert np.allclose(rec2.target_exact, a.T @ b)


def test_eigen_targets():
    rec = make_example(default_task("eigenvalues"), 4, 9)
    values = linalg.sym_eigen(rec.clean_input).values
    assert np.allclose(rec.target_exact.ravel(), values)
    assert np.all(np.diff(rec.target_exact.ravel()) <= 0)

    rec2 = make_example(default_task("eigenvectors"), 4, 9)
    assert rec2.target_matrix.shape == (6, 5)
    d = np.diag(rec2.target_exact[0])
    h = rec2.target_exact[1:]
    assert np.abs(h @ rec2.clean_input @ h.T - d).sum() <= 1e-9 * np.abs(d).sum()


def test_svd_and_singular_targets():
    rec = make_example(default_task("singular_values"), 0, 3)
    assert np.allclose(rec.target_exact.ravel(),
                       linalg.singular_values(rec.clean_input))
    rec2 = make_example(default_task("svd"), 0, 3)
    assert rec2.target_matrix.shape == (9, 4)


def test_invert_target():
    rec = make_example(default_task("invert"), 0, 11)
    assert np.abs(rec.target_exact @ rec.clean_input - np.eye(5)).max() <= 1e-10


def test_oracle_consistency_decoded_records():
    # recomputing the oracle on the decoded input reproduces the decoded target
    for name in ds.TASK_NAMES:
        task = default_task(name)
        rec = make_example(task, 3, 77)
        inp = decode(rec.input_tokens, task.layout_in)
        out = decode(rec.output_tokens, task.layout_out)
        if name == "transpose":
            assert np.array_equal(out, inp.T)
        elif name == "add":
            a, b = np.split(inp, 2, axis=1)
            assert np.abs(out - serialize.round_matrix(a + b)).max() <= \
                1.5e-3 * np.abs(out).max()
        elif name == "eigenvalues":
            vals = linalg.sym_eigen(inp).values.reshape(-1, 1)
            assert np.abs(out - vals).max() <= 2e-3 * np.abs(vals).max()


def test_determinism_and_parallel_identity(tmp_path):
    task = default_task("eigenvalues")
    p1, p2, p3 = (tmp_path / f"d{i}.jsonl" for i in range(3))
    ds.write_dataset(task, 40, 5, p1)
    ds.write_dataset(task, 40, 5, p2)
    ds.write_dataset(task, 40, 5, p3, workers=4)
    assert p1.read_bytes() == p2.read_bytes() == p3.read_bytes()
    m1 = ds.manifest_path(p1).read_text()
    m3 = ds.manifest_path(p3).read_text()
    assert m1 == m3


def test_records_self_describing(tmp_path):
    task = default_task("add", scheme_in=codec.B1999)
    path = tmp_path / "add.jsonl"
    ds.write_dataset(task, 3, 0, path)
    recs = list(ds.iter_records(path))
    assert len(recs) == 3
    for i, rec in enumerate(recs):
        assert rec["task"] == "add" and rec["index"] == i
        assert rec["m"] == 5 and rec["n"] == 10
        assert len(rec["clean_input"]) == 50
    manifest = ds.read_manifest(path)
    assert manifest["format"] == ds.DATASET_FORMAT
    assert manifest["tasks"][0]["scheme_in"]["name"] == "B1999"
    assert len(manifest["vocab_in_sha256"]) == 64


def test_count_zero(tmp_path):
    path = tmp_path / "empty.jsonl"
    ds.write_dataset(default_task("transpose"), 0, 0, path)
    assert path.read_text() == ""
    assert ds.read_manifest(path)["count"] == 0


def test_no_values_flag(tmp_path):
    path = tmp_path / "lean.jsonl"
    ds.write_dataset(default_task("transpose"), 2, 0, path, include_values=False)
    rec = json.loads(path.read_text().splitlines()[0])
    assert "clean_input" not in rec and "target" not in rec


def test_noise_target_comes_from_clean_input():
    noisy_task = default_task("add", noise_level=0.02)
    clean_task = default_task("add")
    nrec = make_example(noisy_task, 6, 123)
    crec = make_example(clean_task, 6, 123)
    # same clean operands, so same target...
    assert np.array_equal(nrec.clean_input, crec.clean_input)
    assert np.array_equal(nrec.target_matrix, crec.target_matrix)
    # ...but perturbed serialised input
    assert nrec.input_tokens != crec.input_tokens
    left, right = np.split(nrec.input_matrix, 2, axis=1)
    assert not np.allclose(left + right, nrec.target_exact, atol=1e-12)


def test_noise_on_target_flag():
    task = default_task("add", noise_level=0.02, noise_on_target=True)
    rec = make_example(task, 6, 123)
    left, right = np.split(rec.input_matrix, 2, axis=1)
    # now the target is the sum of the rounded noisy operands
    assert np.abs(rec.target_exact - (left + right)).max() <= \
        1.5e-3 * np.abs(rec.target_exact).max()


def test_noise_keeps_symmetric_inputs_symmetric():
    task = default_task("eigenvalues", noise_level=0.05)
    rec = make_example(task, 0, 50)
    assert np.array_equal(rec.input_matrix, rec.input_matrix.T)
    loose = MatrixTask("eigenvalues", task.input_spec, noise_level=0.05,
                       mirror_noise=False)
    rec2 = make_example(loose, 0, 50)
    assert not np.array_equal(rec2.input_matrix, rec2.input_matrix.T)


def test_prefix_token_placement():
    task = default_task("transpose", task_prefix="Transpose")
    rec = make_example(task, 0, 1)
    assert rec.input_tokens[0] == "Transpose" and rec.output_tokens[0] == "Transpose"


def test_joint_dataset(tmp_path):
    tasks = ds.joint_goal("TAD")
    path = tmp_path / "joint.jsonl"
    ds.make_joint_dataset(tasks, 300, 17, path)
    recs = list(ds.iter_records(path))
    counts = {}
    for rec in recs:
        counts[rec["input_tokens"][0]] = counts.get(rec["input_tokens"][0], 0) + 1
        assert rec["input_tokens"][0] == rec["output_tokens"][0]
    assert set(counts) == {"Transpose", "Add", "Dot"}
    n = len(recs)
    se = np.sqrt((1 / 3) * (2 / 3) / n)
    for c in counts.values():
        assert abs(c / n - 1 / 3) <= 3.5 * se


def test_joint_validation(tmp_path):
    t1 = default_task("transpose", task_prefix="X")
    t2 = default_task("add", task_prefix="X")
    with pytest.raises(ValueError, match="duplicate"):
        ds.make_joint_dataset([t1, t2], 1, 0, tmp_path / "x.jsonl")
    t3 = default_task("add")
    with pytest.raises(ValueError, match="prefix"):
        ds.make_joint_dataset([t1, t3], 1, 0, tmp_path / "x.jsonl")
    t4 = default_task("add", scheme_in=codec.P10, task_prefix="Y")
    with pytest.raises(ValueError, match="scheme"):
        ds.make_joint_dataset([t1, t4], 1, 0, tmp_path / "x.jsonl")


def test_joint_goal_letters():
    tasks = ds.joint_goal("TADMEFI")
    assert [t.name for t in tasks] == [
        "transpose", "add", "matvec", "matmul", "eigenvalues", "eigenvectors", "invert"]
    with pytest.raises(ValueError):
        ds.joint_goal("TAZ")


def test_required_max_dim():
    assert ds.required_max_dim(default_task("add")) == 10
    assert ds.required_max_dim(default_task("transpose")) == 5
    assert ds.required_max_dim(default_task("eigenvectors")) == 6
    assert ds.required_max_dim(default_task("svd")) == 9
    assert ds.required_max_dim(default_task("matvec")) == 6
    wide = default_task("add", dims=DimSpec((5, 15), (5, 15)), symmetric=False)
    assert ds.required_max_dim(wide) == 30


def test_max_condition_filter_and_exhaustion():
    spec = EnsembleSpec(IidUniform(10.0), square_dims(5))
    ok = MatrixTask("invert", spec, max_condition=200.0)
    rec = make_example(ok, 0, 4)
    assert linalg.condition_number(rec.clean_input) <= 200.0
    hopeless = MatrixTask("invert", spec, max_condition=1.0001, max_retries=5)
    with pytest.raises(ResampleExhaustedError):
        make_example(hopeless, 0, 4)


def test_max_tokens_cap():
    task = default_task("transpose", dims=DimSpec((2, 10), (2, 10)), symmetric=False,
                        scheme_in=codec.P10, scheme_out=codec.P10, max_tokens=150)
    for i in range(20):
        rec = make_example(task, i, 8)
        assert len(rec.input_tokens) <= 150 and len(rec.output_tokens) <= 150


def test_variable_dims_examples():
    task = default_task("eigenvalues", dims=(5, 8))
    sizes = {make_example(task, i, 2).rows for i in range(30)}
    assert sizes == {5, 6, 7, 8}


def test_ood_suite_grid():
    suite = ds.ood_suite(123)
    assert len(suite.train_specs) == 7
    assert len(suite.test_specs) == 11
    base = suite.train_specs["wigner_baseline"]
    assert isinstance(base.kind, IidUniform) and base.kind.amplitude == 10.0
    assert base.symmetric and base.dims.rows == 5
    assert np.isclose(suite.sigma_train, 5.7735026919)
    assert {name.split("_")[0] for name in suite.test_specs} == {
        "wigner", "positive", "uniform", "gaussian", "laplace"}
    # deterministic seeds per split name
    assert suite.seed_for("laplace") == suite.seed_for("laplace")
    assert suite.seed_for("wigner_baseline") != suite.seed_for("wigner_1.2")


def test_task_validation():
    with pytest.raises(ValueError):
        MatrixTask("eigenvalues", EnsembleSpec(IidUniform(1.0), square_dims(5)))
    with pytest.raises(ValueError):
        default_task("frobnicate")
    with pytest.raises(ValueError):
        MatrixTask("add", EnsembleSpec(ens.SpectralResample("positive"),
                                       square_dims(5), True), noise_level=0.1)
