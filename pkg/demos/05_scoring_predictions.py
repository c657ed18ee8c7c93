"""Tolerance scoring: how accuracy responds to calibrated prediction error."""

import tempfile
from pathlib import Path

import numpy as np

from matseq import datasets as ds, evaluation as ev
from matseq.serialize import matrix_to_tokens, tokens_to_matrix

tmp = Path(tempfile.mkdtemp(prefix="matseq_demo_"))
task = ds.default_task("eigenvalues")
data = tmp / "data.jsonl"
ds.write_dataset(task, 300, global_seed=3, path=data)
records = list(ds.iter_records(data))
layout = task.layout_out

rng = np.random.default_rng(0)
for label, scale in (("exact targets", 0.0), ("1% noise", 0.01), ("4% noise", 0.04)):
    preds = []
    for rec in records:
        target = tokens_to_matrix(rec["output_tokens"], layout)
        noisy = target * (1.0 + rng.normal(0.0, scale, target.shape))
        preds.append(matrix_to_tokens(noisy, layout))
    pred_path = tmp / "pred.txt"
    ev.write_predictions(preds, pred_path)
    report = ev.score_file(data, pred_path, [0.005, 0.01, 0.02, 0.05],
                           ("l1", "l2", "linf"))
    print(f"\n=== predictions: {label} ===")
    print(report.to_text())

print("\nnotes: the l2 norm here is the sum of squares, so relative errors are")
print("roughly squared, which is why its accuracy column saturates first.")
