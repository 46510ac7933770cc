"""Search for a better curve for one digit class without any learning.

Starting from averaged Dafner weights, simulated annealing nudges single edge
weights and keeps moves that raise lag-6 autocorrelation over the set (or
occasionally lower it, while the temperature is high). The learned curve is
then scored on images it never saw.

    python demos/anneal_a_class.py [digit] [steps]
"""

import sys
from pathlib import Path

import numpy as np

from scanorder import autocorrelation, flatten, sfc_from_weights, universal_order
from scanorder.io import DatasetSpec, find_idx, load_dataset, write_curve
from scanorder.learner import AnnealSchedule, anneal

DATA = Path(__file__).resolve().parents[1] / "data"

digit = int(sys.argv[1]) if len(sys.argv) > 1 else 3
steps = int(sys.argv[2]) if len(sys.argv) > 2 else 3000
images, labels = find_idx("mnist", "test", DATA)
batch = load_dataset(DatasetSpec(str(images), str(labels), pad_to=32, class_filter=digit))
perm = np.random.default_rng(0).permutation(len(batch))
fit, held = batch.images[perm[:200]], batch.images[perm[200:400]]

res = anneal(fit, schedule=AnnealSchedule(steps=steps), seed=0)
print(f"digit {digit}: {steps} steps, {res.accepted} accepted")
print(f"  training energy {res.initial_energy:.4f} -> {res.energy:.4f}")

shape = fit.shape[1:]
for name, order in [
    ("hilbert", universal_order("hilbert", shape)),
    ("mean-dafner", sfc_from_weights(shape, res.initial_weights)),
    ("annealed", sfc_from_weights(shape, res.weights)),
]:
    print(f"  held-out rho6 {name:<12} {autocorrelation(flatten(held, order), 6).mean():.3f}")

write_curve(f"annealed_{digit}.txt", sfc_from_weights(shape, res.weights), {"digit": str(digit), "steps": str(steps)})
