"""Learn a curve for a digit class with a weight generator and an evaluator.

The generator maps each image to dual-edge weights; a batch's weights are
averaged into one curve. The evaluator learns to predict how good a curve
is for an image, and the generator follows its gradient. A full run (2000
iterations) takes ten minutes or so on one core; the default here is short.

    python demos/train_generator.py [iterations]
"""

import logging
import sys
from pathlib import Path

import numpy as np

from scanorder import GridSize, autocorrelation, flatten, sfc_from_weights, universal_order
from scanorder.io import DatasetSpec, find_idx, load_dataset
from scanorder.learner import TrainConfig, save_checkpoint, set_weights, train

logging.basicConfig(level=logging.INFO, format="%(message)s")
DATA = Path(__file__).resolve().parents[1] / "data"

iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 300
images, labels = find_idx("mnist", "test", DATA)
batch = load_dataset(DatasetSpec(str(images), str(labels), pad_to=32, class_filter=0))
perm = np.random.default_rng(0).permutation(len(batch))
fit, held = batch.images[perm[:500]], batch.images[perm[500:700]]

res = train(fit, TrainConfig(iterations=iterations), heldout=held)
h = res.history
print(
    f"{res.seconds:.0f}s; evaluator MSE {h.window_mean(50):.2e} (first 50) -> {h.window_mean(iterations):.2e} (last 50)"
)

size = GridSize(32, 32)
learned = sfc_from_weights(size, set_weights(res.generator, held))
for name, order in [("hilbert", universal_order("hilbert", size)), ("generator", learned)]:
    print(f"held-out rho6 {name:<10} {autocorrelation(flatten(held, order), 6).mean():.3f}")
save_checkpoint("generator.bin", res.generator, res.evaluator, extra={"iterations": iterations})
