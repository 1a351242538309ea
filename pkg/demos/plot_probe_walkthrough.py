"""
Classifying one flower, step by step
====================================

Builds the per-class networks on Iris, drops one held-out flower into them
and prints every intermediate quantity used to decide its class.
"""
from pathlib import Path

import numpy as np

from bcnet.classifier import score
from bcnet.data import SplitSpec, load_csv, stratified_split
from bcnet.graph import HyperParams, build_network

DATA = Path(__file__).resolve().parent.parent / "data" / "uci" / "iris.csv"

iris = load_csv(DATA)
train, test = stratified_split(iris, SplitSpec(0.75, seed=0))
model = build_network(train, HyperParams(k=5, e=0.5, b=5, alpha=1.0))

for comp in model.components:
    print(f"{comp.class_id:16s} {len(comp.nodes):3d} nodes {len(comp.edges):4d} edges")

# look for a flower whose five nearest neighbours are split 4/1/0 across classes
for x, truth in zip(test.X, test.labels):
    s = score(model, x)
    if sorted(s.T) == [0, 1, 4]:
        break

print("\nprobe", x, "true class", truth)
print("radius used:", s.probe.used_radius)
for c, name in enumerate(model.classes):
    nb = s.probe.differences[c]
    print(f"{name:16s} links {s.T[c]}  smallest |dB| {np.round(nb[:5], 4)}  W {s.W[c]:.4f}")

# W = 1 marks a class the probe has no link into
print("\nW^n", np.round(s.W_norm, 4))
print("T^n", np.round(s.T_norm, 4))
print("H  ", np.round(s.H, 4))
print("decided:", s.decided)
