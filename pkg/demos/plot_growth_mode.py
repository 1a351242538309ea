"""
Growth mode versus stateless prediction
=======================================

In growth mode every classified point stays in the winning class network, so
later decisions see earlier ones. Stateless mode leaves the model untouched.
"""
import numpy as np

from bcnet.classifier import predict_batch
from bcnet.data import SplitSpec, generate_moons, stratified_split
from bcnet.evaluation import accuracy
from bcnet.graph import HyperParams, build_network, structural_hash

moons = generate_moons(200, noise=0.2, seed=3)
train, test = stratified_split(moons, SplitSpec(0.5, seed=1))
params = HyperParams(k=6, e=0.0, b=5, alpha=0.5)

model = build_network(train, params)
before = structural_hash(model)
stateless = predict_batch(model, test.X)
print("stateless accuracy", accuracy(stateless, test.labels), "model unchanged", structural_hash(model) == before)

grown = build_network(train, params)
growth = predict_batch(grown, test.X, mode="growth")
print("growth accuracy   ", accuracy(growth, test.labels), "nodes", grown.n_train, "->", grown.n_nodes)

# the order of arrival matters only in growth mode
rev = build_network(train, params)
backwards = predict_batch(rev, test.X[::-1], mode="growth")[::-1]
print("growth decisions changed by reversing the input:", int(np.sum(np.array(backwards) != np.array(growth))))
