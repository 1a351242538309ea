"""
Moons and circles
=================

Repeated 10-fold cross-validation on the four synthetic sets, with and
without noise. Three repeats keep the run short; the full protocol lives in
``manifests/toy.toml``.
"""
from bcnet.evaluation import ExperimentConfig, evaluate, summary_table

settings = [
    ("moons 0.00", {"generator": "moons", "n": 100, "noise": 0.0}, (5, 0.5, 5, 1.0)),
    ("moons 0.25", {"generator": "moons", "n": 100, "noise": 0.25}, (8, 0.0, 10, 1.0)),
    ("circles 0.00", {"generator": "circles", "n": 100, "noise": 0.0}, (1, 0.5, 1, 1.0)),
    ("circles 0.25", {"generator": "circles", "n": 100, "noise": 0.25}, (5, 0.5, 1, 1.0)),
]

reports = []
for name, source, (k, e, b, alpha) in settings:
    cfg = ExperimentConfig(name, source, {"k": k, "e": e, "b": b, "alpha": alpha}, repeats=3)
    reports.append(evaluate(cfg))

print(summary_table(reports))

# the same folds scored by link counts alone (alpha = 0) for comparison
links_only = [evaluate(ExperimentConfig(name + " links", source, {"k": k, "e": e, "b": b, "alpha": 0.0},
                                        repeats=3))
              for name, source, (k, e, b, _) in settings]
print()
print(summary_table(links_only))
