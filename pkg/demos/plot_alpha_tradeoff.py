"""
Betweenness against link counts on Wine
=======================================

Sweeps the mixing weight alpha between the betweenness term (alpha = 1)
and the link-count term (alpha = 0). Features are min-max scaled because
Wine's attributes span several orders of magnitude.
"""
from pathlib import Path

from bcnet.evaluation import ExperimentConfig, evaluate, summary_table

csv = Path(__file__).resolve().parent.parent / "data" / "uci" / "wine.csv"
alphas = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]

cfg = ExperimentConfig("wine", {"csv": str(csv)}, {"k": [8], "e": [0.5], "b": [5], "alpha": alphas},
                       repeats=2, cv_on_train_split=True, scale=True)
report = evaluate(cfg)
print(summary_table([report]))

best = report.best
print(f"\nbest alpha {best.alpha:g} at {report.accuracy:.2f}%")
