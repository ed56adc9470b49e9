"""
Grey-box vs black-box extremum seeking under shared tuning
==========================================================

The black-box perturbation scheme (integrator gain 0.005) against the
grey-box personalizer on subject B, same seeds, same dither. The
black-box loop stalls under the learning dynamics; the grey-box loop
climbs.
"""

import os

import numpy as np

from synergy_es import ExperimentConfig, compare_traces, run_episode
from synergy_es.harness import make_subject
from synergy_es.svgplot import line_plot

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

seeds = tuple(range(20))
grey = [run_episode(ExperimentConfig(subject="B", algorithm="greybox",
                                     seeds=seeds), s) for s in seeds]
black = [run_episode(ExperimentConfig(subject="B", algorithm="blackbox",
                                      seeds=seeds), s) for s in seeds]

ths = make_subject("B", 0).optimum()
report = compare_traces(grey, black, ths, tol=0.1)
print(f"theta*_B = {ths:.4f}")
print(f"grey-box successes: {report['set_a_success']}/20")
print(f"black-box successes: {report['set_b_success']}/20")

iters = grey[0].column("iteration")
line_plot(os.path.join(OUT, "comparison_theta.svg"),
          [("grey-box seed 0", iters, grey[0].column("theta_hat")),
           ("black-box seed 0", iters, black[0].column("theta_hat"))],
          title="subject B, shared tuning",
          xlabel="iteration", ylabel="theta_hat")

final_grey = [np.median(t.column("theta_hat")[-25:]) for t in grey]
final_black = [np.median(t.column("theta_hat")[-25:]) for t in black]
print(f"median final synergy: grey {np.median(final_grey):.3f}, "
      f"black {np.median(final_black):.3f}")
