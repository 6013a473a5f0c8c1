"""Few-shot sine regression with a walking token.

Runs the token-walk meta-learner on 20 training clients (each holding one
sine task with its own amplitude and phase), then hands the final
meta-initialization to an unseen client and adapts with a few inner steps.
"""

import numpy as np

from walkmeta import metalearn, model, simulator
from walkmeta.config import ExperimentConfig

cfg = ExperimentConfig(T=2000, eval_every=200, seed=0)
print("training: 20 clients, small-world graph, T=2000 iterations ...")
rec = simulator.run(cfg)

print(f"\n{'iter':>6s} {'comm':>6s} {'train meta-loss':>16s} {'unseen MSE':>11s}")
for r in rec.rows:
    print(f"{r.iteration:6d} {r.comm_units:6d} {r.train_metric:16.4f} "
          f"{r.unseen_metric:11.4f}")

# Adapt the learned initialization on each unseen client and compare against
# adapting a freshly initialized network on the same support sets.
assignment = cfg.build_assignment()
h = cfg.hyper
fresh = model.init_params(cfg.build_arch(), seed=12345)


def query_mse(p, task):
    return model.loss(p, task.query)


print(f"\n{'unseen client':>13s} {'amplitude':>9s} {'meta-learned':>12s} "
      f"{'random init':>11s}")
meta_scores, fresh_scores = [], []
for cid in sorted(assignment.unseen):
    task = assignment.unseen[cid]
    adapted = metalearn.adapt_unseen(rec.final_params, task.support,
                                     h.alpha, h.K)
    fresh_adapted = metalearn.adapt_unseen(fresh, task.support, h.alpha, h.K)
    a, b = query_mse(adapted, task), query_mse(fresh_adapted, task)
    meta_scores.append(a)
    fresh_scores.append(b)
    print(f"{cid:13d} {task.latent['amplitude']:9.2f} {a:12.4f} {b:11.4f}")
print(f"{'mean':>13s} {'':9s} {np.mean(meta_scores):12.4f} "
      f"{np.mean(fresh_scores):11.4f}")
print(f"\nafter {h.K} inner steps on the support set, the meta-learned "
      f"initialization\nreaches {np.mean(meta_scores) / np.mean(fresh_scores):.2f}x "
      f"the query MSE of a random initialization.")
