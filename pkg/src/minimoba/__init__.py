"""minimoba: a desk-scale MOBA self-play laboratory.

Everything runs on one machine from fixed seeds: a grid-world lane-pushing
arena, numpy actor-critic networks with hand-written gradients, dual-clip PPO
with multi-head value learning, curriculum self-play with policy distillation,
tree-search drafting, an actor/learner runtime, and exact-CI evaluation tools.
"""

__version__ = "0.1.0"
