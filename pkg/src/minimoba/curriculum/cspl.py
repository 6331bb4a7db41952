"""CSPL orchestration: fixed-lineup teachers, multi-teacher distillation,
then random-lineup continued training, with Elo-gated phase advancement.

Budgets are environment ticks. A phase that converges early rolls its
unused ticks into the final phase, so every run consumes the configured
total; the paired baseline arm spends the same total on random-lineup
training from scratch.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..config import EnvConfig, to_dict
from ..distill import DistillConfig, TeacherSpec, distill_train
from ..heroes import HeroSpec
from ..net.checkpoint import save_checkpoint
from ..net.model import PolicyValueNet, final_config, teacher_config
from ..rl.learner import LearnerConfig
from ..runtime.job import JobConfig, run_job
from ..sim.engine import MobaEnv
from ..sim.observe import obs_sizes
from ..util import philox
from .evaluate import policy_elo_profile, policy_elo_vs_scripted
from .grouping import LineupGroup, elo_converged


@dataclass
class CsplPlan:
    groups: list[LineupGroup]         # must partition the hero pool
    criterion_lineup: tuple           # (team_a ids, team_b ids) for Elo curves
    total_ticks: int                  # env-step budget across all phases
    phase1_ticks: int                 # share for teachers, split equally
    phase2_updates: int = 150
    gate_window: int = 20
    gate_delta: float = 30.0
    eval_every: int = 500             # learner updates between Elo evals
    distill_eval_every: int = 25      # distill updates between Elo evals
    eval_matches: int = 8
    final_eval_matches: int = 20
    seed: int = 0
    lr: float = 3e-4
    distill_lr: float = 3e-4
    ent_coef: float = 0.01
    unroll_len: int = 16
    batch_size: int = 16
    n_actors: int = 2
    ticks_per_round: int = 32
    pool_capacity: int = 64

    def validate(self, pool_ids) -> None:
        seen: list = []
        for g in self.groups:
            seen.extend(g.hero_ids())
        if sorted(seen) != sorted(int(i) for i in pool_ids):
            raise ValueError("groups must partition the hero pool exactly")
        if self.phase1_ticks >= self.total_ticks:
            raise ValueError("phase1_ticks must leave budget for later phases")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["groups"] = [{"team_a": list(g.team_a), "team_b": list(g.team_b),
                        "winrate": g.winrate} for g in self.groups]
        d["criterion_lineup"] = [list(self.criterion_lineup[0]),
                                 list(self.criterion_lineup[1])]
        return d


def _params_sha(net: PolicyValueNet) -> str:
    h = hashlib.sha256()
    for k in sorted(net.params):
        h.update(k.encode())
        h.update(np.ascontiguousarray(net.params[k]).tobytes())
    return h.hexdigest()


def _config_hash(plan: CsplPlan, cfg: EnvConfig) -> str:
    blob = json.dumps({"plan": plan.to_dict(), "env": to_dict(cfg)},
                      sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _fixed_factory(cfg, pool, team_a, team_b, seed):
    by_id = {h.hero_id: h for h in pool}
    la = [by_id[int(i)] for i in team_a]
    lb = [by_id[int(i)] for i in team_b]

    def factory(episode, actor_id):
        s = philox(seed, 0xF1, episode, actor_id).integers(1 << 31)
        return MobaEnv(cfg, la, lb, seed=int(s))

    return factory


def random_lineup_factory(cfg, pool, seed):
    """Episodes draw a fresh uniform lineup: permute the pool, first N heroes
    to team A, next N to team B."""
    n = cfg.team_size

    def factory(episode, actor_id):
        rng = philox(seed, 0xF3, episode, actor_id)
        ids = rng.permutation(len(pool))[: 2 * n]
        la = [pool[int(i)] for i in ids[:n]]
        lb = [pool[int(i)] for i in ids[n:]]
        return MobaEnv(cfg, la, lb, seed=int(rng.integers(1 << 31)))

    return factory


def _train_phase(net, factory, pool, cfg, plan: CsplPlan, *, ticks: int,
                 eval_lineup, seed: int, gated: bool) -> dict:
    """One RL phase: run_job under a tick budget with periodic Elo evals.
    With `gated`, stops as soon as the Elo history converges."""
    elos: list[float] = []
    evals: list[dict] = []

    def on_update(stats):
        if stats["version"] % plan.eval_every != 0:
            return False
        ev = policy_elo_vs_scripted(net, pool, eval_lineup[0], eval_lineup[1],
                                    cfg, n_matches=plan.eval_matches,
                                    seed=seed + stats["version"])
        elos.append(ev["elo"])
        evals.append({"update": stats["version"], **ev})
        return gated and elo_converged(elos, plan.gate_window, plan.gate_delta)

    jcfg = JobConfig(n_actors=plan.n_actors, unroll_len=plan.unroll_len,
                     batch_size=plan.batch_size, updates=10 ** 9,
                     ticks_per_round=plan.ticks_per_round,
                     pool_capacity=plan.pool_capacity, seed=seed,
                     lockstep=True, max_env_ticks=ticks)
    res = run_job(factory, net, pool, jcfg,
                  LearnerConfig(lr=plan.lr, ent_coef=plan.ent_coef),
                  on_update=on_update)
    converged = elo_converged(elos, plan.gate_window, plan.gate_delta)
    return {
        "env_ticks": int(res["rollout"]["ticks"]),
        "updates": int(res["final_version"]),
        "elo_curve": elos,
        "evals": evals,
        "gate": {"converged": bool(converged), "window": plan.gate_window,
                 "delta": plan.gate_delta, "points": len(elos)},
    }


def run_cspl(plan: CsplPlan, pool: list[HeroSpec], cfg: EnvConfig,
             workdir: str | Path) -> dict:
    """Run the full curriculum; returns (and persists) the lineage record.

    A gate missed within its budget stops the run at that phase: the lineage
    is returned partial, with the failure marked, and later phases absent.
    """
    plan.validate([h.hero_id for h in pool])
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    sizes = obs_sizes(cfg)
    lineage = {
        "version": 1,
        "arm": "cspl",
        "config_hash": _config_hash(plan, cfg),
        "plan": plan.to_dict(),
        "phases": [],
        "completed": False,
    }

    def persist():
        (workdir / "lineage.json").write_text(json.dumps(lineage, indent=2))
        return lineage

    # ---------------------------------------------------------- phase 1
    teachers: list[TeacherSpec] = []
    used = 0
    share = plan.phase1_ticks // len(plan.groups)
    for k, g in enumerate(plan.groups):
        tnet = PolicyValueNet(teacher_config(sizes), seed=plan.seed * 1000 + k)
        factory = _fixed_factory(cfg, pool, g.team_a, g.team_b,
                                 seed=plan.seed * 100 + 7 * k)
        rec = _train_phase(tnet, factory, pool, cfg, plan, ticks=share,
                           eval_lineup=(g.team_a, g.team_b),
                           seed=plan.seed * 31 + k, gated=True)
        used += rec["env_ticks"]
        ck = workdir / f"teacher_g{k}.npz"
        save_checkpoint(ck, tnet, {"phase": 1, "group": k,
                                   "lineup": [list(g.team_a), list(g.team_b)]})
        lineage["phases"].append({
            "phase": 1, "name": f"teacher_g{k}",
            "lineup": [list(g.team_a), list(g.team_b)],
            "checkpoint": ck.name, "params_sha": _params_sha(tnet), **rec,
        })
        if not rec["gate"]["converged"]:
            lineage["failed_gate"] = f"teacher_g{k}"
            return persist()
        teachers.append(TeacherSpec(tnet, tuple(g.team_a), tuple(g.team_b),
                                    name=f"g{k}"))

    # ---------------------------------------------------------- phase 2
    student = PolicyValueNet(final_config(sizes), seed=plan.seed * 1000 + 500)
    elos: list[float] = []
    evals: list[dict] = []

    def on_distill(row):
        if (row["update"] + 1) % plan.distill_eval_every != 0:
            return False
        per = []
        for k, g in enumerate(plan.groups):
            ev = policy_elo_vs_scripted(student, pool, g.team_a, g.team_b, cfg,
                                        n_matches=max(2, plan.eval_matches // 2),
                                        seed=plan.seed * 77 + row["update"] + k)
            per.append(ev["elo"])
        elos.append(float(np.mean(per)))
        evals.append({"update": row["update"], "elo_mean": elos[-1],
                      "per_teacher": per})
        return elo_converged(elos, plan.gate_window, plan.gate_delta)

    dres = distill_train(student, teachers, cfg, pool,
                         DistillConfig(lr=plan.distill_lr,
                                       unroll_len=plan.unroll_len,
                                       updates=plan.phase2_updates,
                                       seed=plan.seed + 5),
                         on_update=on_distill)
    used += dres["env_ticks"]
    ck = workdir / "student.npz"
    save_checkpoint(ck, student, {"phase": 2,
                                  "teachers": [t.name for t in teachers]})
    student_sha = _params_sha(student)
    distill_converged = elo_converged(elos, plan.gate_window, plan.gate_delta) \
        or not elos
    lineage["phases"].append({
        "phase": 2, "name": "student", "checkpoint": ck.name,
        "teachers": [t.name for t in teachers],
        "batch_counts": dres["batch_counts"], "env_ticks": dres["env_ticks"],
        "updates": len(dres["history"]), "elo_curve": elos, "evals": evals,
        "params_sha": student_sha,
        "gate": {"converged": bool(distill_converged),
                 "window": plan.gate_window, "delta": plan.gate_delta,
                 "points": len(elos)},
    })
    if not distill_converged:
        lineage["failed_gate"] = "student"
        return persist()

    # ---------------------------------------------------------- phase 3
    remaining = plan.total_ticks - used
    factory = random_lineup_factory(cfg, pool, seed=plan.seed * 100 + 93)
    rec = _train_phase(student, factory, pool, cfg, plan, ticks=remaining,
                       eval_lineup=plan.criterion_lineup,
                       seed=plan.seed * 31 + 17, gated=False)
    used += rec["env_ticks"]
    ck = workdir / "final.npz"
    save_checkpoint(ck, student, {"phase": 3})
    final_ev = policy_elo_profile(
        student, pool, plan.criterion_lineup[0], plan.criterion_lineup[1],
        cfg, n_matches=plan.final_eval_matches, seed=plan.seed * 997)
    lineage["phases"].append({
        "phase": 3, "name": "final", "checkpoint": ck.name,
        "init_params_sha": student_sha, "params_sha": _params_sha(student),
        **rec,
    })
    lineage["final_elo"] = final_ev["elo_mean"]
    lineage["final_eval"] = final_ev
    lineage["total_env_ticks"] = used
    lineage["budget_ticks"] = plan.total_ticks
    lineage["completed"] = True
    return persist()


def run_baseline(plan: CsplPlan, pool: list[HeroSpec], cfg: EnvConfig,
                 workdir: str | Path, seed_offset: int = 10_000) -> dict:
    """The no-curriculum arm: the full-size model trains on random lineups
    from scratch with the same total tick budget and offset seeds."""
    plan.validate([h.hero_id for h in pool])
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    sizes = obs_sizes(cfg)
    seed = plan.seed + seed_offset
    net = PolicyValueNet(final_config(sizes), seed=seed * 1000 + 500)
    factory = random_lineup_factory(cfg, pool, seed=seed * 100 + 93)
    rec = _train_phase(net, factory, pool, cfg, plan, ticks=plan.total_ticks,
                       eval_lineup=plan.criterion_lineup,
                       seed=seed * 31 + 17, gated=False)
    ck = workdir / "baseline_final.npz"
    save_checkpoint(ck, net, {"arm": "baseline"})
    # evaluation seed matches the curriculum arm's so the paired comparison
    # sees identical match streams; only the training seeds are offset
    final_ev = policy_elo_profile(
        net, pool, plan.criterion_lineup[0], plan.criterion_lineup[1],
        cfg, n_matches=plan.final_eval_matches, seed=plan.seed * 997)
    lineage = {
        "version": 1,
        "arm": "baseline",
        "config_hash": _config_hash(plan, cfg),
        "plan": plan.to_dict(),
        "phases": [{"phase": 3, "name": "baseline_final",
                    "checkpoint": ck.name, "params_sha": _params_sha(net),
                    **rec}],
        "final_elo": final_ev["elo_mean"],
        "final_eval": final_ev,
        "total_env_ticks": rec["env_ticks"],
        "budget_ticks": plan.total_ticks,
        "completed": True,
    }
    (workdir / "lineage.json").write_text(json.dumps(lineage, indent=2))
    return lineage
