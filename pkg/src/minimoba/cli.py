"""Operator console: replay verification, training jobs, curriculum runs,
draft duels and an interactive draft, series play and rating tools.

Exit codes: 0 success, 2 bad configuration or arguments, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from .arena.bots import NeverActBot, PolicyPlayer, RandomBot, ScriptedBot
from .arena.ci import display_ci
from .arena.elo import EloTable
from .arena.series import play_series
from .config import EnvConfig, desk_config, train_config
from .curriculum import (CsplPlan, LineupGroup, group_heroes,
                         make_table_estimator, policy_elo_vs_scripted,
                         random_lineup_factory, run_baseline, run_cspl)
from .distill import DistillConfig, TeacherSpec, distill_train
from .heroes import default_hero_pool
from .net.checkpoint import load_checkpoint, save_checkpoint
from .net.model import PolicyValueNet, final_config, teacher_config
from .rl.learner import LearnerConfig
from .runtime.job import JobConfig, run_job
from .sim.engine import MobaEnv
from .sim.observe import obs_sizes
from .sim.replay import replay_file, verify_replay
from .util import append_jsonl, philox


class CliError(Exception):
    """Configuration/usage problem; maps to exit code 2."""


def _arena(name: str) -> EnvConfig:
    if name == "desk":
        return desk_config()
    if name == "train":
        return train_config()
    raise CliError(f"unknown arena {name!r} (choose desk or train)")


def _ids(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t != ""]
    except ValueError:
        raise CliError(f"bad id list {text!r} (want e.g. '0,2')")


def _lineup(pool, ids):
    by_id = {h.hero_id: h for h in pool}
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise CliError(f"hero ids {missing} not in pool of {len(pool)}")
    return [by_id[i] for i in ids]


def _player(spec: str, seed: int):
    if spec == "scripted":
        return ScriptedBot()
    if spec == "neveract":
        return NeverActBot()
    if spec == "random":
        return RandomBot(seed=seed)
    try:
        net, _ = load_checkpoint(spec)
    except FileNotFoundError:
        raise CliError(f"checkpoint not found: {spec}")
    except ValueError as e:
        raise CliError(str(e))
    return PolicyPlayer(net, name=Path(spec).stem, seed=seed)


# ------------------------------------------------------------------ env

def cmd_env_replay(args) -> int:
    if args.record:
        cfg = _arena(args.arena)
        pool = default_hero_pool(args.pool)
        la, lb = _ids(args.lineup_a), _ids(args.lineup_b)
        _lineup(pool, la + lb)
        bot = ScriptedBot()

        def policy(env, obs):
            return bot.act(env, obs, 0) + bot.act(env, obs, 1)

        res = replay_file(args.file, cfg, la, lb, seed=args.seed,
                          policy=policy, pool_size=args.pool)
        print(json.dumps(res))
        return 0
    try:
        ok, msg = verify_replay(args.file)
    except FileNotFoundError:
        raise CliError(f"replay not found: {args.file}")
    print(msg)
    return 0 if ok else 3


# ------------------------------------------------------------------ train

def _eval_hook(net, pool, lineup, cfg, every, matches, curve_path, seed):
    if every <= 0:
        return None

    def on_update(stats):
        if stats["version"] % every != 0:
            return False
        ev = policy_elo_vs_scripted(net, pool, lineup[0], lineup[1], cfg,
                                    n_matches=matches, seed=seed + stats["version"])
        row = {"update": stats["version"], "env_ticks": stats["env_ticks"], **ev}
        if curve_path:
            append_jsonl(curve_path, row)
        print(f"  update {stats['version']}: elo {ev['elo']:.0f} "
              f"({ev['wins']}W {ev['losses']}L {ev['draws']}D)")
        return False

    return on_update


def cmd_train_phase1(args) -> int:
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    la, lb = _ids(args.lineup_a), _ids(args.lineup_b)
    lineup = (_lineup(pool, la), _lineup(pool, lb))
    if len(la) != cfg.team_size or len(lb) != cfg.team_size:
        raise CliError(f"lineups must have {cfg.team_size} heroes per side")
    net = PolicyValueNet(teacher_config(obs_sizes(cfg)), seed=args.seed)

    def factory(episode, actor_id):
        s = philox(args.seed, 0xF1, episode, actor_id).integers(1 << 31)
        return MobaEnv(cfg, lineup[0], lineup[1], seed=int(s))

    jcfg = JobConfig(updates=10 ** 9, max_env_ticks=args.ticks,
                     seed=args.seed, lockstep=True)
    hook = _eval_hook(net, pool, (la, lb), cfg, args.eval_every,
                      args.eval_matches, args.curve, args.seed)
    res = run_job(factory, net, pool, jcfg, LearnerConfig(lr=args.lr),
                  on_update=hook)
    save_checkpoint(args.out, net, {"phase": 1, "lineup": [la, lb],
                                    "ticks": res["rollout"]["ticks"]})
    print(json.dumps({"out": args.out, "updates": res["final_version"],
                      "env_ticks": res["rollout"]["ticks"]}))
    return 0


def cmd_train_distill(args) -> int:
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    teachers = []
    for path in args.teacher:
        try:
            net, meta = load_checkpoint(path)
        except (FileNotFoundError, ValueError) as e:
            raise CliError(f"{path}: {e}")
        lu = meta.get("lineup")
        if not lu:
            raise CliError(f"{path}: checkpoint meta has no lineup; "
                           "train it with `train phase1`")
        teachers.append(TeacherSpec(net, tuple(lu[0]), tuple(lu[1]),
                                    name=Path(path).stem))
    student = PolicyValueNet(final_config(obs_sizes(cfg)), seed=args.seed)
    res = distill_train(student, teachers, cfg, pool,
                        DistillConfig(lr=args.lr, updates=args.updates,
                                      seed=args.seed))
    save_checkpoint(args.out, student,
                    {"phase": 2, "teachers": [t.name for t in teachers]})
    print(json.dumps({"out": args.out, "updates": len(res["history"]),
                      "env_ticks": res["env_ticks"],
                      "batch_counts": res["batch_counts"],
                      "final_loss": res["history"][-1]["loss"]}))
    return 0


def cmd_train_phase3(args) -> int:
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    try:
        net, _ = load_checkpoint(args.init)
    except (FileNotFoundError, ValueError) as e:
        raise CliError(f"{args.init}: {e}")
    factory = random_lineup_factory(cfg, pool, seed=args.seed)
    jcfg = JobConfig(updates=10 ** 9, max_env_ticks=args.ticks,
                     seed=args.seed, lockstep=True)
    lineup = ([h.hero_id for h in pool[:cfg.team_size]],
              [h.hero_id for h in pool[cfg.team_size:2 * cfg.team_size]])
    hook = _eval_hook(net, pool, lineup, cfg, args.eval_every,
                      args.eval_matches, args.curve, args.seed)
    res = run_job(factory, net, pool, jcfg, LearnerConfig(lr=args.lr),
                  on_update=hook)
    save_checkpoint(args.out, net, {"phase": 3, "init": str(args.init)})
    print(json.dumps({"out": args.out, "updates": res["final_version"],
                      "env_ticks": res["rollout"]["ticks"]}))
    return 0


# ------------------------------------------------------------------ cspl

_PLAN_EXTRA = {"pool_size", "jitter_seed", "arena", "group_size", "tau",
               "table_matches", "table_seed", "groups", "criterion_lineup"}


def _load_plan(path: str):
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"plan not found: {path}")
    except json.JSONDecodeError as e:
        raise CliError(f"{path}: invalid JSON ({e})")
    plan_fields = {f.name for f in dataclass_fields(CsplPlan)}
    unknown = set(raw) - plan_fields - _PLAN_EXTRA
    if unknown:
        raise CliError(f"{path}: unknown plan keys {sorted(unknown)}")
    cfg = _arena(raw.get("arena", "train"))
    pool = default_hero_pool(raw.get("pool_size", 8),
                             raw.get("jitter_seed", 0))
    ids = [h.hero_id for h in pool]
    if "groups" in raw:
        groups = []
        for entry in raw["groups"]:
            a, b = entry[0], entry[1]
            wr = float(entry[2]) if len(entry) > 2 else 0.5
            groups.append(LineupGroup(tuple(a), tuple(b), wr))
    else:
        est = make_table_estimator(pool, cfg,
                                   n_matches=raw.get("table_matches", 24),
                                   seed=raw.get("table_seed", 123))
        groups = group_heroes(ids, est, raw.get("group_size", 2 * cfg.team_size),
                              tau=raw.get("tau", 0.05),
                              seed=raw.get("seed", 0))
    crit = raw.get("criterion_lineup")
    crit = (tuple(crit[0]), tuple(crit[1])) if crit else \
        (groups[0].team_a, groups[0].team_b)
    kwargs = {k: v for k, v in raw.items() if k in plan_fields and k != "groups"}
    if "total_ticks" not in kwargs or "phase1_ticks" not in kwargs:
        raise CliError(f"{path}: plan needs total_ticks and phase1_ticks")
    try:
        plan = CsplPlan(groups=groups, criterion_lineup=crit, **kwargs)
        plan.validate(ids)
    except (TypeError, ValueError) as e:
        raise CliError(f"{path}: {e}")
    return plan, pool, cfg


def cmd_cspl_run(args) -> int:
    plan, pool, cfg = _load_plan(args.plan)
    if args.arm == "cspl":
        lineage = run_cspl(plan, pool, cfg, args.workdir)
    else:
        lineage = run_baseline(plan, pool, cfg, args.workdir)
    line = {"arm": lineage["arm"], "completed": lineage["completed"],
            "total_env_ticks": lineage.get("total_env_ticks"),
            "final_elo": lineage.get("final_elo"),
            "lineage": str(Path(args.workdir) / "lineage.json")}
    if "failed_gate" in lineage:
        line["failed_gate"] = lineage["failed_gate"]
    print(json.dumps(line))
    return 0 if lineage["completed"] else 3


# ------------------------------------------------------------------ draft

def _draft_assets(args, need_predictor: bool):
    """Match rows (cached), hero win rates, and optionally a predictor."""
    from .draft import gen_match_dataset, hero_winrates, train_winrate_predictor
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    rows = None
    if args.cache and Path(args.cache).exists():
        rows = [json.loads(l) for l in Path(args.cache).read_text().splitlines()]
    if rows is None:
        print(f"playing {args.matches} scripted matches to fit draft models...",
              file=sys.stderr)
        rows = gen_match_dataset(pool, args.team_size, args.matches, cfg,
                                 seed=args.seed)
        if args.cache:
            with open(args.cache, "w") as f:
                for r in rows:
                    f.write(json.dumps(r) + "\n")
    wr = hero_winrates(rows, args.pool)
    predictor = None
    if need_predictor:
        predictor, report = train_winrate_predictor(rows, args.pool,
                                                    args.team_size,
                                                    seed=args.seed)
        print(f"predictor holdout accuracy {report['holdout_acc']:.3f} "
              f"on {len(rows)} decisive matches", file=sys.stderr)
    return cfg, pool, rows, wr, predictor


def _strategy(kind: str, pool_ids, predictor, winrates, iterations, seed):
    from .draft import (make_hwr_strategy, make_mcts_strategy,
                        make_random_strategy, rollout_evaluator)
    if kind == "rd":
        return make_random_strategy(pool_ids)
    if kind == "hwr":
        return make_hwr_strategy(pool_ids, winrates)
    if kind == "mcts":
        return make_mcts_strategy(pool_ids, rollout_evaluator(predictor),
                                  iterations, seed=seed)
    raise CliError(f"unknown strategy {kind!r} (choose mcts, hwr or rd)")


def cmd_draft_duel(args) -> int:
    from .draft import duel
    need_pred = "mcts" in (args.a, args.b)
    cfg, pool, rows, wr, predictor = _draft_assets(args, need_pred)
    ids = [h.hero_id for h in pool]
    sa = _strategy(args.a, ids, predictor, wr, args.iterations, args.seed)
    sb = _strategy(args.b, ids, predictor, wr, args.iterations, args.seed + 1)
    res = duel(sa, sb, pool, args.team_size, args.n, cfg, seed=args.seed)
    decisive = res["wins_a"] + res["wins_b"]
    rate = res["wins_a"] / decisive if decisive else 0.5
    print(json.dumps({"a": args.a, "b": args.b, **res,
                      "a_winrate_decisive": round(rate, 4)}))
    return 0


def _live_estimate(state, pool_ids, predictor, seed: int, n: int = 256) -> float:
    """Mean predictor estimate over uniform random completions of the draft."""
    from .draft import rollout_evaluator
    ev = rollout_evaluator(predictor)
    rng = philox(seed, 0x11FE)
    return float(sum(ev(state, rng) for _ in range(n)) / n)


def cmd_draft_play(args) -> int:
    from .draft import fresh_draft, legal_picks, make_mcts_strategy, rollout_evaluator
    cfg, pool, rows, wr, predictor = _draft_assets(args, need_predictor=True)
    ids = [h.hero_id for h in pool]
    human = 0 if args.human_side == "a" else 1
    mcts = make_mcts_strategy(ids, rollout_evaluator(predictor),
                              args.iterations, seed=args.seed)
    rng = philox(args.seed, 0x9E7)
    state = fresh_draft(args.team_size)
    names = {h.hero_id: h.name for h in pool}
    print("pool: " + "  ".join(f"{h.hero_id}:{h.name}" for h in pool))
    print(f"you pick for team {'A' if human == 0 else 'B'}; "
          f"pick order alternates starting with A. 'q' quits.")
    turn = 0
    while not state.terminal:
        team = state.team_to_pick
        legal = legal_picks(state, ids)
        if team == human:
            while True:
                try:
                    raw = input(f"[pick {turn + 1}] your hero id {legal}> ").strip()
                except EOFError:
                    print()
                    return 0
                if raw.lower() in ("q", "quit"):
                    return 0
                if raw.isdigit() and int(raw) in legal:
                    choice = int(raw)
                    break
                print(f"  illegal pick {raw!r}; legal: {legal}")
        else:
            choice = mcts(state, rng)
            print(f"[pick {turn + 1}] opponent picked {choice} ({names[choice]})")
        state = state.pick(choice)
        turn += 1
        if not state.terminal:
            est = _live_estimate(state, ids, predictor, seed=args.seed + turn)
            print(f"  current estimate p(team A wins) = {est:.3f}")
    final = predictor.predict(state.picks_a, state.picks_b)
    print(f"final lineups: A={sorted(state.picks_a)} B={sorted(state.picks_b)}")
    print(f"predicted p(team A wins) = {final:.3f}")
    return 0


# ------------------------------------------------------------------ eval

def _fmt(x: float) -> str:
    s = f"{x:.10f}".rstrip("0").rstrip(".")
    return s if s else "0"


def cmd_eval_ci(args) -> int:
    try:
        lo, hi = display_ci(args.wins, args.n, conf=args.conf, digits=args.digits)
    except ValueError as e:
        raise CliError(str(e))
    print(f"[{_fmt(lo)}, {_fmt(hi)}]")
    return 0


def cmd_eval_series(args) -> int:
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    la = _lineup(pool, _ids(args.lineup_a))
    lb = _lineup(pool, _ids(args.lineup_b))
    pa = _player(args.a, args.seed)
    pb = _player(args.b, args.seed + 1)
    res = play_series(cfg, la, lb, pa, pb, args.n, seed=args.seed,
                      log_path=args.log)
    print(json.dumps({k: res[k] for k in ("wins_a", "wins_b", "draws", "n")}))
    return 0


def cmd_eval_elo(args) -> int:
    cfg = _arena(args.arena)
    pool = default_hero_pool(args.pool)
    la = _lineup(pool, _ids(args.lineup_a))
    lb = _lineup(pool, _ids(args.lineup_b))
    specs = [s.strip() for s in args.players.split(",") if s.strip()]
    if len(specs) < 2:
        raise CliError("need at least two comma-separated players")
    players = []
    seen = set()
    for i, spec in enumerate(specs):
        p = _player(spec, args.seed + 100 * i)
        name = spec if spec in ("scripted", "random", "neveract") else p.name
        if name in seen:
            raise CliError(f"duplicate player name {name!r}")
        seen.add(name)
        players.append((name, p))
    anchor = "neveract" if any(n == "neveract" for n, _ in players) else None
    table = EloTable(k=32.0, init=1000.0, anchor=anchor)
    for i in range(len(players)):
        for j in range(i + 1, len(players)):
            na, pa = players[i]
            nb, pb = players[j]
            res = play_series(cfg, la, lb, pa, pb, args.n_per_pair,
                              seed=args.seed + 7919 * (i * len(players) + j))
            for m in res["matches"]:
                score = {"a": 1.0, "b": 0.0, "draw": 0.5}[m["outcome"]]
                table.record(na, nb, score)
    for name, rating, games in table.table():
        print(f"{name:>24}  {rating:7.1f}  ({games} games)")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minimoba",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True)

    env = sub.add_parser("env", help="simulator tools").add_subparsers(
        dest="cmd", required=True)
    rp = env.add_parser("replay", help="verify a replay log (or record one)")
    rp.add_argument("file")
    rp.add_argument("--record", action="store_true",
                    help="record a scripted match instead of verifying")
    rp.add_argument("--arena", default="desk")
    rp.add_argument("--pool", type=int, default=8)
    rp.add_argument("--lineup-a", default="0,1")
    rp.add_argument("--lineup-b", default="2,3")
    rp.add_argument("--seed", type=int, default=0)
    rp.set_defaults(fn=cmd_env_replay)

    tr = sub.add_parser("train", help="training jobs").add_subparsers(
        dest="cmd", required=True)
    p1 = tr.add_parser("phase1", help="fixed-lineup policy (a teacher)")
    p1.add_argument("--lineup-a", required=True)
    p1.add_argument("--lineup-b", required=True)
    p1.add_argument("--ticks", type=int, required=True)
    p1.add_argument("--out", required=True)
    for q in (p1,):
        q.add_argument("--arena", default="train")
        q.add_argument("--pool", type=int, default=8)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--lr", type=float, default=3e-4)
        q.add_argument("--eval-every", type=int, default=0)
        q.add_argument("--eval-matches", type=int, default=8)
        q.add_argument("--curve", default=None,
                       help="append rating evals to this JSONL file")
    p1.set_defaults(fn=cmd_train_phase1)
    p2 = tr.add_parser("distill", help="distill teachers into a student")
    p2.add_argument("--teacher", action="append", required=True,
                    help="teacher checkpoint (repeatable)")
    p2.add_argument("--updates", type=int, default=160)
    p2.add_argument("--out", required=True)
    p2.add_argument("--arena", default="train")
    p2.add_argument("--pool", type=int, default=8)
    p2.add_argument("--seed", type=int, default=0)
    p2.add_argument("--lr", type=float, default=1e-4)
    p2.set_defaults(fn=cmd_train_distill)
    p3 = tr.add_parser("phase3", help="random-lineup training from a checkpoint")
    p3.add_argument("--init", required=True)
    p3.add_argument("--ticks", type=int, required=True)
    p3.add_argument("--out", required=True)
    p3.add_argument("--arena", default="train")
    p3.add_argument("--pool", type=int, default=8)
    p3.add_argument("--seed", type=int, default=0)
    p3.add_argument("--lr", type=float, default=3e-4)
    p3.add_argument("--eval-every", type=int, default=0)
    p3.add_argument("--eval-matches", type=int, default=8)
    p3.add_argument("--curve", default=None)
    p3.set_defaults(fn=cmd_train_phase3)

    cs = sub.add_parser("cspl", help="curriculum runs").add_subparsers(
        dest="cmd", required=True)
    cr = cs.add_parser("run", help="run a curriculum (or baseline) from a plan")
    cr.add_argument("--plan", required=True, help="plan JSON file")
    cr.add_argument("--workdir", required=True)
    cr.add_argument("--arm", choices=("cspl", "baseline"), default="cspl")
    cr.set_defaults(fn=cmd_cspl_run)

    dr = sub.add_parser("draft", help="hero drafting").add_subparsers(
        dest="cmd", required=True)
    dd = dr.add_parser("duel", help="pit two draft strategies over real matches")
    dd.add_argument("--a", required=True, help="mcts, hwr or rd")
    dd.add_argument("--b", required=True)
    dd.add_argument("--n", type=int, default=100, help="drafts per duel")
    dp = dr.add_parser("play", help="interactive draft against the tree search")
    dp.add_argument("--human-side", choices=("a", "b"), default="a")
    for q in (dd, dp):
        q.add_argument("--arena", default="desk")
        q.add_argument("--pool", type=int, default=8)
        q.add_argument("--team-size", type=int, default=2)
        q.add_argument("--matches", type=int, default=200,
                       help="scripted matches used to fit the draft models")
        q.add_argument("--iterations", type=int, default=200)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--cache", default=None,
                       help="JSONL cache for the scripted match dataset")
    dd.set_defaults(fn=cmd_draft_duel)
    dp.set_defaults(fn=cmd_draft_play)

    ev = sub.add_parser("eval", help="series, ratings, intervals").add_subparsers(
        dest="cmd", required=True)
    ec = ev.add_parser("ci", help="exact win-rate confidence interval")
    ec.add_argument("--wins", type=int, required=True)
    ec.add_argument("--n", type=int, required=True)
    ec.add_argument("--conf", type=float, default=0.95)
    ec.add_argument("--digits", type=int, default=3)
    ec.set_defaults(fn=cmd_eval_ci)
    es = ev.add_parser("series", help="play a head-to-head series")
    es.add_argument("--a", required=True,
                    help="checkpoint path, scripted, random or neveract")
    es.add_argument("--b", required=True)
    es.add_argument("--n", type=int, default=10)
    es.add_argument("--log", default=None, help="append outcomes to JSONL")
    ee = ev.add_parser("elo", help="round-robin ratings over named players")
    ee.add_argument("--players", required=True,
                    help="comma list: checkpoints and/or scripted,random,neveract")
    ee.add_argument("--n-per-pair", type=int, default=10)
    for q in (es, ee):
        q.add_argument("--arena", default="desk")
        q.add_argument("--pool", type=int, default=8)
        q.add_argument("--lineup-a", default="0,1")
        q.add_argument("--lineup-b", default="2,3")
        q.add_argument("--seed", type=int, default=0)
    es.set_defaults(fn=cmd_eval_series)
    ee.set_defaults(fn=cmd_eval_elo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 3
    except RuntimeError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
