"""Actor/learner job orchestration.

Two scheduling modes:

* lockstep: one thread, actors advanced round-robin one tick at a time with
  training interleaved at fixed points. Fully deterministic for a given seed
  and bit-identical across transports; this is the debugging mode.
* threaded: each actor runs in its own thread against the shared inference
  server while the learner trains in the caller's thread. Faster wall-clock,
  order nondeterministic. An actor thread that dies is logged and abandoned;
  the job keeps running on the survivors.

Stale trajectories (older than the learner's staleness bound) are dropped at
sampling time and counted, never trained on.
"""

from __future__ import annotations

import threading
import traceback
from dataclasses import dataclass

import numpy as np

from ..net.model import PolicyValueNet
from ..rl.learner import Learner, LearnerConfig
from ..rl.trajectory import Trajectory, TrajectoryBatch
from ..util import philox
from .actor import ActorLoop
from .inference import DirectClient, InferenceServer, SocketClient, SocketServer
from .pool import MemoryPool


@dataclass
class JobConfig:
    n_actors: int = 2
    unroll_len: int = 16
    batch_size: int = 16
    updates: int = 50
    ticks_per_round: int = 32       # env ticks per actor between train checks
    pool_capacity: int = 256
    seed: int = 0
    lockstep: bool = True
    transport: str = "inproc"       # "inproc" | "socket"
    sync_every: int = 1             # push params to the server every N updates
    max_env_ticks: int | None = None  # stop once total actor ticks reach this


def run_job(env_factory, net: PolicyValueNet, hero_pool, jcfg: JobConfig,
            lcfg: LearnerConfig | None = None, on_update=None) -> dict:
    """Train `net` in place. Returns history and rollout stats.

    Stops on whichever comes first: `updates` gradient steps, the
    `max_env_ticks` budget, or `on_update` returning True (early-stop hook,
    e.g. an Elo convergence gate)."""
    lcfg = lcfg or LearnerConfig()
    learner = Learner(net, lcfg)
    pool = MemoryPool(jcfg.pool_capacity)
    server = InferenceServer(net, hero_pool, seed=jcfg.seed)
    server.set_params(net.params, learner.version)

    sock_server = None
    clients = []
    try:
        if jcfg.transport == "socket":
            sock_server = SocketServer(server, pool)
            host, port = sock_server.address
            clients = [SocketClient(host, port) for _ in range(jcfg.n_actors)]
        elif jcfg.transport == "inproc":
            clients = [DirectClient(server, pool) for _ in range(jcfg.n_actors)]
        else:
            raise ValueError(f"unknown transport {jcfg.transport!r}")

        actors = [ActorLoop(env_factory, clients[i], actor_id=i,
                            lstm_width=net.cfg.width, unroll_len=jcfg.unroll_len)
                  for i in range(jcfg.n_actors)]
        history: list[dict] = []
        dropped_stale = 0
        stop_requested = False
        sample_rng = philox(jcfg.seed ^ 0xABCD, 0)

        def ticks_total() -> int:
            return sum(a.stats["ticks"] for a in actors)

        def budget_left() -> bool:
            return jcfg.max_env_ticks is None or ticks_total() < jcfg.max_env_ticks

        def try_update() -> bool:
            nonlocal dropped_stale, stop_requested
            fresh: list[Trajectory] = []
            # sample, parse, and filter stale; retry a few times to fill
            for _ in range(8):
                need = jcfg.batch_size - len(fresh)
                if need <= 0 or len(pool) < jcfg.batch_size:
                    break
                for blob in pool.sample(min(need, len(pool)), sample_rng):
                    t = Trajectory.from_bytes(blob)
                    if learner.is_fresh(t.policy_version):
                        fresh.append(t)
                    else:
                        dropped_stale += 1
            if len(fresh) < jcfg.batch_size:
                return False
            stats = learner.update(TrajectoryBatch(fresh[:jcfg.batch_size]))
            if learner.version % jcfg.sync_every == 0:
                server.set_params(net.params, learner.version)
            stats["dropped_stale"] = dropped_stale
            stats["env_ticks"] = ticks_total()
            history.append(stats)
            if on_update is not None and on_update(stats):
                stop_requested = True
                return False
            return True

        if jcfg.lockstep:
            while len(history) < jcfg.updates and budget_left() and not stop_requested:
                for a in actors:
                    a.run_ticks(jcfg.ticks_per_round)
                while len(history) < jcfg.updates and try_update():
                    pass
        else:
            stop = threading.Event()
            errors: list[str] = []

            def actor_main(a: ActorLoop):
                try:
                    while not stop.is_set():
                        a.run_ticks(jcfg.ticks_per_round)
                except Exception:
                    errors.append(traceback.format_exc())

            threads = [threading.Thread(target=actor_main, args=(a,), daemon=True)
                       for a in actors]
            for t in threads:
                t.start()
            try:
                while len(history) < jcfg.updates and budget_left() \
                        and not stop_requested:
                    if not try_update():
                        if stop_requested:
                            break
                        if all(not t.is_alive() for t in threads):
                            raise RuntimeError(
                                "all actors died:\n" + "\n".join(errors))
                        threading.Event().wait(0.005)
            finally:
                stop.set()
                for t in threads:
                    t.join(timeout=5)
            if errors:
                history.append({"actor_errors": len(errors)})

        rollout = {}
        for a in actors:
            for k, v in a.stats.items():
                rollout[k] = rollout.get(k, 0) + v
        return {"history": history, "rollout": rollout,
                "pool": pool.stats(), "dropped_stale": dropped_stale,
                "final_version": learner.version}
    finally:
        for cl in clients:
            cl.close()
        if sock_server is not None:
            sock_server.close()
