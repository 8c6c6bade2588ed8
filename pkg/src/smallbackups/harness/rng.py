"""Seed derivation for reproducible trials.

Every random stream is a numpy ``Generator`` over PCG64 (128-bit LCG state,
64-bit output).  Trial ``i`` of an experiment with master seed ``m`` draws from
``SeedSequence(m, spawn_key=(i,))``, split into an environment stream and an
agent stream.  Derivation depends only on ``(m, i)``, so trials can run in
any order or in parallel.
"""

from __future__ import annotations

import numpy as np

ENV_STREAM, AGENT_STREAM = 0, 1


def trial_rngs(master_seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    env_seq, agent_seq = np.random.SeedSequence(master_seed, spawn_key=(trial,)).spawn(2)
    return np.random.Generator(np.random.PCG64(env_seq)), np.random.Generator(np.random.PCG64(agent_seq))
