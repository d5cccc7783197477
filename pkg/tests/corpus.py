"""Seeded desk-scale corpora for the acceptance suite.

One depot-free family (read as P1..P4) and one depot family (P5..P8), each
of ``size`` instances with n <= 7, r(v) <= 3, m <= 3.  Half use the closure
metric and half the euclidean one.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from mvmtsp.core import Instance
from mvmtsp.io import generate_instance

FREE = ("P1", "P2", "P3", "P4")
DEPOT = ("P5", "P6", "P7", "P8")


@dataclass(frozen=True)
class CorpusConfig:
    size: int = 200
    n_min: int = 3
    n_max: int = 7
    r_max: int = 3
    m_max: int = 3
    cmax: int = 30
    seed: int = 20240611


def free_family(cfg: CorpusConfig = CorpusConfig()) -> list[Instance]:
    rng = random.Random(cfg.seed)
    out = []
    for i in range(cfg.size):
        n = rng.randint(cfg.n_min, cfg.n_max)
        m = rng.randint(1, cfg.m_max)
        metric = "closure" if i % 2 else "euclidean"
        out.append(generate_instance(n, m, 0, cfg.r_max, metric, rng.randrange(2**31), "P1", cfg.cmax))
    return out


def depot_family(cfg: CorpusConfig = CorpusConfig()) -> list[Instance]:
    rng = random.Random(cfg.seed + 1)
    out = []
    for i in range(cfg.size):
        n = rng.randint(max(2, cfg.n_min), cfg.n_max)
        k = rng.randint(1, min(cfg.m_max, n - 1))
        metric = "closure" if i % 2 else "euclidean"
        out.append(generate_instance(n, k, k, cfg.r_max, metric, rng.randrange(2**31), "P5", cfg.cmax))
    return out
