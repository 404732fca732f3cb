"""Seeded sampling and the parallel property runner shared by every check.

Sample i always draws from numpy.random.default_rng([seed, i]), so a report
depends only on (seed, samples) and never on n_jobs.
"""

import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from joblib import Parallel, delayed

from config import Settings

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    name: str
    passed: int = 0
    total: int = 0
    counterexample: dict = None
    notes: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.counterexample is None and self.passed == self.total

    def to_dict(self):
        return {
            'name': self.name,
            'ok': self.ok,
            'passed': self.passed,
            'total': self.total,
            'counterexample': self.counterexample,
            'notes': self.notes,
        }


def sample_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def random_group_vector(lattice, rng, bound):
    coords = [int(c) for c in rng.integers(-bound, bound + 1, size=lattice.rank)]
    return lattice.combine(coords)


def random_multi_index(algebra, rng, max_degree):
    shape = algebra.shape
    positions = ([shape.position(p) for p in shape.indices] if algebra.extended
                 else [shape.position(p) for p in shape.allowed_t])
    i = [0] * shape.dim
    if not positions or max_degree <= 0:
        return tuple(i)
    degree = int(rng.integers(0, max_degree + 1))
    for _ in range(degree):
        i[positions[int(rng.integers(0, len(positions)))]] += 1
    return tuple(i)


def random_key(algebra, rng, settings):
    alpha = random_group_vector(algebra.lattice, rng, settings.coord_bound)
    return alpha, random_multi_index(algebra, rng, settings.max_degree)


def random_monomial(algebra, rng, settings, coef=None):
    alpha, i = random_key(algebra, rng, settings)
    if coef is None:
        coef = int(rng.integers(1, 4)) * (1 if rng.integers(0, 2) else -1)
    return algebra.monomial(alpha, i, coef, check=False)


def random_element(algebra, rng, settings, terms=2):
    u = algebra.zero()
    for _ in range(terms):
        u = u + random_monomial(algebra, rng, settings)
    return u


def _run_one(check, seed, index):
    return index, check(sample_rng(seed, index))


def run_property(name, check, settings=None, samples=None):
    """Run ``check(rng)`` on every sample; a non-None return value is a counterexample dict."""
    settings = settings or Settings()
    total = settings.samples if samples is None else samples
    jobs = (delayed(_run_one)(check, settings.seed, i) for i in range(total))
    results = Parallel(n_jobs=settings.n_jobs)(jobs)
    results.sort(key=lambda pair: pair[0])
    report = CheckReport(name=name, total=total)
    for index, witness in results:
        if witness is None:
            report.passed += 1
        elif report.counterexample is None:
            report.counterexample = dict(witness, sample=index)
    if report.ok:
        logger.info("✅ %s: %d/%d samples passed", name, report.passed, total)
    else:
        logger.warning("❌ %s: counterexample at sample %s", name, report.counterexample.get('sample'))
    return report


def bind(fn, *args, **kwargs):
    """A picklable check closure for run_property."""
    return partial(fn, *args, **kwargs)
