"""Process-parallel fan-out for sampled experiments.

Each sample is a pure function of (descriptor, xi text, sampler config,
sample index), so the fan-out re-derives everything inside the worker
and the merge by sample index is deterministic regardless of worker
scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from .groups import make_oracle
from .tours import ExperimentReport, SamplerConfig, l_prime, sample_related_set, tsp_exact


def _one_sample(args):
    descriptor, xi_text, config, index = args
    oracle = make_oracle(descriptor)
    xi = oracle.parse_element(xi_text)
    rset = sample_related_set(oracle, xi, config, index)
    tour = tsp_exact(rset, cap=config.exact_cap)
    row = {
        "size": rset.size,
        "L": tour.length,
        "ratio": str(Fraction(tour.length, rset.size)),
    }
    if config.compute_lprime:
        row["Lprime"] = l_prime(rset, cap=config.exact_cap).value
    return index, row, [oracle.format_element(g) for g in rset.elements]


def run_experiment_parallel(descriptor: str, xi_text: str, lam, config: SamplerConfig,
                            jobs: int) -> ExperimentReport:
    lam = Fraction(str(lam))
    tasks = [(descriptor, xi_text, config, i) for i in range(config.samples)]
    results = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for item in pool.map(_one_sample, tasks):
            results.append(item)
    results.sort(key=lambda t: t[0])
    per_sample = [row for _, row, _ in results]
    violations = [
        {"size": row["size"], "L": row["L"], "elements": elements}
        for _, row, elements in results
        if Fraction(row["L"]) < lam * row["size"]
    ]
    min_ratio = min((Fraction(row["ratio"]) for row in per_sample), default=None)
    oracle = make_oracle(descriptor)
    return ExperimentReport(
        oracle=descriptor,
        xi=xi_text,
        lam=str(lam),
        per_sample=per_sample,
        min_ratio=str(min_ratio) if min_ratio is not None else None,
        violations=violations,
        config={
            "samples": config.samples,
            "seed": config.seed,
            "max_size": config.max_size,
            "style": config.style,
        },
    )
