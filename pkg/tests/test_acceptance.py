"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""
import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from rncocycle.bitspace import BitSequence
from rncocycle.cli import main, standard_families
from rncocycle.cocycle import chain_rule_table, composed_cocycle, geodesic_cocycle
from rncocycle.measures import make_period_j, make_sparse, sparse_p
from rncocycle.mtp_oracle import exhaustive_mtp, exhaustive_pushforward, randomized_mtp
from rncocycle.nullsets import block_coarse_trajectory, exact_tail, special_zero_summability, vanishing_report
from rncocycle.walkstats import exact_block_distribution, oscillation_report
from rncocycle import _rng

FIXTURES = Path(__file__).parent / "fixtures"
CALIBRATION = json.loads((FIXTURES / "oscillation_calibration.json").read_text())

RESULTS = {}


def record(n, title, checks, elapsed):
    """Store ``(label, ok)`` checks for criterion ``n`` and return overall status."""
    ok = all(c for _, c in checks)
    detail = "; ".join(f"{label}={'ok' if c else 'FAIL'}" for label, c in checks)
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({elapsed:.2f}s) [{detail}]"
    print(RESULTS[n])
    return ok


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_flip_derivative_identity():
    res, dt = timed(lambda: exhaustive_pushforward(standard_families(), depth=6))
    checks = [
        ("cases", len(res) == 3 * 64 * 6),
        ("residuals_zero", all(r.residual == 0 for r in res)),
        ("runtime<1s", dt < 1.0),
    ]
    assert record(1, "exact flip pushforward, depth 6", checks, dt)


def test_criterion_2_tilted_mtp():
    fams = standard_families()

    def run():
        return randomized_mtp(fams, 500, seed=CALIBRATION["master_seed"]), exhaustive_mtp(fams, depth=4)

    (rand, exh), dt = timed(run)
    checks = [
        ("random_cases", len(rand) == 500),
        ("random_residual_zero", all(r.residual == 0 for r in rand)),
        ("exhaustive_residual_zero", bool(exh) and all(r.residual == 0 for r in exh)),
        ("runtime<10s", dt < 10.0),
    ]
    assert record(2, "tilted mass transport", checks, dt)


def test_criterion_3_formula_vs_composition_and_chain_rule():
    fams = standard_families()
    rng = random.Random(CALIBRATION["master_seed"])
    bad_formula, bad_chain = [], []

    def run():
        for name, spec in fams:
            for _ in range(1000):
                seed = rng.getrandbits(64)
                x = BitSequence((), seed, spec)
                for k in range(13):
                    if geodesic_cocycle(spec, x, k) != composed_cocycle(spec, x, k):
                        bad_formula.append((name, seed, k))
                fails = chain_rule_table(spec, x, 10, 10)
                bad_chain.extend((name, seed, k, m) for k, m in fails)

    _, dt = timed(run)
    checks = [
        ("formula==composition", not bad_formula),
        ("chain_rule", not bad_chain),
        ("runtime<30s", dt < 30.0),
    ]
    assert record(3, "cocycle formula vs composition, chain rule", checks, dt)


def test_criterion_4_walk_reduction():
    def run():
        return exact_block_distribution(make_period_j(3)), [
            exact_block_distribution(make_period_j(j)).mean for j in range(3, 13)
        ]

    (d3, means), dt = timed(run)
    want = {-1: Fraction(8, 27), 0: Fraction(12, 27), 1: Fraction(6, 27), 2: Fraction(1, 27)}
    checks = [
        ("j3_distribution", d3.as_dict() == want),
        ("j3_mean_zero", d3.mean == 0),
        ("means_zero_j3..12", all(m == 0 for m in means)),
        ("runtime<1s", dt < 1.0),
    ]
    assert record(4, "exact block distribution", checks, dt)


@pytest.mark.slow
def test_criterion_5_oscillation():
    T = 10
    res, dt = timed(lambda: oscillation_report(make_period_j(3), 1000, 10**5, [T], CALIBRATION["master_seed"]))
    full = res.fractions()[T]
    early = res.fractions(10**4)[T]
    checks = [
        (f"fraction@1e5={full:.4f}>={CALIBRATION['acceptance_constant']}", full >= CALIBRATION["acceptance_constant"]),
        (f"fraction@1e5>fraction@1e4={early:.4f}", full > early),
        ("runtime<120s", dt < 120.0),
    ]
    assert record(5, "both-sided oscillation, period 3", checks, dt)


def test_criterion_6_sparse_tails():
    def run():
        return {k: exact_tail(k) for k in range(1, 7)}

    tails, dt = timed(run)
    t2, t3 = tails[2].exact_tail, tails[3].exact_tail
    checks = [
        ("k2<=2^-16", t2 is not None and t2 <= Fraction(1, 1 << 16)),
        ("k2<=2^-2", t2 is not None and t2 <= Fraction(1, 4)),
        ("k3<=2^-3", t3 is not None and t3 <= Fraction(1, 8)),
        ("k4..6_exponents", all(tails[k].log2_upper <= -k for k in (4, 5, 6))),
        ("k1_chain_vacuous", tails[1].nominal_final_log2 == 0),
        ("runtime<30s", dt < 30.0),
    ]
    assert record(6, "sparse tail bounds", checks, dt)


def test_criterion_7_nonsummability():
    seeds = _rng.split_seeds(CALIBRATION["master_seed"], 10**4)
    trajs, dt = timed(lambda: [block_coarse_trajectory(s, 3) for s in seeds])
    exceed_ok = all(b.block_sum >= 1 for t in trajs for b in t.blocks if b.ones_count > sparse_p(b.k))
    frac = sum(t.partial_sum >= 1 for t in trajs) / len(trajs)
    checks = [
        ("exceeding_blocks_sum>=1", exceed_ok),
        (f"fraction_partial>=1={frac:.4f}>=0.999", frac >= 0.999),
        ("runtime<60s", dt < 60.0),
    ]
    assert record(7, "block-coarse nonsummability", checks, dt)


def test_criterion_8_vanishing():
    def run():
        return special_zero_summability(), vanishing_report(10**4, 10, CALIBRATION["master_seed"])

    (cert, summ), dt = timed(run)
    exact = summ.exact_special_hits()
    p = float(exact)
    band = 4 * math.sqrt(p * (1 - p) / summ.n_paths)
    observed = summ.fraction_special_hits()
    all_hit = [t for t in summ.trajectories if t.special_hits(1, 5)]
    checks = [
        (f"certified_sum={float(cert.certified):.6f}<0.60", cert.certified < Fraction(3, 5)),
        (f"special_hits={observed:.4f}~{p:.4f}+-{band:.4f}", abs(observed - p) <= band),
        ("envelope_after_5==2^-15", bool(all_hit) and all(t.envelope_after(5) == Fraction(1, 1 << 15) for t in all_hit)),
        ("runtime<60s", dt < 60.0),
    ]
    assert record(8, "vanishing cocycle exhibit", checks, dt)


def _snapshot(out_dir, stdout):
    files = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
    return files, stdout


def test_criterion_9_determinism(tmp_path, capsys):
    commands = {
        "verify": ["--depth", "4"],
        "oscillate": ["--paths", "50", "--blocks", "2000", "--threshold", "5"],
        "vanish": ["--paths", "50", "--k-blocks", "6"],
        "trace": ["--k", "12", "--prefix", "0110"],
        "sweep": ["--paths", "20", "--blocks", "500"],
    }
    t0 = time.perf_counter()
    checks = []
    for name, extra in commands.items():
        runs = []
        for rep in range(2):
            out = tmp_path / f"{name}-{rep}"
            out.mkdir()
            code = main([name, "--seed", "0xC0FFEE", "--out", str(out)] + extra)
            runs.append((code, _snapshot(out, capsys.readouterr().out)))
        checks.append((name, runs[0] == runs[1] and bool(runs[0][1][0])))
    dt = time.perf_counter() - t0
    assert record(9, "byte-identical reruns", checks, dt)


def pytest_terminal_summary_lines():
    return [RESULTS[n] for n in sorted(RESULTS)]


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
