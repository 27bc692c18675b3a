"""Self-contained validation battery driven by the `validate` subcommand.

Each check pits the analytic pipeline against an independent route
(exhaustive enumeration, the literal consistency-system solver, Monte
Carlo counts) and reports its worst residual against a fixed tolerance.
The battery exits nonzero on any failure.
"""

from dataclasses import dataclass

import numpy as np

from .machine import spin_machines
from .markov import consistency_residual, local_characteristics, solve_stochastic
from .models import NNNParams, NNParams, nn_ising, nn_reference_values, nnn_ising
from .oracle import (
    conditional_from_enumeration,
    empirical_entropy_rate,
    enumerate_gibbs,
    naive_isolated_conditional,
    quadratic_system_solve,
    sample_sequence,
)
from .transfer import build_transfer


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""


def _instances(seed: int, count: int):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        beta = float(np.exp(rng.uniform(np.log(1e-2), np.log(5.0))))
        if rng.random() < 0.5:
            out.append(nn_ising(NNParams(J=rng.uniform(-1.5, 1.5), B=rng.uniform(-2, 2), beta=beta)))
        else:
            out.append(
                nnn_ising(
                    NNNParams(
                        J1=rng.uniform(-1.5, 1.5),
                        J2=rng.uniform(-1.5, 1.5),
                        B=rng.uniform(-2, 2),
                        beta=beta,
                    )
                )
            )
        out[-1] = (out[-1], beta)
    return out


def run_validation(seed: int = 20240, corrupt: bool = False) -> list[CheckResult]:
    checks: list[CheckResult] = []
    instances = _instances(seed, 6)

    # Perron residuals
    worst = 0.0
    for model, beta in instances:
        ts = build_transfer(model, beta)
        worst = max(worst, ts.perron_residual)
    checks.append(CheckResult("perron-residual", worst, 1e-12, worst <= 1e-12))

    # transition-matrix consistency certification (optionally corrupted)
    worst = 0.0
    note = ""
    for model, beta in instances:
        ts = build_transfer(model, beta)
        chain = solve_stochastic(ts)
        matrix = chain.matrix.copy()
        if corrupt:
            matrix[0] = np.roll(matrix[0], 1)
            matrix[0] /= matrix[0].sum()
            note = "matrix intentionally corrupted"
        lc = local_characteristics(ts)
        residual, _ = consistency_residual(lc, matrix)
        worst = max(worst, residual)
    checks.append(
        CheckResult("consistency-residual", worst, 1e-10, worst <= 1e-10, note)
    )

    # enumeration oracle: neighbor conditionals and first-block conditionals
    worst_triple = 0.0
    worst_first = 0.0
    for model, beta in instances:
        if model.blocks.size > 4:
            continue
        ts = build_transfer(model, beta)
        lc = local_characteristics(ts)
        ens = enumerate_gibbs(model, beta, 5, boundary="open")
        mid = conditional_from_enumeration(ens, 2)
        worst_triple = max(worst_triple, float(np.max(np.abs(mid.triple - lc.interior))))
        head = conditional_from_enumeration(ens, 0)
        worst_first = max(worst_first, float(np.max(np.abs(head.first - lc.first_block))))
    checks.append(
        CheckResult("enumeration-conditionals", worst_triple, 1e-12, worst_triple <= 1e-12)
    )
    checks.append(
        CheckResult("enumeration-first-block", worst_first, 1e-12, worst_first <= 1e-12)
    )

    # the isolated-subchain shortcut must visibly disagree somewhere
    biggest = 0.0
    for model, beta in instances:
        ts = build_transfer(model, beta)
        naive = naive_isolated_conditional(ts)
        ens = enumerate_gibbs(model, beta, 2, boundary="open")
        true_step = conditional_from_enumeration(ens, 0).step
        biggest = max(biggest, float(np.max(np.abs(naive - true_step))))
    checks.append(
        CheckResult(
            "isolated-subchain-shortcut-disagrees",
            biggest,
            1e-3,
            biggest > 1e-3,
            "shortcut must differ from the marginalized conditional",
        )
    )

    # literal consistency-system solver against the spectral matrix
    worst = 0.0
    for model, beta in instances:
        if model.blocks.size > 4:
            continue
        ts = build_transfer(model, beta)
        chain = solve_stochastic(ts)
        lc = local_characteristics(ts)
        recovered = quadratic_system_solve(lc)
        worst = max(worst, float(np.max(np.abs(recovered - chain.matrix))))
    checks.append(CheckResult("consistency-system-solver", worst, 1e-8, worst <= 1e-8))

    # Monte Carlo: empirical conditional entropy against the analytic rate
    model, beta = nn_ising(NNParams(J=0.5 * np.log(3.0), B=0.0, beta=1.0)), 1.0
    chain = solve_stochastic(build_transfer(model, beta))
    seq = sample_sequence(chain, 400_000, seed=seed + 1)
    estimate = empirical_entropy_rate(seq, 1)
    analytic = spin_machines(chain).h_mu
    err = abs(estimate.value - analytic)
    bound = max(3.0 * estimate.stderr, 1e-3)
    checks.append(
        CheckResult(
            "empirical-entropy",
            err,
            bound,
            err <= bound,
            f"estimate {estimate.value:.5f} vs analytic {analytic:.5f}",
        )
    )

    # NN closed forms across a small grid
    worst_lc = 0.0
    worst_p = 0.0
    for b in (0.1, 1.0, 10.0):
        for j in (-1.5, 0.0, 1.5):
            for h in (-3.0, 0.0, 3.0):
                params = NNParams(J=j, B=h, beta=b)
                model = nn_ising(params)
                ts = build_transfer(model, b)
                lc = local_characteristics(ts)
                ref = nn_reference_values(params)
                worst_lc = max(worst_lc, float(np.max(np.abs(lc.interior - ref.conditionals))))
                chain = solve_stochastic(ts)
                worst_p = max(worst_p, abs(chain.matrix[1, 1] - ref.p_up_up))
    checks.append(CheckResult("nn-closed-form-conditionals", worst_lc, 1e-12, worst_lc <= 1e-12))
    checks.append(CheckResult("nn-closed-form-transition", worst_p, 1e-10, worst_p <= 1e-10))

    return checks


def render_report(checks: list[CheckResult]) -> str:
    lines = []
    for check in checks:
        verdict = "PASS" if check.passed else "FAIL"
        extra = f"  ({check.note})" if check.note else ""
        lines.append(
            f"{check.name}: residual {check.residual:.3e} vs tolerance "
            f"{check.tolerance:.1e}: {verdict}{extra}"
        )
    failed = sum(1 for c in checks if not c.passed)
    lines.append(
        f"{len(checks) - failed}/{len(checks)} checks passed"
        + ("" if failed == 0 else f", {failed} FAILED")
    )
    return "\n".join(lines) + "\n"
