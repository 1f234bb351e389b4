"""Monte Carlo classification of random GHZ-diagonal states.

Each state goes through a fixed decision order:

1. partial transpose on A|BC, B|AC, C|AB; any negative eigenvalue gives NPT
2. the anti-diagonal criterion with an optimised X gives PPT_VIOLATING
3. separability certificates: abs_sum, then mu_cubed, then the two-term search
4. with an odd number of negative XXX/YYX/YXY/XYY coefficients PPT is already
   sufficient, giving SEP_PPT_SUFFICIENT
5. anything left is UNDECIDED
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import criterion, separability
from .linalg import PSD_TOL, pt_min_eigenvalues
from .states import GhzDiagonalState, ghz_diagonal_from_probs, sample_simplex


class Verdict(str, enum.Enum):
    NPT = "NPT"
    PPT_VIOLATING = "PPT_VIOLATING"
    SEP_ABS_SUM = "SEP_ABS_SUM"
    SEP_MU = "SEP_MU"
    SEP_TWO_TERM = "SEP_TWO_TERM"
    SEP_PPT_SUFFICIENT = "SEP_PPT_SUFFICIENT"
    UNDECIDED = "UNDECIDED"


ENTANGLED = (Verdict.NPT, Verdict.PPT_VIOLATING)
SEPARABLE = (Verdict.SEP_ABS_SUM, Verdict.SEP_MU, Verdict.SEP_TWO_TERM, Verdict.SEP_PPT_SUFFICIENT)


@dataclass
class ClassificationRecord:
    probs: np.ndarray
    verdict: Verdict
    ppt_min_eigs: np.ndarray
    criterion: criterion.CriterionVerdict | None = None
    certificate: separability.SeparabilityCertificate | None = None
    seconds: float = 0.0
    # an NPT state that the criterion did not flag
    dominance_failure: bool = False
    # entangled by some test and certified separable at the same time
    conflict: bool = False
    revalidation_error: str | None = None


def odd_negative(s: GhzDiagonalState) -> bool:
    return bool(np.prod(s.lambdas[3:]) < 0.0)


def classify_state(
    s: GhzDiagonalState, ppt_min_eigs=None, *, seed=0, validate: bool = True
) -> ClassificationRecord:
    """Classify one GHZ-diagonal state.

    ``ppt_min_eigs`` may carry precomputed partial-transpose minima (as from a
    batched run). With ``validate`` every certificate is rebuilt and checked
    before it is accepted; batch callers can switch this off and validate
    afterwards.
    """
    t0 = time.perf_counter()
    rho = s.matrix
    if ppt_min_eigs is None:
        ppt_min_eigs = pt_min_eigenvalues(rho)
    ppt_min_eigs = np.asarray(ppt_min_eigs, dtype=float)
    rec = ClassificationRecord(probs=s.probs, verdict=Verdict.UNDECIDED, ppt_min_eigs=ppt_min_eigs)

    if np.min(ppt_min_eigs) < -PSD_TOL:
        rec.verdict = Verdict.NPT
        _, rec.criterion = criterion.optimize_x(rho, early_exit=True)
        rec.dominance_failure = not rec.criterion.violated
        rec.conflict = separability.certify(s, two_term=False) is not None
    else:
        _, rec.criterion = criterion.optimize_x(rho)
        if rec.criterion.violated:
            rec.verdict = Verdict.PPT_VIOLATING
            rec.conflict = separability.certify(s, two_term=False) is not None
        else:
            cert = separability.abs_sum_certificate(s) or separability.mu_certificate(s)
            if cert is None and not odd_negative(s):
                cert = separability.two_term_certificate(s, seed=seed)
            if cert is not None:
                rec.certificate = cert
                rec.verdict = {
                    "abs_sum": Verdict.SEP_ABS_SUM,
                    "mu_cubed": Verdict.SEP_MU,
                    "two_term_search": Verdict.SEP_TWO_TERM,
                }[cert.method]
                if validate:
                    try:
                        separability.build_separable_witness_state(cert, s)
                    except separability.CertificateError as exc:
                        rec.revalidation_error = str(exc)
            elif odd_negative(s):
                rec.verdict = Verdict.SEP_PPT_SUFFICIENT
    rec.seconds = time.perf_counter() - t0
    return rec


def _binomial_se(k: int, n: int) -> float:
    f = k / n
    return math.sqrt(f * (1.0 - f) / n)


@dataclass
class EnsembleReport:
    """Aggregate counts of a run; fractions are counts over ``n``."""

    n: int
    seed: int
    counts: dict = field(default_factory=lambda: {v: 0 for v in Verdict})
    dominance_failures: int = 0
    conflicts: int = 0
    revalidation_failures: int = 0
    certificates_checked: int = 0

    def fraction(self, *verdicts: Verdict) -> float:
        return sum(self.counts[v] for v in verdicts) / self.n

    def stderr(self, *verdicts: Verdict) -> float:
        return _binomial_se(sum(self.counts[v] for v in verdicts), self.n)

    @property
    def rows(self) -> list[tuple[str, tuple[Verdict, ...]]]:
        return [
            ("Entangled", ENTANGLED),
            ("NPT", (Verdict.NPT,)),
            ("PPT, but violating the criterion", (Verdict.PPT_VIOLATING,)),
            ("Separable", SEPARABLE),
            (
                "single-angle or abs-sum certificate",
                (Verdict.SEP_ABS_SUM, Verdict.SEP_MU, Verdict.SEP_PPT_SUFFICIENT),
            ),
            ("two-term certificate in addition", (Verdict.SEP_TWO_TERM,)),
            ("Undecided", (Verdict.UNDECIDED,)),
        ]

    def merge(self, other: "EnsembleReport") -> None:
        for v in Verdict:
            self.counts[v] += other.counts[v]
        self.dominance_failures += other.dominance_failures
        self.conflicts += other.conflicts
        self.revalidation_failures += other.revalidation_failures
        self.certificates_checked += other.certificates_checked

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "counts": {v.value: self.counts[v] for v in Verdict},
            "fractions": {v.value: self.fraction(v) for v in Verdict},
            "stderr": {v.value: self.stderr(v) for v in Verdict},
            "entangled": self.fraction(*ENTANGLED),
            "separable": self.fraction(*SEPARABLE),
            "bound_entangled_volume": self.fraction(Verdict.PPT_VIOLATING),
            "dominance_failures": self.dominance_failures,
            "conflicts": self.conflicts,
            "certificates_checked": self.certificates_checked,
            "revalidation_failures": self.revalidation_failures,
        }

    def table(self) -> str:
        lines = [f"{'class':<40} {'fraction':>9} {'+/-':>8} {'count':>9}"]
        for i, (label, verdicts) in enumerate(self.rows):
            indent = "  " if i in (1, 2, 4, 5) else ""
            k = sum(self.counts[v] for v in verdicts)
            lines.append(
                f"{indent + label:<40} {100 * k / self.n:8.2f}% {100 * self.stderr(*verdicts):7.2f}% {k:9d}"
            )
        lines.append(
            f"n = {self.n}, seed = {self.seed}, dominance failures = {self.dominance_failures}, "
            f"conflicts = {self.conflicts}, certificate failures = {self.revalidation_failures}"
            f"/{self.certificates_checked}"
        )
        return "\n".join(lines)


def _run_chunk(args) -> EnsembleReport:
    seed, index, size = args
    probs = sample_simplex([seed, index], size)
    sts = [ghz_diagonal_from_probs(p) for p in probs]
    ppt = pt_min_eigenvalues(np.stack([s.matrix for s in sts]))
    report = EnsembleReport(n=size, seed=seed)
    pending = []
    for i, (s, eigs) in enumerate(zip(sts, ppt)):
        rec = classify_state(s, eigs, seed=[seed, index, i], validate=False)
        report.counts[rec.verdict] += 1
        report.dominance_failures += rec.dominance_failure
        report.conflicts += rec.conflict
        if rec.certificate is not None:
            pending.append((rec.certificate, s))
    errors = separability.validate_certificates(pending)
    report.certificates_checked = len(pending)
    report.revalidation_failures = sum(e is not None for e in errors)
    return report


def run_ensemble(n: int, seed: int = 0, chunk_size: int = 10_000, workers: int = 1) -> EnsembleReport:
    """Sample ``n`` GHZ-diagonal states and classify them.

    The ensemble is cut into chunks of ``chunk_size`` with chunk ``i`` drawn
    from the seed ``[seed, i]``, so the result does not depend on ``workers``.
    Certificates are re-validated in one batch per chunk.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    jobs = []
    for index, start in enumerate(range(0, n, chunk_size)):
        jobs.append((seed, index, min(chunk_size, n - start)))
    report = EnsembleReport(n=n, seed=seed)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    for part in parts:
        report.merge(part)
    return report
