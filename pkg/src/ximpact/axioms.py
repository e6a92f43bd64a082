"""Numerical verification of the behavioural properties of impact models.

Each property (invariance under market transformations, arbitrage
exclusion, fragmentation invariance, liquidity stability, covariance
consistency) is tested on randomized instances: a property is reported
``satisfied`` when no violation beyond the configured tolerance appears
over the trial budget, ``violated`` when a witness instance exceeds it.
Verdicts are deterministic given the seed, and witnesses are reproducible.

The expected verdict grid for the eleven benchmark models is embedded as
``TABLE1_PRINTED`` (the published classification) together with two
documented corrections in ``DOCUMENTED_DEVIATIONS`` where the published
cell is provably unreachable; ``TABLE1_EXPECTED`` is the corrected grid
that an honest checker reproduces.  ``axiom_matrix`` diffs its results
against both.

Property shorthands (grid columns)::

    PI   permutation invariance          SA   impact values are PSD
    DI   direct (diagonal) invariance    DA   impact values are symmetric
    CI   cash (currency) invariance      WFI / SSFI / SFI
    SI   split (volume unit) invariance       weak / semi-strong / strong
    RI   rotation invariance                  fragmentation invariance
    WCS / SCS  weak / strong cross-stability
    SS   self-stability (bounded self-impact of vanishing liquidity)
    PCC  predicted covariance proportional to the price covariance
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import matops
from .errors import BasisError, PreconditionError, XImpactError
from .models import (
    EXTRA_MODELS,
    MODEL_CATALOGUE,
    CovarianceTriple,
    ModelId,
    evaluate,
    parse_model,
)

__all__ = [
    "AXIOMS",
    "TrialConfig",
    "AxiomVerdict",
    "AxiomReport",
    "TABLE1_PRINTED",
    "TABLE1_EXPECTED",
    "EXTRA_EXPECTED",
    "DOCUMENTED_DEVIATIONS",
    "gen_triple",
    "gen_kernel_triple",
    "scale_flow_liquidity",
    "check_symmetry_axiom",
    "check_arbitrage_axiom",
    "check_fragmentation_axiom",
    "stability_slope",
    "check_pcc",
    "lemma_expansion_check",
    "axiom_matrix",
]

AXIOMS = ("PI", "DI", "CI", "SI", "RI", "SA", "DA", "WFI", "SSFI", "SFI", "WCS", "SCS", "SS", "PCC")

SPECTRUM_PROFILES = {"well": 10.0, "ill": 1e6}

# Published verdict grid: rows are the benchmark models, columns AXIOMS.
# fmt: off
TABLE1_PRINTED = {
    "direct":     dict(PI=1, DI=1, CI=1, SI=1, RI=0, SA=1, DA=1, WFI=0, SSFI=0, SFI=0, WCS=1, SCS=1, SS=0, PCC=0),
    "whitening":  dict(PI=1, DI=1, CI=1, SI=0, RI=1, SA=0, DA=0, WFI=1, SSFI=0, SFI=0, WCS=0, SCS=0, SS=0, PCC=1),
    "whitening*": dict(PI=1, DI=1, CI=1, SI=1, RI=0, SA=0, DA=0, WFI=1, SSFI=0, SFI=0, WCS=0, SCS=0, SS=0, PCC=1),
    "el":         dict(PI=1, DI=1, CI=1, SI=0, RI=1, SA=1, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=1, PCC=0),
    "el*":        dict(PI=1, DI=1, CI=1, SI=1, RI=0, SA=1, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=1, PCC=0),
    "kyle":       dict(PI=1, DI=1, CI=1, SI=1, RI=1, SA=1, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=0, PCC=1),
    "r-direct":   dict(PI=1, DI=1, CI=1, SI=1, RI=0, SA=1, DA=0, WFI=0, SSFI=0, SFI=0, WCS=1, SCS=1, SS=0, PCC=0),
    "ml":         dict(PI=1, DI=1, CI=1, SI=1, RI=1, SA=0, DA=0, WFI=1, SSFI=0, SFI=0, WCS=0, SCS=0, SS=0, PCC=0),
    "r-el":       dict(PI=1, DI=1, CI=1, SI=0, RI=1, SA=0, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=1, PCC=0),
    "r-el*":      dict(PI=1, DI=1, CI=1, SI=1, RI=0, SA=0, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=1, PCC=0),
    "r-kyle":     dict(PI=1, DI=1, CI=1, SI=1, RI=1, SA=1, DA=1, WFI=1, SSFI=1, SFI=1, WCS=1, SCS=1, SS=0, PCC=0),
}
# fmt: on

#: Cells of the published grid that are provably unreachable; the derived
#: value is what any sound checker reports.  Witnesses in the test suite.
DOCUMENTED_DEVIATIONS = {
    ("r-direct", "DA"): {
        "printed": False,
        "derived": True,
        "reason": (
            "the model is a diagonal matrix by construction, and diagonal "
            "matrices are symmetric; no input can make it asymmetric"
        ),
    },
    ("r-kyle", "SFI"): {
        "printed": True,
        "derived": False,
        "reason": (
            "the response-implied covariance R Omega^-1 R' mixes flow "
            "correlations across the zero-volatility split, so projecting "
            "the statistics changes the model value; a 2x2 counterexample "
            "with correlated flows gives an O(1) residual"
        ),
    },
}


def _apply_deviations(grid):
    out = {m: dict(row) for m, row in grid.items()}
    for (model, axiom), info in DOCUMENTED_DEVIATIONS.items():
        out[model][axiom] = int(info["derived"])
    return out


#: The grid an honest checker reproduces (published + documented corrections).
TABLE1_EXPECTED = _apply_deviations(TABLE1_PRINTED)

#: Expected rows for the documented half-power variants (not benchmark rows).
#: They match their full-power siblings except where the missing power of
#: the scale vector breaks an invariance (or restores boundedness).
EXTRA_EXPECTED = {
    "direct-sqrt": {**TABLE1_PRINTED["direct"], "CI": 0, "SI": 0},
    "r-direct-sqrt": {**TABLE1_EXPECTED["r-direct"], "SI": 0, "SS": 1},
}


@dataclass(frozen=True)
class TrialConfig:
    """Configuration for randomized property checks."""

    n: int = 4
    trials: int = 100
    tol: float = 1e-8
    seed: int = 0
    eps_ladder: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    kernel_dim: int = 1
    # Tail slope beyond which a block norm counts as diverging.
    slope_bound: float = 0.2
    # Flow-covariance re-inflation floor for projected-statistics
    # evaluations, relative to the largest omega eigenvalue.
    omega_floor_rtol: float = 1e-12

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.n < 1 or self.trials < 1:
            raise ValueError("n and trials must be >= 1")
        ladder = tuple(float(e) for e in self.eps_ladder)
        if any(b >= a for a, b in zip(ladder, ladder[1:])) or min(ladder) < 1e-8:
            raise ValueError("eps_ladder must be strictly decreasing with min >= 1e-8")
        object.__setattr__(self, "eps_ladder", ladder)


@dataclass(frozen=True)
class AxiomVerdict:
    model: str
    axiom: str
    verdict: str  # "satisfied" | "violated" | "inconclusive"
    worst_residual: float
    witness: dict = field(default_factory=dict)
    note: str = ""


def _trial_rng(cfg: TrialConfig, axiom: str, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence((cfg.seed, cfg.n, AXIOMS.index(axiom), trial))
    return np.random.default_rng(ss)


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def _random_pd(rng: np.random.Generator, n: int, cond: float) -> np.ndarray:
    q = _random_orthogonal(rng, n)
    lam = np.logspace(0.0, -math.log10(cond), n) if n > 1 else np.ones(1)
    lam = lam * rng.uniform(0.5, 2.0)
    m = (q * lam) @ q.T
    return 0.5 * (m + m.T)


def _random_response_seed(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw the latent impact matrix behind the response draw.

    Positive dominant diagonal plus an asymmetric off-diagonal part large
    enough for the symmetrized part to turn indefinite in a sizable share
    of draws: that is what separates models whose outputs are PSD by
    construction from those that merely inherit the sign of the response.
    """
    d = np.diag(rng.uniform(0.6, 1.4, n))
    b = rng.normal(scale=1.1 / math.sqrt(n), size=(n, n))
    np.fill_diagonal(b, 0.0)
    return d + b


# Per-asset self-response floor: markets show positive self-response, and
# several diagonal models are meaningful only on that domain.
_RESPONSE_DIAG_FLOOR = 0.05


def gen_triple(n: int, seed, spectrum_profile: str = "well") -> CovarianceTriple:
    """Random full-rank statistics triple.

    The response is ``L0 @ omega`` with a latent ``L0`` that is positive
    definite in the quadratic-form sense on average but asymmetric, and
    self-responses are kept positive (see module notes).  The kernel
    condition holds trivially since sigma is full rank.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cond = SPECTRUM_PROFILES[spectrum_profile]
    sigma = _random_pd(rng, n, cond)
    omega = _random_pd(rng, n, cond)
    l0 = _random_response_seed(rng, n)
    r = l0 @ omega
    for i in range(n):
        if r[i, i] <= _RESPONSE_DIAG_FLOOR:
            l0[i, i] += (_RESPONSE_DIAG_FLOOR - r[i, i]) / omega[i, i]
    return CovarianceTriple(sigma, omega, l0 @ omega)


def gen_kernel_triple(n: int, kernel_dim: int, seed, spectrum_profile: str = "well"):
    """Statistics triple whose price covariance has a kernel of given
    dimension, with the response left-projected so the kernel condition
    holds exactly.  Returns the triple and the projector onto the kernel.
    """
    if not 1 <= kernel_dim < n:
        raise BasisError(f"kernel_dim must be in [1, {n - 1}], got {kernel_dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cond = SPECTRUM_PROFILES[spectrum_profile]
    q = _random_orthogonal(rng, n)
    basis_perp, basis_v = q[:, : n - kernel_dim], q[:, n - kernel_dim :]
    lam = np.logspace(0.0, -math.log10(cond), n - kernel_dim) * rng.uniform(0.5, 2.0)
    sigma = (basis_perp * lam) @ basis_perp.T
    sigma = 0.5 * (sigma + sigma.T)
    omega = _random_pd(rng, n, cond)
    proj = matops.projector(basis_v)
    r = proj.complement @ (_random_response_seed(rng, n) @ omega)
    return CovarianceTriple(sigma, omega, r), proj


def scale_flow_liquidity(t: CovarianceTriple, p: matops.Projector, eps: float) -> CovarianceTriple:
    """Multiply the liquidity of the subspace of ``p`` by ``eps``.

    The price covariance is unchanged; the flow covariance is sandwiched
    with ``(1 - P) + eps P`` and the response picks up one factor on its
    flow side.  ``eps = 1`` is the identity.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    d = p.complement + eps * p.P
    omega = d @ t.omega @ d
    return CovarianceTriple(t.sigma, 0.5 * (omega + omega.T), t.response @ d)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    """Relative deviation of a from b, scaled by the larger norm."""
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


def _verdict_from_trials(model, axiom, residuals, witnesses, tol, notes=""):
    worst = int(np.argmax(residuals))
    verdict = "satisfied" if residuals[worst] <= tol else "violated"
    return AxiomVerdict(
        model=str(model),
        axiom=axiom,
        verdict=verdict,
        worst_residual=float(residuals[worst]),
        witness=witnesses[worst],
        note=notes,
    )


def _safe_eval(model, triple):
    return evaluate(model, triple).matrix


def check_symmetry_axiom(model, axiom: str, cfg: TrialConfig) -> AxiomVerdict:
    """PI, DI, CI, SI or RI for one model."""
    model = model if isinstance(model, ModelId) else parse_model(model)
    if axiom not in ("PI", "DI", "CI", "SI", "RI"):
        raise ValueError(f"not a symmetry axiom: {axiom}")
    residuals, witnesses = [], []
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, axiom, k)
        try:
            if axiom == "DI":
                res = _di_residual(model, cfg.n, rng)
            else:
                t = gen_triple(cfg.n, rng)
                lam = _safe_eval(model, t)
                if axiom == "PI":
                    perm = rng.permutation(cfg.n)
                    pm = np.eye(cfg.n)[perm]
                    t2 = CovarianceTriple(
                        pm @ t.sigma @ pm.T, pm @ t.omega @ pm.T, pm @ t.response @ pm.T
                    )
                    res = _rel(_safe_eval(model, t2), pm @ lam @ pm.T)
                elif axiom == "CI":
                    alpha = float(rng.uniform(0.4, 2.5))
                    t2 = CovarianceTriple(alpha**2 * t.sigma, t.omega, alpha * t.response)
                    res = _rel(_safe_eval(model, t2), alpha * lam)
                elif axiom == "SI":
                    d = rng.uniform(0.4, 2.5, cfg.n)
                    dm, di = np.diag(d), np.diag(1.0 / d)
                    t2 = CovarianceTriple(di @ t.sigma @ di, dm @ t.omega @ dm, di @ t.response @ dm)
                    res = _rel(_safe_eval(model, t2), di @ lam @ di)
                else:  # RI
                    o = _random_orthogonal(rng, cfg.n)
                    t2 = CovarianceTriple(o @ t.sigma @ o.T, o @ t.omega @ o.T, o @ t.response @ o.T)
                    res = _rel(_safe_eval(model, t2), o @ lam @ o.T)
        except XImpactError as exc:
            return AxiomVerdict(str(model), axiom, "inconclusive", math.nan, {"trial": k}, str(exc))
        residuals.append(res)
        witnesses.append({"trial": k, "n": cfg.n})
    return _verdict_from_trials(model, axiom, residuals, witnesses, cfg.tol)


def _di_residual(model, n, rng) -> float:
    """Joint diagonal evaluation against the sum of single-asset ones."""
    s = rng.uniform(0.5, 2.0, n)
    s = s * (1.0 + 0.1 * np.arange(n))  # distinct price scales
    w = rng.uniform(0.5, 2.0, n)
    r = rng.uniform(0.2, 1.5, n) * rng.choice([-1.0, 1.0], n)
    joint = CovarianceTriple(np.diag(s**2), np.diag(w**2), np.diag(r))
    lam = _safe_eval(model, joint)
    total = np.zeros((n, n))
    for i in range(n):
        single = CovarianceTriple(
            np.array([[s[i] ** 2]]), np.array([[w[i] ** 2]]), np.array([[r[i]]])
        )
        total[i, i] = _safe_eval(model, single)[0, 0]
    return _rel(lam, total)


def check_arbitrage_axiom(model, axiom: str, cfg: TrialConfig) -> AxiomVerdict:
    """SA (positive semi-definite values) or DA (symmetric values).

    SA is measured on the symmetrized part, which is what the quadratic
    execution cost sees; a note is attached when the raw matrix is
    asymmetric.  SA trials alternate well- and ill-conditioned statistics:
    near-degenerate spectra are where sign violations surface.
    """
    model = model if isinstance(model, ModelId) else parse_model(model)
    if axiom not in ("SA", "DA"):
        raise ValueError(f"not an arbitrage axiom: {axiom}")
    residuals, witnesses = [], []
    asymmetric_seen = False
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, axiom, k)
        profile = "ill" if (axiom == "SA" and k % 2 == 1) else "well"
        try:
            t = gen_triple(cfg.n, rng, spectrum_profile=profile)
            lam = _safe_eval(model, t)
        except XImpactError as exc:
            return AxiomVerdict(str(model), axiom, "inconclusive", math.nan, {"trial": k}, str(exc))
        sym = 0.5 * (lam + lam.T)
        if axiom == "DA":
            nl = np.linalg.norm(lam)
            res = float(np.linalg.norm(lam - lam.T) / nl) if nl > 0 else 0.0
        else:
            w = np.linalg.eigvalsh(sym)
            scale = max(abs(w[0]), abs(w[-1]))
            res = float(max(0.0, -w[0]) / scale) if scale > 0 else 0.0
            if np.linalg.norm(lam - lam.T) > cfg.tol * max(np.linalg.norm(lam), 1e-300):
                asymmetric_seen = True
        residuals.append(res)
        witnesses.append({"trial": k, "n": cfg.n, "profile": profile})
    note = "tested on symmetrized part; raw matrix asymmetric" if (axiom == "SA" and asymmetric_seen) else ""
    return _verdict_from_trials(model, axiom, residuals, witnesses, cfg.tol, note)


def _projected_triple(t: CovarianceTriple, p: matops.Projector, cfg: TrialConfig) -> CovarianceTriple:
    """Statistics with the subspace of ``p`` projected out; the flow
    covariance is re-inflated to PD with a small spectral floor."""
    pbar = p.complement
    wmax = float(np.linalg.eigvalsh(t.omega)[-1])
    omega = matops.clip_psd(pbar @ t.omega @ pbar, cfg.omega_floor_rtol * wmax)
    sigma = pbar @ t.sigma @ pbar
    return CovarianceTriple(0.5 * (sigma + sigma.T), omega, pbar @ t.response @ pbar)


def check_fragmentation_axiom(model, axiom: str, cfg: TrialConfig) -> AxiomVerdict:
    """WFI, SSFI or SFI on kernel-constrained triples.

    Each stronger form includes the weaker ones, matching how the
    properties are defined.
    """
    model = model if isinstance(model, ModelId) else parse_model(model)
    if axiom not in ("WFI", "SSFI", "SFI"):
        raise ValueError(f"not a fragmentation axiom: {axiom}")
    if not 1 <= cfg.kernel_dim < cfg.n:
        raise BasisError("kernel_dim must satisfy 1 <= kernel_dim < n")
    residuals, witnesses = [], []
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, axiom, k)
        try:
            t, proj = gen_kernel_triple(cfg.n, cfg.kernel_dim, rng)
            lam = _safe_eval(model, t)
            nl = max(np.linalg.norm(lam), 1e-300)
            res = float(np.linalg.norm(proj.P @ lam) / nl)
            if axiom in ("SSFI", "SFI"):
                res = max(res, float(np.linalg.norm(lam @ proj.P) / nl))
            if axiom == "SFI":
                lam_proj = _safe_eval(model, _projected_triple(t, proj, cfg))
                res = max(res, float(np.linalg.norm(lam - lam_proj) / nl))
        except XImpactError as exc:
            return AxiomVerdict(str(model), axiom, "inconclusive", math.nan, {"trial": k}, str(exc))
        residuals.append(res)
        witnesses.append({"trial": k, "n": cfg.n, "kernel_dim": cfg.kernel_dim})
    return _verdict_from_trials(model, axiom, residuals, witnesses, cfg.tol)


def _coordinate_projector(rng: np.random.Generator, n: int, dim: int) -> matops.Projector:
    idx = np.sort(rng.choice(n, size=dim, replace=False))
    basis = np.zeros((n, dim))
    basis[idx, np.arange(dim)] = 1.0
    return matops.projector(basis)


def _tail_slope(ladder, norms, ref: float) -> tuple[float, bool]:
    """Least-squares slope of log norm vs log eps over the ladder tail.

    Returns (slope, identically_zero).  Norms at round-off level relative
    to ``ref`` count as identically zero (slope defined as 0).
    """
    v = np.asarray(norms, dtype=float)
    if v.max() <= 1e-13 * ref:
        return 0.0, True
    tail = min(3, len(ladder))
    x = np.log10(np.asarray(ladder[-tail:], dtype=float))
    y = np.log10(np.maximum(v[-tail:], 1e-300))
    return float(np.polyfit(x, y, 1)[0]), False


def stability_slope(model, block: str, cfg: TrialConfig):
    """Liquidity-scaling behaviour of one block of the impact matrix.

    ``block`` is one of ``cross_offdiag`` (the two off-diagonal blocks,
    weak cross-stability), ``liquid_block`` (the liquid-side block and its
    convergence, strong cross-stability) and ``self_block``
    (self-stability).  The scaling subspace is a random coordinate
    subspace of dimension ``kernel_dim``: coordinate splits are what the
    liquid/illiquid distinction means for identifiable instruments.

    A block is bounded when its tail slope stays above ``-slope_bound``
    (decaying blocks are bounded too).  The ``liquid_block`` verdict
    additionally requires the block to converge along the ladder:
    vanishing final increments or a geometric decrease of increments.
    Returns ``(mean_slope, AxiomVerdict)``.
    """
    model = model if isinstance(model, ModelId) else parse_model(model)
    if block not in ("cross_offdiag", "liquid_block", "self_block"):
        raise ValueError(f"unknown block {block!r}")
    if len(cfg.eps_ladder) < 4:
        raise ValueError("eps_ladder needs at least 4 points")
    axiom = {"cross_offdiag": "WCS", "liquid_block": "SCS", "self_block": "SS"}[block]
    slopes, residuals, witnesses = [], [], []
    notes = ""
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, axiom, k)
        try:
            t = gen_triple(cfg.n, rng)
            proj = _coordinate_projector(rng, cfg.n, cfg.kernel_dim)
            pbar = proj.complement
            lams = [_safe_eval(model, scale_flow_liquidity(t, proj, e)) for e in cfg.eps_ladder]
            ref = max(float(np.linalg.norm(lams[0])), 1e-300)
            if block == "cross_offdiag":
                norms = [
                    np.linalg.norm(pbar @ m @ proj.P) + np.linalg.norm(proj.P @ m @ pbar)
                    for m in lams
                ]
            elif block == "self_block":
                norms = [np.linalg.norm(proj.P @ m @ proj.P) for m in lams]
            else:
                norms = [np.linalg.norm(pbar @ m @ pbar) for m in lams]
            slope, zero = _tail_slope(cfg.eps_ladder, norms, ref)
            if zero:
                notes = "block identically zero; slope defined as 0"
            diverging = (not zero) and slope < -cfg.slope_bound
            res = max(0.0, -slope - cfg.slope_bound) if diverging else 0.0
            if block == "liquid_block" and not diverging:
                diffs = [
                    float(np.linalg.norm(pbar @ (a - b) @ pbar))
                    for a, b in zip(lams[1:], lams[:-1])
                ]
                scale = max(float(np.linalg.norm(pbar @ lams[-1] @ pbar)), 1e-300)
                converged = diffs[-1] <= cfg.tol * scale or diffs[-1] <= 0.3 * diffs[-2]
                if not converged:
                    res = max(res, diffs[-1] / scale)
        except XImpactError as exc:
            verdict = AxiomVerdict(str(model), axiom, "inconclusive", math.nan, {"trial": k}, str(exc))
            return math.nan, verdict
        slopes.append(slope)
        residuals.append(res)
        witnesses.append({"trial": k, "n": cfg.n, "slope": slope})
    worst = int(np.argmax(residuals))
    verdict = "satisfied" if residuals[worst] == 0.0 else "violated"
    return (
        float(np.mean(slopes)),
        AxiomVerdict(str(model), axiom, verdict, float(residuals[worst]), witnesses[worst], notes),
    )


def check_cross_stability(model, axiom: str, cfg: TrialConfig) -> AxiomVerdict:
    """WCS, SCS or SS verdict (slope machinery of :func:`stability_slope`).

    SCS additionally requires WCS, matching how the properties nest.
    """
    block = {"WCS": "cross_offdiag", "SCS": "liquid_block", "SS": "self_block"}[axiom]
    _, verdict = stability_slope(model, block, cfg)
    if axiom == "SCS" and verdict.verdict == "satisfied":
        _, weak = stability_slope(model, "cross_offdiag", cfg)
        if weak.verdict != "satisfied":
            verdict = replace(
                weak, axiom="SCS", note="cross blocks unbounded, so strong form fails"
            )
    return verdict


def check_pcc(model, cfg: TrialConfig) -> AxiomVerdict:
    """Best-scalar fit of the predicted covariance to the price covariance."""
    model = model if isinstance(model, ModelId) else parse_model(model)
    residuals, witnesses = [], []
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, "PCC", k)
        try:
            t = gen_triple(cfg.n, rng)
            lam = _safe_eval(model, t)
        except XImpactError as exc:
            return AxiomVerdict(str(model), "PCC", "inconclusive", math.nan, {"trial": k}, str(exc))
        pred = lam @ t.omega @ lam.T
        denom = float(np.sum(pred * pred))
        c = float(np.sum(t.sigma * pred) / denom) if denom > 0 else 0.0
        residuals.append(float(np.linalg.norm(t.sigma - c * pred) / np.linalg.norm(t.sigma)))
        witnesses.append({"trial": k, "n": cfg.n, "c": c})
    return _verdict_from_trials(model, "PCC", residuals, witnesses, cfg.tol)


def _price_scaled(t: CovarianceTriple, p: matops.Projector, eps: float) -> CovarianceTriple:
    """Companion transform scaling price fluctuations of the subspace."""
    d = p.complement + eps * p.P
    sigma = d @ t.sigma @ d
    return CovarianceTriple(0.5 * (sigma + sigma.T), t.omega, d @ t.response)


def lemma_expansion_check(model, cfg: TrialConfig, eps: float = 1e-3) -> float:
    """Finite-scale exchange identities between the flow-scaled and
    price-scaled statistics families.

    For a split- and rotation-invariant model, the impact of the
    flow-scaled statistics equals the block expansion (with 1/eps and
    1/eps^2 weights on the cross and scaled blocks) of the impact of the
    price-scaled statistics, and symmetrically with the roles exchanged.
    Returns the worst relative residual of the two identities over the
    trial budget.
    """
    model = model if isinstance(model, ModelId) else parse_model(model)
    expected = {**TABLE1_EXPECTED, **EXTRA_EXPECTED}[model.name]
    if not (expected["SI"] and expected["RI"]):
        raise PreconditionError(f"{model.name} is not split- and rotation-invariant")
    worst = 0.0
    for k in range(cfg.trials):
        rng = _trial_rng(cfg, "PI", 10_000 + k)  # dedicated stream
        t = gen_triple(cfg.n, rng)
        dim = int(rng.integers(1, cfg.n))
        q = _random_orthogonal(rng, cfg.n)
        proj = matops.projector(q[:, :dim])
        pbar = proj.complement
        lam_q = _safe_eval(model, scale_flow_liquidity(t, proj, eps))
        lam_p = _safe_eval(model, _price_scaled(t, proj, eps))

        def expansion(m):
            return (
                pbar @ m @ pbar
                + (pbar @ m @ proj.P + proj.P @ m @ pbar) / eps
                + (proj.P @ m @ proj.P) / eps**2
            )

        worst = max(worst, _rel(lam_q, expansion(lam_p)))
        worst = max(worst, _rel(lam_p, expansion(lam_q)))
    return worst


@dataclass(frozen=True)
class AxiomReport:
    """Verdict grid with expected-table diffs and meta-check results."""

    config: dict
    verdicts: dict  # model -> axiom -> AxiomVerdict
    grid: dict  # model -> axiom -> bool (satisfied)
    discrepancies: list  # vs TABLE1_EXPECTED (+EXTRA_EXPECTED)
    printed_diffs: list  # vs TABLE1_PRINTED, should match documented deviations
    documented_deviations: dict
    meta_checks: dict
    inconclusive: list

    @property
    def matches_expected(self) -> bool:
        return not self.discrepancies and not self.inconclusive


_CHECKS = {
    "PI": check_symmetry_axiom,
    "DI": check_symmetry_axiom,
    "CI": check_symmetry_axiom,
    "SI": check_symmetry_axiom,
    "RI": check_symmetry_axiom,
    "SA": check_arbitrage_axiom,
    "DA": check_arbitrage_axiom,
    "WFI": check_fragmentation_axiom,
    "SSFI": check_fragmentation_axiom,
    "SFI": check_fragmentation_axiom,
}


def _run_check(model, axiom: str, cfg: TrialConfig) -> AxiomVerdict:
    if axiom in _CHECKS:
        return _CHECKS[axiom](model, axiom, cfg)
    if axiom in ("WCS", "SCS", "SS"):
        return check_cross_stability(model, axiom, cfg)
    if axiom == "PCC":
        return check_pcc(model, cfg)
    raise ValueError(f"unknown axiom {axiom!r}")


def _merge(a: AxiomVerdict, b: AxiomVerdict) -> AxiomVerdict:
    """Combine verdicts across instance sizes: any violation dominates."""
    order = {"violated": 2, "inconclusive": 1, "satisfied": 0}
    pick = b if order[b.verdict] > order[a.verdict] else a
    worst = max(
        a.worst_residual if not math.isnan(a.worst_residual) else 0.0,
        b.worst_residual if not math.isnan(b.worst_residual) else 0.0,
    )
    if a.verdict == b.verdict == "satisfied":
        pick = a if a.worst_residual >= b.worst_residual else b
    return replace(pick, worst_residual=worst)


def axiom_matrix(model_names=None, cfg: TrialConfig = TrialConfig(), sizes=None) -> AxiomReport:
    """Full verdict grid over models x properties, diffed against the
    embedded expected grid.

    ``sizes`` optionally runs every check at several instance sizes and
    merges verdicts (a violation at any size is a violation).
    """
    if model_names is None:
        model_names = [m.name for m in MODEL_CATALOGUE]
    sizes = [cfg.n] if not sizes else list(sizes)
    verdicts: dict[str, dict[str, AxiomVerdict]] = {}
    for name in model_names:
        model = parse_model(name)
        row: dict[str, AxiomVerdict] = {}
        for axiom in AXIOMS:
            merged = None
            for n in sizes:
                c = replace(cfg, n=n, kernel_dim=min(cfg.kernel_dim, max(1, n - 1)))
                v = _run_check(model, axiom, c)
                merged = v if merged is None else _merge(merged, v)
            row[axiom] = merged
        verdicts[name] = row
    grid = {
        name: {axiom: row[axiom].verdict == "satisfied" for axiom in AXIOMS}
        for name, row in verdicts.items()
    }
    expected_all = {**TABLE1_EXPECTED, **EXTRA_EXPECTED}
    printed_all = {**TABLE1_PRINTED, **EXTRA_EXPECTED}
    discrepancies, printed_diffs, inconclusive = [], [], []
    for name, row in verdicts.items():
        for axiom, v in row.items():
            if v.verdict == "inconclusive":
                inconclusive.append({"model": name, "axiom": axiom, "note": v.note})
                continue
            got = v.verdict == "satisfied"
            if name in expected_all and got != bool(expected_all[name][axiom]):
                discrepancies.append(
                    {
                        "model": name,
                        "axiom": axiom,
                        "expected": bool(expected_all[name][axiom]),
                        "got": got,
                        "worst_residual": v.worst_residual,
                        "witness": v.witness,
                    }
                )
            if name in printed_all and got != bool(printed_all[name][axiom]):
                printed_diffs.append({"model": name, "axiom": axiom, "got": got})
    meta = _meta_checks(grid, verdicts)
    return AxiomReport(
        config={
            "sizes": sizes,
            "trials": cfg.trials,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "eps_ladder": list(cfg.eps_ladder),
            "kernel_dim": cfg.kernel_dim,
        },
        verdicts=verdicts,
        grid=grid,
        discrepancies=discrepancies,
        printed_diffs=printed_diffs,
        documented_deviations={
            f"{m}/{a}": info for (m, a), info in DOCUMENTED_DEVIATIONS.items()
        },
        meta_checks=meta,
        inconclusive=inconclusive,
    )


def _meta_checks(grid, verdicts) -> dict:
    """Cross-property implications that must hold in any run.

    For split- and rotation-invariant models, semi-strong fragmentation
    invariance implies weak cross-stability and strong fragmentation
    invariance implies strong cross-stability.
    """
    violations = []
    for name, row in grid.items():
        if row.get("SI") and row.get("RI"):
            if row.get("SSFI") and not row.get("WCS"):
                violations.append({"model": name, "implication": "SSFI->WCS"})
            if row.get("SFI") and not row.get("SCS"):
                violations.append({"model": name, "implication": "SFI->SCS"})
    return {"fragmentation_implies_stability": {"violations": violations}}
