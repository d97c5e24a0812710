"""Deciding and certifying the spanning conditions C(m) and C(s).

A finite family {S_i} of nonsingular d x d matrices satisfies condition C(m)
if for every pair of nonzero decomposable grade-m elements v, w some member
pairs them nontrivially: <S_i v | w> != 0.  For non-integral s in (m, m+1)
the condition C(s) additionally requires a *single* i to work simultaneously
at grade m and grade m+1 for compatible extensions v ^ v', w ^ w'.

Sampling can only falsify these conditions or support them empirically, so
``check_cm`` / ``check_cs`` return three-valued verdicts with normalized
margins.  The certifying route is ``criterion_cscm``: a pair (F, G) with
distinct-product real eigenvalue tuples whose eigenbasis change matrix has
every minor nonzero guarantees that the family of all compositions of F and
G up to depth 2 * n0^2 satisfies C(s) for every 0 <= s <= d, where
n0 = max_m C(d, m).

All pass/fail thresholds are applied to scale-free quantities: compounds are
normalized by their spectral norms, minors by sigma_max(A)^order, so scaling
any map or eigenvector never flips a verdict.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exterior_algebra import (
    ExteriorVector,
    _wedge_batch,
    _wedge_with_vector,
    compound_matrix,
    multi_indices,
)
from .singular_values import phi_from_singular_values, singular_values

__all__ = [
    "DEFAULT_TOL",
    "UnsupportedEigenstructure",
    "LinearFamily",
    "VerdictKind",
    "FailWitness",
    "Verdict",
    "CriterionReport",
    "FullnessEstimate",
    "iterate_closure",
    "check_cm",
    "check_cs",
    "criterion_cscm",
    "estimate_fullness",
]

DEFAULT_TOL = 1e-9
_BATCH = 1024


class UnsupportedEigenstructure(ValueError):
    """Raised when a map has complex or (near-)defective eigenvalues."""


@dataclass(frozen=True, eq=False)
class LinearFamily:
    """A finite indexed family of nonsingular d x d matrices."""

    d: int
    maps: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.maps:
            raise ValueError("family must contain at least one map")
        mats = []
        for i, S in enumerate(self.maps):
            S = np.array(S, dtype=float)
            if S.shape != (self.d, self.d):
                raise ValueError(f"maps[{i}] has shape {S.shape}, expected ({self.d}, {self.d})")
            try:
                singular_values(S)
            except ValueError as exc:
                raise ValueError(f"maps[{i}] is singular: {exc}") from exc
            S.setflags(write=False)
            mats.append(S)
        object.__setattr__(self, "maps", tuple(mats))

    @classmethod
    def from_matrices(cls, mats) -> "LinearFamily":
        mats = [np.asarray(S, dtype=float) for S in mats]
        if not mats:
            raise ValueError("family must contain at least one map")
        return cls(mats[0].shape[0], tuple(mats))

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


class VerdictKind(enum.Enum):
    CERTIFIED_PASS = "CertifiedPass"
    EMPIRICAL_PASS = "EmpiricalPass"
    FAIL = "Fail"


@dataclass(frozen=True, eq=False)
class FailWitness:
    """A concrete pair (or quadruple, for fractional s) that kills the condition.

    ``v``/``w`` are the grade-m elements; for fractional s the grade-(m+1)
    extensions are carried in ``v_wedge``/``w_wedge``.  ``w_decomposable``
    records whether the annihilating direction was realized as a blade; when
    it was not, the witness is a rank-deficiency certificate rather than a
    decomposable counterexample.
    """

    m: int
    v: ExteriorVector | None
    w: ExteriorVector | None
    w_decomposable: bool = True
    v_factors: np.ndarray | None = None
    w_factors: np.ndarray | None = None
    v_wedge: ExteriorVector | None = None
    w_wedge: ExteriorVector | None = None


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: VerdictKind
    m: int
    s: float | None = None
    samples: int = 0
    margin: float = math.nan
    witness: FailWitness | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.kind is not VerdictKind.FAIL

    def __str__(self) -> str:
        bits = [f"{self.kind.value} (grade m={self.m}"]
        if self.s is not None:
            bits.append(f", s={self.s}")
        bits.append(f", samples={self.samples}, margin={self.margin:.3e})")
        if self.reason:
            bits.append(f": {self.reason}")
        return "".join(bits)


def iterate_closure(fam: LinearFamily, depth: int, cap: int = 10**6) -> LinearFamily:
    """All compositions S_{i1} @ ... @ S_{ij} for 1 <= j <= depth, word order."""
    if depth < 1:
        raise ValueError(f"closure depth must be >= 1, got {depth}")
    k = len(fam)
    total = sum(k**j for j in range(1, depth + 1))
    if total > cap:
        raise ValueError(
            f"closure would contain {total} maps, above the cap {cap}; "
            "lower the depth or raise the cap explicitly"
        )
    out: list[np.ndarray] = list(fam.maps)
    level = list(fam.maps)
    for _ in range(2, depth + 1):
        level = [A @ B for A in fam.maps for B in level]
        out.extend(level)
    return LinearFamily(fam.d, tuple(out))


# ---------------------------------------------------------------------------
# normalized compounds and candidate test vectors


def _normalized_compounds(fam: LinearFamily, m: int) -> np.ndarray:
    """Stack of grade-m compounds, each divided by its spectral norm."""
    mats = []
    for S in fam.maps:
        C = compound_matrix(S, m).entries
        mats.append(C / np.linalg.norm(C, 2))
    return np.stack(mats)


def _real_eigvectors(S: np.ndarray) -> np.ndarray:
    """Unit real eigenvectors of S, one column per real eigenvalue."""
    lam, vec = np.linalg.eig(S)
    scale = float(np.max(np.abs(lam))) or 1.0
    keep = np.abs(lam.imag) <= 1e-9 * scale
    cols = vec[:, keep].real
    norms = np.linalg.norm(cols, axis=0)
    good = norms > 1e-12
    return cols[:, good] / norms[good]


def _candidate_factors(fam: LinearFamily, m: int) -> list[np.ndarray]:
    """Deterministic decomposable candidates: coordinate blades, then wedges
    of each map's real eigenvectors."""
    d = fam.d
    eye = np.eye(d)
    out = [eye[:, list(c)] for c in itertools.combinations(range(d), m)]
    for S in fam.maps:
        vecs = _real_eigvectors(S)
        if vecs.shape[1] >= m:
            for c in itertools.combinations(range(vecs.shape[1]), m):
                out.append(vecs[:, list(c)])
    return out


def _coords_of_factors(factors: list[np.ndarray]) -> tuple[np.ndarray, list[np.ndarray]]:
    """Unit blade coordinates for each factor stack, dropping degenerate ones."""
    if not factors:
        return np.zeros((0, 0)), []
    stack = np.stack(factors)
    coords = _wedge_batch(stack)
    norms = np.linalg.norm(coords, axis=1)
    keep = norms > 1e-12
    return coords[keep] / norms[keep, None], [f for f, k in zip(factors, keep) if k]


def _rank_margins(CC: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """For each test vector v, sigma_n / sigma_1 of the stacked images S_i v.

    CC is (k, n, n), vs is (N, n); the margin is zero exactly when the images
    fail to span, and is invariant under rescaling any single map.
    """
    W = np.einsum("kij,tj->tki", CC, vs)
    sv = np.linalg.svd(W, compute_uv=False)
    n = CC.shape[1]
    if sv.shape[1] < n:  # fewer maps than the blade count: can never span
        return np.zeros(vs.shape[0])
    return sv[:, n - 1] / sv[:, 0]


def _rng_for(seed, index: int) -> np.random.Generator:
    # splittable per-batch streams: results do not depend on how batches are
    # scheduled across workers, only on their indices
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _search_annihilated_pair(
    CC: np.ndarray, fam: LinearFamily, m: int, vs: np.ndarray, factors: list[np.ndarray], tol: float
) -> tuple[int, FailWitness] | None:
    """Find a candidate v whose images do not span, plus an annihilating w."""
    margins = _rank_margins(CC, vs)
    bad = np.flatnonzero(margins <= tol)
    if bad.size == 0:
        return None
    t = int(bad[np.argmin(margins[bad])])
    v = vs[t]
    images = np.einsum("kij,j->ki", CC, v)
    # direction annihilating every image
    u = np.linalg.svd(images)[2][-1]
    d = fam.d
    # prefer a decomposable annihilator from the same deterministic pool
    pool_coords, pool_factors = _coords_of_factors(_candidate_factors(fam, m))
    if pool_coords.shape[0]:
        pairing = np.max(np.abs(images @ pool_coords.T), axis=0)
        j = int(np.argmin(pairing))
        if pairing[j] <= tol:
            wit = FailWitness(
                m=m,
                v=ExteriorVector(d, m, v),
                w=ExteriorVector(d, m, pool_coords[j]),
                w_decomposable=True,
                v_factors=factors[t] if t < len(factors) else None,
                w_factors=pool_factors[j],
            )
            return t, wit
    # fall back to the raw null direction; decomposability is automatic only
    # at the extreme grades
    wit = FailWitness(
        m=m,
        v=ExteriorVector(d, m, v),
        w=ExteriorVector(d, m, u),
        w_decomposable=m in (1, d - 1),
        v_factors=factors[t] if t < len(factors) else None,
        w_factors=None,
    )
    return t, wit


def check_cm(
    fam: LinearFamily,
    m: int,
    samples: int = 1000,
    tol: float = DEFAULT_TOL,
    seed=0,
) -> Verdict:
    """Test condition C(m) on sampled and structured decomposable elements.

    Never returns a certified pass for 1 <= m <= d-1: a clean run of samples
    is only empirical evidence.  Fails are genuine and come with a witness
    whenever one can be constructed.
    """
    d = fam.d
    if not 0 <= m <= d:
        raise ValueError(f"grade must satisfy 0 <= m <= {d}, got {m}")
    if m in (0, d):
        return Verdict(
            kind=VerdictKind.CERTIFIED_PASS,
            m=m,
            margin=1.0,
            reason="grades 0 and d are spanned trivially by nonsingular maps",
        )
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    n = math.comb(d, m)
    CC = _normalized_compounds(fam, m)

    det_factors = _candidate_factors(fam, m)
    det_coords, det_factors = _coords_of_factors(det_factors)

    if len(fam) < n:
        hit = _search_annihilated_pair(CC, fam, m, det_coords, det_factors, tol)
        witness = hit[1] if hit else None
        return Verdict(
            kind=VerdictKind.FAIL,
            m=m,
            samples=det_coords.shape[0],
            margin=0.0,
            witness=witness,
            reason=f"cardinality: {len(fam)} maps < C({d},{m}) = {n}, images cannot span",
        )

    worst = math.inf
    hit = _search_annihilated_pair(CC, fam, m, det_coords, det_factors, tol)
    if hit is not None:
        t, witness = hit
        return Verdict(
            kind=VerdictKind.FAIL,
            m=m,
            samples=det_coords.shape[0],
            margin=float(_rank_margins(CC, det_coords[t : t + 1])[0]),
            witness=witness,
            reason="rank deficiency at a structured candidate",
        )
    if det_coords.shape[0]:
        worst = float(np.min(_rank_margins(CC, det_coords)))

    done = 0
    batch_index = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        rng = _rng_for(seed, batch_index)
        factors = rng.standard_normal((b, d, m))
        coords, kept = _coords_of_factors(list(factors))
        hit = _search_annihilated_pair(CC, fam, m, coords, kept, tol)
        if hit is not None:
            t, witness = hit
            return Verdict(
                kind=VerdictKind.FAIL,
                m=m,
                samples=done + det_coords.shape[0] + t + 1,
                margin=float(_rank_margins(CC, coords[t : t + 1])[0]),
                witness=witness,
                reason="rank deficiency at a sampled decomposable element",
            )
        if coords.shape[0]:
            worst = min(worst, float(np.min(_rank_margins(CC, coords))))
        done += b
        batch_index += 1

    return Verdict(
        kind=VerdictKind.EMPIRICAL_PASS,
        m=m,
        samples=samples + det_coords.shape[0],
        margin=worst,
    )


def _extend_to_quadruple(d: int, m: int, wit: FailWitness) -> FailWitness:
    """Lift a grade-m witness to a C(s) quadruple by wedging on basis vectors."""

    def best_extension(x: ExteriorVector) -> ExteriorVector:
        best, best_norm = None, -1.0
        for j in range(d):
            e = np.zeros(d)
            e[j] = 1.0
            cand = _wedge_with_vector(x, e)
            nn = cand.norm()
            if nn > best_norm:
                best, best_norm = cand, nn
        return best

    return FailWitness(
        m=m,
        v=wit.v,
        w=wit.w,
        w_decomposable=wit.w_decomposable,
        v_factors=wit.v_factors,
        w_factors=wit.w_factors,
        v_wedge=best_extension(wit.v) if wit.v is not None else None,
        w_wedge=best_extension(wit.w) if wit.w is not None else None,
    )


def _split_quadruple(d: int, m: int, wit: FailWitness) -> FailWitness:
    """Turn a grade-(m+1) witness into a quadruple, splitting factors if known."""
    v = w = None
    v_f = w_f = None
    if wit.v_factors is not None and m >= 1:
        v_f = wit.v_factors[:, :m]
        v = ExteriorVector(d, m, _wedge_batch(v_f[None])[0])
    if wit.w_factors is not None and m >= 1:
        w_f = wit.w_factors[:, :m]
        w = ExteriorVector(d, m, _wedge_batch(w_f[None])[0])
    if m == 0:
        v = ExteriorVector(d, 0, [1.0])
        w = ExteriorVector(d, 0, [1.0])
    return FailWitness(
        m=m,
        v=v,
        w=w,
        w_decomposable=wit.w_decomposable,
        v_factors=v_f,
        w_factors=w_f,
        v_wedge=wit.v,
        w_wedge=wit.w,
    )


def check_cs(
    fam: LinearFamily,
    s: float,
    samples: int = 1000,
    tol: float = DEFAULT_TOL,
    seed=0,
) -> Verdict:
    """Test condition C(s) for non-integral s in (0, d).

    Runs the necessary C(m) / C(m+1) prefilters with m = floor(s), then
    samples quadruples (v, v ^ v', w, w ^ w') and requires a single map to
    pair both grades above the tolerance.
    """
    d = fam.d
    s = float(s)
    if not 0 < s < d:
        raise ValueError(f"s must lie in (0, {d}), got {s}")
    if s == math.floor(s):
        raise ValueError(f"s = {s} is an integer; condition C({int(s)}) is check_cm's job")
    m = int(math.floor(s))

    for grade, tag in ((m, 1), ((m + 1), 2)):
        sub = check_cm(fam, grade, samples=samples, tol=tol, seed=(seed, tag))
        if not sub.passed:
            if grade == m:
                witness = _extend_to_quadruple(d, m, sub.witness) if sub.witness else None
            else:
                witness = _split_quadruple(d, m, sub.witness) if sub.witness else None
            return Verdict(
                kind=VerdictKind.FAIL,
                m=m,
                s=s,
                samples=sub.samples,
                margin=sub.margin,
                witness=witness,
                reason=f"necessary condition C({grade}) fails: {sub.reason}",
            )

    CC_lo = _normalized_compounds(fam, m) if m >= 1 else None
    CC_hi = _normalized_compounds(fam, m + 1)

    worst = math.inf
    worst_data = None
    done = 0
    batch_index = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        rng = _rng_for(seed, batch_index)
        X = rng.standard_normal((b, d, m + 1))
        Y = rng.standard_normal((b, d, m + 1))
        hi_v = _wedge_batch(X)
        hi_w = _wedge_batch(Y)
        nv, nw = np.linalg.norm(hi_v, axis=1), np.linalg.norm(hi_w, axis=1)
        keep = (nv > 1e-12) & (nw > 1e-12)
        if m >= 1:
            lo_v = _wedge_batch(X[:, :, :m])
            lo_w = _wedge_batch(Y[:, :, :m])
            lv, lw = np.linalg.norm(lo_v, axis=1), np.linalg.norm(lo_w, axis=1)
            keep &= (lv > 1e-12) & (lw > 1e-12)
        X, Y, hi_v, hi_w = X[keep], Y[keep], hi_v[keep], hi_w[keep]
        hi_v /= np.linalg.norm(hi_v, axis=1)[:, None]
        hi_w /= np.linalg.norm(hi_w, axis=1)[:, None]
        b_pair = np.abs(np.einsum("tm,kmn,tn->tk", hi_w, CC_hi, hi_v))
        if m >= 1:
            lo_v, lo_w = lo_v[keep], lo_w[keep]
            lo_v /= np.linalg.norm(lo_v, axis=1)[:, None]
            lo_w /= np.linalg.norm(lo_w, axis=1)[:, None]
            a_pair = np.abs(np.einsum("tm,kmn,tn->tk", lo_w, CC_lo, lo_v))
        else:
            a_pair = np.ones_like(b_pair)
        joint = np.max(np.minimum(a_pair, b_pair), axis=1)
        if joint.size:
            t = int(np.argmin(joint))
            if joint[t] < worst:
                worst = float(joint[t])
                worst_data = (X[t], Y[t])
            if worst <= tol:
                Xt, Yt = worst_data
                witness = FailWitness(
                    m=m,
                    v=ExteriorVector(d, m, _wedge_batch(Xt[None, :, :m])[0]) if m >= 1 else ExteriorVector(d, 0, [1.0]),
                    w=ExteriorVector(d, m, _wedge_batch(Yt[None, :, :m])[0]) if m >= 1 else ExteriorVector(d, 0, [1.0]),
                    w_decomposable=True,
                    v_factors=Xt[:, :m] if m >= 1 else None,
                    w_factors=Yt[:, :m] if m >= 1 else None,
                    v_wedge=ExteriorVector(d, m + 1, _wedge_batch(Xt[None])[0]),
                    w_wedge=ExteriorVector(d, m + 1, _wedge_batch(Yt[None])[0]),
                )
                return Verdict(
                    kind=VerdictKind.FAIL,
                    m=m,
                    s=s,
                    samples=done + joint.size,
                    margin=worst,
                    witness=witness,
                    reason="no single map pairs both grades for a sampled quadruple",
                )
        done += b
        batch_index += 1

    return Verdict(kind=VerdictKind.EMPIRICAL_PASS, m=m, s=s, samples=samples, margin=worst)


# ---------------------------------------------------------------------------
# the two-map certificate


@dataclass(frozen=True, eq=False)
class CriterionReport:
    """Outcome of the two-map eigenstructure criterion.

    ``passed`` means: real simple eigenvalues with pairwise distinct ascending
    k-fold products for both maps, and every minor of the eigenbasis change
    matrix bounded away from zero.  The family of all compositions of the two
    maps up to ``certified_depth`` then satisfies C(s) for all 0 <= s <= d.
    """

    d: int
    f_eigenvalues: np.ndarray
    g_eigenvalues: np.ndarray
    product_margins_f: tuple[float, ...]
    product_margins_g: tuple[float, ...]
    change_of_basis: np.ndarray
    min_abs_minor: float
    minor_margin: float
    n0: int
    certified_depth: int
    passed: bool
    failure_stage: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "f_eigenvalues": [float(x) for x in self.f_eigenvalues],
            "g_eigenvalues": [float(x) for x in self.g_eigenvalues],
            # the k = d margin is vacuous (a single product, nothing to
            # separate); keep strict-JSON output by mapping inf to null
            "product_margins_f": [m if math.isfinite(m) else None for m in self.product_margins_f],
            "product_margins_g": [m if math.isfinite(m) else None for m in self.product_margins_g],
            "change_of_basis": [[float(x) for x in row] for row in self.change_of_basis],
            "min_abs_minor": self.min_abs_minor,
            "minor_margin": self.minor_margin,
            "n0": self.n0,
            "certified_depth": self.certified_depth,
            "passed": self.passed,
            "failure_stage": self.failure_stage,
        }


def _real_sorted_eigensystem(S: np.ndarray, which: str) -> tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eig(S)
    scale = float(np.max(np.abs(lam))) or 1.0
    if np.any(np.abs(lam.imag) > 1e-12 * scale):
        raise UnsupportedEigenstructure(
            f"{which} has complex eigenvalues {np.array2string(lam, precision=4)}; "
            "the certificate needs d distinct real eigenvalues"
        )
    lam, vec = lam.real, vec.real
    order = np.argsort(-lam)
    lam, vec = lam[order], vec[:, order]
    vec = vec / np.linalg.norm(vec, axis=0)
    # deterministic sign: largest-magnitude component positive
    picks = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[picks, np.arange(vec.shape[1])])
    vec = vec * signs
    cond = np.linalg.cond(vec)
    if not np.isfinite(cond) or cond > 1e12:
        raise UnsupportedEigenstructure(
            f"{which} is defective or nearly so (eigenvector condition {cond:.2e}); "
            "repeated eigenvalues are not supported"
        )
    return lam, vec


def _product_margins(lam: np.ndarray, d: int) -> tuple[float, ...]:
    """Per-k minimal relative gap between ascending k-fold eigenvalue products."""
    out = []
    for k in range(1, d + 1):
        prods = np.array([np.prod(lam[list(c)]) for c in itertools.combinations(range(d), k)])
        if prods.size < 2:
            out.append(math.inf)
            continue
        gap = math.inf
        for a, b in itertools.combinations(range(prods.size), 2):
            denom = max(abs(prods[a]), abs(prods[b]), 1e-300)
            gap = min(gap, abs(prods[a] - prods[b]) / denom)
        out.append(float(gap))
    return tuple(out)


def criterion_cscm(F, G, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Two-map certificate for the spanning condition at every grade.

    Checks that F and G each have d simple real eigenvalues whose ascending
    k-fold products are pairwise distinct for every k, and that the change of
    basis A from G's unit eigenvectors to F's has all minors of all orders
    nonzero; minors are exactly the entries of A's compound matrices and are
    compared to tol after normalizing by sigma_max(A)^order, so the verdict
    does not depend on how eigenvectors are scaled.
    """
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape != G.shape:
        raise ValueError(f"F and G must be square of equal size, got {F.shape} and {G.shape}")
    d = F.shape[0]
    lam_f, E_f = _real_sorted_eigensystem(F, "F")
    lam_g, E_g = _real_sorted_eigensystem(G, "G")

    margins_f = _product_margins(lam_f, d)
    margins_g = _product_margins(lam_g, d)

    # columns of A expand F's eigenvectors in G's eigenbasis
    A = np.linalg.solve(E_g, E_f)

    sig1 = float(np.linalg.norm(A, 2))
    min_abs = math.inf
    margin = math.inf
    for k in range(1, d + 1):
        minors = compound_matrix(A, k).entries
        min_abs = min(min_abs, float(np.min(np.abs(minors))))
        margin = min(margin, float(np.min(np.abs(minors))) / sig1**k)

    n0 = max(math.comb(d, m) for m in range(d + 1))
    depth = 2 * n0 * n0

    stage = None
    if min(margins_f) <= tol:
        stage = "eigenvalue-products:F"
    elif min(margins_g) <= tol:
        stage = "eigenvalue-products:G"
    elif margin <= tol:
        stage = "minors"

    return CriterionReport(
        d=d,
        f_eigenvalues=lam_f,
        g_eigenvalues=lam_g,
        product_margins_f=margins_f,
        product_margins_g=margins_g,
        change_of_basis=A,
        min_abs_minor=min_abs,
        minor_margin=margin,
        n0=n0,
        certified_depth=depth,
        passed=stage is None,
        failure_stage=stage,
    )


# ---------------------------------------------------------------------------
# empirical (c, s)-fullness


@dataclass(frozen=True, eq=False)
class FullnessEstimate:
    """An empirical upper bound for the fullness constant.

    ``c_hat`` is the minimum of sum_j phi_s(U S_j V) / (phi_s(U) phi_s(V))
    over the sampled pairs, so the true constant can only be smaller; this is
    never a certificate that the family is (c, s)-full.
    """

    c_hat: float
    worst_U: np.ndarray
    worst_V: np.ndarray
    samples: int


def _fullness_pair(rng: np.random.Generator, d: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """Pair stream: mostly Gaussian, every fourth pair an adversarial diagonal
    couple with geometrically shrinking aspect ratio, rotations alternating
    between the outside (pure diagonal probe) and the inside."""
    if index % 4 == 3:
        t = index // 4
        eps = 2.0 ** (-2.0 - 0.5 * t)
        eps = max(eps, 1e-12)
        diag_u = np.diag(np.logspace(0.0, math.log10(eps), d))
        diag_v = np.diag(np.logspace(math.log10(eps), 0.0, d))
        q1 = np.linalg.qr(rng.standard_normal((d, d)))[0]
        q2 = np.linalg.qr(rng.standard_normal((d, d)))[0]
        if (index // 4) % 2 == 0:
            return q1 @ diag_u, diag_v @ q2
        return diag_u @ q1, q2 @ diag_v
    for _ in range(64):
        U = rng.standard_normal((d, d))
        V = rng.standard_normal((d, d))
        su = np.linalg.svd(U, compute_uv=False)
        sv = np.linalg.svd(V, compute_uv=False)
        if su[-1] > 1e-8 * su[0] and sv[-1] > 1e-8 * sv[0]:
            return U, V
    raise RuntimeError("could not draw a well conditioned sample pair")


def estimate_fullness(
    fam: LinearFamily,
    s: float,
    sample_count: int = 1000,
    seed=0,
) -> FullnessEstimate:
    """Probe the fullness inequality over sampled and adversarial (U, V) pairs.

    The sample at index t depends only on (seed, t), so enlarging
    ``sample_count`` extends the stream and the estimate is monotone
    nonincreasing in it.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    s = float(s)
    d = fam.d
    maps = np.stack(fam.maps)
    c_hat = math.inf
    worst = None
    for t in range(sample_count):
        rng = _rng_for(seed, t)
        U, V = _fullness_pair(rng, d, t)
        prods = np.einsum("ij,kjl,lm->kim", U, maps, V)
        sv = np.linalg.svd(prods, compute_uv=False)
        total = float(np.sum(phi_from_singular_values(sv, s)))
        denom = float(
            phi_from_singular_values(np.linalg.svd(U, compute_uv=False), s)
            * phi_from_singular_values(np.linalg.svd(V, compute_uv=False), s)
        )
        ratio = total / denom
        if ratio < c_hat:
            c_hat = ratio
            worst = (U, V)
    return FullnessEstimate(c_hat=c_hat, worst_U=worst[0], worst_V=worst[1], samples=sample_count)
