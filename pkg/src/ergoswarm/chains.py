"""Ergodic transition-matrix synthesis on region graphs.

Column-stochastic convention throughout: ``P[i, j]`` is the probability of
moving to region i when currently in region j, so distributions evolve as
``rho_next = P @ rho``.

Three synthesizers are provided for a prescribed stationary distribution:

* :func:`metropolis_hastings` -- closed-form reversible baseline.
* :func:`remc_solve` -- minimizes ``lambda_max(0.5*(Pt + Pt.T) - 2*sqrt(rho)
  sqrt(rho).T)`` with ``Pt = diag(rho**-0.5) @ P @ diag(rho**0.5)``, the
  objective controlling how fast empirical visitation frequencies converge.
  Reversibility is deliberately not imposed.
* :func:`fmmc_solve` -- minimizes the second-largest eigenvalue modulus of a
  reversible chain (fast mixing of the distribution itself).

Both optimizers run projected subgradient steps over the affine feasible set
(column sums, stationarity, edge support, plus detailed balance for the
reversible variant) with nonnegativity restored by Dykstra-style alternation,
warm-started from the Metropolis-Hastings chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from io import StringIO

import numpy as np

from .graph import RegionGraph, is_strongly_connected
from .target import TargetDistribution

TARGET_FLOOR = 1e-12


class ChainSynthesisError(RuntimeError):
    """Raised when no feasible/usable chain can be produced."""


@dataclass
class TransitionMatrix:
    """Column-stochastic transition matrix with support inside the graph."""

    P: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"P must be square, got shape {P.shape}")
        self.P = P

    @property
    def n_regions(self) -> int:
        return self.P.shape[0]


@dataclass
class SolverOptions:
    """Knobs for the projected-subgradient synthesizers."""

    max_iters: int = 5000
    improve_tol: float = 1e-6
    improve_window: int = 50
    feas_tol: float = 1e-9
    warm_start: bool = True
    step_scale: float | None = None  # initial Polyak level; None = auto


@dataclass
class ChainDiagnostics:
    """Feasibility and spectral diagnostics of a chain against its target."""

    stationarity_residual: float
    remc_objective: float
    slem: float
    slem_symmetrized: bool
    column_sum_residual: float
    support_violation: float
    irreducible: bool
    aperiodic: bool
    iterations: int = 0

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


def _floored_rho(target: TargetDistribution) -> np.ndarray:
    """Floor degenerate entries so diag(rho**-0.5) exists, then renormalize."""
    rho = np.asarray(target.rho, dtype=float)
    if np.any(rho < TARGET_FLOOR):
        rho = np.maximum(rho, TARGET_FLOOR)
        rho = rho / rho.sum()
    return rho


def metropolis_hastings(graph: RegionGraph, target: TargetDistribution) -> TransitionMatrix:
    """Uniform-proposal Metropolis-Hastings chain for the given target.

    From region j, propose one of the d_j non-self neighbors uniformly and
    accept with min(1, (rho_i * d_j) / (rho_j * d_i)); rejected mass stays
    put.  Reversible with stationary distribution rho on graphs whose
    non-self adjacency is symmetric (undirected inputs always are).
    """
    n = graph.n_regions
    rho = _floored_rho(target)
    if len(rho) != n:
        raise ValueError("target dimension does not match graph")
    if n == 1:
        return TransitionMatrix(np.ones((1, 1)))
    degree = np.array([len(graph.nonself_neighbors(j)) for j in range(n)])
    if np.any(degree == 0):
        bad = int(np.argmin(degree))
        raise ChainSynthesisError(f"region {bad} has no non-self neighbors")
    P = np.zeros((n, n))
    for j in range(n):
        for i in graph.nonself_neighbors(j):
            accept = min(1.0, (rho[i] * degree[j]) / (rho[j] * degree[i]))
            P[i, j] = accept / degree[j]
        P[j, j] = 1.0 - P[:, j].sum()
    return TransitionMatrix(P)


# ---------------------------------------------------------------------------
# Spectral diagnostics
# ---------------------------------------------------------------------------

def _similarity(P: np.ndarray, rho: np.ndarray) -> np.ndarray:
    sq = np.sqrt(rho)
    return (P * sq[None, :]) / sq[:, None]


def remc_objective(P: np.ndarray, rho: np.ndarray) -> float:
    """lambda_max(0.5*(Pt + Pt.T) - 2*sqrt(rho)sqrt(rho).T)."""
    sq = np.sqrt(rho)
    Pt = _similarity(P, rho)
    M = 0.5 * (Pt + Pt.T) - 2.0 * np.outer(sq, sq)
    return float(np.linalg.eigvalsh(M)[-1])


def slem_of(P: np.ndarray, rho: np.ndarray, sym_tol: float = 1e-8) -> tuple[float, bool]:
    """Second-largest eigenvalue modulus of Pt, deflating the stationary mode.

    For non-reversible chains the symmetrized similarity transform is used
    instead and the second return value flags it.
    """
    sq = np.sqrt(rho)
    Pt = _similarity(P, rho)
    symmetrized = bool(np.max(np.abs(Pt - Pt.T)) > sym_tol)
    B = 0.5 * (Pt + Pt.T) - np.outer(sq, sq)
    w = np.linalg.eigvalsh(B)
    return float(max(abs(w[0]), abs(w[-1]))), symmetrized


def _support_digraph(P: np.ndarray) -> list[list[int]]:
    n = P.shape[0]
    return [[int(i) for i in np.nonzero(P[:, j] > 0)[0]] for j in range(n)]


def _is_irreducible(P: np.ndarray) -> bool:
    n = P.shape[0]
    adj = _support_digraph(P)
    radj: list[list[int]] = [[] for _ in range(n)]
    for j in range(n):
        for i in adj[j]:
            radj[i].append(j)

    def reach(start: int, graph_adj: list[list[int]]) -> int:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in graph_adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen)

    return reach(0, adj) == n and reach(0, radj) == n


def _is_aperiodic(P: np.ndarray) -> bool:
    """Period-1 check via gcd of (dist[u] + 1 - dist[v]) over support edges."""
    n = P.shape[0]
    if np.any(np.diag(P) > 0):
        return True
    adj = _support_digraph(P)
    dist = [-1] * n
    dist[0] = 0
    queue = [0]
    while queue:
        nxt = []
        for j in queue:
            for i in adj[j]:
                if dist[i] < 0:
                    dist[i] = dist[j] + 1
                    nxt.append(i)
        queue = nxt
    g = 0
    for j in range(n):
        if dist[j] < 0:
            continue
        for i in adj[j]:
            if dist[i] >= 0:
                g = math.gcd(g, dist[j] + 1 - dist[i])
    return g == 1


def validate_chain(
    chain: TransitionMatrix, graph: RegionGraph, target: TargetDistribution
) -> ChainDiagnostics:
    """Diagnostic report: residuals, spectral objectives, ergodicity flags."""
    P = chain.P
    n = graph.n_regions
    if P.shape != (n, n) or len(target.rho) != n:
        raise ValueError("dimension mismatch between chain, graph, and target")
    rho = _floored_rho(target)
    col_res = float(np.max(np.abs(P.sum(axis=0) - 1.0)))
    allowed = np.zeros((n, n), dtype=bool)
    for j, i in graph.edges:
        if 0 <= j < n and 0 <= i < n:
            allowed[i, j] = True
    support_violation = float(np.max(np.abs(P[~allowed]))) if (~allowed).any() else 0.0
    stat_res = float(np.max(np.abs(P @ np.asarray(target.rho) - np.asarray(target.rho))))
    slem, symmetrized = slem_of(P, rho)
    return ChainDiagnostics(
        stationarity_residual=stat_res,
        remc_objective=remc_objective(P, rho),
        slem=slem,
        slem_symmetrized=symmetrized,
        column_sum_residual=col_res,
        support_violation=support_violation,
        irreducible=_is_irreducible(P),
        aperiodic=_is_aperiodic(P),
    )


def stationary_distribution(
    chain: TransitionMatrix, tol: float = 1e-12, max_iters: int = 10**6
) -> TargetDistribution:
    """Fixed point of rho -> P @ rho by power iteration from uniform.

    Periodic or reducible chains are rejected up front: their iteration
    either oscillates or lands on a non-unique fixed point (a symmetric
    periodic chain fixes the uniform start exactly).
    """
    P = chain.P
    n = P.shape[0]
    if n > 1 and not (_is_irreducible(P) and _is_aperiodic(P)):
        raise ChainSynthesisError(
            "chain is periodic or reducible; no unique power-iteration fixed point"
        )
    rho = np.full(n, 1.0 / n)
    for _ in range(max_iters):
        nxt = P @ rho
        s = nxt.sum()
        if s <= 0:
            raise ChainSynthesisError("power iteration collapsed to zero mass")
        nxt /= s
        if np.max(np.abs(nxt - rho)) < tol:
            return TargetDistribution(rho=np.maximum(nxt, 0.0) / np.maximum(nxt, 0.0).sum())
        rho = nxt
    raise ChainSynthesisError(
        f"power iteration did not converge within {max_iters} iterations "
        "(chain may be periodic or reducible)"
    )


def sample_next(chain: TransitionMatrix, current: int, rng: np.random.Generator) -> int:
    """Draw the next region from column ``current`` by inverse CDF."""
    P = chain.P
    n = P.shape[0]
    if not 0 <= current < n:
        raise IndexError(f"region {current} out of range [0, {n})")
    col = P[:, current]
    if abs(col.sum() - 1.0) > 1e-8:
        raise ValueError(f"column {current} sums to {col.sum()!r}, not 1")
    cdf = np.cumsum(np.maximum(col, 0.0))
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, n - 1)


# ---------------------------------------------------------------------------
# Plain-text serialization (debugging aid)
# ---------------------------------------------------------------------------

def to_text_block(chain: TransitionMatrix) -> str:
    """Row-major space-separated dump with a convention header."""
    buf = StringIO()
    buf.write("# column-stochastic transition matrix: entry (i, j) = P(move to i | at j)\n")
    buf.write(f"n {chain.n_regions}\n")
    for row in chain.P:
        buf.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def from_text_block(text: str) -> TransitionMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n "):
        raise ValueError("missing 'n <count>' header line")
    n = int(lines[0].split()[1])
    rows = [[float(v) for v in ln.split()] for ln in lines[1 : 1 + n]]
    P = np.array(rows)
    if P.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got shape {P.shape}")
    return TransitionMatrix(P)


# ---------------------------------------------------------------------------
# Feasible set and projected-subgradient optimizer
# ---------------------------------------------------------------------------

class _FeasibleSet:
    """Support-indexed feasible set in probability-flow coordinates.

    The solver variables are flows y_ij = P_ij * rho_j on the allowed
    entries, in sorted (row, col) order.  Column sums of P become column
    marginals of y, stationarity becomes row marginals, and detailed
    balance becomes plain symmetry, so every constraint row has unit
    coefficients and the system stays well conditioned no matter how
    lopsided the target is (transition-probability coordinates blow up to
    condition numbers around 1e18 on the extreme targets the direct
    strategy commands early on).  Nonnegativity is handled by Dykstra-style
    alternation with clipping.
    """

    def __init__(self, graph: RegionGraph, rho: np.ndarray, reversible: bool):
        n = graph.n_regions
        self.n = n
        self.rho = rho
        entries = sorted(
            (i, j) for (j, i) in graph.edges if 0 <= i < n and 0 <= j < n
        )
        if not entries:
            raise ChainSynthesisError("graph has no usable edges")
        self.rows = np.array([i for i, _ in entries])
        self.cols = np.array([j for _, j in entries])
        self.flat = self.rows * n + self.cols
        self.m = len(entries)
        index_of = {e: k for k, e in enumerate(entries)}

        blocks = []
        rhs = []
        for j in range(n):  # column sums of P: sum_i y_ij = rho_j
            row = np.zeros(self.m)
            row[self.cols == j] = 1.0
            blocks.append(row)
            rhs.append(rho[j])
        for i in range(n):  # stationarity: sum_j y_ij = rho_i
            row = np.zeros(self.m)
            row[self.rows == i] = 1.0
            blocks.append(row)
            rhs.append(rho[i])
        if reversible:  # detailed balance: y_ij = y_ji
            pairs = sorted({(min(i, j), max(i, j)) for i, j in entries if i != j})
            for a, b in pairs:
                row = np.zeros(self.m)
                k_ab = index_of.get((a, b))
                k_ba = index_of.get((b, a))
                if k_ab is not None:
                    row[k_ab] = 1.0
                if k_ba is not None:
                    row[k_ba] -= 1.0
                if k_ab is not None or k_ba is not None:
                    blocks.append(row)
                    rhs.append(0.0)

        self.A = np.array(blocks)
        self.b = np.array(rhs)
        PAt = self.A.T @ np.linalg.pinv(self.A @ self.A.T, rcond=1e-12)
        # Affine projection fused to one matvec: proj(y) = Q @ y + c
        self._Q = np.eye(self.m) - PAt @ self.A
        self._c = PAt @ self.b
        self._faces: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        sq = np.sqrt(rho)
        # Pt_ij = y_ij / (sq_i * sq_j)
        self.scale = 1.0 / (sq[self.rows] * sq[self.cols])
        self.col_rho = rho[self.cols]

    def gather(self, P: np.ndarray) -> np.ndarray:
        return P.reshape(-1)[self.flat] * self.col_rho

    def scatter(self, y: np.ndarray) -> np.ndarray:
        """Flows back to a column-stochastic matrix, columns renormalized."""
        P = np.zeros((self.n, self.n))
        P.reshape(-1)[self.flat] = np.maximum(y, 0.0) / self.col_rho
        sums = P.sum(axis=0)
        return P / np.where(sums > 0, sums, 1.0)

    def _feasible(self, y: np.ndarray, tol: float) -> bool:
        # negativity measured in transition-probability units: P_ij >= -tol
        return bool(np.all(y >= -tol * self.col_rho))

    def residual(self, y: np.ndarray) -> float:
        aff = float(np.max(np.abs(self.A @ y - self.b)))
        neg = float(np.max(np.maximum(-y / self.col_rho, 0.0)))
        return max(aff, neg)

    def project_affine(self, y: np.ndarray) -> np.ndarray:
        return self._Q @ y + self._c

    def _face(self, zmask: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Projector pieces for the face {Ay = b, y_Z = 0} (Z from bitmask)."""
        cached = self._faces.get(zmask)
        if cached is not None:
            return cached
        free = np.array([not (zmask >> k) & 1 for k in range(self.m)])
        A_F = self.A * free[None, :]
        K = A_F.T @ np.linalg.pinv(A_F @ A_F.T, rcond=1e-12)
        face = (free.astype(float), A_F, K)
        if len(self._faces) < 512:
            self._faces[zmask] = face
        return face

    def project(self, y0: np.ndarray, tol: float, max_alternations: int = 20000) -> np.ndarray:
        """Feasibility-restoring projection: face pinning with Dykstra fallback.

        Negative coordinates are pinned to zero and the point is projected
        exactly onto the remaining face of the polytope, repeating until no
        pinned-face coordinate goes negative; face projectors are cached per
        active set.  If pinning overshoots into an infeasible face, plain
        Dykstra alternation between the marginal block and the orthant takes
        over.  Either way the result satisfies the marginals exactly and has
        P-space negativity below tol.
        """
        neg_floor = -tol * self.col_rho
        res_tol = 1e-11 * max(1.0, float(np.max(np.abs(self.b))))
        zmask = 0
        y = y0
        for _ in range(self.m + 1):
            free, A_F, K = self._face(zmask)
            yf = free * y0
            y = yf - K @ (A_F @ yf - self.b)
            y *= free
            if np.max(np.abs(self.A @ y - self.b)) > res_tol:
                break  # over-pinned: face is empty, fall back to Dykstra
            bad = y < neg_floor
            if not bad.any():
                return y
            newmask = zmask
            for k in np.nonzero(bad)[0]:
                newmask |= 1 << int(k)
            if newmask == zmask:
                break
            zmask = newmask

        y = self.project_affine(y0)
        if self._feasible(y, tol):
            return y
        q = np.zeros_like(y)
        for _ in range(max_alternations):
            w = y
            w += q
            clipped = np.maximum(w, 0.0)
            np.subtract(w, clipped, out=q)
            y = self.project_affine(clipped)
            if self._feasible(y, tol):
                return y
        raise ChainSynthesisError(
            "feasibility projection did not converge: "
            f"affine residual {np.max(np.abs(self.A @ y - self.b)):.3e}, "
            f"worst negative flow {y.min():.3e}"
        )


def _spectral_eval(
    x: np.ndarray, feas: _FeasibleSet, R: np.ndarray, kind: str, Pt_buf: np.ndarray
) -> tuple[float, np.ndarray]:
    """Objective and subgradient (in support coordinates) at x."""
    Pt_buf.reshape(-1)[feas.flat] = x * feas.scale
    M = 0.5 * (Pt_buf + Pt_buf.T)
    M -= R
    w, V = np.linalg.eigh(M)
    if kind == "remc":
        f = w[-1]
        v = V[:, -1]
        sign = 1.0
    else:
        k = -1 if abs(w[-1]) >= abs(w[0]) else 0
        f = abs(w[k])
        v = V[:, k]
        sign = 1.0 if w[k] >= 0 else -1.0
    g = sign * v[feas.rows] * v[feas.cols] * feas.scale
    return float(f), g


def _minimize_spectral(
    graph: RegionGraph,
    target: TargetDistribution,
    kind: str,
    options: SolverOptions,
    warm_start: TransitionMatrix | None,
) -> tuple[TransitionMatrix, ChainDiagnostics]:
    n = graph.n_regions
    if n == 1:
        tm = TransitionMatrix(np.ones((1, 1)))
        return tm, validate_chain(tm, graph, target)
    if not is_strongly_connected(graph):
        raise ChainSynthesisError("graph is not strongly connected; no ergodic chain exists")
    rho = _floored_rho(target)
    feas = _FeasibleSet(graph, rho, reversible=(kind == "fmmc"))
    sq = np.sqrt(rho)
    R = (2.0 if kind == "remc" else 1.0) * np.outer(sq, sq)
    Pt_buf = np.zeros((n, n))

    if warm_start is not None and options.warm_start:
        x = feas.gather(warm_start.P)
    else:
        x = feas.gather(metropolis_hastings(graph, target).P)
    if feas.residual(x) > options.feas_tol:
        x = feas.project(x, options.feas_tol)

    f, g = _spectral_eval(x, feas, R, kind, Pt_buf)
    x_best, f_best = x, f
    best_history = [f_best]
    # Adaptive Polyak level: target f_best - delta, growing on improvement
    # and decaying otherwise.  Warm starts sit near the optimum, so the
    # initial level is kept small and ramps up only if progress is real.
    delta = options.step_scale if options.step_scale is not None else 1e-3
    iters_done = 0
    window = options.improve_window

    for it in range(options.max_iters):
        iters_done = it + 1
        gnorm2 = float(g @ g)
        if gnorm2 < 1e-24:
            break
        t = (f - (f_best - delta)) / gnorm2
        step = t * g
        norm = math.sqrt(gnorm2) * t
        if norm > 1.0:  # entries live in [0, 1]; cap absurd jumps
            step = step / norm
        x = feas.project(x - step, options.feas_tol)
        f, g = _spectral_eval(x, feas, R, kind, Pt_buf)
        if f < f_best - 1e-14:
            f_best = f
            x_best = x.copy()
            delta = min(delta * 1.3, 1.0)
        else:
            delta = max(delta * 0.75, 1e-10)
        best_history.append(f_best)
        if len(best_history) > window and best_history[-window - 1] - f_best < options.improve_tol:
            break

    P = feas.scatter(x_best)
    tm = TransitionMatrix(P)
    diag = validate_chain(tm, graph, target)
    diag.iterations = iters_done
    return tm, diag


def remc_solve(
    graph: RegionGraph,
    target: TargetDistribution,
    options: SolverOptions | None = None,
    warm_start: TransitionMatrix | None = None,
) -> tuple[TransitionMatrix, ChainDiagnostics]:
    """Synthesize a chain minimizing the visitation-convergence objective.

    Warm-starts from ``warm_start`` when given (and enabled), else from the
    Metropolis-Hastings chain; the best feasible iterate is returned, so the
    result never scores worse than its warm start.
    """
    return _minimize_spectral(graph, target, "remc", options or SolverOptions(), warm_start)


def fmmc_solve(
    graph: RegionGraph,
    target: TargetDistribution,
    options: SolverOptions | None = None,
    warm_start: TransitionMatrix | None = None,
) -> tuple[TransitionMatrix, ChainDiagnostics]:
    """Synthesize the fastest-mixing reversible chain (minimal SLEM)."""
    return _minimize_spectral(graph, target, "fmmc", options or SolverOptions(), warm_start)
