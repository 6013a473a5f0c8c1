"""Communication graphs, Markov transition matrices and spectral diagnostics.

Graphs are simple, undirected and connected. A transition matrix turns a
graph into a random-walk schedule; its second-largest eigenvalue magnitude
controls how fast the walk mixes and therefore how evenly clients are
visited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError, GenerationError, NumericalError, ParameterError

SCHEME_UNIFORM = "uniform"
SCHEME_METROPOLIS = "metropolis"

_MAX_GEN_ATTEMPTS = 100
_DENSE_EIG_LIMIT = 64


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1 with boolean adjacency."""

    n: int
    adj: np.ndarray  # (n, n) bool, symmetric, zero diagonal

    def __post_init__(self):
        a = self.adj
        if a.shape != (self.n, self.n):
            raise ParameterError(f"adjacency shape {a.shape} does not match n={self.n}")
        if a.dtype != np.bool_:
            raise ParameterError("adjacency must be boolean")
        if not np.array_equal(a, a.T):
            raise ParameterError("adjacency must be symmetric")
        if a.diagonal().any():
            raise ParameterError("self-loops are not allowed")

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i])

    def edges(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(np.triu(self.adj))
        return list(zip(ii.tolist(), jj.tolist()))

    def num_edges(self) -> int:
        return int(self.adj.sum()) // 2

    def is_connected(self) -> bool:
        return _bfs_connected(self.adj)

    def to_edgelist(self) -> str:
        lines = [f"n {self.n}"]
        lines += [f"{i} {j}" for i, j in sorted(self.edges())]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_edgelist(text: str) -> "Graph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n "):
            raise ParameterError("edge-list must start with 'n <count>'")
        n = int(lines[0].split()[1])
        adj = np.zeros((n, n), dtype=bool)
        for ln in lines[1:]:
            i, j = map(int, ln.split())
            if not (0 <= i < j < n):
                raise ParameterError(f"bad edge line {ln!r}")
            adj[i, j] = adj[j, i] = True
        return Graph(n, adj)


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic walk kernel over a graph's nodes."""

    P: np.ndarray
    scheme: str
    laziness: float

    @property
    def n(self) -> int:
        return self.P.shape[0]


def _bfs_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def _attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, attempt]))


def gen_small_world(n: int, k: int, p_rewire: float, seed: int) -> Graph:
    """Watts-Strogatz small-world graph: ring lattice with k neighbors per
    node, each edge rewired with probability p_rewire. Regenerated with a
    fresh derived seed until connected."""
    if not (n > k >= 2):
        raise ParameterError(f"need n > k >= 2, got n={n}, k={k}")
    if k % 2 != 0:
        raise ParameterError(f"k must be even, got {k}")
    if not (0.0 <= p_rewire <= 1.0):
        raise ParameterError(f"p_rewire must be in [0, 1], got {p_rewire}")

    for attempt in range(_MAX_GEN_ATTEMPTS):
        rng = _attempt_rng(seed, attempt)
        adj = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for off in range(1, k // 2 + 1):
                j = (i + off) % n
                adj[i, j] = adj[j, i] = True
        # rewire each lattice edge (i, i+off) independently
        for off in range(1, k // 2 + 1):
            for i in range(n):
                j = (i + off) % n
                if rng.random() < p_rewire:
                    candidates = np.flatnonzero(~adj[i])
                    candidates = candidates[candidates != i]
                    if candidates.size == 0:
                        continue
                    m = int(rng.choice(candidates))
                    adj[i, j] = adj[j, i] = False
                    adj[i, m] = adj[m, i] = True
        if _bfs_connected(adj):
            return Graph(n, adj)
    raise GenerationError(
        f"no connected small-world graph after {_MAX_GEN_ATTEMPTS} attempts "
        f"(n={n}, k={k}, p_rewire={p_rewire}, seed={seed})"
    )


def gen_regular_expander(n: int, d: int, seed: int) -> Graph:
    """Random d-regular simple graph by the pairing model, retried until the
    pairing is simple and the graph connected."""
    if d >= n:
        raise ParameterError(f"need d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise ParameterError(f"n*d must be even, got n={n}, d={d}")

    for attempt in range(_MAX_GEN_ATTEMPTS):
        rng = _attempt_rng(seed, attempt)
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        adj = np.zeros((n, n), dtype=bool)
        simple = True
        for i, j in pairs:
            if i == j or adj[i, j]:
                simple = False
                break
            adj[i, j] = adj[j, i] = True
        if simple and _bfs_connected(adj):
            return Graph(n, adj)
    raise GenerationError(
        f"no connected simple {d}-regular graph after {_MAX_GEN_ATTEMPTS} "
        f"attempts (n={n}, seed={seed})"
    )


def gen_ring(n: int) -> Graph:
    if n < 3:
        raise ParameterError(f"ring needs n >= 3, got {n}")
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        j = (i + 1) % n
        adj[i, j] = adj[j, i] = True
    return Graph(n, adj)


def gen_star(n: int) -> Graph:
    """Star with node 0 as hub."""
    if n < 2:
        raise ParameterError(f"star needs n >= 2, got {n}")
    adj = np.zeros((n, n), dtype=bool)
    adj[0, 1:] = adj[1:, 0] = True
    return Graph(n, adj)


def gen_complete(n: int) -> Graph:
    if n < 2:
        raise ParameterError(f"complete graph needs n >= 2, got {n}")
    adj = ~np.eye(n, dtype=bool)
    return Graph(n, adj)


def build_transition_matrix(g: Graph, scheme: str = SCHEME_METROPOLIS,
                            laziness: float = 0.0) -> TransitionMatrix:
    """Build a row-stochastic walk kernel on g.

    uniform: move to a uniformly random neighbor. metropolis: accept moves
    with min(1/deg_i, 1/deg_j), which makes the stationary distribution
    uniform on any connected graph. laziness mixes in self-transitions,
    removing periodicity.
    """
    if not (0.0 <= laziness < 1.0):
        raise ParameterError(f"laziness must be in [0, 1), got {laziness}")
    if not g.is_connected():
        raise ParameterError("graph must be connected")
    n = g.n
    deg = g.degrees().astype(float)
    if scheme == SCHEME_UNIFORM:
        base = g.adj / deg[:, None]
    elif scheme == SCHEME_METROPOLIS:
        inv = 1.0 / deg
        base = np.where(g.adj, np.minimum(inv[:, None], inv[None, :]), 0.0)
        np.fill_diagonal(base, 1.0 - base.sum(axis=1))
    else:
        raise ParameterError(f"unknown scheme {scheme!r}")
    P = laziness * np.eye(n) + (1.0 - laziness) * base
    return TransitionMatrix(P=P, scheme=scheme, laziness=laziness)


def sigma2(tm: TransitionMatrix, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Second-largest eigenvalue magnitude of the walk kernel.

    Dense eigendecomposition up to 64 nodes, deflated power iteration above.
    Returns 1.0 for periodic chains, which signals a non-mixing walk.
    """
    P = tm.P
    n = P.shape[0]
    if n <= _DENSE_EIG_LIMIT:
        vals = np.linalg.eigvals(P)
        perron = int(np.argmin(np.abs(vals - 1.0)))
        rest = np.delete(vals, perron)
        if rest.size == 0:
            return 0.0
        return float(np.max(np.abs(rest)))
    # deflate the Perron pair (right vector 1, left vector pi)
    pi = stationary_distribution(tm)
    A = P - np.outer(np.ones(n), pi)
    x = np.random.default_rng(0).standard_normal(n)
    x /= np.linalg.norm(x)
    prev = np.inf
    for _ in range(max_iter):
        y = A @ x
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        x = y / lam
        if abs(lam - prev) < tol:
            return lam
        prev = lam
    raise NumericalError(
        f"power iteration did not converge within {max_iter} iterations "
        f"(last estimate {prev:.6g})"
    )


def stationary_distribution(tm: TransitionMatrix, tol: float = 1e-12,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary vector pi with pi P = pi, by power iteration."""
    P = tm.P
    n = P.shape[0]
    if n <= _DENSE_EIG_LIMIT and sigma2(tm) >= 1.0 - 1e-12:
        raise DiagnosticError(
            "chain is periodic or reducible (second eigenvalue magnitude ~ 1); "
            "add laziness to make it mix"
        )
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = x @ P
        y /= y.sum()
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    raise DiagnosticError("stationary distribution power iteration did not converge")


def sample_next(tm: TransitionMatrix, current: int, rng: np.random.Generator) -> int:
    """Draw the next walk position from row `current` by inverse CDF."""
    row = tm.P[current]
    cdf = np.cumsum(row)
    u = rng.random()
    idx = int(np.searchsorted(cdf, u, side="right"))
    return min(idx, tm.n - 1)
