"""Instance families: noisy hypercube, discretized Gaussian graph, UG reduction graph."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateNet, DimensionTooLarge, GraphFormatError, LabelTooLarge
from .graph import WeightedGraph, remove_self_loops, split_vertices

MAX_HYPERCUBE_DIM = 16
MAX_UG_LABELS = 10
UG_HEADER = "qmclab-ug v1"


def hypercube_label(index: int, n: int) -> str:
    """Label of the point whose coordinate i+1 is -1 exactly when bit i of index is set."""
    return "".join("-" if (index >> i) & 1 else "+" for i in range(n))


def hypercube_point(index: int, n: int) -> np.ndarray:
    return np.array([-1.0 if (index >> i) & 1 else 1.0 for i in range(n)])


def hypercube_points(n: int) -> np.ndarray:
    """All 2^n points as rows, ordered by index."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return 1.0 - 2.0 * bits


def correlated_pair_probability(d, n: int, rho: float):
    """Pr[X = x, Y = y] for rho-correlated uniform strings at Hamming distance d."""
    same = (1.0 + rho) / 2.0
    diff = (1.0 - rho) / 2.0
    d = np.asarray(d)
    return 0.5**n * same ** (n - d) * diff**d


def noisy_hypercube(n: int, rho: float, loops: bool = True) -> WeightedGraph:
    """Hypercube {-1,1}^n whose random edge is a pair of rho-correlated strings."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_HYPERCUBE_DIM:
        raise DimensionTooLarge(f"n={n} exceeds {MAX_HYPERCUBE_DIM}")
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    N = 1 << n
    iu, iv = np.triu_indices(N)
    d = np.bitwise_count((iu ^ iv).astype(np.uint64)).astype(np.int64)
    w = correlated_pair_probability(d, n, rho) * np.where(iu == iv, 1.0, 2.0)
    labels = [hypercube_label(i, n) for i in range(N)]
    g = WeightedGraph.from_index_arrays(labels, iu, iv, w, allow_loops=True, normalize=True,
                                        metadata={"family": "noisy_hypercube", "n": n, "rho": rho})
    w_loops = ((1.0 + rho) / 2.0) ** n
    if loops:
        return g.with_metadata(w_loops=0.0, w_loops_if_removed=w_loops)
    h, removed = remove_self_loops(g)
    return h.with_metadata(w_loops=removed)


def standard_graph(kind: str, n: int | None = None) -> WeightedGraph:
    """single_edge, complete(n) or cycle(n) with uniform weights."""
    if kind == "single_edge":
        return WeightedGraph.from_edges([("a", "b", 1.0)])
    if n is None or n < 3:
        raise ValueError(f"{kind} needs n >= 3")
    labels = [str(i) for i in range(n)]
    if kind == "complete":
        edges = [(labels[i], labels[j], 1.0) for i, j in itertools.combinations(range(n), 2)]
    elif kind == "cycle":
        edges = [(labels[i], labels[(i + 1) % n], 1.0) for i in range(n)]
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    return WeightedGraph.from_edges(edges, labels)


def random_graph(n: int, p: float, rng: np.random.Generator, weighted: bool = True) -> WeightedGraph:
    """Erdos-Renyi style test graph; a Hamiltonian path is added so it has edges."""
    labels = [str(i) for i in range(n)]
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        if j == i + 1 or rng.random() < p:
            edges.append((labels[i], labels[j], rng.uniform(0.1, 1.0) if weighted else 1.0))
    return WeightedGraph.from_edges(edges, labels)


# --- discretized Gaussian graph ---------------------------------------------------------------


def random_sphere_points(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def correlated_gaussians(count: int, n: int, rho: float, rng: np.random.Generator):
    x = rng.standard_normal((count, n))
    z = rng.standard_normal((count, n))
    return x, rho * x + np.sqrt(max(0.0, 1.0 - rho * rho)) * z


def discretized_gaussian_graph(n: int, rho: float, net_size: int, mc_samples: int, M_split: int = 1,
                               seed: int = 0, chunk_count: int = 8,
                               centers: np.ndarray | None = None) -> WeightedGraph:
    """Finite stand-in for the rho-correlated Gaussian graph on R^n.

    Centers are drawn uniformly on the sphere (or supplied); correlated Gaussian
    pairs are radially projected and binned by nearest center; counts become
    edge weights; vertices are split M_split ways and self-loops removed.
    """
    if n < 2 or net_size < 2:
        raise ValueError("need n >= 2 and net_size >= 2")
    if mc_samples < 10 * net_size**2:
        raise ValueError("mc_samples must be at least 10 * net_size^2")
    root = np.random.SeedSequence(seed)
    center_seq, *chunk_seqs = root.spawn(chunk_count + 1)
    if centers is None:
        centers = random_sphere_points(net_size, n, np.random.default_rng(center_seq))
    else:
        centers = np.asarray(centers, dtype=float)
        centers = centers / np.linalg.norm(centers, axis=1, keepdims=True)
        if centers.shape != (net_size, n):
            raise ValueError("centers must have shape (net_size, n)")
    counts = np.zeros((net_size, net_size), dtype=np.int64)
    cell_hits = np.zeros(net_size, dtype=np.int64)
    max_dist = 0.0
    inner_sum = 0.0
    sizes = np.full(chunk_count, mc_samples // chunk_count)
    sizes[: mc_samples % chunk_count] += 1
    for size, seq in zip(sizes, chunk_seqs):
        rng = np.random.default_rng(seq)
        x, y = correlated_gaussians(int(size), n, rho, rng)
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        cx = np.argmax(x @ centers.T, axis=1)
        cy = np.argmax(y @ centers.T, axis=1)
        np.add.at(counts, (cx, cy), 1)
        cell_hits += np.bincount(cx, minlength=net_size) + np.bincount(cy, minlength=net_size)
        dx = np.linalg.norm(x - centers[cx], axis=1).max()
        dy = np.linalg.norm(y - centers[cy], axis=1).max()
        max_dist = max(max_dist, float(dx), float(dy))
        inner_sum += float(np.einsum("ij,ij->", x, y))
    empty = np.flatnonzero(cell_hits == 0)
    if len(empty):
        raise DegenerateNet(f"{len(empty)} Voronoi cells received no samples: {empty[:10].tolist()}")
    iu, iv = np.nonzero(counts)
    labels = [f"c{i}" for i in range(net_size)]
    g = WeightedGraph.from_index_arrays(labels, iu, iv, counts[iu, iv].astype(float), allow_loops=True)
    pre_split_loops = float(np.trace(counts)) / mc_samples
    g = split_vertices(g, M_split)
    g, w_loops = remove_self_loops(g) if g.has_loops() else (g, 0.0)
    p = g.w
    return g.with_metadata(
        family="gaussian_graph", n=n, rho=rho, net_size=net_size, mc_samples=mc_samples,
        M_split=M_split, seed=seed, chunk_count=chunk_count, centers=centers,
        w_loops=w_loops, cell_loop_weight=pre_split_loops, net_radius=max_dist,
        sample_mean_inner=inner_sum / mc_samples,
        weight_stderr=float(np.sqrt(np.mean(p * (1 - p)) / mc_samples)),
    )


def gaussian_net_identity(g: WeightedGraph) -> np.ndarray:
    """Rows f(vertex) = its net center, in the graph's vertex order (split copies share a center)."""
    centers = g.metadata["centers"]
    idx = [int(lab.split("#")[0][1:]) for lab in g.vertices]
    return centers[idx]


# --- Unique Games --------------------------------------------------------------------------------


@dataclass
class UGInstance:
    """Bipartite Unique Games instance; perms[(u, v)] is pi_{u->v} as a tuple over 1..M."""

    left: list[str]
    right: list[str]
    edges: list[tuple[str, str]]
    M: int
    perms: dict[tuple[str, str], tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        L, R = set(self.left), set(self.right)
        if L & R:
            raise ValueError("left and right vertex sets overlap")
        for u, v in self.edges:
            if u not in L or v not in R:
                raise ValueError(f"edge ({u}, {v}) is not left-to-right")
            p = self.perms.get((u, v))
            if p is None or sorted(p) != list(range(1, self.M + 1)):
                raise ValueError(f"permutation on ({u}, {v}) is not a bijection of 1..{self.M}")

    def neighbors(self, u: str) -> list[str]:
        return [v for a, v in self.edges if a == u]

    def pi(self, u: str, v: str) -> tuple[int, ...]:
        return self.perms[(u, v)]

    def pi_inverse(self, u: str, v: str) -> tuple[int, ...]:
        """pi_{v->u}, derived from the stored pi_{u->v}."""
        p = self.perms[(u, v)]
        inv = [0] * self.M
        for i, j in enumerate(p, start=1):
            inv[j - 1] = i
        return tuple(inv)

    def is_biregular(self) -> bool:
        dl = {u: 0 for u in self.left}
        dr = {v: 0 for v in self.right}
        for u, v in self.edges:
            dl[u] += 1
            dr[v] += 1
        return len(set(dl.values())) == 1 and len(set(dr.values())) == 1


def labeling_value(inst: UGInstance, labeling: dict[str, int]) -> float:
    """Fraction of edges with pi_{u->v}(L(u)) = L(v)."""
    missing = [x for x in inst.left + inst.right if x not in labeling]
    if missing:
        raise ValueError(f"labeling misses vertices {missing[:5]}")
    ok = sum(inst.pi(u, v)[labeling[u] - 1] == labeling[v] for u, v in inst.edges)
    return ok / len(inst.edges)


def identity_ug_instance(n_left: int, n_right: int, M: int, degree: int | None = None) -> UGInstance:
    """Satisfiable instance with identity permutations; complete bipartite unless degree given."""
    left = [f"u{i}" for i in range(n_left)]
    right = [f"v{j}" for j in range(n_right)]
    if degree is None:
        edges = [(u, v) for u in left for v in right]
    else:
        if n_left != n_right:
            raise ValueError("circulant construction needs |U| = |V|")
        edges = [(left[i], right[(i + s) % n_right]) for i in range(n_left) for s in range(degree)]
    ident = tuple(range(1, M + 1))
    return UGInstance(left, right, edges, M, {e: ident for e in edges})


def random_ug_instance(n_left: int, n_right: int, M: int, degree: int, rng: np.random.Generator) -> UGInstance:
    """Circulant biregular instance with random permutations."""
    inst = identity_ug_instance(n_left, n_right, M, degree)
    perms = {e: tuple(int(x) + 1 for x in rng.permutation(M)) for e in inst.edges}
    return UGInstance(inst.left, inst.right, inst.edges, M, perms)


def _compose_index_map(sigma: tuple[int, ...], M: int) -> np.ndarray:
    """Map index(x) -> index(x o sigma) where (x o sigma)_i = x_{sigma(i)}."""
    idx = np.arange(1 << M)
    out = np.zeros_like(idx)
    for i in range(M):
        out |= ((idx >> (sigma[i] - 1)) & 1) << i
    return out


def ug_reduction_graph(inst: UGInstance, rho: float, loops: bool = True) -> WeightedGraph:
    """Exact edge distribution of the reduction graph on V x {-1,1}^M.

    u is uniform on U, v and w independent uniform neighbours of u, (x, y)
    rho-correlated; the edge joins (v, x o pi_{v->u}) and (w, y o pi_{w->u}).
    With loops=False the pair (x, y) is conditioned on x != y.
    """
    M = inst.M
    if M > MAX_UG_LABELS:
        raise LabelTooLarge(f"M={M} exceeds {MAX_UG_LABELS}")
    K = 1 << M
    xs, ys = np.meshgrid(np.arange(K), np.arange(K), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    d = np.bitwise_count((xs ^ ys).astype(np.uint64)).astype(np.int64)
    pxy = correlated_pair_probability(d, M, rho)
    if not loops:
        eq = xs == ys
        p_eq = float(pxy[eq].sum())
        pxy = np.where(eq, 0.0, pxy / (1.0 - p_eq))
    vindex = {v: i for i, v in enumerate(inst.right)}
    maps = {}
    us, vs, ws = [], [], []
    for u in inst.left:
        nbrs = inst.neighbors(u)
        if not nbrs:
            raise ValueError(f"left vertex {u} has no neighbours")
        scale = 1.0 / (len(inst.left) * len(nbrs) ** 2)
        for v in nbrs:
            if (u, v) not in maps:
                maps[(u, v)] = _compose_index_map(inst.pi_inverse(u, v), M)
        for v in nbrs:
            for w in nbrs:
                us.append(vindex[v] * K + maps[(u, v)][xs])
                vs.append(vindex[w] * K + maps[(u, w)][ys])
                ws.append(pxy * scale)
    labels = [f"{v}|{hypercube_label(i, M)}" for v in inst.right for i in range(K)]
    U, V, W = np.concatenate(us), np.concatenate(vs), np.concatenate(ws)
    keep = W > 0
    U, V, W = U[keep], V[keep], W[keep]
    allow = bool(np.any(U == V))
    return WeightedGraph.from_index_arrays(labels, U, V, W, allow_loops=allow or loops, normalize=True,
                                           metadata={"family": "ug_reduction", "rho": rho, "M": M,
                                                     "loops": loops})


def ug_dictator_assignment(inst: UGInstance, labeling: dict[str, int], k: int = 3) -> np.ndarray:
    """Rows f_v(x) = (x_{L(v)}, 0, ..., 0) in the reduction graph's vertex order."""
    M = inst.M
    K = 1 << M
    rows = np.zeros((len(inst.right) * K, k))
    pts = hypercube_points(M)
    for j, v in enumerate(inst.right):
        rows[j * K:(j + 1) * K, 0] = pts[:, labeling[v] - 1]
    return rows


def format_ug(inst: UGInstance) -> str:
    lines = [UG_HEADER, f"labels {inst.M}", f"left {len(inst.left)}", *inst.left,
             f"right {len(inst.right)}", *inst.right, f"edges {len(inst.edges)}"]
    lines += [f"{u} {v} " + " ".join(map(str, inst.pi(u, v))) for u, v in inst.edges]
    return "\n".join(lines) + "\n"


def parse_ug(text: str) -> UGInstance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != UG_HEADER:
        raise GraphFormatError(f"expected header {UG_HEADER!r}")
    try:
        pos = 1

        def block(tag):
            nonlocal pos
            name, count = lines[pos].split()
            if name != tag:
                raise GraphFormatError(f"expected '{tag}' line, got {lines[pos]!r}")
            pos += 1
            return int(count)

        M = block("labels")
        nl = block("left")
        left = lines[pos:pos + nl]
        pos += nl
        nr = block("right")
        right = lines[pos:pos + nr]
        pos += nr
        if pos < len(lines) and lines[pos].startswith("edges"):
            block("edges")
        edges, perms = [], {}
        for ln in lines[pos:]:
            parts = ln.split()
            if len(parts) != 2 + M:
                raise GraphFormatError(f"edge line needs {M} permutation entries: {ln!r}")
            e = (parts[0], parts[1])
            edges.append(e)
            perms[e] = tuple(int(x) for x in parts[2:])
    except (IndexError, ValueError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"malformed UG file: {exc}") from None
    try:
        return UGInstance(left, right, edges, M, perms)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def read_ug(path: str | Path) -> UGInstance:
    return parse_ug(Path(path).read_text())
