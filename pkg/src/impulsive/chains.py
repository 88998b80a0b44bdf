"""Module providing pseudo-orbit graphs and chain recurrence.

The landing region is decomposed into a uniform grid of chart cells. Every
cell centre is mapped once by the Poincaré map and connected to all cells
within distance δ of its image. Chain recurrence at resolution (h, δ) is
then a property of the strongly connected components of that graph.
"""

import itertools
import logging
import math

import networkx as nx
import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from scipy.spatial.distance import directed_hausdorff

from .common import AnalysisError, ConfigError, NoReturn, check_param
from .flow import flow
from .semiflow import first_hit, poincare, poincare_full


# Maximum dyadic level of tiled cubes.
MAX_TILE_DEPTH = 8
# Points sampled per cube edge by box certificates.
EDGE_SAMPLES = 64
# Transition estimates above this value are flagged as unbounded.
UNBOUNDED_LIMIT = 1e4


class Grid:
    """Uniform cell decomposition of a section chart box.

    Cells are numbered in row-major order of their per-axis indices.
    """

    def __init__(self, section, h):
        """Initialize the grid.

        :param section: section whose chart box is decomposed
        :type section: impulsive.CrossSection
        :param h: maximum cell width
        :type h: float
        """
        check_param('h', h, is_num=True, gr=0)
        self._section = section
        self._lo = section.lo
        extent = section.hi - self._lo
        self._shape = tuple(max(1, math.ceil(e / h - 1e-9)) for e in extent)
        self._width = extent / np.array(self._shape)
        self._periodic = tuple(section.periodic)

    @property
    def section(self):
        return self._section

    @property
    def shape(self):
        """Return the number of cells per axis."""
        return self._shape

    @property
    def width(self):
        """Return the cell widths per axis."""
        return self._width.copy()

    @property
    def size(self):
        """Return the number of cells."""
        return int(np.prod(self._shape))

    def index(self, cid):
        return np.unravel_index(cid, self._shape)

    def center(self, cid):
        """Return the centre of a cell."""
        return self._lo + (np.array(self.index(cid)) + 0.5) * self._width

    def centers(self):
        """Return all cell centres in cell order."""
        return np.array([self.center(c) for c in range(self.size)])

    def bounds(self, cid):
        """Return the lower and upper corner of a cell."""
        lo = self._lo + np.array(self.index(cid)) * self._width
        return lo, lo + self._width

    def cell_of(self, u):
        """Return the cell containing u or None outside the chart box."""
        u = np.asarray(u, dtype=float)
        if not self._section.contains(u):
            return None
        idx = []
        for axis, n in enumerate(self._shape):
            i = math.floor((u[axis] - self._lo[axis]) / self._width[axis])
            idx.append(i % n if axis in self._periodic else min(max(i, 0), n - 1))
        return int(np.ravel_multi_index(idx, self._shape))

    def distance(self, u, cid):
        """Return the chart distance from u to a cell."""
        lo, hi = self.bounds(cid)
        d = np.zeros(len(lo))
        for axis in range(len(lo)):
            x = u[axis]
            if axis in self._periodic:
                c = 0.5 * (lo[axis] + hi[axis])
                off = abs(self._section.chart_delta(np.array([x]), np.array([c]))[0])
                d[axis] = max(0.0, off - 0.5 * self._width[axis])
            else:
                d[axis] = max(0.0, lo[axis] - x, x - hi[axis])
        return float(np.linalg.norm(d))

    def cells_within(self, u, radius):
        """Return the cells within chart distance radius of u."""
        u = np.asarray(u, dtype=float)
        ranges = []
        for axis, n in enumerate(self._shape):
            first = math.floor((u[axis] - radius - self._lo[axis]) / self._width[axis])
            last = math.floor((u[axis] + radius - self._lo[axis]) / self._width[axis])
            if axis in self._periodic:
                idx = sorted({i % n for i in range(first, last + 1)}) if last - first < n else list(range(n))
            else:
                idx = list(range(max(first, 0), min(last, n - 1) + 1))
            ranges.append(idx)
        cells = []
        for idx in itertools.product(*ranges):
            cid = int(np.ravel_multi_index(idx, self._shape))
            if self.distance(u, cid) <= radius:
                cells.append(cid)
        return cells

    def dilate(self, cells, m=1):
        """Return the cells at index distance at most m of the given cells."""
        out = set()
        offsets = list(itertools.product(range(-m, m + 1), repeat=len(self._shape)))
        for cid in cells:
            base = self.index(cid)
            for off in offsets:
                idx = []
                for axis, (i, o) in enumerate(zip(base, off)):
                    j = i + o
                    n = self._shape[axis]
                    if axis in self._periodic:
                        j %= n
                    elif not 0 <= j < n:
                        break
                    idx.append(j)
                else:
                    out.add(int(np.ravel_multi_index(idx, self._shape)))
        return out


@dataclass
class PseudoOrbitGraph:
    """Graph of δ-pseudo-orbits between landing grid cells.

    images maps every cell to the image of its centre or to the name of the
    error preventing a regular return.
    """

    grid: Grid
    graph: nx.DiGraph
    images: dict
    flight_times: dict
    delta: float
    resolution: float

    def adjacency_rows(self):
        """Return the sorted edge list."""
        return sorted(self.graph.edges())

    def cell_rows(self):
        """Return one row (cell_id, lower corner, upper corner, image status) per cell."""
        rows = []
        for cid in range(self.grid.size):
            lo, hi = self.grid.bounds(cid)
            image = self.images[cid]
            status = image if isinstance(image, str) else "return"
            rows.append([cid] + lo.tolist() + hi.tolist() + [status])
        return rows


def _image(sys, grid, cid):
    try:
        v, tau = poincare(sys, grid.center(cid))
    except AnalysisError as e:
        return cid, type(e).__name__, None
    return cid, v, tau


def build_graph(sys, h, delta, threads=None):
    """Build the δ-pseudo-orbit graph at grid resolution h.

    Cell images are computed in a thread pool and merged in cell order.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param h: grid resolution
    :type h: float
    :param delta: jump size δ
    :type delta: float
    :param threads: maximum number of worker threads
    :type threads: int
    :rtype: impulsive.PseudoOrbitGraph
    """
    check_param('h', h, is_num=True, gr=0)
    check_param('delta', delta, is_num=True, ge=0)
    grid = Grid(sys.Dhat, h)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(lambda c: _image(sys, grid, c), range(grid.size)))

    G = nx.DiGraph()
    G.add_nodes_from(range(grid.size))
    images, taus = {}, {}
    for cid, image, tau in results:
        images[cid] = image
        if tau is None: continue
        taus[cid] = tau
        for target in grid.cells_within(image, delta):
            G.add_edge(cid, target)

    logging.info(f"Chains: Built graph with {grid.size} cells and {G.number_of_edges()} edges at h={h}, δ={delta}.")
    return PseudoOrbitGraph(grid, G, images, taus, delta, h)


def chain_reaches(graph, a, b):
    """Return True if cell b is a chain iterate of cell a.

    A cell reaches itself only through a cycle.
    """
    G = graph.graph
    if a == b:
        return G.has_edge(a, a) or any(nx.has_path(G, s, a) for s in G.successors(a))
    return nx.has_path(G, a, b)


def chain_recurrent_cells(graph):
    """Return the sorted chain-recurrent cells.

    These are the cells of strongly connected components containing a cycle.
    """
    G = graph.graph
    cells = set()
    for comp in nx.strongly_connected_components(G):
        if len(comp) > 1 or any(G.has_edge(c, c) for c in comp):
            cells |= comp
    return sorted(cells)


@dataclass
class OmegaScale:
    h: float
    delta: float
    cells: list
    centers: np.ndarray
    nested: bool


@dataclass
class OmegaReport:
    """Chain-recurrent cells across decreasing scales."""

    scales: list = dc_field(default_factory=list)

    @property
    def nested(self):
        """Return True if every scale is nested in the previous one."""
        return all(s.nested for s in self.scales)

    def to_record(self):
        """Return the report as JSON compatible dictionary."""
        return {
            'nested': self.nested,
            'scales': [{'h': s.h, 'delta': s.delta, 'cell_count': len(s.cells), 'cells': s.cells,
                        'centers': s.centers.tolist(), 'nested': s.nested} for s in self.scales]}


def omega_estimate(sys, h_sequence, delta_sequence, threads=None):
    """Compute chain-recurrent cells at a sequence of scales.

    Each finer set is checked to lie in the coarser set dilated by one cell.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param h_sequence: decreasing grid resolutions
    :type h_sequence: list
    :param delta_sequence: decreasing jump sizes
    :type delta_sequence: list
    :rtype: impulsive.chains.OmegaReport
    :raises: ConfigError
    """
    if len(h_sequence) != len(delta_sequence) or not h_sequence:
        raise ConfigError("Scale sequences must be non-empty and of equal length.")
    report = OmegaReport()
    previous = None
    for h, delta in zip(h_sequence, delta_sequence):
        graph = build_graph(sys, h, delta, threads)
        cells = chain_recurrent_cells(graph)
        centers = np.array([graph.grid.center(c) for c in cells]).reshape(len(cells), sys.Dhat.chart_dim())
        nested = True
        if previous is not None:
            coarse_grid, coarse_cells = previous
            allowed = coarse_grid.dilate(coarse_cells)
            nested = all(coarse_grid.cell_of(c) in allowed for c in centers)
        report.scales.append(OmegaScale(h, delta, cells, centers, nested))
        previous = (graph.grid, cells)
    return report


def chain_recurrent_ambient(sys, graph, samples=32):
    """Return ambient points of the chain-recurrent set.

    The set consists of the flight arcs starting at the centres of the
    chain-recurrent cells and the equilibria of the field.

    :rtype: numpy.ndarray of shape (n, d)
    """
    points = [np.asarray(e, dtype=float) for e in sys.field.equilibria()]
    for cid in chain_recurrent_cells(graph):
        x = sys.Dhat.chart(graph.grid.center(cid))
        tau = graph.flight_times.get(cid)
        if tau is None: continue
        for t in np.linspace(0, tau, samples):
            points.append(flow(sys.field, x, t, sys.opts).endpoint)
    return np.array(points).reshape(-1, sys.field.dim)


def hausdorff_distance(A, B):
    """Return the Hausdorff distance between two point clouds."""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


@dataclass(frozen=True)
class Tile:
    level: int
    lo: tuple
    hi: tuple

    @property
    def measure(self):
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))


@dataclass
class TiledCube:
    """Cube tiled by a central tile and dyadic boundary rings.

    The standard tiling lives on ]−3, 3[^k; the tiles are mapped to the chart
    cube with the given centre by the homothety of ratio half_width / 3.
    Level −1 denotes the central tile.
    """

    center: np.ndarray
    half_width: float
    depth: int
    tiles: list

    @property
    def scale(self):
        return self.half_width / 3

    @property
    def extent(self):
        """Return the half-width of the tiled region."""
        return ring_radius(self.depth) * self.scale

    @property
    def measure(self):
        """Return the total measure of the tiles."""
        return sum(t.measure for t in self.tiles)


def ring_radius(i):
    """Return α_i = 1 + Σ_{j=0}^{i} 2^{−j}."""
    return 3 - 2.0 ** (-i)


def tile_cube(center, half_width, depth):
    """Tile a chart cube.

    The central tile is [−1, 1]^k. Tiles of level i have side 2^{−i} and the
    form Π[k(j)/2^i, (k(j) + 1)/2^i] with k(j) in [−2^i α_i, 2^i α_i − 1],
    at least one index at an end of that range.

    :param center: cube centre (chart point)
    :param half_width: half-width of the cube ]−3, 3[^k after scaling
    :type half_width: float
    :param depth: maximum dyadic level
    :type depth: int
    :rtype: impulsive.TiledCube
    :raises: ConfigError
    """
    check_param('depth', depth, is_int=True, ge=0, le=MAX_TILE_DEPTH)
    check_param('half_width', half_width, is_num=True, gr=0)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    k = len(center)
    s = half_width / 3
    tiles = [Tile(-1, tuple(center - s), tuple(center + s))]
    for i in range(depth + 1):
        m = round(2 ** i * ring_radius(i))
        side = 2.0 ** (-i)
        full = range(-m, m)
        indices = set()
        for j0 in range(k):
            for end in (-m, m - 1):
                ranges = [full] * k
                ranges[j0] = (end,)
                indices.update(itertools.product(*ranges))
        for idx in sorted(indices):
            lo = np.array(idx) * side
            tiles.append(Tile(i, tuple(center + s * lo), tuple(center + s * (lo + side))))
    return TiledCube(center, half_width, depth, tiles)


@dataclass
class BoxCertificate:
    """Disjointness certificate of the iterates of an inflated chart cube."""

    center: np.ndarray
    half_width: float
    N: int
    epsilon: float
    disjoint: bool
    witness: dict = None

    def to_record(self):
        """Return the certificate as JSON compatible dictionary."""
        return {'center': self.center.tolist(), 'half_width': self.half_width, 'N': self.N,
                'epsilon': self.epsilon, 'disjoint': self.disjoint, 'witness': self.witness}


def section_map(sys, u):
    """Apply f_I = I⁻¹∘P_I∘I to a D chart point.

    :raises: NoReturn, ChartError, GrazingHit, BoundaryHit
    """
    v = sys.impulse.apply(u)
    hit = first_hit(sys, sys.Dhat.chart(v), with_jacobian=False)
    if not hit.finite:
        raise NoReturn(f"No return to section '{sys.D.name}' from {np.asarray(u).tolist()}.")
    return hit.hit_chart


def _cube_samples(center, half_width):
    """Return samples of a cube: vertices, dense edges and a coarse interior."""
    k = len(center)
    axes = [np.arange(EDGE_SAMPLES + 1)] * k
    idx = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing='ij')], axis=-1)
    if k > 1:
        on_boundary = np.any((idx == 0) | (idx == EDGE_SAMPLES), axis=1)
        coarse = np.all(idx % (EDGE_SAMPLES // 8) == 0, axis=1)
        idx = idx[on_boundary | coarse]
    return center + half_width * (2 * idx / EDGE_SAMPLES - 1)


def _interval_overlap(a, b, periodic):
    """Return True if the bounding boxes of two sample sets overlap."""
    for axis in range(a.shape[1]):
        if axis in periodic:
            ref = a[0, axis]
            ua = ref + np.mod(a[:, axis] - ref + math.pi, 2 * math.pi) - math.pi
            ub = ref + np.mod(b[:, axis] - ref + math.pi, 2 * math.pi) - math.pi
            if ua.max() - ua.min() + ub.max() - ub.min() >= 2 * math.pi:
                continue
            # Check both unwrapped positions of b.
            if not any(ua.min() <= ub.max() + shift and ub.min() + shift <= ua.max() for shift in (-2 * math.pi, 0.0, 2 * math.pi)):
                return False
        elif a[:, axis].max() < b[:, axis].min() or b[:, axis].max() < a[:, axis].min():
            return False
    return True


def verify_box(sys, center, half_width, N, epsilon=0.0):
    """Certify that the iterates f_I^ℓ((1 + 2ε)C), 0 ≤ ℓ ≤ N, are disjoint.

    The inflated cube is sampled on its boundary and on a coarse interior
    grid. Iterates are compared through their bounding boxes and must stay in
    the interior of the D chart box.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param center: cube centre in the D chart
    :param half_width: cube half-width
    :type half_width: float
    :param N: order
    :type N: int
    :param epsilon: inflation factor ε
    :type epsilon: float
    :rtype: impulsive.BoxCertificate
    """
    check_param('N', N, is_int=True, ge=1)
    check_param('epsilon', epsilon, is_num=True, ge=0)
    D = sys.D
    center = np.atleast_1d(np.asarray(center, dtype=float))
    cert = BoxCertificate(center, half_width, N, epsilon, False)

    pts = _cube_samples(center, (1 + 2 * epsilon) * half_width)
    iterates = []
    for ell in range(N + 1):
        if ell > 0:
            try:
                pts = np.array([section_map(sys, u) for u in pts])
            except AnalysisError as e:
                cert.witness = {'kind': 'return', 'pair': [ell - 1, ell], 'error': type(e).__name__}
                return cert
        inside = all(D.contains(u, slack=0.0) and D.boundary_distance(u) > 0 for u in pts)
        if not inside:
            cert.witness = {'kind': 'containment', 'pair': [ell, ell]}
            return cert
        for prev, other in enumerate(iterates):
            if _interval_overlap(other, pts, D.periodic):
                cert.witness = {'kind': 'overlap', 'pair': [prev, ell]}
                return cert
        iterates.append(pts)
    cert.disjoint = True
    return cert


@dataclass
class TransitionReport:
    """Consecutive quotients of the transition matrices along an orbit."""

    norms: list
    estimates: list
    dtau_max: float

    @property
    def bound(self):
        """Return the maximum quotient norm."""
        return max(self.norms) if self.norms else 0.0

    @property
    def unbounded(self):
        """Return True if the transitions are flagged as unbounded."""
        values = self.norms + self.estimates
        return any(not math.isfinite(v) or v > UNBOUNDED_LIMIT for v in values)

    def to_record(self):
        return {'norms': self.norms, 'estimates': self.estimates, 'dtau_max': self.dtau_max,
                'bound': self.bound, 'unbounded': self.unbounded}


def transition_norm_bound(sys, u, N):
    """Bound the transitions T_k·T_{k−1}⁻¹ along the orbit of a D chart point.

    T_k = DI⁻¹·DP_I^k·DI is the derivative of f_I^k. Each quotient is
    accompanied by the product estimate of its factors
    ‖DI⁻¹‖·‖DI‖·‖locate‖·(‖Dφ‖ + ‖X‖·‖dτ₁‖)·‖chart‖·‖DI‖.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param u: D chart point
    :param N: number of steps
    :type N: int
    :rtype: impulsive.chains.TransitionReport
    :raises: AnalysisError
    """
    check_param('N', N, is_int=True, ge=1)
    I, D, Dhat = sys.impulse, sys.D, sys.Dhat
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k = D.chart_dim()

    DI0 = I.jacobian(u)
    v = I.apply(u)
    DPk = np.eye(k)
    T_prev = np.eye(k)
    h_prev = u
    norms, estimates, dtau_max = [], [], 0.0
    for _ in range(N):
        ret = poincare_full(sys, v)
        hit = ret.hit
        DPk = ret.jacobian @ DPk
        DIh = I.jacobian(hit.hit_chart)
        T = np.linalg.solve(DIh, DPk @ DI0)
        norms.append(float(np.linalg.norm(T @ np.linalg.inv(T_prev), 2)))

        dtau = float(np.linalg.norm(hit.dtau1))
        dphi = hit.hit_jacobian - np.outer(hit.velocity, hit.dtau1)
        est = (np.linalg.norm(np.linalg.inv(DIh), 2) * np.linalg.norm(DIh, 2)
               * np.linalg.norm(D.locate_jacobian(hit.point), 2)
               * (np.linalg.norm(dphi, 2) + np.linalg.norm(hit.velocity) * dtau)
               * np.linalg.norm(Dhat.chart_jacobian(v), 2) * np.linalg.norm(I.jacobian(h_prev), 2))
        estimates.append(float(est))
        dtau_max = max(dtau_max, dtau)

        T_prev, h_prev, v = T, hit.hit_chart, ret.point
    return TransitionReport(norms, estimates, dtau_max)
