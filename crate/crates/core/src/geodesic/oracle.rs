//! Brute-force shortest paths on a refined graph of the chessboard.
//!
//! Nodes sit on the square sides at spacing `1/N`, corners included. Inside
//! each square every pair of its boundary nodes is joined by a straight edge
//! weighted by the square's index; edges along a side cost the Euclidean
//! length, since every side borders a light square. The node sets for `N`
//! and `2N` are nested, so distances never increase under refinement.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{domain, Error, Result};
use crate::geodesic::{GeodesicRegime, GeodesicResult};
use crate::Point;

/// Default node budget before [`Error::Resource`] is raised.
pub const DEFAULT_NODE_CAP: usize = 4_000_000;

/// Which part of the plane the graph covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Light-vertex to light-vertex in the first two octants: the
    /// parallelogram between the two light diagonals and the two
    /// horizontal lines through the endpoints (mirrored for steep targets).
    /// Any other pair: the bounding box of the endpoints.
    Restricted,
    /// Bounding box of the endpoints widened by this many squares.
    Padded(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub refinement: u32,
    pub window: Window,
    pub node_cap: usize,
}

impl OracleOptions {
    pub fn new(refinement: u32) -> Self {
        OracleOptions {
            refinement,
            window: Window::Restricted,
            node_cap: DEFAULT_NODE_CAP,
        }
    }

    pub fn window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }
}

/// Shortest graph path with its optical length.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePath {
    pub length: f64,
    /// Breakpoints with collinear runs merged.
    pub points: Vec<Point>,
    /// Graph size, for diagnostics.
    pub nodes: usize,
}

/// Optical distance from `a` to `b` at refinement `n`, restricted window.
pub fn oracle_distance(a: Point, b: Point, beta: f64, n: u32) -> Result<f64> {
    Ok(oracle_path(a, b, beta, &OracleOptions::new(n))?.length)
}

/// Oracle geodesic from `a` to `b`, with the gap to refinement `n/2` as error bar.
pub fn oracle_geodesic(a: Point, b: Point, beta: f64, n: u32) -> Result<GeodesicResult> {
    let fine = oracle_path(a, b, beta, &OracleOptions::new(n))?;
    let error_bar = if n >= 2 {
        let coarse = oracle_distance(a, b, beta, n / 2)?;
        Some((coarse - fine.length).abs())
    } else {
        None
    };
    Ok(GeodesicResult {
        breakpoints: fine.points,
        optical_length: fine.length,
        regime: GeodesicRegime::Oracle,
        error_bar,
    })
}

#[derive(Debug, Clone, Copy)]
enum Region {
    Box,
    /// `0 <= y' <= h`, `0 <= x' − y' <= w` relative to the origin vertex.
    Shallow { ox: f64, oy: f64, w: f64, h: f64 },
    /// `0 <= x' <= h`, `0 <= y' − x' <= w`.
    Steep { ox: f64, oy: f64, w: f64, h: f64 },
}

const EPS: f64 = 1e-12;

impl Region {
    fn contains(&self, x: f64, y: f64) -> bool {
        let inside = |u: f64, v: f64, w: f64, h: f64| {
            v >= -EPS && v <= h + EPS && u - v >= -EPS && u - v <= w + EPS
        };
        match *self {
            Region::Box => true,
            Region::Shallow { ox, oy, w, h } => inside(x - ox, y - oy, w, h),
            Region::Steep { ox, oy, w, h } => inside(y - oy, x - ox, w, h),
        }
    }
}

fn integral(v: f64) -> Option<i64> {
    let r = v.round();
    ((v - r).abs() < 1e-12).then_some(r as i64)
}

fn light_vertex(p: Point) -> Option<(i64, i64)> {
    let (x, y) = (integral(p[0])?, integral(p[1])?);
    ((x - y).rem_euclid(2) == 0).then_some((x, y))
}

fn region_for(a: Point, b: Point, window: Window) -> Region {
    if window != Window::Restricted {
        return Region::Box;
    }
    if let (Some((ax, ay)), Some((bx, by))) = (light_vertex(a), light_vertex(b)) {
        let (dx, dy) = (bx - ax, by - ay);
        if 0 <= dy && dy <= dx {
            return Region::Shallow {
                ox: ax as f64,
                oy: ay as f64,
                w: (dx - dy) as f64,
                h: dy as f64,
            };
        }
        if 0 <= dx && dx < dy {
            return Region::Steep {
                ox: ax as f64,
                oy: ay as f64,
                w: (dy - dx) as f64,
                h: dx as f64,
            };
        }
    }
    Region::Box
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    y: f64,
    vline: Option<i64>,
    hline: Option<i64>,
}

struct Graph {
    nodes: Vec<Node>,
    /// Boundary nodes of each square, row-major over the square range.
    cells: Vec<Vec<u32>>,
    cx0: i64,
    cy0: i64,
    ncx: i64,
    ncy: i64,
}

impl Graph {
    fn cell_slot(&self, cx: i64, cy: i64) -> Option<usize> {
        let (i, j) = (cx - self.cx0, cy - self.cy0);
        (0 <= i && i < self.ncx && 0 <= j && j < self.ncy).then(|| (j * self.ncx + i) as usize)
    }

    /// Squares whose closure contains `node`.
    fn cells_of(&self, node: &Node) -> impl Iterator<Item = (i64, i64)> {
        let xs = match node.vline {
            Some(v) => [v - 1, v],
            None => {
                let f = node.x.floor() as i64;
                [f, f]
            }
        };
        let ys = match node.hline {
            Some(h) => [h - 1, h],
            None => {
                let f = node.y.floor() as i64;
                [f, f]
            }
        };
        let dedup_x = if xs[0] == xs[1] { 1 } else { 2 };
        let dedup_y = if ys[0] == ys[1] { 1 } else { 2 };
        (0..dedup_x).flat_map(move |i| (0..dedup_y).map(move |j| (xs[i], ys[j])))
    }
}

fn make_node(x: f64, y: f64) -> Node {
    Node {
        x,
        y,
        vline: integral(x),
        hline: integral(y),
    }
}

fn build(a: Point, b: Point, opts: &OracleOptions) -> Result<(Graph, u32, u32)> {
    let n = i64::from(opts.refinement);
    let nf = opts.refinement as f64;
    let region = region_for(a, b, opts.window);
    let margin = match opts.window {
        Window::Padded(m) => i64::from(m),
        Window::Restricted => 0,
    };
    let bx0 = a[0].min(b[0]).floor() as i64 - margin;
    let bx1 = a[0].max(b[0]).ceil() as i64 + margin;
    let by0 = a[1].min(b[1]).floor() as i64 - margin;
    let by1 = a[1].max(b[1]).ceil() as i64 + margin;

    let estimate = ((bx1 - bx0 + 1) * (by1 - by0) * n + (by1 - by0 + 1) * (bx1 - bx0) * n) as usize;
    if estimate > opts.node_cap {
        return Err(Error::Resource {
            nodes: estimate,
            cap: opts.node_cap,
        });
    }

    let mut nodes = Vec::new();
    let mut index: HashMap<(i64, i64), u32> = HashMap::new();
    let mut add = |gx: i64, gy: i64, nodes: &mut Vec<Node>| {
        let (x, y) = (gx as f64 / nf, gy as f64 / nf);
        if region.contains(x, y) {
            index.insert((gx, gy), nodes.len() as u32);
            nodes.push(Node {
                x,
                y,
                vline: (gx % n == 0).then(|| gx / n),
                hline: (gy % n == 0).then(|| gy / n),
            });
        }
    };
    for cy in by0..=by1 {
        for gx in bx0 * n..=bx1 * n {
            add(gx, cy * n, &mut nodes);
        }
    }
    for cx in bx0..=bx1 {
        for gy in by0 * n..=by1 * n {
            if gy % n != 0 {
                add(cx * n, gy, &mut nodes);
            }
        }
    }

    let endpoint = |p: Point, nodes: &mut Vec<Node>| -> u32 {
        let (gx, gy) = (p[0] * nf, p[1] * nf);
        if let (Some(ix), Some(iy)) = (integral(gx), integral(gy)) {
            if let Some(&id) = index.get(&(ix, iy)) {
                return id;
            }
        }
        nodes.push(make_node(p[0], p[1]));
        (nodes.len() - 1) as u32
    };
    let source = endpoint(a, &mut nodes);
    let target = endpoint(b, &mut nodes);

    let (cx0, cy0) = (bx0 - 1, by0 - 1);
    let (ncx, ncy) = (bx1 - bx0 + 2, by1 - by0 + 2);
    let mut graph = Graph {
        nodes,
        cells: vec![Vec::new(); (ncx * ncy) as usize],
        cx0,
        cy0,
        ncx,
        ncy,
    };
    for cy in cy0..cy0 + ncy {
        for cx in cx0..cx0 + ncx {
            let slot = graph.cell_slot(cx, cy).expect("in range");
            let (x0, y0) = (cx * n, cy * n);
            let ring = (0..n)
                .map(|i| (x0 + i, y0))
                .chain((0..n).map(|i| (x0 + n, y0 + i)))
                .chain((0..n).map(|i| (x0 + n - i, y0 + n)))
                .chain((0..n).map(|i| (x0, y0 + n - i)));
            graph.cells[slot] = ring.filter_map(|k| index.get(&k).copied()).collect();
        }
    }
    for id in [source, target] {
        let node = graph.nodes[id as usize];
        let on_lattice = integral(node.x * nf).zip(integral(node.y * nf));
        if on_lattice.is_some_and(|k| index.contains_key(&k)) {
            continue;
        }
        let owners: Vec<_> = graph.cells_of(&node).collect();
        for (cx, cy) in owners {
            if let Some(slot) = graph.cell_slot(cx, cy) {
                if !graph.cells[slot].contains(&id) {
                    graph.cells[slot].push(id);
                }
            }
        }
    }
    Ok((graph, source, target))
}

#[derive(Clone, Copy, PartialEq)]
struct State {
    cost: f64,
    node: u32,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path from `a` to `b` with index `beta` on the dark squares.
pub fn oracle_path(a: Point, b: Point, beta: f64, opts: &OracleOptions) -> Result<OraclePath> {
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(domain(format!("oracle needs beta >= 1, got {beta}")));
    }
    if opts.refinement == 0 {
        return Err(domain("oracle refinement must be at least 1"));
    }
    if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(domain("oracle endpoints must be finite"));
    }
    let (graph, source, target) = build(a, b, opts)?;
    let count = graph.nodes.len();

    let mut dist = vec![f64::INFINITY; count];
    let mut prev = vec![u32::MAX; count];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if node == target {
            break;
        }
        if cost > dist[node as usize] {
            continue;
        }
        let u = graph.nodes[node as usize];
        for (cx, cy) in graph.cells_of(&u) {
            let Some(slot) = graph.cell_slot(cx, cy) else {
                continue;
            };
            let index = if (cx + cy).rem_euclid(2) == 1 { beta } else { 1.0 };
            for &v in &graph.cells[slot] {
                if v == node {
                    continue;
                }
                let w = graph.nodes[v as usize];
                let same_side = (u.vline.is_some() && u.vline == w.vline)
                    || (u.hline.is_some() && u.hline == w.hline);
                let factor = if same_side { 1.0 } else { index };
                let next = cost + factor * (w.x - u.x).hypot(w.y - u.y);
                if next < dist[v as usize] {
                    dist[v as usize] = next;
                    prev[v as usize] = node;
                    heap.push(State { cost: next, node: v });
                }
            }
        }
    }

    let length = dist[target as usize];
    if !length.is_finite() {
        return Err(Error::Internal(format!(
            "oracle graph does not connect {a:?} to {b:?}"
        )));
    }
    let mut chain = vec![target];
    while let Some(&last) = chain.last() {
        if last == source {
            break;
        }
        chain.push(prev[last as usize]);
    }
    chain.reverse();
    let raw: Vec<Point> = chain
        .iter()
        .map(|&i| [graph.nodes[i as usize].x, graph.nodes[i as usize].y])
        .collect();
    Ok(OraclePath {
        length,
        points: merge_collinear(&raw),
        nodes: count,
    })
}

fn merge_collinear(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
            let (vx, vy) = (p[0] - b[0], p[1] - b[1]);
            let cross = ux * vy - uy * vx;
            let scale = ux.hypot(uy) * vx.hypot(vy);
            if cross.abs() <= 1e-12 * scale && ux * vx + uy * vy > 0.0 {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn uniform_medium_is_euclidean_on_lattice_directions() {
        let d = oracle_distance([0.0, 0.0], [3.0, 1.0], 1.0, 3).unwrap();
        assert!((d - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_light_diagonal() {
        let p = oracle_path([0.0, 0.0], [1.0, 1.0], 2.0, &OracleOptions::new(8)).unwrap();
        assert!((p.length - SQRT_2).abs() < 1e-14);
        assert_eq!(p.points, vec![[0.0, 0.0], [1.0, 1.0]]);
    }

    #[test]
    fn dark_square_is_avoided() {
        // Straight across the dark square (1,0) costs 1.5; around it costs 2.
        let d = oracle_distance([1.0, 0.0], [2.0, 1.0], 1.5, 4).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        let d = oracle_distance([1.0, 0.0], [2.0, 1.0], 1.3, 4).unwrap();
        assert!((d - 1.3 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn refinement_never_increases_distance() {
        let (a, b) = ([0.0, 0.0], [5.0, 1.0]);
        let mut last = f64::INFINITY;
        for n in [1, 2, 4, 8, 16] {
            let d = oracle_distance(a, b, 1.1, n).unwrap();
            assert!(d <= last + 1e-12);
            last = d;
        }
    }

    #[test]
    fn off_lattice_endpoints() {
        let d = oracle_distance([0.25, 0.5], [0.75, 0.5], 1.0, 2).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn node_cap_is_enforced() {
        let opts = OracleOptions {
            refinement: 64,
            window: Window::Padded(1),
            node_cap: 100,
        };
        assert!(matches!(
            oracle_path([0.0, 0.0], [4.0, 2.0], 1.2, &opts),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(oracle_distance([0.0, 0.0], [1.0, 1.0], 0.5, 4).is_err());
        assert!(oracle_distance([0.0, 0.0], [1.0, 1.0], 1.2, 0).is_err());
    }
}
