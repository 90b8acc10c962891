use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::MAX_QUBITS;

/// Checkerboard colour. Red qubits receive the `Z` gates of `Σ_Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flipped(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Connected, bipartite coupling graph with a designated center qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitGraph {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
    coloring: Vec<Color>,
    center: usize,
    positions: Option<Vec<(i32, i32)>>,
}

impl QubitGraph {
    /// Build and validate a graph. The checkerboard colouring is oriented
    /// so the center qubit is blue (not touched by `Σ_Z`).
    pub fn new(n_qubits: usize, edges: Vec<(usize, usize)>, center: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            for q in [a, b] {
                if q >= n_qubits {
                    return Err(Error::QubitIndex { index: q, n_qubits });
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on qubit {a}")));
            }
            let e = (a.min(b), a.max(b));
            if canon.contains(&e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            canon.push(e);
        }
        if center >= n_qubits {
            return Err(Error::QubitIndex { index: center, n_qubits });
        }
        let mut g = Self { n_qubits, edges: canon, coloring: Vec::new(), center, positions: None };
        if g.distances_from(0).iter().any(Option::is_none) {
            return Err(Error::Disconnected);
        }
        g.coloring = checkerboard_coloring(&g)?;
        if g.coloring[center] == Color::Red {
            g.coloring.iter_mut().for_each(|c| *c = c.flipped());
        }
        Ok(g)
    }

    /// Like [`QubitGraph::new`] but choosing the center automatically: the
    /// qubit of minimal eccentricity, lowest index on ties.
    pub fn with_graph_center(n_qubits: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n_qubits, edges, 0)?;
        let center = g.graph_center();
        g.set_center(center)?;
        Ok(g)
    }

    /// Open chain `0–1–…–(n−1)`, centered at `(n−1)/2`.
    pub fn chain(n: usize) -> Result<Self> {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        let mut g = Self::with_graph_center(n, edges)?;
        g.positions = Some((0..n as i32).map(|i| (0, i)).collect());
        Ok(g)
    }

    /// `rows × cols` square lattice with row-major indices.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        Self::grid_without(rows, cols, &[])
    }

    /// Square lattice with some sites removed; the remaining sites are
    /// relabelled in row-major order.
    pub fn grid_without(rows: usize, cols: usize, removed: &[(usize, usize)]) -> Result<Self> {
        let mut index = vec![vec![None; cols]; rows];
        let mut positions = Vec::new();
        for (r, row) in index.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                if !removed.contains(&(r, c)) {
                    *slot = Some(positions.len());
                    positions.push((r as i32, c as i32));
                }
            }
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let Some(a) = index[r][c] else { continue };
                if c + 1 < cols {
                    if let Some(b) = index[r][c + 1] {
                        edges.push((a, b));
                    }
                }
                if r + 1 < rows {
                    if let Some(b) = index[r + 1][c] {
                        edges.push((a, b));
                    }
                }
            }
        }
        let mut g = Self::with_graph_center(positions.len(), edges)?;
        g.positions = Some(positions);
        Ok(g)
    }

    /// Named lattice presets approximating the 6-, 8- and 10-qubit subsets
    /// of a 4×4 processor, plus `chainN`, `gridRxC` and `pair`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "n6" => Self::grid(2, 3),
            "n8" => Self::grid(2, 4),
            "n10" => Self::grid_without(3, 4, &[(0, 0), (2, 3)]),
            "pair" => Self::chain(2),
            "single" => Self::chain(1),
            _ => {
                if let Some(n) = name.strip_prefix("chain") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| Error::Config(format!("bad chain preset `{name}`")))?;
                    return Self::chain(n);
                }
                if let Some(dims) = name.strip_prefix("grid") {
                    if let Some((r, c)) = dims.split_once('x') {
                        if let (Ok(r), Ok(c)) = (r.parse(), c.parse()) {
                            return Self::grid(r, c);
                        }
                    }
                }
                Err(Error::Config(format!("unknown graph preset `{name}`")))
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coloring(&self) -> &[Color] {
        &self.coloring
    }

    pub fn color(&self, qubit: usize) -> Color {
        self.coloring[qubit]
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn positions(&self) -> Option<&[(i32, i32)]> {
        self.positions.as_deref()
    }

    /// Move the center qubit. The colouring is re-oriented so the new center
    /// is blue.
    pub fn set_center(&mut self, center: usize) -> Result<()> {
        if center >= self.n_qubits {
            return Err(Error::QubitIndex { index: center, n_qubits: self.n_qubits });
        }
        self.center = center;
        if self.coloring[center] == Color::Red {
            self.coloring.iter_mut().for_each(|c| *c = c.flipped());
        }
        Ok(())
    }

    /// Swap red and blue, e.g. to test a red center qubit.
    pub fn flip_colors(&mut self) {
        self.coloring.iter_mut().for_each(|c| *c = c.flipped());
    }

    /// Bit mask of red qubits (the support of `Σ_Z`).
    pub fn red_mask(&self) -> usize {
        self.coloring
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Color::Red)
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    pub fn neighbors(&self, qubit: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == qubit {
                Some(b)
            } else if b == qubit {
                Some(a)
            } else {
                None
            }
        })
    }

    fn distances_from(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_qubits];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            let d = dist[q].unwrap();
            for nb in self.neighbors(q) {
                if dist[nb].is_none() {
                    dist[nb] = Some(d + 1);
                    queue.push_back(nb);
                }
            }
        }
        dist
    }

    /// Breadth-first hop counts from `from`.
    pub fn graph_distance(&self, from: usize) -> Result<Vec<usize>> {
        if from >= self.n_qubits {
            return Err(Error::QubitIndex { index: from, n_qubits: self.n_qubits });
        }
        Ok(self.distances_from(from).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
    }

    pub fn eccentricity(&self, qubit: usize) -> usize {
        self.distances_from(qubit).into_iter().flatten().max().unwrap_or(0)
    }

    /// Minimal-eccentricity qubit, lowest index on ties.
    pub fn graph_center(&self) -> usize {
        (0..self.n_qubits).min_by_key(|&q| (self.eccentricity(q), q)).unwrap_or(0)
    }
}

/// Proper two-colouring by breadth-first traversal with qubit 0 blue.
pub fn checkerboard_coloring(graph: &QubitGraph) -> Result<Vec<Color>> {
    let n = graph.n_qubits();
    let mut colors: Vec<Option<Color>> = vec![None; n];
    for start in 0..n {
        if colors[start].is_some() {
            continue;
        }
        colors[start] = Some(Color::Blue);
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            let c = colors[q].unwrap();
            for nb in graph.neighbors(q) {
                match colors[nb] {
                    None => {
                        colors[nb] = Some(c.flipped());
                        queue.push_back(nb);
                    }
                    Some(cn) if cn == c => return Err(Error::NotBipartite(q.min(nb), q.max(nb))),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(colors.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::{Blue as B, Red as R};

    #[test]
    fn path_coloring() {
        let g = QubitGraph::new(4, vec![(0, 1), (1, 2), (2, 3)], 0).unwrap();
        assert_eq!(checkerboard_coloring(&g).unwrap(), vec![B, R, B, R]);
    }

    #[test]
    fn grid_coloring_is_balanced() {
        let g = QubitGraph::grid(2, 3).unwrap();
        let c = checkerboard_coloring(&g).unwrap();
        assert_eq!(c.iter().filter(|&&x| x == R).count(), 3);
        for &(a, b) in g.edges() {
            assert_ne!(c[a], c[b]);
            assert_ne!(g.color(a), g.color(b));
        }
    }

    #[test]
    fn triangle_is_not_bipartite() {
        let err = QubitGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], 0).unwrap_err();
        assert!(matches!(err, Error::NotBipartite(..)));
        assert!(err.to_string().contains("not bipartite"));
    }

    #[test]
    fn disconnected_and_malformed_graphs() {
        assert!(matches!(QubitGraph::new(3, vec![(0, 1)], 0), Err(Error::Disconnected)));
        assert!(QubitGraph::new(2, vec![(0, 2)], 0).is_err());
        assert!(QubitGraph::new(2, vec![(0, 0)], 0).is_err());
        assert!(QubitGraph::new(2, vec![(0, 1)], 5).is_err());
    }

    #[test]
    fn distances() {
        let g = QubitGraph::chain(3).unwrap();
        assert_eq!(g.graph_distance(0).unwrap(), vec![0, 1, 2]);
        let g = QubitGraph::grid(2, 2).unwrap();
        assert_eq!(g.graph_distance(0).unwrap(), vec![0, 1, 1, 2]);
        let g = QubitGraph::grid(2, 3).unwrap();
        assert_eq!(g.graph_distance(g.center()).unwrap().into_iter().max(), Some(2));
    }

    #[test]
    fn presets_are_valid() {
        for (name, n) in [("n6", 6), ("n8", 8), ("n10", 10), ("chain4", 4), ("grid3x3", 9), ("pair", 2)] {
            let g = QubitGraph::preset(name).unwrap();
            assert_eq!(g.n_qubits(), n, "{name}");
            assert_eq!(g.color(g.center()), B, "{name}");
            assert_eq!(g.center(), g.graph_center());
        }
        assert_eq!(QubitGraph::preset("n6").unwrap().center(), 1);
        assert_eq!(QubitGraph::preset("n10").unwrap().edges().len(), 13);
        assert!(QubitGraph::preset("hex").is_err());
    }
}
