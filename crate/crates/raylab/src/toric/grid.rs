use super::Polytope;

/// Default requested spacing in dimension one.
pub const DEFAULT_RESOLUTION_1D: f64 = 1e-3;
/// Default requested spacing in dimension two.
pub const DEFAULT_RESOLUTION_2D: f64 = 1.0 / 256.0;

/// Regular grid over the bounding box of a polytope.
///
/// Each axis is split into a power-of-two number of cells, so dyadic points of
/// unit-width polytopes are nodes. In dimension two every cell is cut along
/// its rising diagonal into two triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    origin: [f64; 2],
    step: [f64; 2],
    cells: [usize; 2],
    in_p: Vec<bool>,
}

fn pow2_cells(width: f64, resolution: f64) -> usize {
    let mut m = 1usize;
    while width / (m as f64) > resolution * (1.0 + 1e-12) {
        m *= 2;
    }
    m
}

impl Grid {
    pub fn new(poly: &Polytope, resolution: f64) -> Grid {
        assert!(resolution > 0.0, "grid resolution must be positive");
        let (lo, hi) = poly.body().bbox();
        let dim = poly.dim();
        let mut origin = [0.0; 2];
        let mut step = [1.0; 2];
        let mut cells = [0usize; 2];
        for d in 0..dim {
            cells[d] = pow2_cells(hi[d] - lo[d], resolution);
            origin[d] = lo[d];
            step[d] = (hi[d] - lo[d]) / cells[d] as f64;
        }
        let mut g = Grid { dim, origin, step, cells, in_p: Vec::new() };
        let tol = 1e-12 * (1.0 + hi.iter().chain(&lo).fold(0.0f64, |a, x| a.max(x.abs())));
        g.in_p = (0..g.len()).map(|i| poly.contains(&g.node(i), tol)).collect();
        g
    }

    /// Grid with the default spacing for the polytope's dimension.
    pub fn default_for(poly: &Polytope) -> Grid {
        Grid::new(poly, if poly.dim() == 1 { DEFAULT_RESOLUTION_1D } else { DEFAULT_RESOLUTION_2D })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match self.dim {
            1 => self.cells[0] + 1,
            _ => (self.cells[0] + 1) * (self.cells[1] + 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn step(&self) -> [f64; 2] {
        self.step
    }

    /// Largest spacing along any axis.
    pub fn resolution(&self) -> f64 {
        self.step[..self.dim].iter().cloned().fold(0.0, f64::max)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * (self.cells[0] + 1)
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        let w = self.cells[0] + 1;
        (idx % w, idx / w)
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        match self.dim {
            1 => vec![self.origin[0] + idx as f64 * self.step[0]],
            _ => {
                let (i, j) = self.coords(idx);
                vec![self.origin[0] + i as f64 * self.step[0], self.origin[1] + j as f64 * self.step[1]]
            }
        }
    }

    pub fn in_polytope(&self, idx: usize) -> bool {
        self.in_p[idx]
    }

    /// Cell containing `p` (clamped to the grid) and local coordinates in `[0,1]`.
    pub fn locate(&self, p: &[f64]) -> ([usize; 2], [f64; 2]) {
        let mut cell = [0usize; 2];
        let mut frac = [0.0; 2];
        for d in 0..self.dim {
            let x = (p[d] - self.origin[d]) / self.step[d];
            let c = x.floor().clamp(0.0, (self.cells[d] - 1) as f64);
            cell[d] = c as usize;
            frac[d] = (x - c).clamp(0.0, 1.0);
        }
        (cell, frac)
    }

    /// Node triples of the triangulation (dimension two only).
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        assert_eq!(self.dim, 2);
        let mut out = Vec::with_capacity(2 * self.cells[0] * self.cells[1]);
        for j in 0..self.cells[1] {
            for i in 0..self.cells[0] {
                let a = self.index(i, j);
                let b = self.index(i + 1, j);
                let c = self.index(i + 1, j + 1);
                let d = self.index(i, j + 1);
                out.push([a, b, c]);
                out.push([a, c, d]);
            }
        }
        out
    }

    /// Neighbour pairs along grid lines and rising diagonals (dimension two),
    /// or consecutive nodes (dimension one).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if self.dim == 1 {
            for i in 0..self.cells[0] {
                out.push((i, i + 1));
            }
            return out;
        }
        for j in 0..=self.cells[1] {
            for i in 0..=self.cells[0] {
                let a = self.index(i, j);
                if i < self.cells[0] {
                    out.push((a, self.index(i + 1, j)));
                }
                if j < self.cells[1] {
                    out.push((a, self.index(i, j + 1)));
                }
                if i < self.cells[0] && j < self.cells[1] {
                    out.push((a, self.index(i + 1, j + 1)));
                }
            }
        }
        out
    }

    /// Collinear node triples `(a, b, c)` with `b` the midpoint, along every
    /// edge direction; used for discrete convexity checks.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        if self.dim == 1 {
            for i in 1..self.cells[0] {
                out.push((i - 1, i, i + 1));
            }
            return out;
        }
        let (nx, ny) = (self.cells[0], self.cells[1]);
        for j in 0..=ny {
            for i in 0..=nx {
                let b = self.index(i, j);
                if i >= 1 && i < nx {
                    out.push((self.index(i - 1, j), b, self.index(i + 1, j)));
                }
                if j >= 1 && j < ny {
                    out.push((self.index(i, j - 1), b, self.index(i, j + 1)));
                }
                if i >= 1 && i < nx && j >= 1 && j < ny {
                    out.push((self.index(i - 1, j - 1), b, self.index(i + 1, j + 1)));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_are_dyadic() {
        let g = Grid::default_for(&Polytope::unit_interval());
        assert_eq!(g.len(), 1025);
        assert_eq!(g.resolution(), 1.0 / 1024.0);
        let g2 = Grid::default_for(&Polytope::unit_square());
        assert_eq!(g2.cells(), [256, 256]);
    }

    #[test]
    fn locate_and_nodes() {
        let g = Grid::new(&Polytope::unit_square(), 0.25);
        let (c, f) = g.locate(&[0.3, 1.0]);
        assert_eq!(c, [1, 3]);
        assert!((f[0] - 0.2).abs() < 1e-12 && (f[1] - 1.0).abs() < 1e-12);
        assert_eq!(g.node(g.index(2, 3)), vec![0.5, 0.75]);
        assert_eq!(g.triangles().len(), 32);
    }

    #[test]
    fn triangle_polytope_mask() {
        let p = Polytope::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = Grid::new(&p, 0.5);
        let inside = (0..g.len()).filter(|&i| g.in_polytope(i)).count();
        assert_eq!(inside, 6);
    }
}
