//! Gaussian kernel density of entity positions on a regular grid.
//!
//! Each sample contributes the exact integral of its kernel over every
//! cell, with the kernel reflected at the grid edges so that no mass leaves
//! the grid. Cell values are densities: their sum times the cell area
//! equals the number of samples.

use std::io::Write;
use std::path::Path;

use statrs::function::erf::erf;

use crate::env::trajectory::{EntityKind, TrajectoryRow};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KdeGrid {
    pub width: usize,
    pub height: usize,
    /// `[x_min, y_min, x_max, y_max]` of the grid.
    pub bounds: [f64; 4],
    pub bandwidth: f64,
    pub entity_kind: EntityKind,
    pub n_samples: usize,
    /// Row-major densities; row 0 is the lowest `y` band.
    pub cells: Vec<f64>,
}

impl KdeGrid {
    pub fn cell_area(&self) -> f64 {
        let [x0, y0, x1, y1] = self.bounds;
        (x1 - x0) / self.width as f64 * (y1 - y0) / self.height as f64
    }

    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.cells[row * self.width + col]
    }

    /// Cell sum times cell area.
    pub fn integral(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.cell_area()
    }

    /// `(col, row)` of the cell containing `(x, y)`, if inside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let [x0, y0, x1, y1] = self.bounds;
        if !(x0..x1).contains(&x) || !(y0..y1).contains(&y) {
            return None;
        }
        let c = ((x - x0) / (x1 - x0) * self.width as f64) as usize;
        let r = ((y - y0) / (y1 - y0) * self.height as f64) as usize;
        Some((c.min(self.width - 1), r.min(self.height - 1)))
    }

    /// Whitespace-separated rows, highest `y` first.
    pub fn write_matrix(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for row in (0..self.height).rev() {
            let line: Vec<String> = (0..self.width).map(|c| format!("{:.6e}", self.at(c, row))).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Binary greyscale raster scaled to the grid maximum, highest `y` first.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let max = self.cells.iter().copied().fold(0.0, f64::max);
        let mut bytes = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for row in (0..self.height).rev() {
            for c in 0..self.width {
                let v = if max > 0.0 { self.at(c, row) / max } else { 0.0 };
                bytes.push((v * 255.0).round() as u8);
            }
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Positions of every row of the given kind.
pub fn positions_of(rows: &[TrajectoryRow], kind: EntityKind) -> Vec<[f64; 2]> {
    rows.iter().filter(|r| r.entity_kind == kind).map(|r| [r.x, r.y]).collect()
}

/// Scott's rule for a 2-D isotropic kernel: `n^(-1/6)` times the mean of
/// the per-axis sample variances, square-rooted.
pub fn scott_bandwidth(samples: &[[f64; 2]]) -> f64 {
    let n = samples.len() as f64;
    let var = |k: usize| {
        let m = samples.iter().map(|p| p[k]).sum::<f64>() / n;
        samples.iter().map(|p| (p[k] - m).powi(2)).sum::<f64>() / (n - 1.0)
    };
    n.powf(-1.0 / 6.0) * ((var(0) + var(1)) / 2.0).sqrt()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Kernel mass of each of `n` equal cells spanning `[lo, hi]`, summed
/// over the mirror images of `x` in both edges, plus the index range of
/// non-zero entries.
fn axis_mass(x: f64, h: f64, lo: f64, hi: f64, n: usize, out: &mut [f64]) -> (usize, usize) {
    let len = hi - lo;
    let step = len / n as f64;
    let u = x - lo;
    let reach = 9.0 * h;
    let k_max = (reach / (2.0 * len)).ceil() as i64 + 1;
    out.iter_mut().for_each(|m| *m = 0.0);
    for k in -k_max..=k_max {
        for centre in [u + 2.0 * k as f64 * len, -u + 2.0 * k as f64 * len] {
            if centre < -reach || centre > len + reach {
                continue;
            }
            let mut prev = normal_cdf(-centre / h);
            for (j, m) in out.iter_mut().enumerate() {
                let next = normal_cdf(((j + 1) as f64 * step - centre) / h);
                *m += next - prev;
                prev = next;
            }
        }
    }
    let first = out.iter().position(|&m| m > 0.0).unwrap_or(n);
    let last = out.iter().rposition(|&m| m > 0.0).map_or(first, |i| i + 1);
    (first, last)
}

/// Density grid of `samples` over `bounds`. `bandwidth` defaults to
/// [`scott_bandwidth`].
pub fn kde_occupancy(
    samples: &[[f64; 2]],
    entity_kind: EntityKind,
    bandwidth: Option<f64>,
    width: usize,
    height: usize,
    bounds: [f64; 4],
) -> Result<KdeGrid> {
    if samples.is_empty() {
        return Err(Error::Input(format!("no {entity_kind:?} positions to estimate a density from")));
    }
    if width == 0 || height == 0 || !(bounds[2] > bounds[0] && bounds[3] > bounds[1]) {
        return Err(Error::Input("grid needs positive dimensions and extent".into()));
    }
    let h = match bandwidth {
        Some(h) => h,
        None if samples.len() > 1 => scott_bandwidth(samples),
        None => 0.0,
    };
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Input(format!(
            "bandwidth must be positive and finite, got {h}; pass one explicitly for degenerate samples"
        )));
    }
    let mut grid = KdeGrid {
        width,
        height,
        bounds,
        bandwidth: h,
        entity_kind,
        n_samples: samples.len(),
        cells: vec![0.0; width * height],
    };
    let inv_area = 1.0 / grid.cell_area();
    let mut mx = vec![0.0; width];
    let mut my = vec![0.0; height];
    for p in samples {
        let (c0, c1) = axis_mass(p[0], h, bounds[0], bounds[2], width, &mut mx);
        let (r0, r1) = axis_mass(p[1], h, bounds[1], bounds[3], height, &mut my);
        let total = mx[c0..c1].iter().sum::<f64>() * my[r0..r1].iter().sum::<f64>();
        if total <= 0.0 {
            return Err(Error::Input(format!("sample ({}, {}) has no kernel mass inside the grid", p[0], p[1])));
        }
        let scale = inv_area / total;
        for r in r0..r1 {
            let wy = my[r] * scale;
            let row = &mut grid.cells[r * width..(r + 1) * width];
            for c in c0..c1 {
                row[c] += mx[c] * wy;
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;
    use rand::Rng;

    const ARENA: [f64; 4] = [-5.11, -5.11, 5.11, 5.11];

    fn argmax(g: &KdeGrid) -> (usize, usize) {
        let i = g.cells.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        (i % g.width, i / g.width)
    }

    #[test]
    fn single_point_peaks_in_its_cell() {
        let g = kde_occupancy(&[[1.3, -2.2]], EntityKind::Prey, Some(0.1), 40, 40, ARENA).unwrap();
        assert_eq!(Some(argmax(&g)), g.cell_of(1.3, -2.2));
        assert!((g.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_clusters_give_two_maxima() {
        let mut s = vec![[-3.0, 0.0]; 50];
        s.extend(vec![[3.0, 0.0]; 50]);
        let g = kde_occupancy(&s, EntityKind::Predator, Some(0.5), 31, 31, ARENA).unwrap();
        let (ca, ra) = g.cell_of(-3.0, 0.0).unwrap();
        let (cb, rb) = g.cell_of(3.0, 0.0).unwrap();
        for (c, r) in [(ca, ra), (cb, rb)] {
            let v = g.at(c, r);
            for (dc, dr) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                assert!(v > g.at((c as i64 + dc) as usize, (r as i64 + dr) as usize));
            }
        }
        let mid = g.cell_of(0.0, 0.0).unwrap();
        assert!(g.at(mid.0, mid.1) < 1e-3 * g.at(ca, ra));
    }

    #[test]
    fn uniform_samples_give_a_flat_grid() {
        let mut rng = rng_from_seed(4);
        let s: Vec<[f64; 2]> = (0..100_000)
            .map(|_| [rng.random_range(-5.11..5.11), rng.random_range(-5.11..5.11)])
            .collect();
        let g = kde_occupancy(&s, EntityKind::Prey, Some(10.22 / 5.0), 32, 32, ARENA).unwrap();
        let max = g.cells.iter().copied().fold(f64::MIN, f64::max);
        let min = g.cells.iter().copied().fold(f64::MAX, f64::min);
        assert!(max / min < 2.0, "ratio {}", max / min);
        assert!((g.integral() / 100_000.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_and_degenerate_inputs_fail() {
        assert!(kde_occupancy(&[], EntityKind::Prey, None, 8, 8, ARENA).is_err());
        assert!(kde_occupancy(&[[0.0, 0.0]; 3], EntityKind::Prey, None, 8, 8, ARENA).is_err());
        assert!(kde_occupancy(&[[0.0, 0.0]], EntityKind::Prey, Some(-1.0), 8, 8, ARENA).is_err());
    }

    #[test]
    fn scott_rule_value() {
        let s = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]];
        // Per-axis sample variance 4/3.
        let want = 4f64.powf(-1.0 / 6.0) * (4.0f64 / 3.0).sqrt();
        assert!((scott_bandwidth(&s) - want).abs() < 1e-12);
    }

    #[test]
    fn writers() {
        let dir = tempfile::tempdir().unwrap();
        let g = kde_occupancy(&[[0.0, 4.0]], EntityKind::Prey, Some(0.3), 5, 4, ARENA).unwrap();
        let m = dir.path().join("g.txt");
        g.write_matrix(&m).unwrap();
        let text = std::fs::read_to_string(&m).unwrap();
        let rows: Vec<Vec<f64>> = text.lines().map(|l| l.split(' ').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].len(), 5);
        // High-y sample lands in the first printed row.
        assert!(rows[0][2] > rows[3][2]);
        let p = dir.path().join("g.pgm");
        g.write_pgm(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P5\n5 4\n255\n"));
        assert_eq!(bytes.len(), b"P5\n5 4\n255\n".len() + 20);
        assert_eq!(bytes[b"P5\n5 4\n255\n".len() + 2], 255);
    }
}
