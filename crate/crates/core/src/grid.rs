//! Uniform cell-centred meshes in one or two dimensions.
//!
//! Cell `i` along an axis has centre `origin + (i + 1/2)·Δ` and owns the
//! half-open interval `[centre − Δ/2, centre + Δ/2)`. Two-dimensional values
//! are stored row-major with `x` varying fastest.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// A strided run of cells along one axis: `start + k·stride` for `k < len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub start: usize,
    pub stride: usize,
    pub len: usize,
}

impl Line {
    #[inline]
    pub fn at(&self, k: usize) -> usize {
        self.start + k * self.stride
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    origin: [f64; 2],
    extent: [f64; 2],
    cells: [usize; 2],
}

impl Grid {
    pub fn line(origin: f64, extent: f64, cells: usize) -> Result<Self> {
        Self::build(1, [origin, 0.0], [extent, 1.0], [cells, 1])
    }

    pub fn plane(origin: [f64; 2], extent: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Self::build(2, origin, extent, cells)
    }

    fn build(dim: usize, origin: [f64; 2], extent: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        for axis in 0..dim {
            if cells[axis] == 0 {
                return Err(Error::Invalid(format!("axis {axis} has no cells")));
            }
            if !(extent[axis].is_finite() && extent[axis] > 0.0) || !origin[axis].is_finite() {
                return Err(Error::Invalid(format!(
                    "axis {axis} needs a finite origin and positive extent"
                )));
            }
        }
        Ok(Grid {
            dim,
            origin,
            extent,
            cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn cells(&self, axis: Axis) -> usize {
        self.cells[axis.index()]
    }

    pub fn origin(&self, axis: Axis) -> f64 {
        self.origin[axis.index()]
    }

    pub fn extent(&self, axis: Axis) -> f64 {
        self.extent[axis.index()]
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        self.extent[axis.index()] / self.cells[axis.index()] as f64
    }

    pub fn dx(&self) -> f64 {
        self.spacing(Axis::X)
    }

    /// `Δy`; for a 1D grid this is 1 so that cell volumes reduce to `Δx`.
    pub fn dy(&self) -> f64 {
        self.spacing(Axis::Y)
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx()
        } else {
            self.dx() * self.dy()
        }
    }

    pub fn axes(&self) -> &'static [Axis] {
        if self.dim == 1 {
            &[Axis::X]
        } else {
            &[Axis::X, Axis::Y]
        }
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.origin[0] + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, j: usize) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            self.origin[1] + (j as f64 + 0.5) * self.dy()
        }
    }

    /// Centre of the (possibly ghost) cell at signed offsets along both axes.
    pub fn center_signed(&self, i: isize, j: isize) -> Point {
        let x = self.origin[0] + (i as f64 + 0.5) * self.dx();
        let y = if self.dim == 1 {
            0.0
        } else {
            self.origin[1] + (j as f64 + 0.5) * self.dy()
        };
        Point { x, y }
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point {
            x: self.x_center(i),
            y: self.y_center(j),
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.cells[0], index / self.cells[0])
    }

    pub fn center_of(&self, index: usize) -> Point {
        let (i, j) = self.coords(index);
        self.center(i, j)
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |k| self.center_of(k))
    }

    /// Number of grid lines parallel to `axis`.
    pub fn line_count(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.cells[1],
            Axis::Y => self.cells[0],
        }
    }

    pub fn grid_line(&self, axis: Axis, line: usize) -> Line {
        match axis {
            Axis::X => Line {
                start: line * self.cells[0],
                stride: 1,
                len: self.cells[0],
            },
            Axis::Y => Line {
                start: line,
                stride: self.cells[0],
                len: self.cells[1],
            },
        }
    }
}

/// Cell values on a grid at a given time. Values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "field has {} values but grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index, value });
        }
        Ok(Field { grid, values, time })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values, time }
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        let n = grid.len();
        Field::new(grid, alloc::vec![value; n], 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cellwise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(Point, f64) -> f64) -> Result<Field> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(self.grid.center_of(k), v))
            .collect();
        Field::new(self.grid.clone(), values, self.time)
    }
}

/// Point-samples `u0` at every cell centre.
pub fn sample_initial(grid: &Grid, u0: impl Fn(Point) -> f64) -> Result<Field> {
    let values = grid.centers().map(u0).collect();
    Field::new(grid.clone(), values, 0.0)
}

/// Point-samples the spatial part `r` of an affine `β` at every cell centre.
pub fn sample_r(grid: &Grid, r: impl Fn(Point) -> f64) -> Result<Field> {
    sample_initial(grid, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BoundaryPolicy {
    /// Ghost cells copy the adjacent edge cell.
    #[default]
    Outflow,
    Periodic,
    /// Fixed ghost values; 1D lines use `left`/`right` only.
    Dirichlet {
        left: f64,
        right: f64,
        bottom: f64,
        top: f64,
    },
}

impl BoundaryPolicy {
    pub fn validate(&self) -> Result<()> {
        if let BoundaryPolicy::Dirichlet {
            left,
            right,
            bottom,
            top,
        } = *self
        {
            if ![left, right, bottom, top].iter().all(|v| v.is_finite()) {
                return Err(Error::Invalid(
                    "Dirichlet boundary values must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// The fixed ghost values `(low, high)` along `axis`, if any.
    pub fn dirichlet_values(&self, axis: Axis) -> Option<(f64, f64)> {
        match *self {
            BoundaryPolicy::Dirichlet {
                left,
                right,
                bottom,
                top,
            } => Some(match axis {
                Axis::X => (left, right),
                Axis::Y => (bottom, top),
            }),
            _ => None,
        }
    }
}

/// Extends a line of cell values by `width` ghost cells on each side.
pub fn pad(line: &[f64], policy: &BoundaryPolicy, axis: Axis, width: usize) -> Vec<f64> {
    let n = line.len();
    let mut out = Vec::with_capacity(n + 2 * width);
    if n == 0 {
        return out;
    }
    let ghost = |k: isize| -> f64 {
        match *policy {
            BoundaryPolicy::Outflow => line[k.clamp(0, n as isize - 1) as usize],
            BoundaryPolicy::Periodic => line[k.rem_euclid(n as isize) as usize],
            BoundaryPolicy::Dirichlet { .. } => {
                let (lo, hi) = policy.dirichlet_values(axis).unwrap();
                if k < 0 {
                    lo
                } else {
                    hi
                }
            }
        }
    };
    out.extend((0..width).map(|g| ghost(g as isize - width as isize)));
    out.extend_from_slice(line);
    out.extend((0..width).map(|g| ghost((n + g) as isize)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn centers_are_affine_in_index() {
        let g = Grid::line(0.0, 6.0, 50).unwrap();
        for i in 0..50 {
            assert_eq!(g.x_center(i), (i as f64 + 0.5) * (6.0 / 50.0));
        }
        let p = Grid::plane([0.0, -1.0], [6.0, 2.0], [3, 4]).unwrap();
        assert_eq!(p.center(2, 3), Point::new(5.0, 0.75));
        assert_eq!(p.cell_volume(), 1.0);
    }

    #[test]
    fn sampling_uses_centres() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let f = sample_initial(&g, |p| p.x).unwrap();
        assert_eq!(f.values(), &[0.25, 0.75]);
        let c = sample_initial(&Grid::plane([0.0; 2], [6.0; 2], [5, 5]).unwrap(), |_| 2.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn sampling_rejects_non_finite() {
        let g = Grid::line(0.0, 1.0, 4).unwrap();
        let err = sample_initial(&g, |p| if p.x > 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 2, .. }));
    }

    #[test]
    fn sampling_own_interpolant_is_idempotent() {
        let g = Grid::line(-1.0, 3.0, 7).unwrap();
        let f = sample_initial(&g, |p| libm::sin(3.0 * p.x)).unwrap();
        let interp = |p: Point| {
            let i = libm::floor((p.x - g.origin(Axis::X)) / g.dx()) as usize;
            f.values()[i.min(6)]
        };
        assert_eq!(sample_initial(&g, interp).unwrap(), f);
    }

    #[test]
    fn pad_examples() {
        let l = [1.0, 2.0, 3.0];
        assert_eq!(
            pad(&l, &BoundaryPolicy::Outflow, Axis::X, 1),
            vec![1.0, 1.0, 2.0, 3.0, 3.0]
        );
        assert_eq!(
            pad(&l, &BoundaryPolicy::Periodic, Axis::X, 1),
            vec![3.0, 1.0, 2.0, 3.0, 1.0]
        );
        let d = BoundaryPolicy::Dirichlet {
            left: 0.0,
            right: 9.0,
            bottom: -1.0,
            top: -2.0,
        };
        assert_eq!(pad(&[1.0, 2.0], &d, Axis::X, 1), vec![0.0, 1.0, 2.0, 9.0]);
        assert_eq!(pad(&[1.0, 2.0], &d, Axis::Y, 1), vec![-1.0, 1.0, 2.0, -2.0]);
        assert_eq!(
            pad(&l, &BoundaryPolicy::Periodic, Axis::X, 4)[..4],
            [3.0, 1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn lines_cover_grid() {
        let g = Grid::plane([0.0; 2], [1.0; 2], [3, 2]).unwrap();
        let row = g.grid_line(Axis::X, 1);
        assert_eq!(
            (0..row.len).map(|k| row.at(k)).collect::<Vec<_>>(),
            vec![3, 4, 5]
        );
        let col = g.grid_line(Axis::Y, 2);
        assert_eq!(
            (0..col.len).map(|k| col.at(k)).collect::<Vec<_>>(),
            vec![2, 5]
        );
    }
}
