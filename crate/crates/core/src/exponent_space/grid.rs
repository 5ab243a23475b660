use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite measure space: cell centers with positive cell volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dimension: usize,
    centers: Vec<f64>,
    weights: Vec<f64>,
    total_measure: f64,
}

impl Grid {
    /// `centers` is row-major, `dimension` coordinates per cell.
    pub fn new(dimension: usize, centers: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::invalid("grid", format!("dimension {dimension} not in {{1, 2}}")));
        }
        if weights.is_empty() {
            return Err(Error::invalid("grid", "no cells"));
        }
        if centers.len() != weights.len() * dimension {
            return Err(Error::invalid(
                "grid",
                format!(
                    "{} center coordinates for {} cells of dimension {dimension}",
                    centers.len(),
                    weights.len()
                ),
            ));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("grid", format!("cell {i} has weight {}", weights[i])));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("grid", "non-finite cell center"));
        }
        let total_measure = neumaier_sum(weights.iter().copied());
        Ok(Self {
            dimension,
            centers,
            weights,
            total_measure,
        })
    }

    /// Midpoint cells of a uniform partition of `[x0, x1]`.
    pub fn uniform_1d(x0: f64, x1: f64, cells: usize) -> Result<Self> {
        if !(x1 > x0) || cells == 0 {
            return Err(Error::invalid("grid", format!("interval [{x0}, {x1}] with {cells} cells")));
        }
        let h = (x1 - x0) / cells as f64;
        let centers = (0..cells).map(|i| x0 + (i as f64 + 0.5) * h).collect();
        Self::new(1, centers, vec![h; cells])
    }

    /// Midpoint cells of a uniform `nx × ny` partition of a rectangle.
    /// Cells are ordered with the x index running fastest.
    pub fn uniform_2d(origin: [f64; 2], extent: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        if !(extent[0] > 0.0 && extent[1] > 0.0) || cells[0] == 0 || cells[1] == 0 {
            return Err(Error::invalid("grid", "degenerate rectangle"));
        }
        let hx = extent[0] / cells[0] as f64;
        let hy = extent[1] / cells[1] as f64;
        let mut centers = Vec::with_capacity(2 * cells[0] * cells[1]);
        for j in 0..cells[1] {
            for i in 0..cells[0] {
                centers.push(origin[0] + (i as f64 + 0.5) * hx);
                centers.push(origin[1] + (j as f64 + 0.5) * hy);
            }
        }
        Self::new(2, centers, vec![hx * hy; cells[0] * cells[1]])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn center(&self, cell: usize) -> &[f64] {
        &self.centers[cell * self.dimension..(cell + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, cell: usize) -> f64 {
        self.weights[cell]
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// Same cells with every weight divided by the total measure.
    pub fn normalized(&self) -> Self {
        let m = self.total_measure;
        Self::new(
            self.dimension,
            self.centers.clone(),
            self.weights.iter().map(|w| w / m).collect(),
        )
        .expect("rescaling positive weights keeps them positive")
    }
}

pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn ensure_same_grid(a: &Arc<Grid>, b: &Arc<Grid>, what: &str) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(what.to_string()))
    }
}

/// Real- or vector-valued samples, one block of `components` values per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    components: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::invalid("grid function", "zero components"));
        }
        if values.len() != grid.len() * components {
            return Err(Error::invalid(
                "grid function",
                format!(
                    "{} values for {} cells × {components} components",
                    values.len(),
                    grid.len()
                ),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("grid function", format!("entry {i} is {}", values[i])));
        }
        Ok(Self {
            grid,
            components,
            values,
        })
    }

    pub fn scalar(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::scalar(grid, vec![value; n])
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self::scalar(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_scalar(&self) -> bool {
        self.components == 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.components..(cell + 1) * self.components]
    }

    /// Euclidean magnitude per cell.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values
            .chunks(self.components)
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// Largest cell magnitude; the essential supremum on a grid.
    pub fn sup_norm(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.components,
            self.values.iter().map(|v| f(*v)).collect(),
        )
    }

    /// Cell-wise product of two scalar functions.
    pub fn product(&self, other: &GridFunction) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid, "product of grid functions")?;
        if !self.is_scalar() || !other.is_scalar() {
            return Err(Error::Precondition("product needs scalar functions".into()));
        }
        Self::scalar(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        )
    }

    pub fn sum(&self, other: &GridFunction) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid, "sum of grid functions")?;
        if self.components != other.components {
            return Err(Error::Precondition("sum needs equal component counts".into()));
        }
        Self::new(
            self.grid.clone(),
            self.components,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        )
    }
}
