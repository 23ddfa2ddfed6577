use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use serde::Serialize;

use super::GeometryError;

/// A point of R^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    /// Checked constructor: rejects NaN and infinite coordinates.
    pub fn try_new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Vector(coords))
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// `(1 - t) self + t other`, exact at `t = 0` and `t = 1`.
    pub fn lerp(&self, other: &Vector, t: f64) -> Vector {
        if t == 0.0 {
            return self.clone();
        }
        if t == 1.0 {
            return other.clone();
        }
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| (1.0 - t) * a + t * b).collect())
    }

    /// `self + s * dir`.
    pub fn offset(&self, dir: &Vector, s: f64) -> Vector {
        Vector(self.0.iter().zip(&dir.0).map(|(a, d)| a + s * d).collect())
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Append a height coordinate: `(x, r)` in R^{n+1}.
    pub fn with_height(&self, r: f64) -> Vector {
        let mut c = self.0.clone();
        c.push(r);
        Vector(c)
    }

    /// Split `(x, r)` into `x` and `r`.
    pub fn split_height(&self) -> (Vector, f64) {
        let (last, head) = self.0.split_last().expect("split_height on an empty vector");
        (Vector(head.to_vec()), *last)
    }

    pub fn concat(&self, other: &Vector) -> Vector {
        let mut c = self.0.clone();
        c.extend_from_slice(&other.0);
        Vector(c)
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Closed `[a, b]` or open `]a, b[` line segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: Vector,
    pub b: Vector,
    pub closed: bool,
}

impl Segment {
    pub fn closed(a: Vector, b: Vector) -> Self {
        Segment { a, b, closed: true }
    }

    pub fn open(a: Vector, b: Vector) -> Self {
        Segment { a, b, closed: false }
    }

    pub fn admits(&self, t: f64) -> bool {
        if self.closed {
            (0.0..=1.0).contains(&t)
        } else {
            t > 0.0 && t < 1.0
        }
    }

    /// An open segment with equal endpoints has no points.
    pub fn is_empty(&self) -> bool {
        !self.closed && self.a == self.b
    }

    pub fn point(&self, t: f64) -> Option<Vector> {
        (self.admits(t) && !self.is_empty()).then(|| self.a.lerp(&self.b, t))
    }

    pub fn length(&self) -> f64 {
        self.a.dist(&self.b)
    }
}

/// Nonempty finite set of points sharing one ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    points: Vec<Vector>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector>) -> Result<Self, GeometryError> {
        let first = points.first().ok_or(GeometryError::Empty)?;
        let n = first.dim();
        for p in &points {
            if p.dim() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found: p.dim() });
            }
            if !p.is_finite() {
                return Err(GeometryError::NonFinite);
            }
        }
        Ok(PointCloud { points })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, GeometryError> {
        PointCloud::new(rows.iter().map(|r| Vector::new(r.to_vec())).collect())
    }

    /// One point per line, comma-separated decimals. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self, GeometryError> {
        let mut points = Vec::new();
        let mut width: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let coords = line
                .split(',')
                .map(|field| {
                    let field = field.trim();
                    field.parse::<f64>().map_err(|_| GeometryError::Csv {
                        line: idx + 1,
                        message: format!("`{field}` is not a decimal number"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::Csv { line: idx + 1, message: "non-finite coordinate".into() });
            }
            match width {
                None => width = Some(coords.len()),
                Some(w) if w != coords.len() => {
                    return Err(GeometryError::Csv {
                        line: idx + 1,
                        message: format!("expected {w} fields, found {}", coords.len()),
                    })
                }
                _ => {}
            }
            points.push(Vector::new(coords));
        }
        if points.is_empty() {
            return Err(GeometryError::Csv { line: 0, message: "no points".into() });
        }
        PointCloud::new(points)
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.points.iter()
    }

    pub fn centroid(&self) -> Vector {
        let n = self.ambient_dim();
        let mut c = vec![0.0; n];
        for p in &self.points {
            for (ci, pi) in c.iter_mut().zip(p.coords()) {
                *ci += pi;
            }
        }
        let m = self.points.len() as f64;
        Vector::new(c.into_iter().map(|x| x / m).collect())
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
