//! Parasitic-array (ESPAR) model: element currents under reactive loading,
//! far-field pattern sampling and the orthonormal beamspace decomposition
//! `P(θ) = Σ_n w_n·Φ_n(θ)`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Impedance seen at the driven port, ohms.
pub const SOURCE_RESISTANCE: f64 = 50.0;

const MAX_CONDITION: f64 = 1e12;
const RANK_TOLERANCE: f64 = 1e-10;

/// The geometry file shipped for the default five-element array.
pub const DEFAULT_GEOMETRY: &str = include_str!("../data/espar5.geom");

/// Contents of a geometry file.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub elements: usize,
    pub radius_wavelengths: f64,
    pub grid_points: usize,
    /// Row-major `elements × elements` admittance matrix, siemens.
    pub admittance: Vec<Complex64>,
}

impl GeometryConfig {
    /// Parses `key = value` lines followed by an `[admittance]` block.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elements = None;
        let mut radius = None;
        let mut grid = None;
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut in_matrix = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Config(format!("geometry line {}: {msg}", lineno + 1));
            if line == "[admittance]" {
                in_matrix = true;
                continue;
            }
            if in_matrix {
                let row = line
                    .split_whitespace()
                    .map(|tok| parse_complex(tok).map_err(&at))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let value = value.trim();
            match key.trim() {
                "elements" => elements = Some(parse_num::<usize>(value).map_err(&at)?),
                "radius_wavelengths" => radius = Some(parse_num::<f64>(value).map_err(&at)?),
                "grid_points" => grid = Some(parse_num::<usize>(value).map_err(&at)?),
                other => return Err(at(format!("unknown key {other:?}"))),
            }
        }
        let elements = elements.ok_or_else(|| Error::Config("geometry: missing `elements`".into()))?;
        let radius_wavelengths = radius.unwrap_or(0.25);
        let grid_points = grid.unwrap_or(360);
        if rows.len() != elements || rows.iter().any(|r| r.len() != elements) {
            return Err(Error::Config(format!(
                "geometry: admittance block must be {elements}×{elements}"
            )));
        }
        Ok(Self {
            elements,
            radius_wavelengths,
            grid_points,
            admittance: rows.into_iter().flatten().collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "elements = {}", self.elements);
        let _ = writeln!(out, "radius_wavelengths = {}", self.radius_wavelengths);
        let _ = writeln!(out, "grid_points = {}", self.grid_points);
        out.push_str("\n[admittance]\n");
        for row in self.admittance.chunks(self.elements.max(1)) {
            let cells: Vec<String> = row.iter().map(|c| format!("{:e},{:e}", c.re, c.im)).collect();
            let _ = writeln!(out, "{}", cells.join("  "));
        }
        out
    }

    pub fn build(&self) -> Result<EsparGeometry> {
        let y = DMatrix::from_row_slice(self.elements, self.elements, &self.admittance);
        EsparGeometry::circular(self.elements, self.radius_wavelengths, self.grid_points, y)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

fn parse_complex(tok: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| format!("expected re,im pair, got {tok:?}"))?;
    Ok(Complex64::new(parse_num(re.trim())?, parse_num(im.trim())?))
}

#[derive(Debug, Clone)]
pub struct EsparGeometry {
    admittance: DMatrix<Complex64>,
    angles: Vec<f64>,
    steering: DMatrix<Complex64>,
}

impl EsparGeometry {
    /// Arbitrary geometry from an admittance matrix and a `G × M` steering
    /// matrix sampled on the uniform grid `θ_g = 2πg/G`.
    pub fn new(admittance: DMatrix<Complex64>, steering: DMatrix<Complex64>) -> Result<Self> {
        let m = admittance.nrows();
        if m == 0 || admittance.ncols() != m {
            return Err(Error::InvalidParameter("admittance matrix must be square and non-empty".into()));
        }
        if steering.ncols() != m {
            return Err(Error::InvalidParameter(format!(
                "steering matrix has {} columns for {m} elements",
                steering.ncols()
            )));
        }
        let g = steering.nrows();
        if g < 8 * m {
            return Err(Error::InvalidParameter(format!(
                "angle grid of {g} points is too coarse for {m} elements (need ≥ {})",
                8 * m
            )));
        }
        let scale = admittance.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let asym = (&admittance - admittance.transpose()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(asym <= 1e-12 * scale) {
            return Err(Error::InvalidParameter("admittance matrix is not symmetric".into()));
        }
        let condition = condition_number(&admittance);
        if !(condition < MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        let angles = (0..g).map(|i| TAU * i as f64 / g as f64).collect();
        Ok(Self {
            admittance,
            angles,
            steering,
        })
    }

    /// Driven element at the origin (`a_0 = 1`) with `m − 1` parasitics evenly
    /// spaced on a circle; `a_k(θ) = exp(j·2π·r·cos(θ − ψ_k))`, `r` in wavelengths.
    pub fn circular(
        m: usize,
        radius_wavelengths: f64,
        grid_points: usize,
        admittance: DMatrix<Complex64>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("array needs at least one element".into()));
        }
        if !(radius_wavelengths.is_finite() && radius_wavelengths > 0.0) {
            return Err(Error::InvalidParameter(format!("radius {radius_wavelengths} must be positive")));
        }
        let g = grid_points;
        let steering = DMatrix::from_fn(g, m, |row, col| {
            if col == 0 {
                return Complex64::new(1.0, 0.0);
            }
            let theta = TAU * row as f64 / g as f64;
            let psi = TAU * (col - 1) as f64 / (m - 1) as f64;
            Complex64::from_polar(1.0, TAU * radius_wavelengths * (theta - psi).cos())
        });
        Self::new(admittance, steering)
    }

    /// The shipped five-element array.
    pub fn default_five_element() -> Self {
        GeometryConfig::parse(DEFAULT_GEOMETRY)
            .and_then(|c| c.build())
            .expect("shipped geometry is valid")
    }

    pub fn elements(&self) -> usize {
        self.admittance.nrows()
    }

    pub fn grid_points(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn admittance(&self) -> &DMatrix<Complex64> {
        &self.admittance
    }

    pub fn steering(&self) -> &DMatrix<Complex64> {
        &self.steering
    }
}

fn condition_number(a: &DMatrix<Complex64>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Varactor reactances on the parasitic elements, ohms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactiveLoads {
    x: Vec<f64>,
}

impl ReactiveLoads {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("reactance {bad} is not finite")));
        }
        Ok(Self { x })
    }

    pub fn reactances(&self) -> &[f64] {
        &self.x
    }
}

/// Element currents `i = v_s·(Y⁻¹ + X)⁻¹·e_0` with `X = diag(50, jX_1, …)`.
pub fn currents(geometry: &EsparGeometry, loads: &ReactiveLoads, v_s: Complex64) -> Result<Vec<Complex64>> {
    let m = geometry.elements();
    if loads.x.len() + 1 != m {
        return Err(Error::InvalidParameter(format!(
            "{} loads for {m} elements (need {})",
            loads.x.len(),
            m - 1
        )));
    }
    let z_coupling = geometry
        .admittance
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let mut system = z_coupling;
    system[(0, 0)] += SOURCE_RESISTANCE;
    for (k, &x) in loads.x.iter().enumerate() {
        system[(k + 1, k + 1)] += Complex64::new(0.0, x);
    }
    let condition = condition_number(&system);
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let mut rhs = DVector::zeros(m);
    rhs[0] = v_s;
    let i = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::IllConditioned { condition })?;
    Ok(i.iter().copied().collect())
}

/// Orthonormal basis patterns and the steering projections onto them.
#[derive(Debug, Clone)]
pub struct BasisSet {
    phi: DMatrix<Complex64>,
    projections: DMatrix<Complex64>,
}

impl BasisSet {
    /// `G × M`; column `n` samples `Φ_n`.
    pub fn patterns(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    /// `M × M`; entry `(m, n)` is `⟨a_m, Φ_n⟩`, so column `n` is `q_n`.
    pub fn projections(&self) -> &DMatrix<Complex64> {
        &self.projections
    }

    pub fn len(&self) -> usize {
        self.phi.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.ncols() == 0
    }
}

/// Grid inner product `(2π/G)·Σ_g f(θ_g)·g*(θ_g)`.
pub fn inner_product(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let s: Complex64 = f.iter().zip(g).map(|(a, b)| a * b.conj()).sum();
    s * (TAU / f.len() as f64)
}

/// Modified Gram–Schmidt over the steering columns.
pub fn basis_decompose(geometry: &EsparGeometry) -> Result<BasisSet> {
    let a = &geometry.steering;
    let (g, m) = a.shape();
    let mut phi = DMatrix::<Complex64>::zeros(g, m);
    for n in 0..m {
        let mut v: Vec<Complex64> = a.column(n).iter().copied().collect();
        for k in 0..n {
            let basis: Vec<Complex64> = phi.column(k).iter().copied().collect();
            let r = inner_product(&v, &basis);
            for (vi, bi) in v.iter_mut().zip(&basis) {
                *vi -= r * bi;
            }
        }
        let norm = inner_product(&v, &v).re.sqrt();
        if !(norm >= RANK_TOLERANCE) {
            return Err(Error::RankDeficient { element: n, norm });
        }
        for (row, vi) in v.iter().enumerate() {
            phi[(row, n)] = vi / norm;
        }
    }
    let columns = |mat: &DMatrix<Complex64>, c: usize| -> Vec<Complex64> { mat.column(c).iter().copied().collect() };
    let projections = DMatrix::from_fn(m, m, |row, col| inner_product(&columns(a, row), &columns(&phi, col)));
    Ok(BasisSet { phi, projections })
}

/// `P(θ_g) = iᵀ·a(θ_g)`.
pub fn pattern_from_currents(geometry: &EsparGeometry, currents: &[Complex64]) -> Result<Vec<Complex64>> {
    combine(&geometry.steering, currents, "currents")
}

/// `w_n = iᵀ·q_n`.
pub fn basis_weights(currents: &[Complex64], basis: &BasisSet) -> Result<Vec<Complex64>> {
    let m = basis.projections.nrows();
    if currents.len() != m {
        return Err(Error::InvalidParameter(format!("{} currents for {m} elements", currents.len())));
    }
    Ok((0..basis.len())
        .map(|n| currents.iter().enumerate().map(|(k, i)| i * basis.projections[(k, n)]).sum())
        .collect())
}

/// `P(θ_g) = Σ_n w_n·Φ_n(θ_g)`.
pub fn pattern_from_weights(weights: &[Complex64], basis: &BasisSet) -> Result<Vec<Complex64>> {
    combine(&basis.phi, weights, "weights")
}

fn combine(columns: &DMatrix<Complex64>, coeffs: &[Complex64], what: &str) -> Result<Vec<Complex64>> {
    if coeffs.len() != columns.ncols() {
        return Err(Error::InvalidParameter(format!(
            "{} {what} for {} columns",
            coeffs.len(),
            columns.ncols()
        )));
    }
    Ok((0..columns.nrows())
        .map(|g| coeffs.iter().enumerate().map(|(k, c)| c * columns[(g, k)]).sum())
        .collect())
}
